//! One pointer coupled to sigma_z: the pointer mean moves by g t <sigma_z>.

use vn_readout::engine::{build_initial, evolve, pointer_mean, system_density, Coupling};
use vn_readout::error::Result;
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::spin;

pub fn run_example() -> Result<()> {
    let pointer = PointerSpec::new("A", PointerGrid::fine(), 0.0, 1.0)?;
    for theta in [0.0, std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_2] {
        let system = spin::spin_state("s", theta, 0.0);
        let start = build_initial(&system, std::slice::from_ref(&pointer))?;
        let coupling = Coupling::new(spin::sigma_z("s"), "A", 0.2, 1.0)?;
        let end = evolve(&start, &[coupling])?;
        let mean = pointer_mean(&end, "A")?;
        let purity = system_density(&end)?.purity();
        println!(
            "theta={theta:.4}  pointer mean={mean:+.12}  predicted={:+.12}  system purity={purity:.6}",
            0.2 * theta.cos()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
