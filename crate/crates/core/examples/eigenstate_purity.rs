//! sigma_x measured on |up>: the pointer mean stays put while the spin
//! loses purity as the two branches separate.

use vn_readout::engine::{build_initial, evolve, pointer_mean, system_density, Coupling};
use vn_readout::error::Result;
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::spin;

pub fn run_example() -> Result<()> {
    let pointer = PointerSpec::new("A", PointerGrid::fine(), 0.0, 1.0)?;
    let start = build_initial(&spin::up("s"), &[pointer])?;
    for gt in [0.25, 0.5, 1.0, 2.0] {
        let end = evolve(&start, &[Coupling::new(spin::sigma_x("s"), "A", gt, 1.0)?])?;
        let purity = system_density(&end)?.purity();
        let closed = 0.5 * (1.0 + f64::exp(-gt * gt));
        println!("gt={gt:<5} mean={:+.2e} purity={purity:.10} closed form={closed:.10}", pointer_mean(&end, "A")?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
