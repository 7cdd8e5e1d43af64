//! Two pointers coupled at once to sigma_x and sigma_z of the same spin.

use vn_readout::engine::{build_initial, evolve, pointer_cross_mean, pointer_mean, Coupling};
use vn_readout::error::Result;
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::spin;

pub fn run_example() -> Result<()> {
    let grid = PointerGrid::fine();
    let pointers = [PointerSpec::new("A", grid, 0.0, 1.0)?, PointerSpec::new("B", grid, 0.0, 1.0)?];
    let system = spin::spin_state("s", std::f64::consts::FRAC_PI_3, 0.0);
    let start = build_initial(&system, &pointers)?;
    for gt in [0.4, 0.2, 0.1, 0.05] {
        let couplings =
            [Coupling::new(spin::sigma_x("s"), "A", gt, 1.0)?, Coupling::new(spin::sigma_z("s"), "B", gt, 1.0)?];
        let end = evolve(&start, &couplings)?;
        let (xa, xb) = (pointer_mean(&end, "A")?, pointer_mean(&end, "B")?);
        let xab = pointer_cross_mean(&end, "A", "B")?;
        // first-order predictions; the gaps come from [sigma_x, sigma_z]
        let (pa, pb) = (gt * system_mean(spin::sigma_x("s"), &system)?, gt * system_mean(spin::sigma_z("s"), &system)?);
        println!(
            "gt={gt:<5} xA-pred={:+.3e}  xB-pred={:+.3e}  <xA xB>-<xA><xB>={:+.3e}",
            xa - pa,
            xb - pb,
            xab - xa * xb
        );
    }
    Ok(())
}

fn system_mean(op: vn_readout::linalg::Operator, s: &vn_readout::linalg::StateVector) -> Result<f64> {
    Ok(op.expectation(s)?.re)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
