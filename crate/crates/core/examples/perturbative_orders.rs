//! Truncated expansions of the evolution and their halving ratios.

use vn_readout::engine::{build_initial, evolve, expand_perturbative, Coupling, Order};
use vn_readout::error::Result;
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::spin;

pub fn run_example() -> Result<()> {
    let grid = PointerGrid::fine();
    let pointers = [PointerSpec::new("A", grid, 0.0, 1.0)?, PointerSpec::new("B", grid, 0.0, 1.0)?];
    let s0 = build_initial(&spin::spin_state("s", 1.0, 0.3), &pointers)?;
    let mut previous: Option<(f64, f64)> = None;
    for k in 0..7 {
        let gt = 0.1 / 2f64.powi(k);
        let couplings =
            [Coupling::new(spin::sigma_x("s"), "A", gt, 1.0)?, Coupling::new(spin::sigma_z("s"), "B", gt, 1.0)?];
        let exact = evolve(&s0, &couplings)?;
        let d1 = exact.max_difference(&expand_perturbative(&s0, &couplings, Order::First)?);
        let d2 = exact.max_difference(&expand_perturbative(&s0, &couplings, Order::Second)?);
        match previous {
            Some((p1, p2)) => {
                println!("gt={gt:.6}  first={d1:.3e} (x{:.3})  second={d2:.3e} (x{:.3})", p1 / d1, p2 / d2)
            }
            None => println!("gt={gt:.6}  first={d1:.3e}  second={d2:.3e}"),
        }
        previous = Some((d1, d2));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
