//! The three evolution methods agree on a small grid.

use vn_readout::engine::{build_initial, evolve_with, Coupling, Method};
use vn_readout::error::Result;
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::spin;

pub fn run_example() -> Result<()> {
    let grid = PointerGrid::coarse();
    let pointers = [PointerSpec::new("A", grid, 0.0, 1.0)?, PointerSpec::new("B", grid, 0.0, 1.0)?];
    let start = build_initial(&spin::spin_state("s", 0.9, 0.4), &pointers)?;
    let couplings =
        [Coupling::new(spin::sigma_x("s"), "A", 1.0, 1.0)?, Coupling::new(spin::sigma_y("s"), "B", 0.7, 1.0)?];
    let shift = evolve_with(&start, &couplings, Method::Shift)?;
    let block = evolve_with(&start, &couplings, Method::MomentumBlock)?;
    let expm = evolve_with(&start, &couplings, Method::Expm)?;
    println!("shift vs expm: {:.2e}", shift.max_difference(&expm));
    println!("block vs expm: {:.2e}", block.max_difference(&expm));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
