//! Separability of the two-pointer state on a coarse grid: certificates for
//! commuting couplings, a negative partial transpose otherwise.

use vn_readout::engine::{build_initial, evolve, Coupling};
use vn_readout::error::Result;
use vn_readout::linalg::Bipartition;
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::readability::readability_check;
use vn_readout::spin::{self, Pauli};

pub fn run_example() -> Result<()> {
    let grid = PointerGrid::coarse();
    let pointers = [PointerSpec::new("A", grid, 0.0, 1.0)?, PointerSpec::new("B", grid, 0.0, 1.0)?];
    let start = build_initial(&spin::up("s"), &pointers)?;
    let cut = Bipartition::new(["A"], ["B"]);
    for (a, b, gt) in [(Pauli::Z, Pauli::Z, 1.0), (Pauli::X, Pauli::Z, 1.0), (Pauli::X, Pauli::Z, 1e-3)] {
        let couplings = [Coupling::new(a.operator("s"), "A", gt, 1.0)?, Coupling::new(b.operator("s"), "B", gt, 1.0)?];
        let verdict = readability_check(&evolve(&start, &couplings)?, &cut)?;
        let s = verdict.summary();
        println!(
            "A={a} B={b} gt={gt:<6} {:<12} ppt_min={:?} certificate distance={:?}",
            s.status, s.ppt_min_eigenvalue, s.trace_distance
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
