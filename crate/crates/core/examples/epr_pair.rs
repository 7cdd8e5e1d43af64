//! Singlet pair with sigma_x read on one particle and sigma_z on the other.

use vn_readout::engine::{build_initial, evolve, pointer_mean, Coupling};
use vn_readout::error::Result;
use vn_readout::linalg::{Bipartition, DimensionSpec};
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::readability::readability_check;
use vn_readout::spin;

pub fn run_example() -> Result<()> {
    let pair = spin::singlet("e1", "e2");
    let dims = DimensionSpec::new([("e1", 2), ("e2", 2)])?;
    let cz = spin::correlation_z("e1", "e2")?;
    println!("<sigma_z sigma_z> = {:+.12}", cz.expectation(&pair)?.re);

    let grid = PointerGrid::fine();
    let pointers = [PointerSpec::new("A", grid, 0.0, 1.0)?, PointerSpec::new("B", grid, 0.0, 1.0)?];
    let couplings = [
        Coupling::new(spin::sigma_x("e1").embed(&dims)?, "A", 0.5, 1.0)?,
        Coupling::new(spin::sigma_z("e2").embed(&dims)?, "B", 0.5, 1.0)?,
    ];
    let end = evolve(&build_initial(&pair, &pointers)?, &couplings)?;
    println!("pointer means: A={:+.2e} B={:+.2e}", pointer_mean(&end, "A")?, pointer_mean(&end, "B")?);

    let verdict = readability_check(&end, &Bipartition::new(["A"], ["B"]))?;
    println!("verdict: {}", verdict.label());
    if let Some(cert) = verdict.certificate() {
        for t in &cert.terms {
            println!("  weight {:.12} at eigenvalues {:?}", t.weight, t.index);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
