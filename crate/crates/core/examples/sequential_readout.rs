//! Couple B first, then A. The A pointer reads <A> as left by the B phase,
//! and the pointer pair admits a separable certificate.

use vn_readout::engine::{build_initial, evolve_sequential, pointer_mean, Coupling};
use vn_readout::error::Result;
use vn_readout::linalg::Bipartition;
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::readability::{readability_check, sequential_decomposition};
use vn_readout::spin;

pub fn run_example() -> Result<()> {
    let grid = PointerGrid::fine();
    let pointers = [PointerSpec::new("A", grid, 0.0, 1.0)?, PointerSpec::new("B", grid, 0.0, 1.0)?];
    let system = spin::spin_state("s", 0.7, 0.0);
    let first = [Coupling::new(spin::sigma_z("s"), "B", 0.5, 1.0)?];
    let second = [Coupling::new(spin::sigma_x("s"), "A", 0.5, 1.0)?];
    let end = evolve_sequential(&build_initial(&system, &pointers)?, &first, &second)?;
    let initial = 0.5 * spin::sigma_x("s").expectation(&system)?.re;
    // reading sigma_z with spread 1 damps the sigma_x coherence by exp(-(g t)^2 / 2)
    println!(
        "A mean={:+.12}  g t <sigma_x>={initial:+.12}  dephased={:+.12}",
        pointer_mean(&end, "A")?,
        initial * f64::exp(-0.125)
    );

    let cert = sequential_decomposition(&system, &pointers, &first, &second)?;
    println!("{} terms, distance to the state {:.2e}", cert.terms.len(), cert.trace_distance_to(&end)?);
    println!("verdict: {}", readability_check(&end, &Bipartition::new(["A"], ["B"]))?.label());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
