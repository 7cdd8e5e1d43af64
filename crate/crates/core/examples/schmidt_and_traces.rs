//! Building blocks: tensor products, partial traces, Schmidt coefficients
//! and the partial-transpose test on plain states.

use vn_readout::error::Result;
use vn_readout::linalg::{kron, reduced_density, schmidt, Bipartition};
use vn_readout::readability::ppt_min_eigenvalue;
use vn_readout::spin;

pub fn run_example() -> Result<()> {
    let bell = spin::bell_phi_plus("a", "b");
    let product = kron(&spin::up("a"), &spin::plus_x("b"))?;
    let cut = Bipartition::new(["a"], ["b"]);
    for (name, s) in [("bell", &bell), ("product", &product)] {
        let sc = schmidt(s, &cut)?;
        let rho_a = reduced_density(s, &["a"])?;
        println!(
            "{name:<8} schmidt rank={} entropy={:.6} purity(a)={:.6} ppt_min={:+.6}",
            sc.rank,
            sc.entropy(),
            rho_a.purity(),
            ppt_min_eigenvalue(&s.projector(), &cut)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
