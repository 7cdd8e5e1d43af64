//! Post-selection turns the pointer shift into g t Re(weak value).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use vn_readout::engine::{build_initial, evolve, postselect, weak_value, Coupling};
use vn_readout::error::Result;
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::spin;

pub fn run_example() -> Result<()> {
    let a = spin::sigma_z("s");
    let initial = spin::spin_state("s", FRAC_PI_2, 0.0);
    let fin = spin::spin_state("s", FRAC_PI_4, 0.0);
    let wv = weak_value(&a, &initial, &fin)?;
    println!("weak value = {:.9} {:+.9}i", wv.value.re, wv.value.im);

    let pointer = PointerSpec::new("A", PointerGrid::fine(), 0.0, 1.0)?;
    let start = build_initial(&initial, &[pointer])?;
    for gt in [0.1, 0.01, 0.001] {
        let end = evolve(&start, &[Coupling::new(a.clone(), "A", gt, 1.0)?])?;
        let ps = postselect(&end, &fin)?;
        let r = ps.report.postselection.expect("post-selected readout");
        let ratio = r.normalized_means["A"] / gt;
        // the relative defect shrinks linearly with g t
        println!(
            "gt={gt:<6} P(F)={:.6}  mean/gt={ratio:.9}  relative defect={:.2e}",
            r.probability,
            (ratio - wv.value.re).abs() / wv.value.re
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
