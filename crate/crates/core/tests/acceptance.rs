//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Reference values are closed forms or
//! oracles computed here, independent of the library's own predictions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_8};
use std::process::ExitCode;
use std::time::Instant;

use vn_readout::engine::{
    apparatus_density, build_initial, evolve, evolve_sequential, expand_perturbative, initial_info_expectation,
    pointer_cross_mean, pointer_mean, postselect, system_density, Coupling, Order, UnifiedState,
};
use vn_readout::error::Result;
use vn_readout::linalg::{schmidt, Bipartition, DimensionSpec, Operator};
use vn_readout::pointer::{PointerGrid, PointerSpec};
use vn_readout::readability::{ppt_min_eigenvalue, readability_check, sequential_decomposition};
use vn_readout::scenarios::{self, ScenarioConfig, ScenarioName};
use vn_readout::spin;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn pointers(grid: &PointerGrid, labels: &[&str]) -> Result<Vec<PointerSpec>> {
    labels.iter().map(|l| PointerSpec::new(*l, *grid, 0.0, 1.0)).collect()
}

fn two_pointer_state(grid: &PointerGrid, a: Operator, b: Operator, ga: f64, gb: f64) -> Result<UnifiedState> {
    let s0 = build_initial(&spin::up("s"), &pointers(grid, &["A", "B"])?)?;
    evolve(&s0, &[Coupling::new(a, "A", ga, 1.0)?, Coupling::new(b, "B", gb, 1.0)?])
}

fn pointer_cut() -> Bipartition {
    Bipartition::new(["A"], ["B"])
}

fn no_postselection() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for theta in [0.0, FRAC_PI_3, FRAC_PI_2] {
        for gt in [0.05, 0.2, 0.5] {
            let start = Instant::now();
            let s0 = build_initial(&spin::spin_state("s", theta, 0.0), &pointers(&PointerGrid::fine(), &["A"])?)?;
            let s = evolve(&s0, &[Coupling::new(spin::sigma_z("s"), "A", gt, 1.0)?])?;
            let mean = pointer_mean(&s, "A")?;
            slowest = slowest.max(start.elapsed().as_secs_f64());
            worst = worst.max((mean - gt * theta.cos()).abs());
        }
    }
    Ok(Outcome::new(
        worst <= 1e-8 && slowest < 1.0,
        format!("max |x - gt cos(theta)| = {worst:.2e} (tol 1e-8), slowest point {slowest:.3}s (< 1s)"),
    ))
}

/// Post-selected normalized mean divided by `gt` for `I = |+x>` and
/// `F = cos(pi/8)|up> + sin(pi/8)|down>`.
fn postselected_ratio(gt: f64) -> Result<(f64, UnifiedState)> {
    let s0 = build_initial(&spin::plus_x("s"), &pointers(&PointerGrid::fine(), &["A"])?)?;
    let s = evolve(&s0, &[Coupling::new(spin::sigma_z("s"), "A", gt, 1.0)?])?;
    let f = spin::spin_state("s", FRAC_PI_4, 0.0);
    let r = postselect(&s, &f)?.report.postselection.expect("post-selection readout");
    Ok((r.normalized_means["A"] / gt, s))
}

fn postselected_readout() -> Result<Outcome> {
    let start = Instant::now();
    let target = FRAC_PI_8.tan();
    let (r1, _) = postselected_ratio(0.01)?;
    let (r2, _) = postselected_ratio(0.001)?;
    let elapsed = start.elapsed().as_secs_f64();
    let (e1, e2) = ((r1 - target).abs() / target, (r2 - target).abs() / target);
    Ok(Outcome::new(
        e1 <= 1e-2 && e2 <= 1e-4 && elapsed < 1.0,
        format!(
            "mean/gt -> {target:.6}: rel err {e1:.2e} at gt=0.01 (tol 1e-2), {e2:.2e} at gt=0.001 (tol 1e-4), {elapsed:.3}s"
        ),
    ))
}

fn postselection_nonseparability() -> Result<Outcome> {
    let (_, s) = postselected_ratio(0.01)?;
    let sc = schmidt(s.state(), &Bipartition::new(["s"], ["A"]))?;
    let smallest = sc.coefficients.iter().take(2).copied().fold(f64::INFINITY, f64::min);
    Ok(Outcome::new(
        sc.rank == 2 && smallest > 1e-9,
        format!("Schmidt rank {} (want 2), second coefficient {smallest:.3e} (> 1e-9)", sc.rank),
    ))
}

fn simultaneous_cross_moment() -> Result<Outcome> {
    let grid = PointerGrid::fine();
    let cross = |gt: f64| -> Result<f64> {
        pointer_cross_mean(&two_pointer_state(&grid, spin::sigma_x("s"), spin::sigma_z("s"), gt, gt)?, "A", "B")
    };
    let (c1, c2) = (cross(0.05)?, cross(0.025)?);
    // both vanish identically for this input; a ratio of roundoff is not meaningful
    const NOISE_FLOOR: f64 = 1e-13;
    let scaling = c1.abs() / c2.abs() >= 8.0 || (c1.abs() <= NOISE_FLOOR && c2.abs() <= NOISE_FLOOR);
    // informational: with offset pointers the defect from the second-order
    // prediction x0A x0B + x0A gt<B> + x0B gt<A> is genuinely O(g^3)
    let offset = |gt: f64| -> Result<f64> {
        let i = spin::spin_state("s", FRAC_PI_3, 0.7);
        let ps = [PointerSpec::new("A", grid, 0.5, 1.0)?, PointerSpec::new("B", grid, -0.5, 1.0)?];
        let c = [Coupling::new(spin::sigma_x("s"), "A", gt, 1.0)?, Coupling::new(spin::sigma_z("s"), "B", gt, 1.0)?];
        let s = evolve(&build_initial(&i, &ps)?, &c)?;
        let (mx, mz) = (spin::sigma_x("s").expectation(&i)?.re, spin::sigma_z("s").expectation(&i)?.re);
        Ok(pointer_cross_mean(&s, "A", "B")? - (-0.25 + 0.5 * gt * mz - 0.5 * gt * mx))
    };
    let tilted_ratio = offset(0.05)? / offset(0.025)?;
    let zz =
        pointer_cross_mean(&two_pointer_state(&grid, spin::sigma_z("s"), spin::sigma_z("s"), 0.3, 0.7)?, "A", "B")?;
    let zz_defect = (zz - 0.3 * 0.7).abs();
    Ok(Outcome::new(
        c1.abs() <= 1e-6 && scaling && zz_defect <= 1e-8,
        format!(
            "x/z: |c(0.05)| = {:.2e} (<= 1e-6), |c(0.025)| = {:.2e} (ratio >= 8 or both <= 1e-13); z/z: |c - gA gB t^2| = {zz_defect:.2e} (<= 1e-8); offset-pointer defect halving ratio {tilted_ratio:.3} (info)",
            c1.abs(),
            c2.abs()
        ),
    ))
}

fn readability_verdicts() -> Result<Outcome> {
    let grid = PointerGrid::coarse();
    let start = Instant::now();
    let a = readability_check(
        &two_pointer_state(&grid, spin::sigma_x("s"), spin::sigma_z("s"), 1.0, 1.0)?,
        &pointer_cut(),
    )?;
    let elapsed = start.elapsed().as_secs_f64();
    let ppt_a = a.ppt_min_eigenvalue.unwrap_or(f64::NAN);
    let pass_a = a.is_entangled() && ppt_a < -1e-4 && elapsed < 60.0;

    let sb = two_pointer_state(&grid, spin::sigma_z("s"), spin::sigma_z("s"), 1.0, 1.0)?;
    let b = readability_check(&sb, &pointer_cut())?;
    let td_b = match b.certificate() {
        Some(c) => c.trace_distance_to(&sb)?,
        None => f64::NAN,
    };
    let pass_b = b.is_separable() && td_b <= 1e-8;

    let sc = two_pointer_state(&grid, spin::sigma_x("s"), spin::sigma_z("s"), 1e-3, 1e-3)?;
    let ppt_c = ppt_min_eigenvalue(&apparatus_density(&sc)?, &pointer_cut())?;
    let pass_c = ppt_c.abs() < 1e-8;
    Ok(Outcome::new(
        pass_a && pass_b && pass_c,
        format!(
            "(a) {} ppt {ppt_a:.3e} (< -1e-4) in {elapsed:.2}s; (b) {} certificate distance {td_b:.2e} (<= 1e-8); (c) |ppt| {:.2e} (< 1e-8)",
            a.label(),
            b.label(),
            ppt_c.abs()
        ),
    ))
}

/// `<phi_+|phi_->` of two Gaussians sampled at `+-a` on the grid, summed
/// directly.
fn overlap_oracle(grid: &PointerGrid, a: f64) -> f64 {
    let xs = grid.positions();
    let g = |c: f64| xs.iter().map(|x| (-(x - c) * (x - c) / 4.0).exp()).collect::<Vec<_>>();
    let (p, m) = (g(a), g(-a));
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    dot(&p, &m) / (dot(&p, &p) * dot(&m, &m)).sqrt()
}

fn eigenstate_purity() -> Result<Outcome> {
    let grid = PointerGrid::fine();
    let mut worst: f64 = 0.0;
    for gt in [0.25, 0.5, 1.0] {
        let s0 = build_initial(&spin::up("s"), &pointers(&grid, &["A"])?)?;
        let s = evolve(&s0, &[Coupling::new(spin::sigma_x("s"), "A", gt, 1.0)?])?;
        let purity = system_density(&s)?.purity();
        let closed = 0.5 * (1.0 + f64::exp(-gt * gt));
        let ov = overlap_oracle(&grid, gt);
        worst = worst.max((purity - closed).abs()).max((purity - 0.5 * (1.0 + ov * ov)).abs());
    }
    Ok(Outcome::new(worst <= 1e-6, format!("max purity defect vs closed form and grid oracle {worst:.2e} (tol 1e-6)")))
}

fn epr() -> Result<Outcome> {
    let pair = spin::singlet("e1", "e2");
    let cz = spin::correlation_z("e1", "e2")?.expectation(&pair)?.re;
    let dims = DimensionSpec::new([("e1", 2), ("e2", 2)])?;
    let s0 = build_initial(&pair, &pointers(&PointerGrid::fine(), &["A", "B"])?)?;
    let s = evolve(
        &s0,
        &[
            Coupling::new(spin::sigma_x("e1").embed(&dims)?, "A", 0.5, 1.0)?,
            Coupling::new(spin::sigma_z("e2").embed(&dims)?, "B", 0.5, 1.0)?,
        ],
    )?;
    let v = readability_check(&s, &pointer_cut())?;
    let weights = v.certificate().map(|c| c.weights()).unwrap_or_default();
    let weight_defect = weights.iter().map(|w| (w - 0.25).abs()).fold(0.0, f64::max);
    let (xa, xb) = (pointer_mean(&s, "A")?, pointer_mean(&s, "B")?);
    Ok(Outcome::new(
        (cz + 1.0).abs() <= 1e-12 && v.is_separable() && weights.len() == 4 && weight_defect <= 1e-10 && xa.abs() <= 1e-9 && xb.abs() <= 1e-9,
        format!(
            "<Cz> + 1 = {:.1e} (<= 1e-12); {} with {} terms, max |w - 0.25| {weight_defect:.1e} (<= 1e-10); |xA|, |xB| = {:.1e}, {:.1e} (<= 1e-9)",
            cz + 1.0,
            v.label(),
            weights.len(),
            xa.abs(),
            xb.abs()
        ),
    ))
}

fn sequential() -> Result<Outcome> {
    let grid = PointerGrid::fine();
    let ps = pointers(&grid, &["A", "B"])?;
    let i = spin::up("s");
    let (a, b) = (spin::sigma_x("s"), spin::sigma_z("s"));
    let first = [Coupling::new(b, "B", 0.5, 1.0)?];
    let second = [Coupling::new(a.clone(), "A", 0.5, 1.0)?];
    let s0 = build_initial(&i, &ps)?;
    let s = evolve_sequential(&s0, &first, &second)?;
    let xa_defect = (pointer_mean(&s, "A")? - 0.5 * a.expectation(&i)?.re).abs();
    let td = sequential_decomposition(&i, &ps, &first, &second)?.trace_distance_to(&s)?;
    // projector onto the +1 eigenvector of sigma_x commutes with the A coupling
    let f = spin::projector(&spin::plus_x("s"));
    let info = initial_info_expectation(&s0, &second, &f)?;
    let info_defect = (info - f.expectation(&i)?.re).abs();
    Ok(Outcome::new(
        xa_defect <= 1e-8 && td <= 1e-8 && info_defect <= 1e-10,
        format!(
            "|xA - gt<A>| {xa_defect:.1e} (<= 1e-8); certificate distance {td:.1e} (<= 1e-8); initial info defect {info_defect:.1e} (<= 1e-10)"
        ),
    ))
}

fn engine_cross_validation() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut invariants = true;
    for name in ScenarioName::ALL {
        let cfg = ScenarioConfig::defaults(name);
        worst = worst.max(scenarios::engine_cross_check(&cfg)?);
        let report = scenarios::run(&cfg)?;
        invariants &= report.pass.get("invariants").copied().unwrap_or(false);
    }
    Ok(Outcome::new(
        worst <= 1e-8 && invariants,
        format!("max SHIFT/EXPM amplitude difference {worst:.2e} (<= 1e-8) over all 7 defaults; norm/density invariants hold: {invariants}"),
    ))
}

fn perturbative_orders() -> Result<Outcome> {
    let grid = PointerGrid::fine();
    let s0 = build_initial(&spin::spin_state("s", FRAC_PI_3, 0.0), &pointers(&grid, &["A", "B"])?)?;
    let defects = |gt: f64| -> Result<(f64, f64)> {
        let c = [Coupling::new(spin::sigma_x("s"), "A", gt, 1.0)?, Coupling::new(spin::sigma_z("s"), "B", gt, 1.0)?];
        let exact = evolve(&s0, &c)?.state().amplitudes().clone();
        let d =
            |o: Order| -> Result<f64> { Ok((&exact - expand_perturbative(&s0, &c, o)?.state().amplitudes()).norm()) };
        Ok((d(Order::First)?, d(Order::Second)?))
    };
    let gts: Vec<f64> = (0..7).map(|k| 0.1 / 2f64.powi(k)).collect();
    let ds = gts.iter().map(|&g| defects(g)).collect::<Result<Vec<_>>>()?;
    let r1: Vec<f64> = ds.windows(2).map(|w| w[0].0 / w[1].0).collect();
    let r2: Vec<f64> = ds.windows(2).map(|w| w[0].1 / w[1].1).collect();
    let range = |r: &[f64]| (r.iter().copied().fold(f64::INFINITY, f64::min), r.iter().copied().fold(0.0, f64::max));
    let ((lo1, hi1), (lo2, hi2)) = (range(&r1), range(&r2));
    Ok(Outcome::new(
        lo1 >= 3.5 && hi1 <= 4.5 && lo2 >= 7.0 && hi2 <= 9.0,
        format!("gt 0.1 -> 0.1/64: order-1 ratios [{lo1:.3}, {hi1:.3}] in [3.5, 4.5]; order-2 ratios [{lo2:.3}, {hi2:.3}] in [7, 9]"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("no post-selection readout", no_postselection),
        ("post-selected readout", postselected_readout),
        ("post-selection non-separability", postselection_nonseparability),
        ("simultaneous cross moment", simultaneous_cross_moment),
        ("readability verdicts", readability_verdicts),
        ("eigenstate purity", eigenstate_purity),
        ("EPR pair", epr),
        ("sequential coupling", sequential),
        ("engine cross-validation", engine_cross_validation),
        ("perturbative orders", perturbative_orders),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = check().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        failed += usize::from(!outcome.pass);
        println!("{} [{:>2}] {name}: {}", if outcome.pass { "PASS" } else { "FAIL" }, k + 1, outcome.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
