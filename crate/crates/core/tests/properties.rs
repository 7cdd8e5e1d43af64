//! Property tests over randomly drawn inputs.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use vn_readout::engine::{apparatus_density, build_initial, evolve, pointer_mean, weak_value, Coupling};
use vn_readout::linalg::{
    eigh, kron, partial_trace, reduced_density, schmidt, unitary_from_generator, Bipartition, DensityMatrix,
    DimensionSpec, Operator, StateVector, C64,
};
use vn_readout::pointer::{gaussian_state, momentum_operator, translate, PointerGrid, PointerSpec};
use vn_readout::readability::{ppt_min_eigenvalue, readability_check};
use vn_readout::scenarios::{self, ScenarioConfig, ScenarioName};
use vn_readout::spin;

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im)), n)
}

fn hermitian_matrix(n: usize) -> impl Strategy<Value = DMatrix<C64>> {
    complex_entries(n * n).prop_map(move |v| {
        let m = DMatrix::from_vec(n, n, v);
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    })
}

fn state_on(dims: DimensionSpec) -> impl Strategy<Value = StateVector> {
    complex_entries(dims.total()).prop_map(move |v| StateVector::normalize(dims.clone(), DVector::from_vec(v)).unwrap())
}

fn density_on(dims: DimensionSpec) -> impl Strategy<Value = DensityMatrix> {
    let n = dims.total();
    complex_entries(n * n).prop_map(move |v| {
        let m = DMatrix::from_vec(n, n, v);
        let mut rho = &m * m.adjoint();
        let tr = rho.trace();
        rho /= tr;
        DensityMatrix::new(dims.clone(), rho).unwrap()
    })
}

/// Random unitary on `dims` as the exponential of a random Hermitian matrix.
fn unitary_on(dims: DimensionSpec) -> impl Strategy<Value = Operator> {
    hermitian_matrix(dims.total())
        .prop_map(move |h| unitary_from_generator(&Operator::hermitian(dims.clone(), h).unwrap(), 1.0).unwrap())
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn trace_norm(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().map(|v| v.abs()).sum()
}

fn pair(a: usize, b: usize) -> DimensionSpec {
    DimensionSpec::new([("a", a), ("b", b)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_of_product_recovers_factor(
        (rho_a, rho_b) in (2usize..=4, 2usize..=4).prop_flat_map(|(m, n)| (
            density_on(DimensionSpec::single("a", m).unwrap()),
            density_on(DimensionSpec::single("b", n).unwrap()),
        ))
    ) {
        let joint = kron(&rho_a, &rho_b).unwrap();
        let kept = partial_trace(&joint, &["a"]).unwrap();
        prop_assert!(trace_norm(&(kept.matrix() - rho_a.matrix())) <= 1e-10);
        prop_assert!((kept.trace() - joint.trace()).abs() <= 1e-12);
    }

    #[test]
    fn generated_unitaries_preserve_norm(
        (h, psi, s) in (2usize..=6).prop_flat_map(|n| (
            hermitian_matrix(n),
            state_on(DimensionSpec::single("q", n).unwrap()),
            -5.0f64..5.0,
        ))
    ) {
        let dims = psi.dims().clone();
        let u = unitary_from_generator(&Operator::hermitian(dims, h).unwrap(), s).unwrap();
        prop_assert!((u.apply(&psi).unwrap().norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn eigh_reconstructs(h in (1usize..=8).prop_flat_map(hermitian_matrix), scale in 0.01f64..100.0) {
        let h = h * C64::new(scale, 0.0);
        let n = h.nrows();
        let op = Operator::hermitian(DimensionSpec::single("q", n).unwrap(), h.clone()).unwrap();
        let eig = eigh(&op).unwrap();
        let err = max_abs(&(eig.reconstruct() - &h));
        prop_assert!(err <= 1e-10 * max_abs(&h).max(1.0));
    }

    #[test]
    fn schmidt_rank_is_local_unitary_invariant(
        (psi, ua, ub, rank) in (2usize..=3, 2usize..=4, 1usize..=2).prop_flat_map(|(m, n, r)| (
            // a sum of r random product states has Schmidt rank r almost surely
            prop::collection::vec((state_on(DimensionSpec::single("a", m).unwrap()), state_on(DimensionSpec::single("b", n).unwrap())), r),
            unitary_on(DimensionSpec::single("a", m).unwrap()),
            unitary_on(DimensionSpec::single("b", n).unwrap()),
            Just(r),
        ))
    ) {
        let dims = pair(ua.dims().total(), ub.dims().total());
        let mut amps = DVector::zeros(dims.total());
        for (a, b) in &psi {
            amps += kron(a, b).unwrap().amplitudes();
        }
        let state = StateVector::normalize(dims.clone(), amps).unwrap();
        let u = kron(&ua, &ub).unwrap();
        let rotated = StateVector::new(dims, u.matrix() * state.amplitudes()).unwrap();
        let cut = Bipartition::new(["a"], ["b"]);
        let before = schmidt(&state, &cut).unwrap().rank;
        prop_assert_eq!(before, rank);
        prop_assert_eq!(schmidt(&rotated, &cut).unwrap().rank, before);
    }

    #[test]
    fn ppt_value_is_local_unitary_invariant(
        (rho, ua, ub) in (2usize..=3, 2usize..=3).prop_flat_map(|(m, n)| (
            density_on(pair(m, n)),
            unitary_on(DimensionSpec::single("a", m).unwrap()),
            unitary_on(DimensionSpec::single("b", n).unwrap()),
        ))
    ) {
        let cut = Bipartition::new(["a"], ["b"]);
        let u = kron(&ua, &ub).unwrap();
        let rotated = DensityMatrix::new(rho.dims().clone(), u.matrix() * rho.matrix() * u.matrix().adjoint()).unwrap();
        let p0 = ppt_min_eigenvalue(&rho, &cut).unwrap();
        let p1 = ppt_min_eigenvalue(&rotated, &cut).unwrap();
        prop_assert!((p0 - p1).abs() <= 1e-10);
    }

    #[test]
    fn weak_value_is_linear(
        (a, b, i, f, alpha, beta) in (
            hermitian_matrix(2),
            hermitian_matrix(2),
            state_on(DimensionSpec::single("s", 2).unwrap()),
            state_on(DimensionSpec::single("s", 2).unwrap()),
            -3.0f64..3.0,
            -3.0f64..3.0,
        )
    ) {
        prop_assume!(f.inner(&i).norm() > 0.1);
        let dims = i.dims().clone();
        let a = Operator::hermitian(dims.clone(), a).unwrap();
        let b = Operator::hermitian(dims, b).unwrap();
        let combo = a.combine(C64::new(alpha, 0.0), &b, C64::new(beta, 0.0)).unwrap();
        let lhs = weak_value(&combo, &i, &f).unwrap().value;
        let rhs = weak_value(&a, &i, &f).unwrap().value * alpha + weak_value(&b, &i, &f).unwrap().value * beta;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translation_is_unitary_and_matches_the_exponential(a in -1.5f64..1.5, x0 in -0.5f64..0.5) {
        let grid = PointerGrid::coarse().with_points(64).unwrap();
        let spec = PointerSpec::new("p", grid, x0, 1.0).unwrap();
        let psi = gaussian_state(&spec).unwrap();
        let moved = translate(&spec, &psi, a).unwrap();
        prop_assert!((moved.norm() - 1.0).abs() <= 1e-12);

        let p = momentum_operator(&grid, "p").unwrap();
        let u = unitary_from_generator(&p, a).unwrap();
        prop_assert!(u.apply(&psi).unwrap().max_difference(&moved) <= 1e-8);
        let commutator = u.commutator(&p).unwrap();
        prop_assert!(commutator.max_norm() <= 1e-10);
    }

    #[test]
    fn single_coupling_mean_is_exact_at_any_strength(
        h in hermitian_matrix(2),
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
        gt in -1.5f64..1.5,
    ) {
        let a = Operator::hermitian(DimensionSpec::single("s", 2).unwrap(), h).unwrap();
        let i = spin::spin_state("s", theta, phi);
        let pointer = PointerSpec::new("A", PointerGrid::fine(), 0.0, 1.0).unwrap();
        let s = evolve(&build_initial(&i, &[pointer]).unwrap(), &[Coupling::new(a.clone(), "A", gt, 1.0).unwrap()]).unwrap();
        let predicted = gt * a.expectation(&i).unwrap().re;
        prop_assert!((pointer_mean(&s, "A").unwrap() - predicted).abs() <= 1e-9);
        prop_assert!((s.state().norm() - 1.0).abs() <= 1e-10);
        prop_assert!((apparatus_density(&s).unwrap().trace() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn verdicts_are_certified_and_exclusive(
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
        ga in 0.0f64..1.5,
        gb in 0.0f64..1.5,
        commuting in any::<bool>(),
    ) {
        let grid = PointerGrid::coarse();
        let pointers = [
            PointerSpec::new("A", grid, 0.0, 1.0).unwrap(),
            PointerSpec::new("B", grid, 0.0, 1.0).unwrap(),
        ];
        let b = if commuting { spin::sigma_z("s") } else { spin::sigma_x("s") };
        let couplings = [
            Coupling::new(spin::sigma_z("s"), "A", ga, 1.0).unwrap(),
            Coupling::new(b, "B", gb, 1.0).unwrap(),
        ];
        let s = evolve(&build_initial(&spin::spin_state("s", theta, phi), &pointers).unwrap(), &couplings).unwrap();
        let v = readability_check(&s, &Bipartition::new(["A"], ["B"])).unwrap();
        if commuting {
            prop_assert!(v.is_separable());
        }
        if let Some(cert) = v.certificate() {
            prop_assert!(cert.trace_distance_to(&s).unwrap() <= 1e-8);
            let ppt = ppt_min_eigenvalue(&apparatus_density(&s).unwrap(), &Bipartition::new(["A"], ["B"])).unwrap();
            prop_assert!(ppt >= -1e-6);
            prop_assert!(!v.is_entangled());
        }
    }

    #[test]
    fn single_apparatus_purity_tracks_schmidt_rank(
        theta in 0.0f64..std::f64::consts::PI,
        gt in prop_oneof![Just(0.0), 0.05f64..1.0],
    ) {
        let pointer = PointerSpec::new("A", PointerGrid::fine(), 0.0, 1.0).unwrap();
        let i = spin::spin_state("s", theta, 0.0);
        let s = evolve(&build_initial(&i, &[pointer]).unwrap(), &[Coupling::new(spin::sigma_z("s"), "A", gt, 1.0).unwrap()]).unwrap();
        let rank = schmidt(s.state(), &Bipartition::new(["s"], ["A"])).unwrap().rank;
        let purity = reduced_density(s.state(), &["A"]).unwrap().purity();
        prop_assert_eq!(rank == 1, (purity - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn reports_are_reproducible_and_round_trip() {
    for name in ScenarioName::ALL {
        let cfg = ScenarioConfig::defaults(name);
        let a = scenarios::run(&cfg).unwrap();
        let b = scenarios::run(&cfg).unwrap();
        assert_eq!(a.pass, b.pass, "{name}");
        let bits = |r: &scenarios::ScenarioReport| {
            r.readouts.simulated.iter().map(|(k, v)| (k.clone(), v.to_bits())).collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b), "{name}");
        let json = serde_json::to_string(&a).unwrap();
        let back: scenarios::ScenarioReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a, "{name}");
    }
}
