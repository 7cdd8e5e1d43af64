//! Whether the apparatus-only density matrix is a probability mixture of
//! product states across a cut of the pointers.
//!
//! A verdict is either backed by an explicit decomposition whose
//! reconstruction is checked against the target, refuted by a negative
//! partial-transpose eigenvalue, or left open.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::engine::{
    all_commute, build_initial, evolve, expand_perturbative, joint_eigenbasis, Coupling, Order, Provenance,
    UnifiedState, DENSE_LIMIT,
};
use crate::error::{Error, Result};
use crate::linalg::{
    eigh_matrix, factorize_product, kron_all, Bipartition, DensityMatrix, Operator, StateVector, C64,
    COMPUTED_HERMITIAN_TOL, NORM_TOL,
};
use crate::pointer::{apply_momentum, gaussian_state, translate, translate_axes, PointerGrid, PointerSpec};

/// Partial-transpose eigenvalues below `-ENTANGLEMENT_THRESHOLD` count as
/// entanglement.
pub const ENTANGLEMENT_THRESHOLD: f64 = 1e-6;
/// Largest trace distance at which a certificate is accepted.
pub const CERTIFICATE_TOL: f64 = 1e-8;
/// Grid size on which certificates are re-derived as a discretization guard.
pub const VALIDATION_POINTS: usize = 32;
/// Largest apparatus dimension for the dense partial-transpose test.
pub const PPT_LIMIT: usize = 1024;
/// Terms lighter than this are dropped from certificates.
const WEIGHT_FLOOR: f64 = 1e-14;
const PRODUCT_TOL: f64 = 1e-9;

/// One `P |f_1><f_1| ⊗ |f_2><f_2| ...` term.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    /// Eigenvalues labelling the term, one per entry of `index_names`.
    pub index: Vec<f64>,
    /// One normalized state per apparatus factor.
    pub factors: Vec<StateVector>,
}

impl ProductTerm {
    pub fn product(&self) -> Result<StateVector> {
        kron_all(&self.factors)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparableDecomposition {
    pub labels: Vec<String>,
    pub index_names: Vec<String>,
    pub terms: Vec<ProductTerm>,
}

impl SeparableDecomposition {
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }

    fn low_rank(&self) -> Result<Vec<(f64, DVector<C64>)>> {
        self.terms.iter().map(|t| Ok((t.weight, t.product()?.into_amplitudes()))).collect()
    }

    /// Dense `sum_k P_k ⊗_i |f_ki><f_ki|`.
    pub fn reconstruct(&self) -> Result<DensityMatrix> {
        let first = self.terms.first().ok_or_else(|| Error::InvalidDensity("empty decomposition".into()))?;
        let dims = first.product()?.dims().clone();
        if dims.total() > DENSE_LIMIT {
            return Err(Error::TooLarge { dim: dims.total(), limit: DENSE_LIMIT });
        }
        let mut m = DMatrix::<C64>::zeros(dims.total(), dims.total());
        for (w, v) in self.low_rank()? {
            m += &v * v.adjoint() * C64::new(w, 0.0);
        }
        DensityMatrix::new_unnormalized(dims, m)
    }

    /// Trace distance to the apparatus state of `state`.
    pub fn trace_distance_to(&self, state: &UnifiedState) -> Result<f64> {
        crate::linalg::trace_distance_low_rank(&self.low_rank()?, &apparatus_low_rank(state))
    }

    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            labels: self.labels.clone(),
            index_names: self.index_names.clone(),
            terms: self.terms.iter().map(|t| TermSummary { weight: t.weight, index: t.index.clone() }).collect(),
        }
    }
}

/// `Tr_system |psi><psi|` as the rank-`d_s` list of unnormalized branches.
fn apparatus_low_rank(state: &UnifiedState) -> Vec<(f64, DVector<C64>)> {
    let block = state.apparatus_dims().total();
    let amps = state.state().amplitudes();
    (0..amps.len() / block)
        .map(|s| (1.0, amps.rows(s * block, block).into_owned()))
        .filter(|(_, v)| v.norm() > 0.0)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSummary {
    pub weight: f64,
    pub index: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub labels: Vec<String>,
    pub index_names: Vec<String>,
    pub terms: Vec<TermSummary>,
}

/// Which construction produced a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateSource {
    PureProduct,
    Commuting,
    Sequential,
    /// Single product term matching the first-order apparatus matrix.
    FirstOrder,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Readability {
    Separable {
        certificate: SeparableDecomposition,
        source: CertificateSource,
        trace_distance: f64,
        /// Same construction re-derived on a 32-point grid.
        validation_trace_distance: Option<f64>,
    },
    Entangled {
        ppt_min_eigenvalue: f64,
    },
    Inconclusive {
        ppt_min_eigenvalue: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparabilityVerdict {
    pub status: Readability,
    pub cut: String,
    /// Also filled for certified states when the dense test is affordable.
    pub ppt_min_eigenvalue: Option<f64>,
}

impl SeparabilityVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self.status, Readability::Separable { .. })
    }

    pub fn is_entangled(&self) -> bool {
        matches!(self.status, Readability::Entangled { .. })
    }

    pub fn certificate(&self) -> Option<&SeparableDecomposition> {
        match &self.status {
            Readability::Separable { certificate, .. } => Some(certificate),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.status {
            Readability::Separable { .. } => "separable",
            Readability::Entangled { .. } => "entangled",
            Readability::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn summary(&self) -> VerdictSummary {
        let mut out = VerdictSummary {
            status: self.label().to_string(),
            cut: self.cut.clone(),
            ppt_min_eigenvalue: self.ppt_min_eigenvalue,
            source: None,
            trace_distance: None,
            validation_trace_distance: None,
            certificate: None,
            notes: Vec::new(),
        };
        if let Readability::Separable { certificate, source, trace_distance, validation_trace_distance } = &self.status
        {
            out.source = Some(*source);
            out.trace_distance = Some(*trace_distance);
            out.validation_trace_distance = *validation_trace_distance;
            out.certificate = Some(certificate.summary());
        }
        out
    }
}

/// Flat, serializable form of a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub status: String,
    pub cut: String,
    pub ppt_min_eigenvalue: Option<f64>,
    pub source: Option<CertificateSource>,
    pub trace_distance: Option<f64>,
    pub validation_trace_distance: Option<f64>,
    pub certificate: Option<CertificateSummary>,
    /// Free-form remarks attached by the caller.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Smallest eigenvalue of the partial transpose over the second group.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    if !rho.is_normalized() || (rho.trace() - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidDensity("partial transpose needs a unit-trace density matrix".into()));
    }
    let (_, second) = cut.axes(rho.dims())?;
    let dims = rho.dims().dims();
    let strides = rho.dims().strides();
    let n = rho.dims().total();
    // flat offset contributed by the transposed factors
    let part = |idx: usize| -> usize { second.iter().map(|&a| (idx / strides[a]) % dims[a] * strides[a]).sum() };
    let parts: Vec<usize> = (0..n).map(part).collect();
    let m = rho.matrix();
    let pt = DMatrix::from_fn(n, n, |r, c| {
        let (pr, pc) = (parts[r], parts[c]);
        m[(r - pr + pc, c - pc + pr)]
    });
    let eig = eigh_matrix(&pt, COMPUTED_HERMITIAN_TOL)?;
    Ok(eig.values[0])
}

fn coupling_names(couplings: &[Coupling]) -> Vec<String> {
    couplings.iter().map(|c| format!("eigenvalue coupled to {}", c.pointer())).collect()
}

/// Certificate for one phase of mutually commuting couplings acting on
/// `|system> ⊗ gaussians`: one term per joint eigenvector.
pub fn commuting_decomposition(
    system: &StateVector,
    pointers: &[PointerSpec],
    couplings: &[Coupling],
) -> Result<SeparableDecomposition> {
    for c in couplings {
        if c.observable().dims() != system.dims() {
            return Err(Error::DimensionMismatch("coupling observable is not on the system".into()));
        }
        if !pointers.iter().any(|p| p.label() == c.pointer()) {
            return Err(Error::UnknownLabel(c.pointer().to_string()));
        }
    }
    let ops: Vec<&Operator> = couplings.iter().map(|c| c.observable()).collect();
    let basis = joint_eigenbasis(&ops)?;
    let gaussians: Vec<StateVector> = pointers.iter().map(gaussian_state).collect::<Result<_>>()?;
    let mut terms = Vec::new();
    for j in 0..basis.vectors.ncols() {
        let v = basis.vectors.column(j);
        let weight = v.dotc(system.amplitudes()).norm_sqr();
        if weight < WEIGHT_FLOOR {
            continue;
        }
        let index: Vec<f64> = basis.values.iter().map(|vals| vals[j]).collect();
        let factors = pointers
            .iter()
            .zip(&gaussians)
            .map(|(spec, phi)| {
                let shift: f64 = couplings
                    .iter()
                    .zip(&index)
                    .filter(|(c, _)| c.pointer() == spec.label())
                    .map(|(c, lambda)| c.strength() * lambda)
                    .sum();
                translate(spec, phi, shift)
            })
            .collect::<Result<_>>()?;
        terms.push(ProductTerm { weight, index, factors });
    }
    Ok(SeparableDecomposition {
        labels: pointers.iter().map(|p| p.label().to_string()).collect(),
        index_names: coupling_names(couplings),
        terms,
    })
}

/// Certificate for `last` (mutually commuting) applied after an arbitrary
/// exact history: branch on the joint eigenvectors of `last`, translate each
/// conditional pointer state and split it into per-pointer factors.
fn decompose_last_phase(before: &UnifiedState, last: &[Coupling]) -> Result<SeparableDecomposition> {
    // runs the reach check for the combined history
    evolve(before, last)?;
    let ops: Vec<&Operator> = last.iter().map(|c| c.observable()).collect();
    let basis = joint_eigenbasis(&ops)?;
    let app = before.apparatus_dims();
    let pdims = app.dims();
    let pointers = &before.history().pointers;
    let mut terms = Vec::new();
    for j in 0..basis.vectors.ncols() {
        let v = StateVector::unnormalized(before.system_dims().clone(), basis.vectors.column(j).into_owned());
        let branch = before.project_system(&v)?;
        let weight = branch.norm().powi(2);
        if weight < WEIGHT_FLOOR {
            continue;
        }
        let index: Vec<f64> = basis.values.iter().map(|vals| vals[j]).collect();
        let plan: Vec<(usize, &PointerGrid, f64)> = pointers
            .iter()
            .enumerate()
            .map(|(ax, spec)| {
                let shift = last
                    .iter()
                    .zip(&index)
                    .filter(|(c, _)| c.pointer() == spec.label())
                    .map(|(c, lambda)| c.strength() * lambda)
                    .sum();
                (ax, spec.grid(), shift)
            })
            .collect();
        let mut data: Vec<C64> = branch.amplitudes().iter().copied().collect();
        translate_axes(&mut data, &pdims, &plan);
        let moved = StateVector::normalize(app.clone(), DVector::from_vec(data))?;
        let factors = factorize_product(&moved, PRODUCT_TOL)?
            .into_iter()
            .map(|f| StateVector::normalize(f.dims().clone(), f.into_amplitudes()))
            .collect::<Result<_>>()?;
        terms.push(ProductTerm { weight, index, factors });
    }
    Ok(SeparableDecomposition { labels: before.pointer_labels(), index_names: coupling_names(last), terms })
}

/// Certificate for `|system> ⊗ gaussians` evolved by `earlier`, then by the
/// mutually commuting `later`. `earlier` need not commute with `later`.
pub fn sequential_decomposition(
    system: &StateVector,
    pointers: &[PointerSpec],
    earlier: &[Coupling],
    later: &[Coupling],
) -> Result<SeparableDecomposition> {
    let s0 = build_initial(system, pointers)?;
    let s1 = evolve(&s0, earlier)?;
    decompose_last_phase(&s1, later)
}

/// Rebuild an exact state's history, optionally on regridded pointers, up to
/// (not including) phase `upto`.
fn replay(state: &UnifiedState, points: Option<usize>, upto: usize) -> Result<UnifiedState> {
    let h = state.history();
    let pointers: Vec<PointerSpec> = match points {
        Some(n) => h.pointers.iter().map(|p| p.with_grid(p.grid().with_points(n)?)).collect::<Result<_>>()?,
        None => h.pointers.clone(),
    };
    let mut s = build_initial(&h.system, &pointers)?;
    for phase in &h.phases[..upto] {
        s = evolve(&s, phase)?;
    }
    Ok(s)
}

type Certified = (SeparableDecomposition, CertificateSource, f64);

fn pure_product_certificate(state: &UnifiedState) -> Result<Certified> {
    let factors = factorize_product(state.state(), PRODUCT_TOL)?;
    let nsys = state.system_dims().len();
    let factors: Vec<StateVector> = factors
        .into_iter()
        .skip(nsys)
        .map(|f| StateVector::normalize(f.dims().clone(), f.into_amplitudes()))
        .collect::<Result<_>>()?;
    let cert = SeparableDecomposition {
        labels: state.pointer_labels(),
        index_names: Vec::new(),
        terms: vec![ProductTerm { weight: 1.0, index: Vec::new(), factors }],
    };
    let td = cert.trace_distance_to(state)?;
    Ok((cert, CertificateSource::PureProduct, td))
}

fn phase_certificate(state: &UnifiedState) -> Result<Certified> {
    let phases = &state.history().phases;
    let last = phases
        .last()
        .filter(|p| !p.is_empty())
        .ok_or_else(|| Error::Unsupported("no coupling phase to decompose".into()))?;
    if !all_commute(last)? {
        return Err(Error::Unsupported("last coupling phase does not commute".into()));
    }
    let (cert, source) = if phases.len() == 1 {
        let h = state.history();
        (commuting_decomposition(&h.system, &h.pointers, last)?, CertificateSource::Commuting)
    } else {
        let before = replay(state, None, phases.len() - 1)?;
        (decompose_last_phase(&before, last)?, CertificateSource::Sequential)
    };
    let td = cert.trace_distance_to(state)?;
    Ok((cert, source, td))
}

fn certify_exact(state: &UnifiedState) -> Option<Certified> {
    [pure_product_certificate, phase_certificate]
        .iter()
        .filter_map(|f| f(state).ok())
        .find(|(_, _, td)| *td <= CERTIFICATE_TOL)
}

fn certify_with(state: &UnifiedState, source: CertificateSource) -> Result<Certified> {
    match source {
        CertificateSource::PureProduct => pure_product_certificate(state),
        CertificateSource::FirstOrder => first_order_certificate(state),
        _ => phase_certificate(state),
    }
}

/// Single product term with each pointer translated by `sum g t <A>`,
/// checked against the first-order apparatus matrix
/// `Tr_s(|psi0><psi0| + |psi0><delta| + |delta><psi0|)`.
fn first_order_certificate(state: &UnifiedState) -> Result<Certified> {
    let h = state.history();
    if h.phases.len() != 1 {
        return Err(Error::Unsupported("first-order certificate needs an unevolved base state".into()));
    }
    let couplings = &h.phases[0];
    let base = build_initial(&h.system, &h.pointers)?;
    let psi0 = base.state().amplitudes();
    let delta = state.state().amplitudes() - psi0;

    let mut shifts = vec![0.0; h.pointers.len()];
    for c in couplings {
        let ax = h.pointers.iter().position(|p| p.label() == c.pointer()).expect("validated coupling");
        shifts[ax] += c.strength() * c.observable().expectation(&h.system)?.re;
    }
    let gaussians: Vec<StateVector> = h.pointers.iter().map(gaussian_state).collect::<Result<_>>()?;
    let factors = h
        .pointers
        .iter()
        .zip(&gaussians)
        .zip(&shifts)
        .map(|((spec, phi), &s)| translate(spec, phi, s))
        .collect::<Result<Vec<_>>>()?;
    let cert = SeparableDecomposition {
        labels: state.pointer_labels(),
        index_names: Vec::new(),
        terms: vec![ProductTerm { weight: 1.0, index: Vec::new(), factors }],
    };

    // linearization of the certificate: |phi> + |d>, d = -i sum s_p pi_p phi
    let phi = kron_all(&gaussians)?;
    let app = state.apparatus_dims();
    let pdims = app.dims();
    let phi_data: Vec<C64> = phi.amplitudes().iter().copied().collect();
    let mut d = DVector::<C64>::zeros(phi_data.len());
    for (ax, spec) in h.pointers.iter().enumerate() {
        if shifts[ax] == 0.0 {
            continue;
        }
        let moved = apply_momentum(&phi_data, &pdims, ax, spec.grid());
        d += DVector::from_vec(moved) * C64::new(0.0, -shifts[ax]);
    }
    let phi = phi.into_amplitudes();
    let cert_side = vec![(1.0, phi.clone()), (0.5, &phi + &d), (-0.5, &phi - &d)];

    let block = app.total();
    let mut engine_side = Vec::new();
    for s in 0..psi0.len() / block {
        let a = psi0.rows(s * block, block).into_owned();
        let b = delta.rows(s * block, block).into_owned();
        if a.norm() == 0.0 && b.norm() == 0.0 {
            continue;
        }
        engine_side.push((0.5, &a + &b));
        engine_side.push((-0.5, &a - &b));
        engine_side.push((1.0, a));
    }
    let td = crate::linalg::trace_distance_low_rank(&cert_side, &engine_side)?;
    Ok((cert, CertificateSource::FirstOrder, td))
}

fn validation_state(state: &UnifiedState) -> Result<UnifiedState> {
    let phases = state.history().phases.len();
    match state.provenance() {
        Provenance::Exact => replay(state, Some(VALIDATION_POINTS), phases),
        _ => {
            let base = replay(state, Some(VALIDATION_POINTS), 0)?;
            expand_perturbative(&base, &state.history().phases[0], Order::First)
        }
    }
}

/// Try constructive certificates, then the partial-transpose witness.
pub fn readability_check(state: &UnifiedState, cut: &Bipartition) -> Result<SeparabilityVerdict> {
    let app = state.apparatus_dims();
    cut.axes(&app)?;
    let described = cut.describe();
    let certified = match state.provenance() {
        Provenance::SecondOrder => {
            return Err(Error::Unsupported("second-order truncated states are not density matrices".into()))
        }
        Provenance::FirstOrder => Some(first_order_certificate(state)?).filter(|c| c.2 <= CERTIFICATE_TOL),
        Provenance::Exact => certify_exact(state),
    };
    let ppt = if state.provenance() == Provenance::Exact && app.total() <= PPT_LIMIT {
        let rho = crate::engine::apparatus_density(state)?;
        Some(ppt_min_eigenvalue(&rho, cut)?)
    } else {
        None
    };
    if let Some((certificate, source, trace_distance)) = certified {
        let validation = validation_state(state).and_then(|v| certify_with(&v, source)).map(|c| c.2).ok();
        if validation.is_none_or(|v| v <= CERTIFICATE_TOL) {
            return Ok(SeparabilityVerdict {
                status: Readability::Separable {
                    certificate,
                    source,
                    trace_distance,
                    validation_trace_distance: validation,
                },
                cut: described,
                ppt_min_eigenvalue: ppt,
            });
        }
    }
    let ppt_min_eigenvalue = ppt.ok_or(Error::TooLarge { dim: app.total(), limit: PPT_LIMIT })?;
    let status = if ppt_min_eigenvalue < -ENTANGLEMENT_THRESHOLD {
        Readability::Entangled { ppt_min_eigenvalue }
    } else {
        Readability::Inconclusive { ppt_min_eigenvalue }
    };
    Ok(SeparabilityVerdict { status, cut: described, ppt_min_eigenvalue: ppt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::evolve_sequential;
    use crate::linalg::{kron, DimensionSpec};
    use crate::spin;
    use approx::assert_abs_diff_eq;

    fn coarse(label: &str) -> PointerSpec {
        PointerSpec::new(label, PointerGrid::coarse(), 0.0, 1.0).unwrap()
    }

    fn coupling(op: Operator, pointer: &str, gt: f64) -> Coupling {
        Coupling::new(op, pointer, gt, 1.0).unwrap()
    }

    fn cut() -> Bipartition {
        Bipartition::new(["A"], ["B"])
    }

    #[test]
    fn ppt_reference_values() {
        let bell = spin::bell_phi_plus("a", "b").projector();
        let cut = Bipartition::new(["a"], ["b"]);
        assert_abs_diff_eq!(ppt_min_eigenvalue(&bell, &cut).unwrap(), -0.5, epsilon = 1e-10);
        let dims = DimensionSpec::new([("a", 2), ("b", 3)]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(dims);
        assert_abs_diff_eq!(ppt_min_eigenvalue(&mixed, &cut).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
        let product = kron(&spin::spin_state("a", 0.3, 0.1).projector(), &spin::plus_x("b").projector()).unwrap();
        assert!(ppt_min_eigenvalue(&product, &cut).unwrap() >= -1e-10);
        let bad = Bipartition::new(["a"], ["c"]);
        assert!(ppt_min_eigenvalue(&bell, &bad).is_err());
    }

    #[test]
    fn commuting_certificates() {
        let ps = [coarse("A"), coarse("B")];
        let z = spin::sigma_z("s");
        let c = [coupling(z.clone(), "A", 1.0), coupling(z, "B", 1.0)];
        let one = commuting_decomposition(&spin::up("s"), &ps, &c).unwrap();
        assert_eq!(one.weights().len(), 1);
        assert_abs_diff_eq!(one.weights()[0], 1.0, epsilon = 1e-12);

        let cz = [
            coupling(
                spin::sigma_x("e1").embed(&DimensionSpec::new([("e1", 2), ("e2", 2)]).unwrap()).unwrap(),
                "A",
                1.0,
            ),
            coupling(
                spin::sigma_z("e2").embed(&DimensionSpec::new([("e1", 2), ("e2", 2)]).unwrap()).unwrap(),
                "B",
                1.0,
            ),
        ];
        let singlet = spin::singlet("e1", "e2");
        let four = commuting_decomposition(&singlet, &ps, &cz).unwrap();
        assert_eq!(four.terms.len(), 4);
        for w in four.weights() {
            assert_abs_diff_eq!(w, 0.25, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(four.weight_sum(), 1.0, epsilon = 1e-10);
        let s1 = evolve(&build_initial(&singlet, &ps).unwrap(), &cz).unwrap();
        assert!(four.trace_distance_to(&s1).unwrap() <= 1e-8);
        let dense = four.reconstruct().unwrap();
        let target = crate::engine::apparatus_density(&s1).unwrap();
        assert!(dense.trace_distance(&target).unwrap() <= 1e-8);

        let nc = [coupling(spin::sigma_x("s"), "A", 1.0), coupling(spin::sigma_z("s"), "B", 1.0)];
        assert!(matches!(commuting_decomposition(&spin::up("s"), &ps, &nc), Err(Error::NonCommuting { .. })));
    }

    #[test]
    fn sequential_certificates() {
        let ps = [coarse("A"), coarse("B")];
        let b = [coupling(spin::sigma_z("s"), "B", 0.5)];
        let a = [coupling(spin::sigma_x("s"), "A", 0.5)];
        let cert = sequential_decomposition(&spin::up("s"), &ps, &b, &a).unwrap();
        assert_eq!(cert.terms.len(), 2);
        for w in cert.weights() {
            assert_abs_diff_eq!(w, 0.5, epsilon = 1e-10);
        }
        let s = evolve_sequential(&build_initial(&spin::up("s"), &ps).unwrap(), &b, &a).unwrap();
        assert!(cert.trace_distance_to(&s).unwrap() <= 1e-8);

        // no earlier coupling: weights are the A-basis populations
        let i = spin::spin_state("s", 1.0, 0.0);
        let quiet = [coupling(spin::sigma_z("s"), "B", 0.0)];
        let cert = sequential_decomposition(&i, &ps, &quiet, &a).unwrap();
        let mut w = cert.weights();
        w.sort_by(f64::total_cmp);
        let p_plus = spin::plus_x("s").inner(&i).norm_sqr();
        assert_abs_diff_eq!(w[1], p_plus.max(1.0 - p_plus), epsilon = 1e-10);
        let phi_b = gaussian_state(&ps[1]).unwrap();
        for t in &cert.terms {
            assert!(t.factors[1].max_difference(&phi_b) < 1e-10);
        }
    }

    #[test]
    fn verdicts() {
        let ps = [coarse("A"), coarse("B")];
        let s0 = build_initial(&spin::up("s"), &ps).unwrap();
        let nc = [coupling(spin::sigma_x("s"), "A", 1.0), coupling(spin::sigma_z("s"), "B", 1.0)];
        let v = readability_check(&evolve(&s0, &nc).unwrap(), &cut()).unwrap();
        assert!(v.is_entangled(), "{v:?}");
        assert!(v.ppt_min_eigenvalue.unwrap() < -1e-4);

        let z = spin::sigma_z("s");
        let c = [coupling(z.clone(), "A", 1.0), coupling(z, "B", 1.0)];
        let v = readability_check(&evolve(&s0, &c).unwrap(), &cut()).unwrap();
        assert!(v.is_separable());
        assert!(v.ppt_min_eigenvalue.unwrap() >= -ENTANGLEMENT_THRESHOLD);
        match v.status {
            Readability::Separable { trace_distance, validation_trace_distance, .. } => {
                assert!(trace_distance <= 1e-8);
                assert!(validation_trace_distance.unwrap() <= 1e-8);
            }
            _ => unreachable!(),
        }

        let seq = evolve_sequential(&s0, &nc[1..], &nc[..1]).unwrap();
        let v = readability_check(&seq, &cut()).unwrap();
        assert!(v.is_separable());
        assert_eq!(v.summary().source, Some(CertificateSource::Sequential));
    }

    #[test]
    fn truncated_states() {
        let ps = [coarse("A"), coarse("B")];
        let s0 = build_initial(&spin::spin_state("s", 1.0, 0.3), &ps).unwrap();
        let nc = [coupling(spin::sigma_x("s"), "A", 0.3), coupling(spin::sigma_z("s"), "B", 0.3)];
        let first = expand_perturbative(&s0, &nc, Order::First).unwrap();
        let v = readability_check(&first, &cut()).unwrap();
        assert!(v.is_separable());
        assert_eq!(v.summary().source, Some(CertificateSource::FirstOrder));
        assert!(v.summary().trace_distance.unwrap() <= 1e-8);
        let second = expand_perturbative(&s0, &nc, Order::Second).unwrap();
        assert!(readability_check(&second, &cut()).is_err());
    }

    #[test]
    fn cut_must_cover_apparatus() {
        let ps = [coarse("A"), coarse("B")];
        let s0 = build_initial(&spin::up("s"), &ps).unwrap();
        assert!(readability_check(&s0, &Bipartition::new(["A"], ["s"])).is_err());
        let v = readability_check(&s0, &cut()).unwrap();
        assert_eq!(v.summary().source, Some(CertificateSource::PureProduct));
    }
}
