//! System ⊗ pointer states, their evolution under `sum_i g_i A_i pi_i`, and
//! the readout quantities computed from them.
//!
//! Units have `hbar = 1`; a coupling enters the propagator only through the
//! product `g t`. Amplitudes are laid out with all system factors first and
//! the pointers after them, in the order they were attached.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, eigh_matrix, kron_all, reduced_density, unitary_from_generator, DensityMatrix, DimensionSpec, Operator,
    StateVector, C64, COMPUTED_HERMITIAN_TOL, INPUT_HERMITIAN_TOL,
};
use crate::pointer::{
    apply_momentum, fft_axis, gaussian_state, momentum_operator, translate_axes, PointerGrid, PointerSpec,
};

/// Observables whose commutator max-norm is below this are treated as
/// commuting.
pub const COMMUTE_TOL: f64 = 1e-10;
/// Post-selections with `|<F|I>|` at or below this are rejected.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Post-selection probabilities below this are rejected.
pub const MIN_POSTSELECTION_PROBABILITY: f64 = 1e-14;
/// Largest total dimension for the dense matrix-exponential path.
pub const EXPM_LIMIT: usize = 2048;
/// Largest apparatus dimension for which dense density matrices are built.
pub const DENSE_LIMIT: usize = 4096;

/// One term `g A pi_pointer` of the interaction Hamiltonian, active for a
/// duration `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    observable: Operator,
    pointer: String,
    g: f64,
    t: f64,
}

impl Coupling {
    pub fn new(observable: Operator, pointer: impl Into<String>, g: f64, t: f64) -> Result<Self> {
        observable.require_hermitian(INPUT_HERMITIAN_TOL)?;
        if !(g * t).is_finite() {
            return Err(Error::Config(format!("coupling strength g t = {} is not finite", g * t)));
        }
        Ok(Self { observable, pointer: pointer.into(), g, t })
    }

    pub fn observable(&self) -> &Operator {
        &self.observable
    }

    pub fn pointer(&self) -> &str {
        &self.pointer
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `g t`, the only combination that enters the propagator.
    pub fn strength(&self) -> f64 {
        self.g * self.t
    }

    /// Same coupling with `g` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { g: self.g * factor, ..self.clone() }
    }

    fn spectral_radius(&self) -> Result<f64> {
        let eig = eigh(&self.observable)?;
        Ok(eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

/// How a state was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    FirstOrder,
    SecondOrder,
}

/// Truncation order for [`expand_perturbative`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

/// Evolution algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Joint-eigenbasis pointer translations when the coupled observables
    /// commute, otherwise block diagonalization of the generator in the
    /// pointer momentum basis.
    Shift,
    /// Always the momentum-block diagonalization.
    MomentumBlock,
    /// Dense `exp(-i H)` of the full generator.
    Expm,
}

/// Initial ingredients and the coupling phases applied so far.
#[derive(Clone, Debug, PartialEq)]
pub struct History {
    pub system: StateVector,
    pub pointers: Vec<PointerSpec>,
    pub phases: Vec<Vec<Coupling>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnifiedState {
    state: StateVector,
    provenance: Provenance,
    history: History,
}

impl UnifiedState {
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn system_dims(&self) -> &DimensionSpec {
        self.history.system.dims()
    }

    pub fn system_labels(&self) -> Vec<String> {
        self.system_dims().labels().into_iter().map(String::from).collect()
    }

    pub fn pointer_labels(&self) -> Vec<String> {
        self.history.pointers.iter().map(|p| p.label().to_string()).collect()
    }

    pub fn pointer(&self, label: &str) -> Result<&PointerSpec> {
        self.history.pointers.iter().find(|p| p.label() == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn pointer_index(&self, label: &str) -> Result<usize> {
        self.history
            .pointers
            .iter()
            .position(|p| p.label() == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn apparatus_dims(&self) -> DimensionSpec {
        DimensionSpec::new(self.history.pointers.iter().map(|p| (p.label().to_string(), p.grid().points())))
            .expect("pointer labels are unique")
    }

    fn system_total(&self) -> usize {
        self.system_dims().total()
    }

    fn apparatus_total(&self) -> usize {
        self.history.pointers.iter().map(|p| p.grid().points()).product()
    }

    /// Tensor shape `[system, pointer_1, pointer_2, ...]`.
    fn block_shape(&self) -> Vec<usize> {
        std::iter::once(self.system_total()).chain(self.history.pointers.iter().map(|p| p.grid().points())).collect()
    }

    /// `(<v| ⊗ 1)|state>` as an unnormalized apparatus vector.
    pub fn project_system(&self, v: &StateVector) -> Result<StateVector> {
        if v.dims() != self.system_dims() {
            return Err(Error::DimensionMismatch("projection vector is not on the system space".into()));
        }
        Ok(StateVector::unnormalized(
            self.apparatus_dims(),
            project(self.state.amplitudes(), v.amplitudes(), self.apparatus_total()),
        ))
    }

    /// Max-amplitude difference to another state on the same space.
    pub fn max_difference(&self, other: &UnifiedState) -> f64 {
        self.state.max_difference(&other.state)
    }
}

fn project(psi: &DVector<C64>, v: &DVector<C64>, block: usize) -> DVector<C64> {
    let mut out = DVector::zeros(block);
    for (s, vs) in v.iter().enumerate() {
        let c = vs.conj();
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        for p in 0..block {
            out[p] += c * psi[s * block + p];
        }
    }
    out
}

/// `|I> ⊗ |phi_1> ⊗ |phi_2> ...` with Gaussian pointers.
pub fn build_initial(system: &StateVector, pointers: &[PointerSpec]) -> Result<UnifiedState> {
    if !system.is_normalized() {
        return Err(Error::NotNormalized { norm: system.norm() });
    }
    let mut parts = vec![system.clone()];
    for p in pointers {
        parts.push(gaussian_state(p)?);
    }
    let state = kron_all(&parts)?;
    Ok(UnifiedState {
        state,
        provenance: Provenance::Exact,
        history: History { system: system.clone(), pointers: pointers.to_vec(), phases: Vec::new() },
    })
}

fn validate_couplings(state: &UnifiedState, couplings: &[Coupling]) -> Result<()> {
    for c in couplings {
        if c.observable.dims() != state.system_dims() {
            return Err(Error::DimensionMismatch(format!(
                "coupling observable acts on {:?}, system is {:?}",
                c.observable.dims().labels(),
                state.system_dims().labels()
            )));
        }
        state.pointer_index(&c.pointer)?;
    }
    Ok(())
}

/// Fail when any pointer could be displaced out of its box by the
/// accumulated couplings.
fn check_reach(state: &UnifiedState, extra: &[Coupling]) -> Result<()> {
    let mut reach: BTreeMap<&str, f64> = BTreeMap::new();
    for c in state.history.phases.iter().flatten().chain(extra) {
        *reach.entry(c.pointer.as_str()).or_default() += c.strength().abs() * c.spectral_radius()?;
    }
    for p in &state.history.pointers {
        p.check_shift(reach.get(p.label()).copied().unwrap_or(0.0))?;
    }
    Ok(())
}

/// Whether every pair of coupled observables commutes.
pub fn all_commute(couplings: &[Coupling]) -> Result<bool> {
    for (i, a) in couplings.iter().enumerate() {
        for b in &couplings[i + 1..] {
            if a.observable.commutator_norm(&b.observable)? > COMMUTE_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Common eigenbasis of mutually commuting Hermitian operators.
#[derive(Clone, Debug)]
pub struct JointEigenbasis {
    /// Columns are the shared eigenvectors.
    pub vectors: DMatrix<C64>,
    /// `values[i][j]`: eigenvalue of operator `i` on vector `j`.
    pub values: Vec<Vec<f64>>,
}

pub fn joint_eigenbasis(ops: &[&Operator]) -> Result<JointEigenbasis> {
    let first = ops.first().ok_or_else(|| Error::Config("joint eigenbasis of an empty set".into()))?;
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            let norm = a.commutator_norm(b)?;
            if norm > COMMUTE_TOL {
                return Err(Error::NonCommuting { norm });
            }
        }
    }
    let n = first.matrix().nrows();
    let golden = 0.618_033_988_749_894_9_f64;
    let mut worst = f64::INFINITY;
    for attempt in 0..8 {
        // a generic combination separates every joint eigenspace
        let mut combo = DMatrix::<C64>::zeros(n, n);
        for (i, op) in ops.iter().enumerate() {
            let c = 0.5 + ((i + 1) as f64 * golden + attempt as f64 * 0.377_964_473).fract();
            combo += op.matrix() * C64::new(c, 0.0);
        }
        let eig = eigh_matrix(&combo, COMPUTED_HERMITIAN_TOL)?;
        let v = eig.vectors;
        let mut values = Vec::with_capacity(ops.len());
        let mut off: f64 = 0.0;
        for op in ops {
            let d = v.adjoint() * op.matrix() * &v;
            for r in 0..n {
                for c in 0..n {
                    if r != c {
                        off = off.max(d[(r, c)].norm());
                    }
                }
            }
            values.push((0..n).map(|j| d[(j, j)].re).collect());
        }
        if off <= 1e-9 {
            return Ok(JointEigenbasis { vectors: v, values });
        }
        worst = worst.min(off);
    }
    Err(Error::NonCommuting { norm: worst })
}

fn pointer_shift_table(
    state: &UnifiedState,
    couplings: &[Coupling],
    values: &[Vec<f64>],
    j: usize,
) -> Result<Vec<f64>> {
    let mut shifts = vec![0.0; state.history.pointers.len()];
    for (i, c) in couplings.iter().enumerate() {
        shifts[state.pointer_index(&c.pointer)?] += c.strength() * values[i][j];
    }
    Ok(shifts)
}

fn evolve_by_translation(state: &UnifiedState, couplings: &[Coupling]) -> Result<DVector<C64>> {
    let ops: Vec<&Operator> = couplings.iter().map(|c| &c.observable).collect();
    let basis = joint_eigenbasis(&ops)?;
    let block = state.apparatus_total();
    let ds = state.system_total();
    let pdims: Vec<usize> = state.history.pointers.iter().map(|p| p.grid().points()).collect();
    let mut out = DVector::<C64>::zeros(ds * block);
    for j in 0..ds {
        let v = basis.vectors.column(j).into_owned();
        let mut eta: Vec<C64> = project(state.state.amplitudes(), &v, block).iter().copied().collect();
        if eta.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let shifts = pointer_shift_table(state, couplings, &basis.values, j)?;
        let plan: Vec<(usize, &PointerGrid, f64)> =
            state.history.pointers.iter().enumerate().map(|(ax, p)| (ax, p.grid(), shifts[ax])).collect();
        translate_axes(&mut eta, &pdims, &plan);
        for s in 0..ds {
            let vs = v[s];
            if vs == C64::new(0.0, 0.0) {
                continue;
            }
            for p in 0..block {
                out[s * block + p] += vs * eta[p];
            }
        }
    }
    Ok(out)
}

fn evolve_by_momentum_blocks(state: &UnifiedState, couplings: &[Coupling]) -> Result<DVector<C64>> {
    let shape = state.block_shape();
    let ds = shape[0];
    let block = state.apparatus_total();
    let mut data: Vec<C64> = state.state.amplitudes().iter().copied().collect();
    for ax in 1..shape.len() {
        fft_axis(&mut data, &shape, ax, false);
    }
    let wavenumbers: Vec<Vec<f64>> = state.history.pointers.iter().map(|p| p.grid().wavenumbers()).collect();
    let targets: Vec<usize> = couplings.iter().map(|c| state.pointer_index(&c.pointer)).collect::<Result<_>>()?;
    let pdims = &shape[1..];
    let mut pstrides = vec![1usize; pdims.len()];
    for i in (0..pdims.len().saturating_sub(1)).rev() {
        pstrides[i] = pstrides[i + 1] * pdims[i + 1];
    }
    let mut v = DVector::<C64>::zeros(ds);
    for p in 0..block {
        let mut gen = DMatrix::<C64>::zeros(ds, ds);
        for (c, &ax) in couplings.iter().zip(&targets) {
            let m = (p / pstrides[ax]) % pdims[ax];
            let k = wavenumbers[ax][m];
            if k != 0.0 {
                gen += c.observable.matrix() * C64::new(c.strength() * k, 0.0);
            }
        }
        for s in 0..ds {
            v[s] = data[s * block + p];
        }
        let eig = eigh_matrix(&gen, COMPUTED_HERMITIAN_TOL)?;
        let phases = DVector::from_iterator(ds, eig.values.iter().map(|&e| C64::from_polar(1.0, -e)));
        let w = &eig.vectors * phases.component_mul(&(eig.vectors.adjoint() * &v));
        for s in 0..ds {
            data[s * block + p] = w[s];
        }
    }
    for ax in 1..shape.len() {
        fft_axis(&mut data, &shape, ax, true);
    }
    Ok(DVector::from_vec(data))
}

/// Dense generator `sum_i g_i t_i A_i ⊗ pi_i` on the full space.
pub fn full_generator(state: &UnifiedState, couplings: &[Coupling]) -> Result<Operator> {
    let full = state.state.dims().clone();
    let n = full.total();
    if n > EXPM_LIMIT {
        return Err(Error::TooLarge { dim: n, limit: EXPM_LIMIT });
    }
    let mut total = DMatrix::<C64>::zeros(n, n);
    for c in couplings {
        let spec = state.pointer(&c.pointer)?;
        let p = momentum_operator(spec.grid(), spec.label())?;
        let term = crate::linalg::kron(&c.observable, &p)?.embed(&full)?;
        total += term.matrix() * C64::new(c.strength(), 0.0);
    }
    Operator::new(full, total)
}

fn evolve_by_expm(state: &UnifiedState, couplings: &[Coupling]) -> Result<DVector<C64>> {
    let gen = full_generator(state, couplings)?;
    let u = unitary_from_generator(&gen, 1.0)?;
    Ok(u.matrix() * state.state.amplitudes())
}

/// Exact evolution under one interaction phase, by the default method.
pub fn evolve(state: &UnifiedState, couplings: &[Coupling]) -> Result<UnifiedState> {
    evolve_with(state, couplings, Method::Shift)
}

pub fn evolve_with(state: &UnifiedState, couplings: &[Coupling], method: Method) -> Result<UnifiedState> {
    if state.provenance != Provenance::Exact {
        return Err(Error::Unsupported("exact evolution of a truncated perturbative state".into()));
    }
    validate_couplings(state, couplings)?;
    check_reach(state, couplings)?;
    let active: Vec<Coupling> = couplings.iter().filter(|c| c.strength() != 0.0).cloned().collect();
    let amplitudes = if active.is_empty() {
        state.state.amplitudes().clone()
    } else {
        match method {
            Method::Shift if all_commute(&active)? => evolve_by_translation(state, &active)?,
            Method::Shift | Method::MomentumBlock => evolve_by_momentum_blocks(state, &active)?,
            Method::Expm => evolve_by_expm(state, &active)?,
        }
    };
    let mut history = state.history.clone();
    history.phases.push(couplings.to_vec());
    Ok(UnifiedState {
        state: StateVector::new(state.state.dims().clone(), amplitudes)?,
        provenance: Provenance::Exact,
        history,
    })
}

/// `phase1` over `[0, t]`, then `phase2` over `[t, 2t]`.
pub fn evolve_sequential(state: &UnifiedState, phase1: &[Coupling], phase2: &[Coupling]) -> Result<UnifiedState> {
    evolve_sequential_with(state, phase1, phase2, Method::Shift)
}

pub fn evolve_sequential_with(
    state: &UnifiedState,
    phase1: &[Coupling],
    phase2: &[Coupling],
    method: Method,
) -> Result<UnifiedState> {
    let mid = evolve_with(state, phase1, method)?;
    if phase2.is_empty() {
        return Ok(mid);
    }
    evolve_with(&mid, phase2, method)
}

/// `H |psi>` with `H = sum_i g_i t_i A_i ⊗ pi_i`, momentum applied spectrally.
fn apply_generator(state: &UnifiedState, couplings: &[Coupling], psi: &DVector<C64>) -> Result<DVector<C64>> {
    let shape = state.block_shape();
    let ds = shape[0];
    let block = state.apparatus_total();
    let mut out = DVector::<C64>::zeros(psi.len());
    let data: Vec<C64> = psi.iter().copied().collect();
    for c in couplings {
        let idx = state.pointer_index(&c.pointer)?;
        let spec = &state.history.pointers[idx];
        let moved = apply_momentum(&data, &shape, idx + 1, spec.grid());
        let a = c.observable.matrix();
        let gt = c.strength();
        for s in 0..ds {
            for s2 in 0..ds {
                let coef = a[(s, s2)] * gt;
                if coef == C64::new(0.0, 0.0) {
                    continue;
                }
                for p in 0..block {
                    out[s * block + p] += coef * moved[s2 * block + p];
                }
            }
        }
    }
    Ok(out)
}

/// Truncated series `(1 - iH - H^2/2 ...)|state0>`; the result is not
/// renormalized.
pub fn expand_perturbative(state0: &UnifiedState, couplings: &[Coupling], order: Order) -> Result<UnifiedState> {
    if state0.provenance != Provenance::Exact {
        return Err(Error::Unsupported("perturbative expansion of a truncated state".into()));
    }
    validate_couplings(state0, couplings)?;
    let psi = state0.state.amplitudes();
    let h1 = apply_generator(state0, couplings, psi)?;
    let minus_i = C64::new(0.0, -1.0);
    let mut out = psi + &h1 * minus_i;
    let provenance = match order {
        Order::First => Provenance::FirstOrder,
        Order::Second => {
            let h2 = apply_generator(state0, couplings, &h1)?;
            out += &h2 * C64::new(-0.5, 0.0);
            Provenance::SecondOrder
        }
    };
    let mut history = state0.history.clone();
    history.phases.push(couplings.to_vec());
    Ok(UnifiedState { state: StateVector::unnormalized(state0.state.dims().clone(), out), provenance, history })
}

/// `Tr_system |state><state|`.
pub fn apparatus_density(state: &UnifiedState) -> Result<DensityMatrix> {
    let n = state.apparatus_total();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge { dim: n, limit: DENSE_LIMIT });
    }
    reduced_density(&state.state, &state.pointer_labels())
}

/// `Tr_apparatus |state><state|`.
pub fn system_density(state: &UnifiedState) -> Result<DensityMatrix> {
    reduced_density(&state.state, &state.system_labels())
}

/// Marginal position moment `sum |psi|^2 f(x_a, x_b)`.
fn position_moment(state: &UnifiedState, labels: &[&str]) -> Result<f64> {
    let shape = state.block_shape();
    let block = state.apparatus_total();
    let pdims = &shape[1..];
    let mut pstrides = vec![1usize; pdims.len()];
    for i in (0..pdims.len().saturating_sub(1)).rev() {
        pstrides[i] = pstrides[i + 1] * pdims[i + 1];
    }
    let axes: Vec<usize> = labels.iter().map(|l| state.pointer_index(l)).collect::<Result<_>>()?;
    let positions: Vec<Vec<f64>> = axes.iter().map(|&a| state.history.pointers[a].grid().positions()).collect();
    let amps = state.state.amplitudes();
    let mut marginal = vec![0.0; block];
    for (idx, z) in amps.iter().enumerate() {
        marginal[idx % block] += z.norm_sqr();
    }
    Ok(marginal
        .iter()
        .enumerate()
        .map(|(p, w)| {
            let f: f64 = axes.iter().zip(&positions).map(|(&a, xs)| xs[(p / pstrides[a]) % pdims[a]]).product();
            w * f
        })
        .sum())
}

/// `Tr[rho x_label]`, without renormalizing truncated states.
pub fn pointer_mean(state: &UnifiedState, pointer: &str) -> Result<f64> {
    position_moment(state, &[pointer])
}

/// `Tr[rho x_a x_b]` for two distinct pointers.
pub fn pointer_cross_mean(state: &UnifiedState, a: &str, b: &str) -> Result<f64> {
    if a == b {
        return Err(Error::DuplicateLabel(a.to_string()));
    }
    position_moment(state, &[a, b])
}

/// Mean of `pointer` given that pointer `on` was read at or above
/// `threshold` (a sharp half-line outcome), with the probability of that
/// outcome.
pub fn conditioned_pointer_mean(state: &UnifiedState, pointer: &str, on: &str, threshold: f64) -> Result<(f64, f64)> {
    if pointer == on {
        return Err(Error::DuplicateLabel(on.to_string()));
    }
    let shape = state.block_shape();
    let block = state.apparatus_total();
    let pdims = &shape[1..];
    let mut pstrides = vec![1usize; pdims.len()];
    for i in (0..pdims.len().saturating_sub(1)).rev() {
        pstrides[i] = pstrides[i + 1] * pdims[i + 1];
    }
    let (ta, tb) = (state.pointer_index(pointer)?, state.pointer_index(on)?);
    let xa = state.history.pointers[ta].grid().positions();
    let xb = state.history.pointers[tb].grid().positions();
    let (mut mass, mut moment) = (0.0, 0.0);
    for (idx, z) in state.state.amplitudes().iter().enumerate() {
        let p = idx % block;
        if xb[(p / pstrides[tb]) % pdims[tb]] >= threshold {
            let w = z.norm_sqr();
            mass += w;
            moment += w * xa[(p / pstrides[ta]) % pdims[ta]];
        }
    }
    if mass < MIN_POSTSELECTION_PROBABILITY {
        return Err(Error::ImpossiblePostselection { probability: mass });
    }
    Ok((moment / mass, mass))
}

/// `<F|A|I> / <F|I>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakValue {
    pub value: C64,
    pub overlap: C64,
}

pub fn weak_value(a: &Operator, i: &StateVector, f: &StateVector) -> Result<WeakValue> {
    let overlap = f.inner(i);
    if overlap.norm() <= ORTHOGONALITY_TOL {
        return Err(Error::OrthogonalPostselection { overlap: overlap.norm() });
    }
    let value = a.matrix_element(f, i)? / overlap;
    Ok(WeakValue { value, overlap })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostselectionReadout {
    pub probability: f64,
    /// `Tr[rho_F x]` per pointer, with `rho_F` the unnormalized matrix.
    pub unnormalized_means: BTreeMap<String, f64>,
    /// `unnormalized / probability` per pointer.
    pub normalized_means: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutReport {
    pub pointer_means: BTreeMap<String, f64>,
    pub cross_moment: Option<f64>,
    pub postselection: Option<PostselectionReadout>,
}

/// Unconditioned pointer means, plus the cross moment for two pointers.
pub fn readout(state: &UnifiedState) -> Result<ReadoutReport> {
    let labels = state.pointer_labels();
    let mut pointer_means = BTreeMap::new();
    for l in &labels {
        pointer_means.insert(l.clone(), pointer_mean(state, l)?);
    }
    let cross_moment = if labels.len() == 2 { Some(pointer_cross_mean(state, &labels[0], &labels[1])?) } else { None };
    Ok(ReadoutReport { pointer_means, cross_moment, postselection: None })
}

/// Result of conditioning on the system outcome `|F>`.
#[derive(Clone, Debug)]
pub struct PostSelection {
    pub probability: f64,
    /// `(<F| ⊗ 1)|state>`, unnormalized.
    pub conditional: StateVector,
    pub report: ReadoutReport,
}

impl PostSelection {
    /// `Tr_system[rho (|F><F| ⊗ 1)]`, trace equal to the probability.
    pub fn density(&self) -> Result<DensityMatrix> {
        let n = self.conditional.dims().total();
        if n > DENSE_LIMIT {
            return Err(Error::TooLarge { dim: n, limit: DENSE_LIMIT });
        }
        Ok(self.conditional.projector())
    }
}

pub fn postselect(state: &UnifiedState, f: &StateVector) -> Result<PostSelection> {
    if !f.is_normalized() {
        return Err(Error::NotNormalized { norm: f.norm() });
    }
    let conditional = state.project_system(f)?;
    let probability = conditional.norm().powi(2);
    if probability < MIN_POSTSELECTION_PROBABILITY {
        return Err(Error::ImpossiblePostselection { probability });
    }
    let conditioned = UnifiedState {
        state: StateVector::unnormalized(
            DimensionSpec::single("__post", 1)?.concat(&state.apparatus_dims())?,
            conditional.amplitudes().clone(),
        ),
        provenance: state.provenance,
        history: History {
            system: StateVector::new(
                DimensionSpec::single("__post", 1)?,
                DVector::from_element(1, C64::new(1.0, 0.0)),
            )?,
            pointers: state.history.pointers.clone(),
            phases: Vec::new(),
        },
    };
    let mut unnormalized_means = BTreeMap::new();
    let mut normalized_means = BTreeMap::new();
    for l in state.pointer_labels() {
        let m = pointer_mean(&conditioned, &l)?;
        unnormalized_means.insert(l.clone(), m);
        normalized_means.insert(l, m / probability);
    }
    let mut report = readout(state)?;
    report.postselection = Some(PostselectionReadout { probability, unnormalized_means, normalized_means });
    Ok(PostSelection { probability, conditional, report })
}

/// `Tr[rho(t) (F ⊗ 1)]` after evolving `state0` under `couplings`.
pub fn initial_info_expectation(state0: &UnifiedState, couplings: &[Coupling], f: &Operator) -> Result<f64> {
    f.require_hermitian(INPUT_HERMITIAN_TOL)?;
    if f.dims() != state0.system_dims() {
        return Err(Error::DimensionMismatch("F must act on the system".into()));
    }
    let evolved = evolve(state0, couplings)?;
    system_density(&evolved)?.expectation(f).map(|z| z.re)
}
