//! Dense complex linear algebra over labelled tensor-product spaces.
//!
//! Every vector and matrix carries a [`DimensionSpec`] naming its tensor
//! factors. Amplitudes are stored row-major over the factors: the first
//! factor is the most significant index, which matches the ordering of the
//! Kronecker product.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for Hermiticity of user-supplied operators.
pub const INPUT_HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for Hermiticity of matrices computed from other matrices.
pub const COMPUTED_HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on state norms and density-matrix traces.
pub const NORM_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted as positive semidefinite drift.
pub const PSD_FLOOR: f64 = -1e-10;
/// Default cutoff for counting Schmidt coefficients.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labelled tensor factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionSpec {
    factors: Vec<Factor>,
}

impl DimensionSpec {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut out: Vec<Factor> = Vec::new();
        for (label, dim) in factors {
            let label = label.into();
            if dim == 0 {
                return Err(Error::ZeroDimension(label));
            }
            if out.iter().any(|f| f.label == label) {
                return Err(Error::DuplicateLabel(label));
            }
            out.push(Factor { label, dim });
        }
        if out.is_empty() {
            return Err(Error::DimensionMismatch("a dimension spec needs at least one factor".into()));
        }
        Ok(Self { factors: out })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.label.as_str()).collect()
    }

    pub fn total(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.factors.iter().position(|f| f.label == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.index_of(label)?].dim)
    }

    pub fn concat(&self, other: &DimensionSpec) -> Result<Self> {
        Self::new(self.factors.iter().chain(other.factors.iter()).map(|f| (f.label.clone(), f.dim)))
    }

    /// Sub-spec made of the factors at `axes`, in the order given.
    pub fn select(&self, axes: &[usize]) -> Result<Self> {
        Self::new(axes.iter().map(|&a| (self.factors[a].label.clone(), self.factors[a].dim)))
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let dims = self.dims();
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        strides
    }

    /// Flat offsets enumerating the joint index of `axes` row-major.
    pub(crate) fn offsets(&self, axes: &[usize]) -> Vec<usize> {
        let dims = self.dims();
        let strides = self.strides();
        let mut out = vec![0usize];
        for &ax in axes {
            let mut next = Vec::with_capacity(out.len() * dims[ax]);
            for &o in &out {
                for k in 0..dims[ax] {
                    next.push(o + k * strides[ax]);
                }
            }
            out = next;
        }
        out
    }

    /// Resolve labels to axes, rejecting unknown and repeated labels.
    pub(crate) fn axes_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut axes = Vec::with_capacity(labels.len());
        for l in labels {
            let ax = self.index_of(l.as_ref())?;
            if axes.contains(&ax) {
                return Err(Error::DuplicateLabel(l.as_ref().to_string()));
            }
            axes.push(ax);
        }
        Ok(axes)
    }

    /// Axes not contained in `axes`, in original order.
    pub(crate) fn complement(&self, axes: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|a| !axes.contains(a)).collect()
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |M - M^dagger|` over entries.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Square complex matrix acting on a labelled space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dims: DimensionSpec,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(dims: DimensionSpec, matrix: DMatrix<C64>) -> Result<Self> {
        let n = dims.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "operator matrix is {}x{}, dims require {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// Construct an operator claimed to be Hermitian; the claim is verified.
    pub fn hermitian(dims: DimensionSpec, matrix: DMatrix<C64>) -> Result<Self> {
        let op = Self::new(dims, matrix)?;
        op.require_hermitian(INPUT_HERMITIAN_TOL)?;
        Ok(op)
    }

    pub fn identity(dims: DimensionSpec) -> Self {
        let n = dims.total();
        Self { dims, matrix: DMatrix::identity(n, n) }
    }

    pub fn dims(&self) -> &DimensionSpec {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn require_hermitian(&self, tolerance: f64) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > tolerance {
            return Err(Error::NotHermitian { defect, tolerance });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self { dims: self.dims.clone(), matrix: self.matrix.adjoint() }
    }

    fn same_space(&self, other: &Operator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "operators on {:?} and {:?}",
                self.dims.labels(),
                other.dims.labels()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.same_space(other)?;
        Ok(Self { dims: self.dims.clone(), matrix: &self.matrix * &other.matrix })
    }

    /// Linear combination `alpha * self + beta * other`.
    pub fn combine(&self, alpha: C64, other: &Operator, beta: C64) -> Result<Operator> {
        self.same_space(other)?;
        Ok(Self { dims: self.dims.clone(), matrix: self.matrix.map(|z| z * alpha) + other.matrix.map(|z| z * beta) })
    }

    pub fn scaled(&self, factor: C64) -> Operator {
        Self { dims: self.dims.clone(), matrix: self.matrix.map(|z| z * factor) }
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.same_space(other)?;
        Ok(Self { dims: self.dims.clone(), matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix })
    }

    pub fn anticommutator(&self, other: &Operator) -> Result<Operator> {
        self.same_space(other)?;
        Ok(Self { dims: self.dims.clone(), matrix: &self.matrix * &other.matrix + &other.matrix * &self.matrix })
    }

    /// Largest entry magnitude of the commutator.
    pub fn commutator_norm(&self, other: &Operator) -> Result<f64> {
        Ok(max_abs(self.commutator(other)?.matrix()))
    }

    pub fn max_norm(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.dims != state.dims {
            return Err(Error::DimensionMismatch(format!(
                "operator on {:?} applied to state on {:?}",
                self.dims.labels(),
                state.dims.labels()
            )));
        }
        Ok(StateVector::unnormalized(self.dims.clone(), &self.matrix * &state.amplitudes))
    }

    /// `<state|self|state>`.
    pub fn expectation(&self, state: &StateVector) -> Result<C64> {
        let applied = self.apply(state)?;
        Ok(state.inner(&applied))
    }

    /// `<bra|self|ket>`.
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> Result<C64> {
        let applied = self.apply(ket)?;
        if bra.dims != applied.dims {
            return Err(Error::DimensionMismatch("bra and ket on different spaces".into()));
        }
        Ok(bra.inner(&applied))
    }

    /// Embed an operator acting on a subset of factors into `full`, with
    /// identity on the remaining factors.
    pub fn embed(&self, full: &DimensionSpec) -> Result<Operator> {
        let axes = full.axes_of(&self.dims.labels())?;
        for (i, &ax) in axes.iter().enumerate() {
            if full.factors()[ax].dim != self.dims.factors()[i].dim {
                return Err(Error::DimensionMismatch(format!(
                    "factor `{}` has different dimensions",
                    self.dims.factors()[i].label
                )));
            }
        }
        let rest = full.complement(&axes);
        let act = full.offsets(&axes);
        let spectator = full.offsets(&rest);
        let n = full.total();
        let mut m = DMatrix::zeros(n, n);
        for &s in &spectator {
            for (r, &ro) in act.iter().enumerate() {
                for (c, &co) in act.iter().enumerate() {
                    let v = self.matrix[(r, c)];
                    if v != C64::new(0.0, 0.0) {
                        m[(s + ro, s + co)] = v;
                    }
                }
            }
        }
        Operator::new(full.clone(), m)
    }
}

/// Complex amplitude vector on a labelled space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: DimensionSpec,
    amplitudes: DVector<C64>,
    normalized: bool,
}

impl StateVector {
    /// A normalized state; fails unless the norm is 1 within `NORM_TOL`.
    pub fn new(dims: DimensionSpec, amplitudes: DVector<C64>) -> Result<Self> {
        check_len(&dims, amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes, normalized: true })
    }

    /// Rescale `amplitudes` to unit norm.
    pub fn normalize(dims: DimensionSpec, amplitudes: DVector<C64>) -> Result<Self> {
        check_len(&dims, amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes: amplitudes / C64::new(norm, 0.0), normalized: true })
    }

    /// A vector flagged as unnormalized (truncated series, projections).
    pub fn unnormalized(dims: DimensionSpec, amplitudes: DVector<C64>) -> Self {
        assert_eq!(dims.total(), amplitudes.len(), "amplitude length must match dims");
        Self { dims, amplitudes, normalized: false }
    }

    pub fn from_slice(dims: DimensionSpec, amplitudes: &[C64]) -> Result<Self> {
        Self::new(dims, DVector::from_column_slice(amplitudes))
    }

    pub fn dims(&self) -> &DimensionSpec {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn relabel(&self, dims: DimensionSpec) -> Result<Self> {
        if dims.dims() != self.dims.dims() {
            return Err(Error::DimensionMismatch("relabel must keep factor dimensions".into()));
        }
        Ok(Self { dims, amplitudes: self.amplitudes.clone(), normalized: self.normalized })
    }

    /// `|self><self|`.
    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { dims: self.dims.clone(), matrix: m, normalized: self.normalized }
    }

    /// Max-amplitude difference to another state on the same space.
    pub fn max_difference(&self, other: &StateVector) -> f64 {
        (&self.amplitudes - &other.amplitudes).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_len(dims: &DimensionSpec, len: usize) -> Result<()> {
    if dims.total() != len {
        return Err(Error::DimensionMismatch(format!("{} amplitudes for total dimension {}", len, dims.total())));
    }
    Ok(())
}

/// Hermitian positive semidefinite matrix. Post-selected matrices carry
/// `normalized == false` and a trace equal to the selection probability.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: DimensionSpec,
    matrix: DMatrix<C64>,
    normalized: bool,
}

impl DensityMatrix {
    /// Validated unit-trace density matrix.
    pub fn new(dims: DimensionSpec, matrix: DMatrix<C64>) -> Result<Self> {
        let rho = Self::unchecked(dims, matrix, true)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Validated PSD matrix without the unit-trace requirement.
    pub fn new_unnormalized(dims: DimensionSpec, matrix: DMatrix<C64>) -> Result<Self> {
        let rho = Self::unchecked(dims, matrix, false)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn unchecked(dims: DimensionSpec, matrix: DMatrix<C64>, normalized: bool) -> Result<Self> {
        let n = dims.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "density matrix is {}x{}, dims require {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { dims, matrix, normalized })
    }

    pub fn maximally_mixed(dims: DimensionSpec) -> Self {
        let n = dims.total();
        Self { dims, matrix: DMatrix::identity(n, n) / C64::new(n as f64, 0.0), normalized: true }
    }

    pub fn dims(&self) -> &DimensionSpec {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Check Hermiticity, positivity and (when flagged) unit trace.
    pub fn validate(&self) -> Result<()> {
        let defect = hermiticity_defect(&self.matrix);
        if defect > COMPUTED_HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("Hermiticity defect {defect:e}")));
        }
        let eig = eigh_matrix(&self.matrix, COMPUTED_HERMITIAN_TOL)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < PSD_FLOOR {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        if self.normalized && (self.trace() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDensity(format!("trace {}", self.trace())));
        }
        Ok(())
    }

    /// Copy with unit trace; eigenvalues above the PSD floor are clipped to 0.
    pub fn normalized(&self) -> Result<DensityMatrix> {
        let eig = eigh_matrix(&self.matrix, COMPUTED_HERMITIAN_TOL)?;
        if eig.values.iter().any(|&v| v < PSD_FLOOR) {
            return Err(Error::InvalidDensity("matrix is not positive semidefinite".into()));
        }
        let clipped: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDensity("zero trace".into()));
        }
        let scaled = DVector::from_iterator(clipped.len(), clipped.iter().map(|&v| C64::new(v / total, 0.0)));
        let m = &eig.vectors * DMatrix::from_diagonal(&scaled) * eig.vectors.adjoint();
        Ok(Self { dims: self.dims.clone(), matrix: m, normalized: true })
    }

    /// `Tr[rho O]`.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.dims() != &self.dims {
            return Err(Error::DimensionMismatch("operator and density matrix on different spaces".into()));
        }
        Ok((&self.matrix * op.matrix()).trace())
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dims.dims() != other.dims.dims() {
            return Err(Error::DimensionMismatch("trace distance between different spaces".into()));
        }
        let diff = &self.matrix - &other.matrix;
        let eig = eigh_matrix(&diff, COMPUTED_HERMITIAN_TOL)?;
        Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
    }
}

/// Kronecker product of like objects; factor labels are concatenated.
pub trait Kron: Sized {
    fn kron(&self, other: &Self) -> Result<Self>;
}

impl Kron for Operator {
    fn kron(&self, other: &Self) -> Result<Self> {
        Ok(Operator { dims: self.dims.concat(&other.dims)?, matrix: self.matrix.kronecker(&other.matrix) })
    }
}

impl Kron for StateVector {
    fn kron(&self, other: &Self) -> Result<Self> {
        Ok(StateVector {
            dims: self.dims.concat(&other.dims)?,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            normalized: self.normalized && other.normalized,
        })
    }
}

impl Kron for DensityMatrix {
    fn kron(&self, other: &Self) -> Result<Self> {
        Ok(DensityMatrix {
            dims: self.dims.concat(&other.dims)?,
            matrix: self.matrix.kronecker(&other.matrix),
            normalized: self.normalized && other.normalized,
        })
    }
}

pub fn kron<T: Kron>(a: &T, b: &T) -> Result<T> {
    a.kron(b)
}

/// Kronecker product of a non-empty list.
pub fn kron_all<T: Kron + Clone>(items: &[T]) -> Result<T> {
    let (first, rest) =
        items.split_first().ok_or_else(|| Error::DimensionMismatch("empty Kronecker product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, x| acc.kron(x))
}

/// Reduced density matrix on the `keep` factors (kept in original order).
pub fn partial_trace<S: AsRef<str>>(rho: &DensityMatrix, keep: &[S]) -> Result<DensityMatrix> {
    let dims = &rho.dims;
    let mut keep_axes = dims.axes_of(keep)?;
    keep_axes.sort_unstable();
    let traced = dims.complement(&keep_axes);
    let ko = dims.offsets(&keep_axes);
    let to = dims.offsets(&traced);
    let n = ko.len();
    let m = DMatrix::from_fn(n, n, |r, c| to.iter().map(|&t| rho.matrix[(ko[r] + t, ko[c] + t)]).sum::<C64>());
    DensityMatrix::unchecked(dims.select(&keep_axes)?, m, rho.normalized)
}

/// Amplitude matrix with rows over `row_axes` and columns over `col_axes`.
pub(crate) fn reshape(state: &StateVector, row_axes: &[usize], col_axes: &[usize]) -> DMatrix<C64> {
    let ro = state.dims.offsets(row_axes);
    let co = state.dims.offsets(col_axes);
    DMatrix::from_fn(ro.len(), co.len(), |r, c| state.amplitudes[ro[r] + co[c]])
}

/// Reduced density matrix of a pure (possibly unnormalized) state.
pub fn reduced_density<S: AsRef<str>>(state: &StateVector, keep: &[S]) -> Result<DensityMatrix> {
    let dims = &state.dims;
    let mut keep_axes = dims.axes_of(keep)?;
    keep_axes.sort_unstable();
    let traced = dims.complement(&keep_axes);
    let m = reshape(state, &keep_axes, &traced);
    let rho = &m * m.adjoint();
    DensityMatrix::unchecked(dims.select(&keep_axes)?, rho, state.normalized)
}

/// Eigenvalues in ascending order with matching unitary eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = DVector::from_iterator(self.values.len(), self.values.iter().map(|&v| C64::new(v, 0.0)));
        &self.vectors * DMatrix::from_diagonal(&d) * self.vectors.adjoint()
    }
}

pub(crate) fn eigh_matrix(m: &DMatrix<C64>, tolerance: f64) -> Result<HermitianEigen> {
    let defect = hermiticity_defect(m);
    let scale = 1.0f64.max(max_abs(m));
    if defect > tolerance * scale {
        return Err(Error::NotHermitian { defect, tolerance });
    }
    // symmetrize so roundoff does not leak into the solver
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Hermitian eigendecomposition `H = V diag(values) V^dagger`.
pub fn eigh(h: &Operator) -> Result<HermitianEigen> {
    eigh_matrix(h.matrix(), INPUT_HERMITIAN_TOL)
}

/// `exp(-i s H)` through the eigendecomposition of `H`.
pub fn unitary_from_generator(h: &Operator, s: f64) -> Result<Operator> {
    let eig = eigh_matrix(h.matrix(), COMPUTED_HERMITIAN_TOL)?;
    let phases = DVector::from_iterator(eig.values.len(), eig.values.iter().map(|&v| C64::from_polar(1.0, -s * v)));
    let u = &eig.vectors * DMatrix::from_diagonal(&phases) * eig.vectors.adjoint();
    Operator::new(h.dims().clone(), u)
}

/// Two-group split of factor labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub first: Vec<String>,
    pub second: Vec<String>,
}

impl Bipartition {
    pub fn new<S: Into<String>>(first: impl IntoIterator<Item = S>, second: impl IntoIterator<Item = S>) -> Self {
        Self {
            first: first.into_iter().map(Into::into).collect(),
            second: second.into_iter().map(Into::into).collect(),
        }
    }

    /// Resolve to axes; both groups must be non-empty, disjoint and
    /// together cover every factor of `dims`.
    pub(crate) fn axes(&self, dims: &DimensionSpec) -> Result<(Vec<usize>, Vec<usize>)> {
        if self.first.is_empty() || self.second.is_empty() {
            return Err(Error::InvalidPartition("both groups must be non-empty".into()));
        }
        let a = dims.axes_of(&self.first)?;
        let b = dims.axes_of(&self.second)?;
        if a.iter().any(|x| b.contains(x)) {
            return Err(Error::InvalidPartition("groups overlap".into()));
        }
        if a.len() + b.len() != dims.len() {
            return Err(Error::InvalidPartition(format!(
                "groups {:?} | {:?} do not cover {:?}",
                self.first,
                self.second,
                dims.labels()
            )));
        }
        Ok((a, b))
    }

    pub fn describe(&self) -> String {
        format!("{} | {}", self.first.join(","), self.second.join(","))
    }
}

/// Schmidt data of a pure state across a bipartition.
#[derive(Clone, Debug, PartialEq)]
pub struct Schmidt {
    /// Descending, non-negative.
    pub coefficients: Vec<f64>,
    pub rank: usize,
}

impl Schmidt {
    /// Entanglement entropy in nats of the normalized coefficients.
    pub fn entropy(&self) -> f64 {
        let total: f64 = self.coefficients.iter().map(|c| c * c).sum();
        self.coefficients.iter().map(|c| c * c / total).filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
    }
}

pub fn schmidt(state: &StateVector, cut: &Bipartition) -> Result<Schmidt> {
    schmidt_with_tolerance(state, cut, RANK_TOL)
}

pub fn schmidt_with_tolerance(state: &StateVector, cut: &Bipartition, rank_tol: f64) -> Result<Schmidt> {
    let (a, b) = cut.axes(state.dims())?;
    let m = reshape(state, &a, &b);
    // singular values only: nalgebra's complex singular vectors are not
    // reliable to full precision when many values cluster at zero
    let mut coefficients: Vec<f64> = m.singular_values().iter().copied().collect();
    coefficients.sort_by(|x, y| y.total_cmp(x));
    let rank = coefficients.iter().filter(|&&c| c > rank_tol).count();
    Ok(Schmidt { coefficients, rank })
}

/// Split a vector into one factor per tensor factor of `dims`, when it is a
/// product. The overall scale is absorbed into the first factor; the other
/// factors are normalized.
pub(crate) fn factorize_product(vector: &StateVector, tolerance: f64) -> Result<Vec<StateVector>> {
    let dims = vector.dims().clone();
    let scale = vector.norm().max(f64::MIN_POSITIVE);
    let mut factors_rev = Vec::with_capacity(dims.len());
    let mut rest = vector.amplitudes.clone();
    // peel factors off the back
    for ax in (1..dims.len()).rev() {
        let head_spec = dims.select(&(0..ax).collect::<Vec<_>>())?;
        let tail_dim = dims.factors[ax].dim;
        // row-major: rest[h * tail_dim + t]
        let m = DMatrix::from_fn(head_spec.total(), tail_dim, |h, t| rest[h * tail_dim + t]);
        let gram = m.adjoint() * &m;
        let eig = eigh_matrix(&gram, COMPUTED_HERMITIAN_TOL)?;
        let w = eig.vectors.column(tail_dim - 1).into_owned();
        let head = &m * &w;
        let fitted = &head * w.adjoint();
        let residual = (&m - fitted).norm();
        if residual > tolerance * scale {
            return Err(Error::NotProduct { residual });
        }
        factors_rev.push(StateVector::normalize(dims.select(&[ax])?, w.map(|z| z.conj()))?);
        rest = head;
    }
    factors_rev.push(StateVector::unnormalized(dims.select(&[0])?, rest));
    factors_rev.reverse();
    Ok(factors_rev)
}

/// Trace distance `1/2 ||A - B||_1` between two low-rank PSD matrices given
/// as weighted sums of outer products `sum_k w_k |v_k><v_k|`. Exact: the
/// difference is diagonalized on the span of all vectors.
pub fn trace_distance_low_rank(a: &[(f64, DVector<C64>)], b: &[(f64, DVector<C64>)]) -> Result<f64> {
    let n =
        a.iter().chain(b).map(|(_, v)| v.len()).next().ok_or_else(|| Error::DimensionMismatch("no vectors".into()))?;
    if a.iter().chain(b).any(|(_, v)| v.len() != n) {
        return Err(Error::DimensionMismatch("vectors of different lengths".into()));
    }
    let cols: Vec<&DVector<C64>> = a.iter().chain(b).map(|(_, v)| v).collect();
    let r = cols.len().min(n);
    let w = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    // orthonormal basis of the column span
    let q = if cols.len() <= n { w.qr().q() } else { DMatrix::identity(n, n) };
    let mut d = DMatrix::<C64>::zeros(q.ncols(), q.ncols());
    for (sign, set) in [(1.0, a), (-1.0, b)] {
        for (weight, v) in set {
            let p = q.adjoint() * v;
            d += &p * p.adjoint() * C64::new(sign * weight, 0.0);
        }
    }
    debug_assert!(q.ncols() >= r);
    let eig = eigh_matrix(&d, COMPUTED_HERMITIAN_TOL)?;
    Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
}
