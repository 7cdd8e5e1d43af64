use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),
    #[error("factor `{0}` must have a positive dimension")]
    ZeroDimension(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not Hermitian (defect {defect:e} > {tolerance:e})")]
    NotHermitian { defect: f64, tolerance: f64 },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid pointer grid: {0}")]
    InvalidGrid(String),
    #[error("pointer `{label}` leaves the box: needs half-width {required:.4}, box half-width is {available:.4}")]
    Leakage { label: String, required: f64, available: f64 },
    #[error("Gaussian tail mass {mass:e} outside the box exceeds {limit:e}")]
    TailLeakage { mass: f64, limit: f64 },
    #[error("post-selected state is orthogonal to the initial state (|<F|I>| = {overlap:e})")]
    OrthogonalPostselection { overlap: f64 },
    #[error("post-selection probability {probability:e} is numerically zero")]
    ImpossiblePostselection { probability: f64 },
    #[error("coupling observables do not commute (commutator max-norm {norm:e})")]
    NonCommuting { norm: f64 },
    #[error("system state lies outside the C_z = -1 eigenspace (defect {defect:e})")]
    OutsideEigenspace { defect: f64 },
    #[error("dense matrix of dimension {dim} exceeds the limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("vector does not factor into a product across the requested factors (residual {residual:e})")]
    NotProduct { residual: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
