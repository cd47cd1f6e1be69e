use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdiaError {
    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NonHermitianInput { defect: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("schedule parameter s = {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("matrix is not diagonalizable within tolerance (residual {residual:.3e})")]
    DefectiveMatrix { residual: f64 },

    #[error("no eigenvalue within the zero tolerance")]
    EmptyKernel,

    #[error("shifted generator M + P is numerically singular (rcond {rcond:.3e})")]
    SingularShift { rcond: f64 },

    #[error("Liouvillian gap {gap:.3e} at s = {s} is below threshold {threshold:.3e}")]
    GapTooSmall { s: f64, gap: f64, threshold: f64 },

    #[error("requested order {requested} exceeds maximum {max}")]
    OrderTooHigh { requested: usize, max: usize },

    #[error("integrator did not converge: discrepancy {discrepancy:.3e} after {steps} steps")]
    NonConvergence { discrepancy: f64, steps: usize },

    #[error("projector failed at s = {s}: {reason}")]
    ProjectorFailure { s: f64, reason: String },

    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    #[error("quadrature error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    #[error("Hamiltonian gap {gap:.3e} too small")]
    DegenerateHamiltonian { gap: f64 },

    #[error("Gibbs state has eigenvalue {min_eigenvalue:.3e} below 1e-14")]
    SingularGibbs { min_eigenvalue: f64 },

    #[error("kernel has rank {rank}; expansion beyond first order needs a unique steady state")]
    DegenerateKernel { rank: usize },

    #[error("insufficient data: {rows} rows in fit window, need at least {required}")]
    InsufficientData { rows: usize, required: usize },

    #[error("K is not anti-Hermitian (defect {defect:.3e})")]
    NonAntiHermitianK { defect: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T, E = AdiaError> = std::result::Result<T, E>;

impl From<ndarray_linalg::error::LinalgError> for AdiaError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        AdiaError::Linalg(e.to_string())
    }
}
