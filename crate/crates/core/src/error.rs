use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("correlation x must lie in [0, 1], got {0}")]
    CorrelationOutOfRange(f64),
    #[error("angle distribution is degenerate at x = {0}; only closed forms accept x = 1")]
    DegenerateCorrelation(f64),
    #[error("insufficient effort: {0}")]
    InsufficientEffort(String),
    #[error("|alpha| = {0} exceeds the weak-state guard {1}")]
    AmplitudeTooLarge(f64, f64),
    #[error("beam splitter needs two distinct slots")]
    SameSlot,
    #[error("matrix dimension {0} outside the supported range 2..=9")]
    BadDimension(usize),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NotConverged(usize),
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("moments violate a + b + epsilon = 1 (defect {0:e})")]
    InconsistentMoments(f64),
    #[error("regime precondition violated: {0}")]
    Regime(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
