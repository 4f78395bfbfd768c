use alloc::string::String;

/// Failure modes shared by every module of the core crate.
///
/// Bracket indices carried by algebra errors are 1-based, matching the
/// on-disk algebra format.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("antisymmetry violated by bracket [X{i}, X{j}] -> X{k}")]
    AntisymmetryViolation { i: usize, j: usize, k: usize },
    #[error("grading violated by bracket [X{i}, X{j}] -> X{k}")]
    GradingViolation { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails on (X{i}, X{j}, X{k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("first layer does not generate layer {layer}")]
    NotStratified { layer: u32 },
    #[error("first layer has dimension {dim}, need at least 2")]
    DegenerateLayer { dim: usize },
    #[error("dilation parameter must be positive")]
    NonpositiveScale,
    #[error("{what} did not converge: last {last:e}, previous {previous:e}")]
    ConvergenceFailure {
        what: &'static str,
        last: f64,
        previous: f64,
    },
    #[error("evaluation leaves the grid domain")]
    OutOfDomain,
    #[error("gauge boundary not reached along a ray")]
    GaugeFailure,
    #[error("operation requires an abelian algebra")]
    NotAbelian,
    #[error("bandwidth too small: median point has {neighbours} neighbours")]
    BandwidthTooSmall { neighbours: usize },
    #[error("bump is not normalised: integral {integral}")]
    NotNormalized { integral: f64 },
    #[error("dilated cloud too coarse or too large for the grid")]
    SupportTooLarge,
    #[error("measure is not mean-zero")]
    NotMeanZero,
    #[error("sign set incomplete: missing index {missing}")]
    SignsIncomplete { missing: i32 },
    #[error("invalid exponent {0}")]
    InvalidExponent(f64),
    #[error("ad-kernel has dimension {dim}, need at least 2")]
    KernelTooSmall { dim: usize },
    #[error("no sign change on the bracketing interval")]
    NoSignChange,
    #[error("window too small: end term {term:e} at k = {boundary}")]
    WindowTooSmall { boundary: i32, term: f64 },
    #[error("insufficient data: {points} usable points")]
    InsufficientData { points: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: &str) -> Result<T> {
    Err(Error::InvalidArgument(String::from(msg)))
}
