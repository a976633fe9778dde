use thiserror::Error;

use crate::operators::OperatorId;
use crate::state::ModeWindow;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient vector has zero norm")]
    ZeroNorm,

    #[error("expected {expected} coefficients for window {window}, got {got}")]
    LengthMismatch {
        window: ModeWindow,
        expected: usize,
        got: usize,
    },

    #[error("grid of {grid} points cannot represent window {window}; need at least {needed}")]
    Undersampled {
        window: ModeWindow,
        grid: usize,
        needed: usize,
    },

    #[error("grid size {0} is not a power of two")]
    GridNotPowerOfTwo(usize),

    #[error("truncation M must be at least 1")]
    EmptyWindow,

    #[error("operator {id:?} is not defined on window {window}")]
    IncompatibleFamily { id: OperatorId, window: ModeWindow },

    #[error("window mismatch: {left} vs {right}")]
    WindowMismatch { left: ModeWindow, right: ModeWindow },

    #[error("operation needs a symmetric (circle) window, got {0}")]
    WrongFamily(ModeWindow),

    #[error(
        "mean angular momentum {ell} is not an integer; circular squeezed states are \
         periodic only for integer <L>, so no such minimum-uncertainty state exists"
    )]
    IntegerRequired { ell: f64 },

    #[error("tail mass {tail:.3e} exceeds {limit:.1e}; enlarge the truncation")]
    TailMass { tail: f64, limit: f64 },

    #[error("alpha = {alpha} lies outside the truncated spectrum [{min}, {max}]")]
    OutOfRange { alpha: f64, min: f64, max: f64 },

    #[error("variance {0:.3e} is negative beyond rounding tolerance")]
    NegativeVariance(f64),

    #[error("<cos>^2 + <sin>^2 vanishes; combined phase uncertainty is undefined")]
    CombinedPhiUndefined,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("modulus profile: {0}")]
    InvalidProfile(String),

    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,

    #[error("minimization did not converge: {0}")]
    NoConvergence(String),

    #[error("pencil residual {residual:.3e} exceeds bound {bound:.3e}")]
    PencilResidual { residual: f64, bound: f64 },

    #[error("state parse error: {0}")]
    Parse(String),
}
