use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("breakpoints must be finite and strictly increasing (index {index})")]
    Breakpoints { index: usize },
    #[error("matrix function has no pieces")]
    EmptyPieces,
    #[error("expected {expected} pieces for {breakpoints} breakpoints, got {got}")]
    PieceCount {
        breakpoints: usize,
        expected: String,
        got: usize,
    },
    #[error("piece {piece} has degree {degree}, above the cap {cap}")]
    DegreeTooHigh {
        piece: usize,
        degree: usize,
        cap: usize,
    },
    #[error("solution blew up near x = {last_x} (state norm above {threshold:e})")]
    BlowUp { last_x: f64, threshold: f64 },
    #[error("step budget of {budget} steps exhausted near x = {last_x}")]
    StepBudget { budget: usize, last_x: f64 },
    #[error("step size underflow near x = {last_x}; tolerance not achievable")]
    StepUnderflow { last_x: f64 },
    #[error("x = {x} lies outside the interval [{a}, {b}]")]
    OutOfInterval { x: f64, a: f64, b: f64 },
    #[error("bracket needs a solution of l and a solution of l+ for the same potential: {0}")]
    AdjointMismatch(String),
    #[error("potential symmetry class {0} not allowed here")]
    SymmetryClass(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("quadrature did not converge on [{a}, {b}] (estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BlowUp { .. }
                | Error::StepBudget { .. }
                | Error::StepUnderflow { .. }
                | Error::Singular(_)
                | Error::Quadrature { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
