use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeamError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix has a negative eigenvalue {eigenvalue:.3e}")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("range violation: {0}")]
    RangeViolation(String),

    #[error(
        "positivity violation: operator ({frame}, {element}) has minimum eigenvalue {min_eigenvalue:.6e}"
    )]
    PositivityViolation {
        frame: usize,
        element: usize,
        min_eigenvalue: f64,
    },

    #[error("not a conical 2-design: symmetry constants spread by {spread:.3e}")]
    NotADesign { spread: f64 },

    #[error("no positive symmetry constant found for this basis")]
    NoPositiveS,

    #[error("frame {0} has tau = 0; the operator basis cannot be recovered")]
    DegenerateFrame(usize),

    #[error("input is not a pure state (purity {purity})")]
    ImpureInput { purity: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, GeamError>;

impl From<serde_json::Error> for GeamError {
    fn from(err: serde_json::Error) -> Self {
        GeamError::Serialization(err.to_string())
    }
}
