use thiserror::Error;

/// Broad category of an [`Error`], used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: parse errors, unknown names, shape mismatches.
    Input,
    /// A documented precondition of an operation does not hold.
    Precondition,
    /// A floating-point procedure failed to produce a trustworthy answer.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable lists differ: [{left}] vs [{right}]")]
    VariableMismatch { left: String, right: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("division at byte {offset}: {message}")]
    BadDivision { offset: usize, message: String },

    #[error("bad exponent at byte {offset}: exponents must be non-negative integer literals")]
    BadExponent { offset: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("polynomial division is not exact")]
    InexactDivision,

    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("unbound parameters: {}", .0.join(", "))]
    UnboundParameters(Vec<String>),

    #[error("{0}")]
    Precondition(String),

    #[error("root finder did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence {
        sweeps: usize,
        residual: f64,
        best: Vec<(f64, f64)>,
    },

    #[error("{0}")]
    Numerical(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            VariableMismatch { .. }
            | UnknownVariable(_)
            | Syntax { .. }
            | UnknownIdentifier { .. }
            | BadDivision { .. }
            | BadExponent { .. }
            | NotSquare { .. }
            | DimensionMismatch(_)
            | IndexOutOfRange(_)
            | InvalidArgument(_)
            | UnknownModel(_)
            | UnknownParameter(_)
            | UnboundParameters(_) => ErrorKind::Input,
            DivisionByZero | InexactDivision | ZeroPolynomial | Precondition(_) => {
                ErrorKind::Precondition
            }
            NonConvergence { .. } | Numerical(_) => ErrorKind::Numerical,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
