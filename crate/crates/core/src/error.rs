use thiserror::Error;

/// Errors raised by the diagonalization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is singular to working precision (condition estimate {cond:e})")]
    Singular { cond: f64 },

    #[error("Khatri-Rao matrix is rank deficient (|r_jj| min/max = {ratio:e})")]
    RankDeficientKhatriRao { ratio: f64 },

    #[error("eigensolver did not converge")]
    EigenFailure,

    #[error("singular value decomposition did not converge")]
    SvdFailure,

    #[error("structured matrix is not in the range of the Kronecker-sum map (relative round-trip error {rel_err:e})")]
    NotInRange { rel_err: f64 },

    #[error("tuple is not simultaneously diagonalizable: matrix {index} has relative off-block mass {mass:e}")]
    NotSimultaneouslyDiagonalizable { index: usize, mass: f64 },

    #[error("pseudo common diagonalizer needs at least one diagonalizable matrix; none found")]
    NoDiagonalizableMember,

    #[error("sh-rt requires a real tuple; matrix {index} has imaginary entries")]
    ComplexInput { index: usize },

    #[error("zero column {index} in diagonalizer")]
    ZeroColumn { index: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
