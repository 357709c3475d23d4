use alloc::string::String;

use crate::exact_arith::InterpError;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unstable type (g, n) = ({g}, {n})")]
    Unstable { g: u32, n: usize },
    #[error("dimension mismatch: exponents sum to {got}, expected {expected}")]
    DimensionMismatch { expected: i64, got: i64 },
    #[error("interpolation failed: {0}")]
    Interpolation(#[from] InterpError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("linear solve infeasible: {0}")]
    Infeasible(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
