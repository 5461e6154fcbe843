use alloc::string::String;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Malformed input: wrong dimensions, out-of-range symbols, non-finite values.
    #[error("invalid input: {0}")]
    Input(String),
    /// Input is well formed but outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! input_err {
    ($($arg:tt)*) => { $crate::error::Error::Input(alloc::format!($($arg)*)) };
}
macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! numeric_err {
    ($($arg:tt)*) => { $crate::error::Error::Numeric(alloc::format!($($arg)*)) };
}
pub(crate) use {domain_err, input_err, numeric_err};
