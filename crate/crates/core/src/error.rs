use thiserror::Error;

/// Errors shared by the numeric modules of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient data: {feasible} feasible point(s), at least {required} required")]
    InsufficientData { feasible: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// Checks `lo <= value <= hi`, rejecting NaN.
pub(crate) fn check_range(name: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {value} outside [{lo}, {hi}]")))
    }
}
