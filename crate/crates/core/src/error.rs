use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{what} = {value} is outside [0, 1]")]
    Domain { what: &'static str, value: f64 },

    /// The input does not satisfy a structural precondition (monotonicity, density, ...).
    #[error("contract violated: {0}")]
    Contract(String),

    /// A malformed representation was rejected by a constructor.
    #[error("invalid representation: {0}")]
    Invalid(String),

    /// A size or parameter is outside the supported range.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}
