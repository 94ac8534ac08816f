use alloc::string::String;
use core::fmt;

/// Errors raised by the simulation and analytic routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its precondition.
    Parameter(String),
    /// A value fell outside the domain of an inverse or a distribution.
    Domain(String),
    /// Edge-list text could not be parsed.
    Parse { line: usize, message: String },
    /// Aggregation over an empty set of results.
    Empty,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Empty => f.write_str("no results to aggregate"),
        }
    }
}

impl core::error::Error for Error {}

/// Checks that `p` is a probability.
pub(crate) fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(alloc::format!(
            "{name} = {p} is not in [0, 1]"
        )))
    }
}
