use alloc::string::String;
use core::fmt;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// Adaptive quadrature ran out of subdivisions; carries the partial estimate.
    NotConverged { partial: f64, error_estimate: f64 },
    /// A power series could not be truncated below the requested tolerance
    /// within the degree cap; carries the partial sum over the available terms.
    Truncation { partial: Complex64, degree: usize, tail_bound: f64 },
    /// A symbol that is not a function of `(|w|, <e1, w>)` was handed to the
    /// slice-based projection.
    NotSliceForm(String),
    /// Malformed descriptor or configuration.
    Invalid(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NotConverged { partial, error_estimate } => write!(
                f,
                "quadrature did not converge (partial value {partial:e}, error estimate {error_estimate:e})"
            ),
            Error::Truncation { partial, degree, tail_bound } => write!(
                f,
                "series truncation failed at degree {degree} (tail bound {tail_bound:e}, partial sum {partial})"
            ),
            Error::NotSliceForm(msg) => write!(f, "symbol is not in slice form: {msg}"),
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
