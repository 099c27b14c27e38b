//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("empty coefficient list")]
    EmptyCoefficients,

    #[error("non-finite coefficient f_{index} = {value}")]
    NonFiniteCoefficient { index: usize, value: f64 },

    #[error("prefactor must be finite and nonzero, got {0}")]
    BadPrefactor(f64),

    #[error("insufficient published coefficients for {model}: requested order {requested}, only {available} available")]
    InsufficientCoefficients {
        model: String,
        requested: usize,
        available: usize,
    },

    #[error("auxiliary series undefined: parent has f_0 = {0}, expected 0")]
    AuxiliaryUndefined(f64),

    #[error("order {requested} out of range for series of order {order}")]
    OrderOutOfRange { requested: usize, order: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quadrature failed to converge: residual estimate {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureNonConvergence { residual: f64, tolerance: f64 },

    #[error("ambiguous tie between extrema at p = {0:.6} and p = {1:.6} (equal S values)")]
    AmbiguousTie(f64, f64),

    #[error("need at least {needed} orders of records, got {got}")]
    InsufficientOrders { needed: usize, got: usize },

    #[error("no fixed point detected")]
    NoFixedPoint,

    #[error("no zero in bracket [{0}, {1}]")]
    NoZeroInBracket(f64, f64),

    #[error("no exact-sum oracle for model {0}")]
    NoExactOracle(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
