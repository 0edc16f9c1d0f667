//! High-precision numerics: elementary constants, the dilogarithm, digamma
//! and trigamma, and summation of convergent hypergeometric series.

mod float;
mod functions;
mod series;

use thiserror::Error;

use crate::hyper::HyperError;

pub use float::{BigFloat, Precision, GUARD_DIGITS};
pub use functions::{
    digamma, euler_gamma, li2, li2_five_term, li2_rational, ln, ln2, ln_rational, pi,
    pi2_minus_trigamma_half, trigamma,
};
pub use series::{accelerate_alternating, eval_pfq_numeric, Accelerated};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecialError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("terms stop alternating at index {0}")]
    NotAlternating(u64),
    #[error("series diverges")]
    Divergent,
    #[error("no convergence within {0} terms")]
    MaxTermsExceeded(u64),
    #[error(transparent)]
    Hyper(#[from] HyperError),
}

pub type Result<T> = std::result::Result<T, SpecialError>;
