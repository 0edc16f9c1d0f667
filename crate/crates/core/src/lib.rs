//! Exact recognition, transformation and verification of binomial sums as
//! generalized hypergeometric series.

pub mod exact;
pub mod hyper;
pub mod identities;
pub mod rules;
pub mod special;
