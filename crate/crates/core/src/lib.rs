//! Numerical experiments around joint universality of ζ along shifted
//! vertical lines: ζ and its logarithm in the strip, prime Dirichlet sums,
//! effective Kronecker approximation, prime-phase targeting and τ-set scans.

// `!(x > 0.0)` style guards are how NaN gets rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dirichlet;
pub mod kronecker;
pub mod numeric;
pub mod primes;
pub mod report;
pub mod targeting;
pub mod zeta;
