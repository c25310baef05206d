//! Asymptotic ramp secret sharing for probability vectors.
//!
//! Composite DNA letters store data as scaled probability vectors, not
//! finite-field symbols, so classical ramp secret sharing does not apply
//! directly. This crate implements a sharing scheme that encodes and decodes
//! probability vectors in place through a mixture-friendly matrix product
//! (circle multiplication), along with:
//!
//! - generator constructions (Vandermonde, Cauchy, random, circulant) with
//!   exact rank-condition verification and OC/IL quality indicators;
//! - block generators for multi-vessel shares built from EVENODD codes,
//!   binary polynomial-ring cyclic shifts, or Kronecker lifting;
//! - end-to-end encode/recover with negative shares, mixture planning, and
//!   sequencing/synthesis cost accounting against a finite-field baseline;
//! - exact information-leakage analysis: conditional entropies by full
//!   enumeration, Smith-normal-form Diophantine solution counting, secrecy
//!   bounds, and the closed-form entropy of the smallest scalar scheme.
//!
//! Everything on the data path is exact (big integers and rationals);
//! floating point appears only when entropies are reported in bits.

pub mod array_codes;
pub mod circle;
pub mod error;
pub mod generator;
pub mod leakage;
pub mod matrix;
pub mod prob;
pub mod scheme;
pub mod snf;

pub use error::{Error, Result};
pub use matrix::{IntMatrix, RatMatrix};
pub use prob::{AlphabetSpec, ProbSequence, ProbVector};
