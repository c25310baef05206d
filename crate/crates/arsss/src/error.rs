//! Error type shared by every module in the crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A probability value was negative.
    NegativeValue { index: usize, value: i64 },
    /// A vector's length disagrees with the requested alphabet width.
    WidthMismatch { expected: usize, got: usize },
    /// The resolution is not divisible by the alphabet width.
    NotDivisible { q: i64, m: usize },
    /// A value exceeds the restricted range [0, 2q/m].
    NotRestricted { index: usize, value: i64, cap: i64 },
    DimensionMismatch { expected: usize, got: usize },
    /// A matrix required to be invertible is singular over the rationals.
    Singular,
    /// A decode produced values outside the integers (corrupted input).
    NonIntegralSolution(String),
    BadParams(String),
    /// A generator matrix violates one of the two rank conditions.
    RankConditionViolated { condition: u8, rows: Vec<usize> },
    NotEnoughShares { needed: usize, got: usize },
    /// Mixture method (i) asked for negative shares that were never synthesized.
    NegativesUnavailable,
    /// Smith normal form requires a full-row-rank input here.
    NotFullRank,
    /// An enumeration would exceed the configured state cap.
    TooLarge { states: u128, cap: u128 },
    /// No prime field small enough for the naive baseline.
    FieldTooLarge { needed: u64, cap: u64 },
    /// A shares bundle was produced by a different generator matrix.
    FingerprintMismatch,
    Parse(String),
    /// Integer arithmetic left the fixed-width range used for share values.
    Overflow(String),
}

impl Error {
    /// Stable machine-parseable code, used verbatim by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NegativeValue { .. } => "NEGATIVE_VALUE",
            Error::WidthMismatch { .. } => "WIDTH_MISMATCH",
            Error::NotDivisible { .. } => "NOT_DIVISIBLE",
            Error::NotRestricted { .. } => "NOT_RESTRICTED",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::Singular => "SINGULAR",
            Error::NonIntegralSolution(_) => "NON_INTEGRAL_SOLUTION",
            Error::BadParams(_) => "BAD_PARAMS",
            Error::RankConditionViolated { .. } => "RANK_CONDITION_VIOLATED",
            Error::NotEnoughShares { .. } => "NOT_ENOUGH_SHARES",
            Error::NegativesUnavailable => "NEGATIVES_UNAVAILABLE",
            Error::NotFullRank => "NOT_FULL_RANK",
            Error::TooLarge { .. } => "TOO_LARGE",
            Error::FieldTooLarge { .. } => "FIELD_TOO_LARGE",
            Error::FingerprintMismatch => "FINGERPRINT_MISMATCH",
            Error::Parse(_) => "PARSE_ERROR",
            Error::Overflow(_) => "OVERFLOW",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NegativeValue { index, value } => {
                write!(f, "probability value at index {index} is negative ({value})")
            }
            Error::WidthMismatch { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            Error::NotDivisible { q, m } => {
                write!(f, "resolution {q} is not divisible by width {m}")
            }
            Error::NotRestricted { index, value, cap } => {
                write!(f, "value {value} at index {index} exceeds restricted cap {cap}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::Singular => write!(f, "matrix is singular"),
            Error::NonIntegralSolution(what) => write!(f, "non-integral solution: {what}"),
            Error::BadParams(what) => write!(f, "bad parameters: {what}"),
            Error::RankConditionViolated { condition, rows } => {
                write!(f, "rank condition ({condition}) fails on rows {rows:?}")
            }
            Error::NotEnoughShares { needed, got } => {
                write!(f, "need at least {needed} shares, got {got}")
            }
            Error::NegativesUnavailable => {
                write!(f, "negative shares are not present in the bundle")
            }
            Error::NotFullRank => write!(f, "matrix does not have full row rank"),
            Error::TooLarge { states, cap } => {
                write!(f, "enumeration of {states} states exceeds cap {cap}")
            }
            Error::FieldTooLarge { needed, cap } => {
                write!(f, "smallest usable prime field {needed} exceeds cap {cap}")
            }
            Error::FingerprintMismatch => {
                write!(f, "shares bundle was made with a different generator matrix")
            }
            Error::Parse(what) => write!(f, "parse error: {what}"),
            Error::Overflow(what) => write!(f, "integer overflow: {what}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
