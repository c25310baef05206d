//! Probability vectors, sequences, restricted/negative vectors, and alphabet
//! combinatorics.
//!
//! A probability vector is one stored symbol: `m` non-negative integers whose
//! sum is the resolution `q`. For `m = 2` the second value is redundant and a
//! scalar shorthand (the first value) is exposed. A *restricted* vector keeps
//! every value in `[0, 2q/m]`, which is what makes the complement-style
//! negative vector `2u - s` a valid vector again.

use crate::error::{Error, Result};
use num::bigint::{BigInt, BigUint};
use num::traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One symbol: `m` non-negative integer probability values summing to `q`.
///
/// Values are exact integers throughout; there is no floating point in the
/// data model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProbVector {
    values: Vec<i64>,
    q: i64,
}

impl ProbVector {
    /// Build a vector from raw values; the resolution is their sum.
    pub fn new(values: Vec<i64>, m: usize) -> Result<Self> {
        if values.len() != m || m < 2 {
            return Err(Error::WidthMismatch { expected: m, got: values.len() });
        }
        let mut q: i64 = 0;
        for (index, &v) in values.iter().enumerate() {
            if v < 0 {
                return Err(Error::NegativeValue { index, value: v });
            }
            q = q.checked_add(v).ok_or_else(|| Error::Overflow("resolution".into()))?;
        }
        Ok(ProbVector { values, q })
    }

    /// `m = 2` shorthand: the pair `(x, q - x)`.
    pub fn from_scalar(x: i64, q: i64) -> Result<Self> {
        if x < 0 {
            return Err(Error::NegativeValue { index: 0, value: x });
        }
        if x > q {
            return Err(Error::NotRestricted { index: 0, value: x, cap: q });
        }
        Ok(ProbVector { values: vec![x, q - x], q })
    }

    /// The uniform vector `(q/m, ..., q/m)`.
    pub fn uniform(q: i64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::WidthMismatch { expected: 2, got: m });
        }
        if q < 0 {
            return Err(Error::NegativeValue { index: 0, value: q });
        }
        if q % m as i64 != 0 {
            return Err(Error::NotDivisible { q, m });
        }
        Ok(ProbVector { values: vec![q / m as i64; m], q })
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn resolution(&self) -> i64 {
        self.q
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Scalar shorthand for `m = 2`: only the first value.
    pub fn scalar(&self) -> Option<i64> {
        (self.values.len() == 2).then(|| self.values[0])
    }

    /// The restricted range cap `2q/m`, when integral.
    pub fn restricted_cap(&self) -> Option<i64> {
        let m = self.values.len() as i64;
        (self.q % m == 0).then(|| 2 * self.q / m)
    }

    /// Restricted means `m | q` and every value lies in `[0, 2q/m]`.
    pub fn is_restricted(&self) -> bool {
        match self.restricted_cap() {
            Some(cap) => self.values.iter().all(|&v| v <= cap),
            None => false,
        }
    }

    fn check_restricted(&self) -> Result<i64> {
        let m = self.values.len();
        let cap = self
            .restricted_cap()
            .ok_or(Error::NotDivisible { q: self.q, m })?;
        for (index, &v) in self.values.iter().enumerate() {
            if v > cap {
                return Err(Error::NotRestricted { index, value: v, cap });
            }
        }
        Ok(cap)
    }

    /// Complement about the uniform vector: `s_- = 2u - s`, value-wise
    /// `2q/m - s_j`. An involution on restricted vectors.
    pub fn negate(&self) -> Result<Self> {
        let cap = self.check_restricted()?;
        let values = self.values.iter().map(|&v| cap - v).collect();
        Ok(ProbVector { values, q: self.q })
    }
}

// Wire format: {"m": int, "q": int, "values": [int, ...]}, exactly in that
// field order and with no floats.
impl Serialize for ProbVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            m: usize,
            q: i64,
            values: &'a [i64],
        }
        Wire { m: self.m(), q: self.q, values: &self.values }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProbVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            m: usize,
            q: i64,
            values: Vec<i64>,
        }
        let w = Wire::deserialize(d)?;
        let pv = ProbVector::new(w.values, w.m).map_err(D::Error::custom)?;
        if pv.resolution() != w.q {
            return Err(D::Error::custom(format!(
                "declared resolution {} but values sum to {}",
                w.q,
                pv.resolution()
            )));
        }
        Ok(pv)
    }
}

/// Ordered tuple of probability vectors, possibly with per-symbol resolutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbSequence {
    symbols: Vec<ProbVector>,
}

impl ProbSequence {
    /// All symbols must share the same width `m`.
    pub fn new(symbols: Vec<ProbVector>) -> Result<Self> {
        if let Some(first) = symbols.first() {
            let m = first.m();
            for s in &symbols {
                if s.m() != m {
                    return Err(Error::WidthMismatch { expected: m, got: s.m() });
                }
            }
        }
        Ok(ProbSequence { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn m(&self) -> Option<usize> {
        self.symbols.first().map(|s| s.m())
    }

    pub fn symbols(&self) -> &[ProbVector] {
        &self.symbols
    }

    pub fn resolutions(&self) -> Vec<i64> {
        self.symbols.iter().map(|s| s.resolution()).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ProbVector> {
        self.symbols.iter()
    }

    /// Per-symbol negation (valid when every symbol is restricted).
    pub fn negate(&self) -> Result<Self> {
        let symbols = self.symbols.iter().map(|s| s.negate()).collect::<Result<_>>()?;
        Ok(ProbSequence { symbols })
    }
}

/// An alphabet of probability vectors at a fixed resolution and width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphabetSpec {
    pub q: i64,
    pub m: usize,
    pub restricted: bool,
}

impl AlphabetSpec {
    pub fn new(q: i64, m: usize, restricted: bool) -> Result<Self> {
        if m < 2 || q < 0 {
            return Err(Error::BadParams(format!("alphabet q={q} m={m}")));
        }
        if restricted && q % m as i64 != 0 {
            return Err(Error::NotDivisible { q, m });
        }
        Ok(AlphabetSpec { q, m, restricted })
    }

    pub fn size(&self) -> BigUint {
        if self.restricted {
            restricted_alphabet_size(self.q, self.m).expect("validated at construction")
        } else {
            alphabet_size(self.q, self.m)
        }
    }

    /// Every vector of the alphabet in lexicographic value order.
    pub fn enumerate(&self) -> Vec<ProbVector> {
        let cap = if self.restricted { 2 * self.q / self.m as i64 } else { self.q };
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(self.m);
        enumerate_rec(self.q, self.m, cap, &mut prefix, &mut out);
        out
    }
}

fn enumerate_rec(rest: i64, slots: usize, cap: i64, prefix: &mut Vec<i64>, out: &mut Vec<ProbVector>) {
    if slots == 1 {
        if rest <= cap {
            let mut values = prefix.clone();
            values.push(rest);
            let q = values.iter().sum();
            out.push(ProbVector { values, q });
        }
        return;
    }
    let hi = rest.min(cap);
    for v in 0..=hi {
        prefix.push(v);
        enumerate_rec(rest - v, slots - 1, cap, prefix, out);
        prefix.pop();
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `|Q_{q,m}| = C(q+m-1, m-1)`: all m-part compositions of q.
pub fn alphabet_size(q: i64, m: usize) -> BigUint {
    if q < 0 {
        return BigUint::zero();
    }
    binomial(q as u64 + m as u64 - 1, m as u64 - 1)
}

/// `|Q'_{q,m}|`: compositions of q into m parts each at most `2q/m`, by
/// inclusion-exclusion. The number of subtracted terms is
/// `j = floor(qm / (2q+m))`; for m = 2 this is zero and the count is `q+1`.
pub fn restricted_alphabet_size(q: i64, m: usize) -> Result<BigUint> {
    if q < 0 || m < 2 {
        return Err(Error::BadParams(format!("q={q} m={m}")));
    }
    if (2 * q) % m as i64 != 0 {
        return Err(Error::NotDivisible { q, m });
    }
    let cap = 2 * q / m as i64;
    let mut total = BigInt::zero();
    let mut i: i64 = 0;
    while q - (cap + 1) * i >= 0 && i <= m as i64 {
        let term = BigInt::from(binomial(m as u64, i as u64))
            * BigInt::from(binomial((q - (cap + 1) * i) as u64 + m as u64 - 1, m as u64 - 1));
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        i += 1;
    }
    total
        .to_biguint()
        .ok_or_else(|| Error::Overflow("negative inclusion-exclusion total".into()))
}

/// Convenience: the restricted alphabet as a vector list.
pub fn enumerate_restricted(q: i64, m: usize) -> Result<Vec<ProbVector>> {
    if (2 * q) % m as i64 != 0 {
        return Err(Error::NotDivisible { q, m });
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(m);
    enumerate_rec(q, m, 2 * q / m as i64, &mut prefix, &mut out);
    Ok(out)
}
