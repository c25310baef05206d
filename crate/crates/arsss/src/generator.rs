//! Generator matrix constructions, rank-condition verification, and the two
//! quality indicators (operational complexity, information leakage).
//!
//! Rank conditions, for an n x k generator at secret length L:
//!   (i)  every k-row submatrix is nonsingular over the rationals;
//!   (ii) every (k-L)-row submatrix restricted to the last k-L columns is
//!        nonsingular.
//! Condition (i) gives recovery from any k shares, condition (ii) keeps the
//! auxiliary randomness recoverable from the secret plus any k-L shares.

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use itertools::Itertools;
use num::bigint::{BigInt, BigUint};
use num::traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankCondition {
    /// (i): a k x k row submatrix must be nonsingular.
    FullRows,
    /// (ii): k-L rows against the last k-L columns must be nonsingular.
    LastColumns,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankViolation {
    pub condition: RankCondition,
    /// Offending row indices (0-based).
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankCheck {
    Satisfied,
    Violated(RankViolation),
}

impl RankCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, RankCheck::Satisfied)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            RankCheck::Satisfied => Ok(()),
            RankCheck::Violated(v) => Err(Error::RankConditionViolated {
                condition: match v.condition {
                    RankCondition::FullRows => 1,
                    RankCondition::LastColumns => 2,
                },
                rows: v.rows,
            }),
        }
    }
}

/// Check both rank conditions by exact determinant evaluation over every row
/// subset; returns the first failing subset as a witness.
pub fn check_rank_conditions(g: &IntMatrix, k: usize, l_secret: usize) -> Result<RankCheck> {
    if g.cols() != k || g.rows() < k || l_secret < 1 || l_secret > k {
        return Err(Error::BadParams(format!(
            "matrix {}x{} with k={k}, L={l_secret}",
            g.rows(),
            g.cols()
        )));
    }
    for rows in (0..g.rows()).combinations(k) {
        if !g.select_rows(&rows).is_nonsingular()? {
            return Ok(RankCheck::Violated(RankViolation { condition: RankCondition::FullRows, rows }));
        }
    }
    let w = k - l_secret;
    if w > 0 {
        for rows in (0..g.rows()).combinations(w) {
            if !g.select_rows(&rows).last_cols(w).is_nonsingular()? {
                return Ok(RankCheck::Violated(RankViolation {
                    condition: RankCondition::LastColumns,
                    rows,
                }));
            }
        }
    }
    Ok(RankCheck::Satisfied)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    matrix: IntMatrix,
    n: usize,
    k: usize,
    l_secret: usize,
    kind: String,
}

impl GeneratorMatrix {
    /// Wrap an arbitrary integer matrix, verifying the rank conditions.
    pub fn from_matrix(matrix: IntMatrix, l_secret: usize, kind: &str) -> Result<Self> {
        let (n, k) = (matrix.rows(), matrix.cols());
        check_rank_conditions(&matrix, k, l_secret)?.into_result()?;
        Ok(GeneratorMatrix { matrix, n, k, l_secret, kind: kind.to_string() })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l_secret(&self) -> usize {
        self.l_secret
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn score(&self) -> GeneratorScore {
        score(&self.matrix)
    }
}

/// OC = max row sum of |G|; IL = product of all row sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorScore {
    pub oc: BigUint,
    pub il: BigUint,
}

pub fn score(g: &IntMatrix) -> GeneratorScore {
    let sums = g.row_abs_sums();
    let oc = sums.iter().max().cloned().unwrap_or_else(BigInt::zero);
    let il = sums.iter().fold(BigInt::one(), |acc, s| acc * s);
    GeneratorScore {
        oc: oc.to_biguint().expect("row sums of |G| are non-negative"),
        il: il.to_biguint().expect("row sums of |G| are non-negative"),
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn smallest_prime_geq(n: u64) -> u64 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime, a not divisible by p
    mod_pow(a % p, p - 2, p)
}

/// Rows `(1, a_i, a_i^2, ...)` with `a_i = i`, entries reduced modulo the
/// smallest prime `N > n` and lifted to `[0, N)`. Nonsingularity of every
/// relevant submatrix over F_N carries over to the integers.
pub fn vandermonde_generator(n: usize, k: usize, l_secret: usize) -> Result<GeneratorMatrix> {
    if n < k || k < l_secret || l_secret < 1 {
        return Err(Error::BadParams(format!("vandermonde n={n} k={k} L={l_secret}")));
    }
    let p = smallest_prime_geq(n as u64 + 1);
    let rows: Vec<Vec<i64>> = (1..=n as u64)
        .map(|a| (0..k as u64).map(|j| mod_pow(a, j, p) as i64).collect())
        .collect();
    GeneratorMatrix::from_matrix(IntMatrix::from_i64_rows(&rows)?, l_secret, "vandermonde")
}

/// Entries `1/(x_i - y_j)` over F_N with `N` the smallest prime `>= n+k`,
/// evaluation points `x_i = i-1`, `y_j = n+j-1`, lifted to `[0, N)`.
pub fn cauchy_generator(n: usize, k: usize, l_secret: usize) -> Result<GeneratorMatrix> {
    if n < k || k < l_secret || l_secret < 1 {
        return Err(Error::BadParams(format!("cauchy n={n} k={k} L={l_secret}")));
    }
    let p = smallest_prime_geq((n + k) as u64);
    let rows: Vec<Vec<i64>> = (0..n as u64)
        .map(|x| {
            (0..k as u64)
                .map(|j| {
                    let y = n as u64 + j;
                    let diff = (x + p - y % p) % p;
                    mod_inverse(diff, p) as i64
                })
                .collect()
        })
        .collect();
    GeneratorMatrix::from_matrix(IntMatrix::from_i64_rows(&rows)?, l_secret, "cauchy")
}

/// Rejection-sample entries uniformly from `[0, C(n,k) + C(n,k-L)]` until the
/// rank conditions hold. Deterministic under a fixed seed.
pub fn random_generator(n: usize, k: usize, l_secret: usize, seed: u64) -> Result<GeneratorMatrix> {
    if n < k || k < l_secret || l_secret < 1 {
        return Err(Error::BadParams(format!("random n={n} k={k} L={l_secret}")));
    }
    let bound = (crate::prob::binomial(n as u64, k as u64)
        + crate::prob::binomial(n as u64, (k - l_secret) as u64))
    .to_u64()
    .ok_or_else(|| Error::Overflow("entry bound".into()))?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..k).map(|_| rng.random_range(0..=bound) as i64).collect())
            .collect();
        let matrix = IntMatrix::from_i64_rows(&rows)?;
        if check_rank_conditions(&matrix, k, l_secret)?.is_ok() {
            return Ok(GeneratorMatrix { matrix, n, k, l_secret, kind: "random".into() });
        }
    }
}

/// The (k,1,k) bidiagonal 0/1 generator: two ones per row except a single one
/// in the last row. OC = 2, IL = 2^(k-1).
pub fn circulant_generator(k: usize) -> Result<GeneratorMatrix> {
    if k < 2 {
        return Err(Error::BadParams(format!("circulant needs k >= 2, got {k}")));
    }
    let mut rows = vec![vec![0i64; k]; k];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 1;
        if i + 1 < k {
            row[i + 1] = 1;
        }
    }
    GeneratorMatrix::from_matrix(IntMatrix::from_i64_rows(&rows)?, 1, "circulant")
}
