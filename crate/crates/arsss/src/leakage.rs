//! Exact secrecy analysis: conditional entropy of the secret given a share
//! subset by full enumeration, Smith-form lattice counting of secret
//! solutions, the closed form for the (2,1,2) scalar scheme, and the
//! lower/upper secrecy bounds with their generator-dependent gap.
//!
//! All probabilities are exact integer counts until the final log step;
//! entropies are reported in bits.

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::prob::{alphabet_size, enumerate_restricted, restricted_alphabet_size, ProbSequence, ProbVector};
use crate::snf::enumerate_box_solutions;
use num::bigint::{BigInt, BigUint};
use num::traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};

/// Default cap on the number of enumerated joint states.
pub const DEFAULT_ENUM_CAP: u128 = 100_000_000;

/// Exact leakage figures for one share subset, all in bits.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LeakageReport {
    /// 1-based share indices observed.
    pub subset: Vec<usize>,
    pub q: i64,
    pub m: usize,
    pub l_secret: usize,
    pub h_s: f64,
    pub h_s_given: f64,
    pub ratio: f64,
    /// Secrecy-proof lower bound on H(S|Y'').
    pub lower_bound: f64,
    /// Converse upper bound: sum of completing share alphabet sizes.
    pub upper_bound: f64,
    /// Generator-wide gap to an optimal construction: max over k-subsets of
    /// the summed log row sums.
    pub gap: f64,
}

fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits") as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits");
    (top as f64).log2() + shift as f64
}

fn share_row_i64(g: &IntMatrix, row: usize) -> Result<Vec<i64>> {
    g.row(row)
        .iter()
        .map(|v| v.to_i64().ok_or_else(|| Error::Overflow("generator entry".into())))
        .collect()
}

/// H(S | Y'') for the scheme built on `g` (n x k), observing the 1-based
/// share subset, with uniform restricted symbols at resolution `q`, width
/// `m`, secret length `l_secret`. Enumerates all |Q'|^k auxiliary states.
pub fn conditional_entropy(
    g: &IntMatrix,
    subset: &[usize],
    q: i64,
    m: usize,
    l_secret: usize,
    cap: u128,
) -> Result<LeakageReport> {
    let k = g.cols();
    let n = g.rows();
    if l_secret < 1 || l_secret > k {
        return Err(Error::BadParams(format!("L={l_secret} with k={k}")));
    }
    if subset.iter().any(|&i| i < 1 || i > n) {
        return Err(Error::BadParams(format!("subset {subset:?} outside 1..={n}")));
    }
    let alphabet = enumerate_restricted(q, m)?;
    let alpha_len = alphabet.len() as u128;
    let states = alpha_len
        .checked_pow(k as u32)
        .ok_or(Error::TooLarge { states: u128::MAX, cap })?;
    if states > cap {
        return Err(Error::TooLarge { states, cap });
    }

    let rows: Vec<Vec<i64>> = subset
        .iter()
        .map(|&i| share_row_i64(g, i - 1))
        .collect::<Result<_>>()?;
    let cap2m = 2 * q / m as i64;

    // tally: observed shares -> (count, secret -> count)
    type SecretTally = (u64, HashMap<Vec<i64>, u64>);
    let mut tally: HashMap<Vec<i64>, SecretTally> = HashMap::new();
    let mut odometer = vec![0usize; k];
    loop {
        let state: Vec<&ProbVector> = odometer.iter().map(|&i| &alphabet[i]).collect();
        let mut key = Vec::with_capacity(rows.len() * m);
        for coeffs in &rows {
            // integer circle product of one generator row with the state
            for c in 0..m {
                let mut acc = 0i64;
                for (j, x) in state.iter().enumerate() {
                    let a = coeffs[j];
                    acc += if a >= 0 { a * x.values()[c] } else { -a * (cap2m - x.values()[c]) };
                }
                key.push(acc);
            }
        }
        let secret: Vec<i64> = state[..l_secret]
            .iter()
            .flat_map(|x| x.values().iter().copied())
            .collect();
        let entry = tally.entry(key).or_default();
        entry.0 += 1;
        *entry.1.entry(secret).or_default() += 1;

        // advance
        let mut pos = k;
        while pos > 0 {
            odometer[pos - 1] += 1;
            if odometer[pos - 1] < alphabet.len() {
                break;
            }
            odometer[pos - 1] = 0;
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
    }

    let total: u64 = tally.values().map(|(n, _)| n).sum();
    assert_eq!(total as u128, states, "probability normalization must be exact");

    let mut h_given = 0.0f64;
    for (count_y, per_secret) in tally.values() {
        let secret_total: u64 = per_secret.values().sum();
        assert_eq!(secret_total, *count_y);
        for &c in per_secret.values() {
            // (c/total) * log2(count_y/c)
            h_given += (c as f64 / total as f64) * ((*count_y as f64).log2() - (c as f64).log2());
        }
    }

    let alpha_sz = restricted_alphabet_size(q, m)?;
    let h_s = l_secret as f64 * log2_biguint(&alpha_sz);

    let g_sums: Vec<BigUint> = g
        .row_abs_sums()
        .iter()
        .map(|s| s.to_biguint().expect("|G| row sums are non-negative"))
        .collect();
    let log_share_restricted = |gi: &BigUint| -> Result<f64> {
        let gq = (gi * BigUint::from(q as u64))
            .to_i64()
            .ok_or_else(|| Error::Overflow("share resolution".into()))?;
        Ok(log2_biguint(&restricted_alphabet_size(gq, m)?))
    };
    let log_share_full = |gi: &BigUint| -> Result<f64> {
        let gq = (gi * BigUint::from(q as u64))
            .to_i64()
            .ok_or_else(|| Error::Overflow("share resolution".into()))?;
        Ok(log2_biguint(&alphabet_size(gq, m)))
    };

    // Lower bound: H(X) - H(Y''), with the scalar case written exactly as in
    // the secrecy proof ((L-j) log2(q+1) - log2 prod g_i). The derivation
    // needs at least k-L observed shares (X must be determined by S and
    // Y''); smaller subsets are first extended with the cheapest remaining
    // shares, which can only lower the conditional entropy.
    let w = subset.len();
    let mut bound_rows: Vec<usize> = subset.iter().map(|&i| i - 1).collect();
    if w < k - l_secret {
        let mut rest: Vec<usize> = (0..n).filter(|r| !bound_rows.contains(r)).collect();
        rest.sort_by(|&a, &b| g_sums[a].cmp(&g_sums[b]));
        bound_rows.extend(rest.into_iter().take(k - l_secret - w));
    }
    let lower_bound = if m == 2 {
        let mut acc = (k - bound_rows.len()) as f64 * ((q + 1) as f64).log2();
        for &r in &bound_rows {
            acc -= log2_biguint(&g_sums[r]);
        }
        acc
    } else {
        let mut acc = k as f64 * log2_biguint(&alpha_sz);
        for &r in &bound_rows {
            acc -= log_share_restricted(&g_sums[r])?;
        }
        acc
    };

    // Upper bound: complete Y'' to k shares with the smallest remaining
    // alphabets; the bound is the summed log alphabet sizes of the addition.
    let missing = k.saturating_sub(w);
    let mut complement: Vec<f64> = (1..=n)
        .filter(|i| !subset.contains(i))
        .map(|i| log_share_full(&g_sums[i - 1]))
        .collect::<Result<_>>()?;
    complement.sort_by(|a, b| a.partial_cmp(b).expect("finite logs"));
    let upper_bound: f64 = complement.iter().take(missing).sum();

    // Corollary gap: max over k-subsets of summed log row sums.
    let mut logs: Vec<f64> = g_sums.iter().map(log2_biguint).collect();
    logs.sort_by(|a, b| b.partial_cmp(a).expect("finite logs"));
    let gap: f64 = logs.iter().take(k).sum();

    Ok(LeakageReport {
        subset: subset.to_vec(),
        q,
        m,
        l_secret,
        h_s,
        h_s_given: h_given,
        ratio: h_given / h_s,
        lower_bound,
        upper_bound,
        gap,
    })
}

/// Exact lattice counts of secret values compatible with observed shares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionCounts {
    /// Count of full solutions per secret value (flattened first-L symbols).
    pub per_secret: BTreeMap<Vec<i64>, BigUint>,
    /// N(y): total number of auxiliary-sequence solutions.
    pub total: BigUint,
}

/// Count solutions X of `Y'' = G_subset (*) X` with X restricted, via the
/// Smith-form parameterization of the equivalent Diophantine system. The
/// system has one equation per share coordinate plus one resolution-sum
/// equation per symbol; unknowns are box-constrained to `[0, 2q/m]`.
pub fn count_secret_solutions(
    g_subset: &IntMatrix,
    y_observed: &ProbSequence,
    q: i64,
    m: usize,
    l_secret: usize,
    cap: u128,
) -> Result<SolutionCounts> {
    let k = g_subset.cols();
    let w = g_subset.rows();
    if y_observed.len() != w {
        return Err(Error::DimensionMismatch { expected: w, got: y_observed.len() });
    }
    if (2 * q) % m as i64 != 0 {
        return Err(Error::NotDivisible { q, m });
    }
    let cap2m = 2 * q / m as i64;

    let vars = k * m;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(w * m + k);
    let mut rhs: Vec<BigInt> = Vec::with_capacity(w * m + k);
    for (r, y) in y_observed.iter().enumerate() {
        if y.m() != m {
            return Err(Error::WidthMismatch { expected: m, got: y.m() });
        }
        let coeffs = g_subset.row(r);
        // offset from -GU + |G|U: negative coefficients contribute 2|a| q/m
        let mut offset = BigInt::zero();
        for a in coeffs {
            if a.is_negative() {
                offset += a.abs() * BigInt::from(cap2m);
            }
        }
        for c in 0..m {
            let mut row = vec![BigInt::zero(); vars];
            for (j, a) in coeffs.iter().enumerate() {
                row[j * m + c] = a.clone();
            }
            rows.push(row);
            rhs.push(BigInt::from(y.values()[c]) - &offset);
        }
    }
    for j in 0..k {
        let mut row = vec![BigInt::zero(); vars];
        for c in 0..m {
            row[j * m + c] = BigInt::one();
        }
        rows.push(row);
        rhs.push(BigInt::from(q));
    }

    let nrows = rows.len();
    let system = IntMatrix::new(nrows, vars, rows.into_iter().flatten().collect())?;
    let lo = vec![BigInt::zero(); vars];
    let hi = vec![BigInt::from(cap2m); vars];
    let sols = enumerate_box_solutions(&system, &rhs, &lo, &hi, cap)?;

    let mut per_secret: BTreeMap<Vec<i64>, BigUint> = BTreeMap::new();
    for x in &sols {
        let secret: Vec<i64> = x[..l_secret * m]
            .iter()
            .map(|v| v.to_i64().expect("box-bounded value"))
            .collect();
        *per_secret.entry(secret).or_insert_with(BigUint::zero) += BigUint::one();
    }
    Ok(SolutionCounts { per_secret, total: BigUint::from(sols.len()) })
}

/// Hyperfactorial `f(n) = prod_{i=1..n} i^i` as an exact integer.
pub fn hyperfactorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 1..=n {
        acc *= num::pow::pow(BigUint::from(i), i as usize);
    }
    acc
}

/// Closed form for the (2,1,2) scalar scheme:
/// `H(s|y1) = (2 log2 f(q+1) - (q+1) log2 (q+1)) / (q+1)^2` bits.
pub fn closed_form_entropy_212(q: i64) -> f64 {
    let qp = (q + 1) as u64;
    let f = hyperfactorial(qp);
    (2.0 * log2_biguint(&f) - qp as f64 * (qp as f64).log2()) / (qp as f64 * qp as f64)
}

#[derive(Debug, Clone)]
pub struct RatioSeries {
    pub qs: Vec<i64>,
    pub ratios: Vec<f64>,
    pub reports: Vec<LeakageReport>,
    pub nondecreasing: bool,
    /// Lower/upper bound sandwich held on every grid point.
    pub bounds_ok: bool,
}

/// Leakage ratios over a resolution grid, with the monotonicity and
/// bound-sandwich facts evaluated (tolerance 1e-9 bits).
pub fn asymptotic_check(
    g: &IntMatrix,
    subset: &[usize],
    qs: &[i64],
    m: usize,
    l_secret: usize,
    cap: u128,
) -> Result<RatioSeries> {
    let mut reports = Vec::with_capacity(qs.len());
    for &q in qs {
        reports.push(conditional_entropy(g, subset, q, m, l_secret, cap)?);
    }
    let ratios: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
    let nondecreasing = ratios.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let bounds_ok = reports
        .iter()
        .all(|r| r.lower_bound <= r.h_s_given + 1e-9 && r.h_s_given <= r.upper_bound + 1e-9);
    Ok(RatioSeries { qs: qs.to_vec(), ratios, reports, nondecreasing, bounds_ok })
}
