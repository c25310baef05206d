//! Circle multiplication of reals/matrices with probability vectors and its
//! exact inversion.
//!
//! For a coefficient `g` and a restricted vector `x` with uniform vector `u`,
//! the circle product is `g (*) x = gx - gu + |g|u`: plain scaling for
//! `g >= 0`, and `|g|` copies of the negated vector for `g < 0`. The output is
//! always a valid probability vector of resolution `|g| q`, which is what lets
//! linear encode/decode run on mixtures of physical samples.

use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, RatMatrix};
use crate::prob::{ProbSequence, ProbVector};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};

/// `g (*) x` for an integer coefficient. `g = 0` is treated as a positive
/// coefficient and yields the empty (q = 0) vector.
pub fn scalar_circle_mul(g: &BigInt, x: &ProbVector) -> Result<ProbVector> {
    let gi = g
        .to_i64()
        .ok_or_else(|| Error::Overflow(format!("coefficient {g} too large")))?;
    let base = if gi < 0 { x.negate()? } else { x.clone() };
    let scale = gi.unsigned_abs() as i64;
    let values = base
        .values()
        .iter()
        .map(|&v| v.checked_mul(scale).ok_or_else(|| Error::Overflow("share value".into())))
        .collect::<Result<Vec<_>>>()?;
    ProbVector::new(values, x.m())
}

/// `Y = G (*) X = GX - GU + |G|U`, row `i` being the sum of the per-symbol
/// circle products. Output resolutions are `|G| Q`.
pub fn matrix_circle_mul(g: &IntMatrix, xs: &ProbSequence) -> Result<ProbSequence> {
    if g.cols() != xs.len() {
        return Err(Error::DimensionMismatch { expected: g.cols(), got: xs.len() });
    }
    let m = xs.m().ok_or_else(|| Error::BadParams("empty sequence".into()))?;
    let mut out = Vec::with_capacity(g.rows());
    for i in 0..g.rows() {
        let mut acc = vec![0i64; m];
        for (j, x) in xs.iter().enumerate() {
            let term = scalar_circle_mul(g.get(i, j), x)?;
            for (a, &v) in acc.iter_mut().zip(term.values()) {
                *a = a.checked_add(v).ok_or_else(|| Error::Overflow("share value".into()))?;
            }
        }
        out.push(ProbVector::new(acc, m)?);
    }
    ProbSequence::new(out)
}

/// Exact rational inverse of an integer matrix.
pub fn matrix_inverse_exact(g: &IntMatrix) -> Result<RatMatrix> {
    if g.rows() != g.cols() {
        return Err(Error::DimensionMismatch { expected: g.rows(), got: g.cols() });
    }
    g.to_rationals().inverse()
}

/// A circle product with rational coefficients, returned as exact rational
/// values plus the rational resolution. Needed because decode rows come from
/// `G^{-1}`.
pub fn rational_circle_row(coeffs: &[BigRational], ys: &ProbSequence) -> Result<(Vec<BigRational>, BigRational)> {
    if coeffs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: coeffs.len(), got: ys.len() });
    }
    let m = ys.m().ok_or_else(|| Error::BadParams("empty sequence".into()))?;
    let m_rat = BigRational::from(BigInt::from(m as i64));
    let mut values = vec![BigRational::zero(); m];
    let mut resolution = BigRational::zero();
    for (a, y) in coeffs.iter().zip(ys.iter()) {
        let qy = BigRational::from(BigInt::from(y.resolution()));
        // a*y + (|a| - a) * u_y, with u_y = q_y/m per coordinate
        let offset = (a.abs() - a) * &qy / &m_rat;
        for (acc, &v) in values.iter_mut().zip(y.values()) {
            *acc += a * BigRational::from(BigInt::from(v)) + &offset;
        }
        resolution += a.abs() * &qy;
    }
    Ok((values, resolution))
}

/// Invert `Y = G (*) X`: `X = G^{-1} (*) Y + U - |G^{-1}||G|U`.
///
/// The uniform sequence `U` of the input is never transmitted; its
/// resolutions are reconstructed from the share resolutions, through
/// `|G|^{-1}` when `|G|` is invertible and otherwise under the scheme's
/// equal-resolution assumption (`q = q_{y_i}/g_i`, cross-checked on every
/// row).
pub fn circle_decode(g: &IntMatrix, ys: &ProbSequence) -> Result<ProbSequence> {
    if g.rows() != g.cols() {
        return Err(Error::DimensionMismatch { expected: g.rows(), got: g.cols() });
    }
    if g.rows() != ys.len() {
        return Err(Error::DimensionMismatch { expected: g.rows(), got: ys.len() });
    }
    let k = g.rows();
    let m = ys.m().ok_or_else(|| Error::BadParams("empty sequence".into()))?;
    let g_inv = matrix_inverse_exact(g)?;
    let q_x = reconstruct_input_resolutions(g, &ys.resolutions())?;

    let m_rat = BigRational::from(BigInt::from(m as i64));
    // input uniform values u_j = q_j/m, as rationals
    let u_in: Vec<BigRational> = q_x
        .iter()
        .map(|q| BigRational::from(q.clone()) / &m_rat)
        .collect();
    // |G^{-1}||G| row sums against the input uniforms
    let abs_prod = g_inv.abs().mul(&g.abs().to_rationals())?;

    let mut symbols = Vec::with_capacity(k);
    for i in 0..k {
        let (mut vals, _res) = rational_circle_row(g_inv.row(i), ys)?;
        let correction: BigRational = abs_prod
            .row(i)
            .iter()
            .zip(&u_in)
            .map(|(c, u)| c * u)
            .sum();
        let mut int_vals = Vec::with_capacity(m);
        for v in vals.iter_mut() {
            let exact = &*v + &u_in[i] - &correction;
            if !exact.is_integer() {
                return Err(Error::NonIntegralSolution(format!(
                    "decoded value {exact} for symbol {i}"
                )));
            }
            let as_i64 = exact
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Overflow("decoded value".into()))?;
            if as_i64 < 0 {
                return Err(Error::NonIntegralSolution(format!(
                    "decoded value {as_i64} is negative for symbol {i}"
                )));
            }
            int_vals.push(as_i64);
        }
        let sym = ProbVector::new(int_vals, m)?;
        let expect_q = q_x[i]
            .to_i64()
            .ok_or_else(|| Error::Overflow("resolution".into()))?;
        if sym.resolution() != expect_q {
            return Err(Error::NonIntegralSolution(format!(
                "symbol {i} sums to {} instead of resolution {expect_q}",
                sym.resolution()
            )));
        }
        symbols.push(sym);
    }
    ProbSequence::new(symbols)
}

fn reconstruct_input_resolutions(g: &IntMatrix, share_res: &[i64]) -> Result<Vec<BigInt>> {
    let abs_g = g.abs();
    let qy: Vec<BigRational> = share_res
        .iter()
        .map(|&q| BigRational::from(BigInt::from(q)))
        .collect();
    if let Ok(inv) = abs_g.to_rationals().inverse() {
        let mut out = Vec::with_capacity(g.rows());
        for i in 0..inv.rows() {
            let v: BigRational = inv.row(i).iter().zip(&qy).map(|(a, b)| a * b).sum();
            if !v.is_integer() || v.is_negative() {
                return Err(Error::NonIntegralSolution(format!(
                    "input resolution {v} from share resolutions"
                )));
            }
            out.push(v.to_integer());
        }
        return Ok(out);
    }
    // |G| singular (e.g. [[1,1],[1,-1]]): fall back to one common resolution.
    let sums = abs_g.row_abs_sums();
    let (row, g_i) = sums
        .iter()
        .enumerate()
        .find(|(_, s)| !s.is_zero())
        .ok_or(Error::Singular)?;
    let qy_row = BigInt::from(share_res[row]);
    let (q, rem) = num::integer::div_rem(qy_row, g_i.clone());
    if !rem.is_zero() || q.is_negative() {
        return Err(Error::NonIntegralSolution(format!(
            "share resolution {} is not a multiple of row sum {g_i}",
            share_res[row]
        )));
    }
    for (i, s) in sums.iter().enumerate() {
        if BigInt::from(share_res[i]) != s * &q {
            return Err(Error::NonIntegralSolution(
                "share resolutions are inconsistent with a common input resolution".into(),
            ));
        }
    }
    Ok(vec![q; g.rows()])
}
