//! Dense exact matrices: arbitrary-precision integers for generators and
//! Smith-form work, exact rationals for inverses and decode rows.
//!
//! Text format: one row per line, whitespace-separated entries; rationals are
//! written as `p/q` tokens.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, got: row.len() });
            }
            data.extend(row.iter().map(|&v| BigInt::from(v)));
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// New matrix from the given row indices, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        IntMatrix { rows: idx.len(), cols: self.cols, data }
    }

    /// New matrix keeping only the last `w` columns.
    pub fn last_cols(&self, w: usize) -> Self {
        let mut data = Vec::with_capacity(self.rows * w);
        for r in 0..self.rows {
            data.extend_from_slice(&self.row(r)[self.cols - w..]);
        }
        IntMatrix { rows: self.rows, cols: w, data }
    }

    /// Entry-wise absolute value, written `|G|`.
    pub fn abs(&self) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Row sums of `|G|`: the per-share resolution multipliers `g_i`.
    pub fn row_abs_sums(&self) -> Vec<BigInt> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v.abs()).sum())
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigInt::zero();
                for t in 0..self.cols {
                    acc += self.get(i, t) * other.get(t, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Exact determinant by the Bareiss fraction-free elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j);
                    a.set(i, j, num / &prev);
                }
                a.set(i, k, BigInt::zero());
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
    }

    pub fn is_nonsingular(&self) -> Result<bool> {
        Ok(!self.determinant()?.is_zero())
    }

    /// Determinant parity over the binary field (true = odd = nonsingular
    /// over F2), via bitset elimination. Supports up to 128 columns.
    pub fn det_parity_gf2(&self) -> Result<bool> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        if self.cols > 128 {
            return Err(Error::BadParams("gf2 determinant supports <= 128 columns".into()));
        }
        let mut rows: Vec<u128> = (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.mod_floor_two_is_one())
                    .fold(0u128, |acc, (c, _)| acc | (1u128 << c))
            })
            .collect();
        for c in 0..self.cols {
            let bit = 1u128 << c;
            let Some(p) = (c..rows.len()).find(|&r| rows[r] & bit != 0) else {
                return Ok(false);
            };
            rows.swap(c, p);
            let pivot = rows[c];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != c && *row & bit != 0 {
                    *row ^= pivot;
                }
            }
        }
        Ok(true)
    }

    pub fn to_rationals(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| BigRational::from(v.clone())).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{}", self.get(r, c));
            }
            s.push('\n');
        }
        s
    }

    /// Parse the plain text format (integer entries only). Lines starting
    /// with `#` are ignored.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| tok.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer `{tok}`"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged rows".into()));
        }
        let r = rows.len();
        IntMatrix::new(r, cols, rows.into_iter().flatten().collect())
    }
}

trait ParityExt {
    fn mod_floor_two_is_one(&self) -> bool;
}

impl ParityExt for BigInt {
    fn mod_floor_two_is_one(&self) -> bool {
        self.bit(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn abs(&self) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigRational::zero();
                for t in 0..self.cols {
                    acc += self.get(i, t) * other.get(t, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<RatMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(Error::Singular)?;
            if pivot != col {
                for c in 0..n {
                    a.data.swap(col * n + c, pivot * n + c);
                    inv.data.swap(col * n + c, pivot * n + c);
                }
            }
            let p = a.get(col, col).clone();
            for c in 0..n {
                let v = a.get(col, c) / &p;
                a.set(col, c, v);
                let v = inv.get(col, c) / &p;
                inv.set(col, c, v);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for c in 0..n {
                    let v = a.get(r, c) - &f * a.get(col, c);
                    a.set(r, c, v);
                    let v = inv.get(r, c) - &f * inv.get(col, c);
                    inv.set(r, c, v);
                }
            }
        }
        Ok(inv)
    }

    /// Solve `self * x = b` exactly; errors on singular systems.
    pub fn solve(&self, b: &[BigRational]) -> Result<Vec<BigRational>> {
        let inv = self.inverse()?;
        if b.len() != inv.cols {
            return Err(Error::DimensionMismatch { expected: inv.cols, got: b.len() });
        }
        Ok((0..inv.rows)
            .map(|i| inv.row(i).iter().zip(b).map(|(a, x)| a * x).sum())
            .collect())
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.is_integer())
    }

    pub fn to_int(&self) -> Result<IntMatrix> {
        if !self.is_integral() {
            return Err(Error::NonIntegralSolution("matrix has fractional entries".into()));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.to_integer()).collect(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    s.push(' ');
                }
                let v = self.get(r, c);
                if v.is_integer() {
                    let _ = write!(s, "{}", v.to_integer());
                } else {
                    let _ = write!(s, "{}/{}", v.numer(), v.denom());
                }
            }
            s.push('\n');
        }
        s
    }

    /// Parse the text format with integer or `p/q` tokens.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            for tok in line.split_whitespace() {
                let v = match tok.split_once('/') {
                    Some((p, q)) => {
                        let num = p.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad token `{tok}`")))?;
                        let den = q.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad token `{tok}`")))?;
                        if den.is_zero() {
                            return Err(Error::Parse(format!("zero denominator in `{tok}`")));
                        }
                        BigRational::new(num, den)
                    }
                    None => BigRational::from(
                        tok.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer `{tok}`")))?,
                    ),
                };
                row.push(v);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged rows".into()));
        }
        let r = rows.len();
        Ok(RatMatrix { rows: r, cols, data: rows.into_iter().flatten().collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(m(&[vec![1, 1], vec![1, -1]]).determinant().unwrap(), BigInt::from(-2));
        assert_eq!(IntMatrix::identity(4).determinant().unwrap(), BigInt::one());
        assert_eq!(m(&[vec![1, 2], vec![2, 4]]).determinant().unwrap(), BigInt::zero());
        // Bareiss against a known 3x3: 1(50-48) - 2(40-42) + 3(32-35) = -3
        assert_eq!(
            m(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]).determinant().unwrap(),
            BigInt::from(-3)
        );
    }

    #[test]
    fn inverse_examples() {
        let g = m(&[vec![1, 1], vec![1, -1]]).to_rationals();
        let inv = g.inverse().unwrap();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(inv.get(0, 0), &half);
        assert_eq!(inv.get(1, 1), &(-half.clone()));
        assert_eq!(g.mul(&inv).unwrap(), RatMatrix::identity(2));

        let g = m(&[vec![2, 1], vec![1, 1]]).to_rationals();
        let inv = g.inverse().unwrap();
        assert_eq!(inv.to_int().unwrap(), m(&[vec![1, -1], vec![-1, 2]]));

        assert_eq!(RatMatrix::identity(3).inverse().unwrap(), RatMatrix::identity(3));
        assert!(matches!(m(&[vec![1, 2], vec![2, 4]]).to_rationals().inverse(), Err(Error::Singular)));
    }

    #[test]
    fn gf2_parity_matches_integer_determinant() {
        let cases = [
            m(&[vec![1, 1], vec![1, -1]]),
            m(&[vec![1, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]),
            m(&[vec![1, 1], vec![1, 1]]),
            m(&[vec![3, 2], vec![5, 7]]),
        ];
        for g in cases {
            let det = g.determinant().unwrap();
            assert_eq!(g.det_parity_gf2().unwrap(), det.bit(0), "matrix {g:?}");
        }
    }

    #[test]
    fn text_round_trip() {
        let g = m(&[vec![1, -2, 2], vec![0, 3, 5]]);
        assert_eq!(IntMatrix::parse_text(&g.to_text()).unwrap(), g);

        let r = RatMatrix::parse_text("1/2 -3\n0 5/7\n").unwrap();
        assert_eq!(RatMatrix::parse_text(&r.to_text()).unwrap(), r);
        assert!(IntMatrix::parse_text("1 x\n").is_err());
        assert!(RatMatrix::parse_text("1/0\n").is_err());
    }
}
