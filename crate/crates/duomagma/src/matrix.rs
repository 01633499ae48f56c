//! Exact integer and rational matrices.
//!
//! `UnimodularMatrix` is the validated SL(m, Z) type: construction checks
//! that the determinant is exactly +1.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Dense rational matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(RationalMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Rational> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Right-multiply by an integer matrix: `self * A`.
    pub fn mul_int(&self, a: &IntMatrix) -> RationalMatrix {
        assert_eq!(self.cols, a.rows);
        let mut out = RationalMatrix::zero(self.rows, a.cols);
        for i in 0..self.rows {
            for j in 0..a.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * &Rational::int(a.get(k, j).clone());
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        sign * m[n - 1][n - 1].clone()
    }

    /// Exact inverse over the rationals via Gauss-Jordan.
    pub fn inverse_rational(&self) -> Result<RationalMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| Rational::int(self.get(i, j).clone())).collect())
            .collect();
        let mut inv: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&i| !a[i][col].is_zero())
                .ok_or_else(|| Error::NonInvertibleMatrix("0".into()))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] = &a[col][j] / &p;
                inv[col][j] = &inv[col][j] / &p;
            }
            for i in 0..n {
                if i != col && !a[i][col].is_zero() {
                    let factor = a[i][col].clone();
                    for j in 0..n {
                        let t = &a[col][j] * &factor;
                        a[i][j] = &a[i][j] - &t;
                        let t = &inv[col][j] * &factor;
                        inv[i][j] = &inv[i][j] - &t;
                    }
                }
            }
        }
        RationalMatrix::from_rows(inv)
    }

    pub fn max_abs(&self) -> BigInt {
        self.entries
            .iter()
            .map(|e| e.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Square integer matrix with determinant exactly +1, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    inner: IntMatrix,
}

impl UnimodularMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix is not square",
                m.rows, m.cols
            )));
        }
        let d = m.det();
        if !d.is_one() {
            return Err(Error::NonInvertibleMatrix(d.to_string()));
        }
        Ok(UnimodularMatrix { inner: m })
    }

    pub fn identity(n: usize) -> Self {
        UnimodularMatrix {
            inner: IntMatrix::identity(n),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        UnimodularMatrix::new(IntMatrix::from_i64(rows))
    }

    pub fn size(&self) -> usize {
        self.inner.rows
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        self.inner.get(i, j)
    }

    pub fn mul(&self, other: &UnimodularMatrix) -> UnimodularMatrix {
        // det is multiplicative, no revalidation needed
        UnimodularMatrix {
            inner: self.inner.mul(&other.inner),
        }
    }

    /// Exact integer inverse. Always exists since det = +1.
    pub fn inverse(&self) -> UnimodularMatrix {
        let rinv = self
            .inner
            .inverse_rational()
            .expect("unimodular matrix is invertible");
        let n = self.size();
        let mut out = IntMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let e = rinv.get(i, j);
                debug_assert!(e.is_integer());
                out.set(i, j, e.numer().clone());
            }
        }
        UnimodularMatrix { inner: out }
    }

    /// Row vector times matrix: `v * A`, exact.
    pub fn act_row(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.size());
        (0..self.size())
            .map(|j| {
                let mut acc = Rational::zero();
                for (i, vi) in v.iter().enumerate() {
                    acc += vi * &Rational::int(self.get(i, j).clone());
                }
                acc
            })
            .collect()
    }

    /// blockdiag(self, ..., self) with `k` copies.
    pub fn block_repeat(&self, k: usize) -> UnimodularMatrix {
        let n = self.size();
        let mut out = IntMatrix::zero(n * k, n * k);
        for b in 0..k {
            for i in 0..n {
                for j in 0..n {
                    out.set(b * n + i, b * n + j, self.get(i, j).clone());
                }
            }
        }
        UnimodularMatrix { inner: out }
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size() {
            if i > 0 {
                writeln!(f)?;
            }
            let row: Vec<String> = (0..self.size()).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// Entries cross the JSON boundary as decimal strings so that arbitrary
// precision survives round-trips.
impl Serialize for UnimodularMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.size())
            .map(|i| (0..self.size()).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UnimodularMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(deserializer)?;
        let parsed: std::result::Result<Vec<Vec<BigInt>>, _> = rows
            .iter()
            .map(|r| r.iter().map(|s| s.parse::<BigInt>()).collect())
            .collect();
        let parsed = parsed.map_err(|e| de::Error::custom(format!("bad integer entry: {e}")))?;
        let m = IntMatrix::from_rows(parsed).map_err(|e| de::Error::custom(e.to_string()))?;
        UnimodularMatrix::new(m).map_err(|e| de::Error::custom(e.to_string()))
    }
}
