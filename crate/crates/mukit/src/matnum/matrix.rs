//! Dense square complex matrix storage and arithmetic.

use crate::{Error, Result};
use num_complex::Complex;
use std::fmt;

pub type Complex64 = Complex<f64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense n×n complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from a flat row-major entry vector. Rejects non-square lengths,
    /// n == 0 and non-finite entries.
    pub fn from_entries(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("matrix dimension must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        let m = ComplexMatrix { n, data };
        m.validate_finite()?;
        Ok(m)
    }

    /// Build from nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged or non-square row data".into()));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::from_entries(n, data)
    }

    /// Build from nested real rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn zeros(n: usize) -> Self {
        ComplexMatrix { n, data: vec![C_ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C_ONE;
        }
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    /// Diagonal unitary from phase angles.
    pub fn diag_phases(phases: &[f64]) -> Self {
        let entries: Vec<Complex64> = phases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        Self::diag(&entries)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn validate_finite(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self.get(i, j);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix { n: self.n, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(ComplexMatrix { n: self.n, data })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C_ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Integer matrix power by repeated multiplication; `pow(0)` is the identity.
    pub fn pow(&self, m: u32) -> Self {
        let mut out = Self::identity(self.n);
        for _ in 0..m {
            out = out.mul(self).expect("same dimension");
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        let mut out = vec![C_ZERO; n];
        for i in 0..n {
            let mut acc = C_ZERO;
            for j in 0..n {
                acc += self.data[i * n + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Gram matrix A*·A (Hermitian positive semidefinite).
    pub fn gram(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C_ZERO;
                for k in 0..n {
                    acc += self.data[k * n + i].conj() * self.data[k * n + j];
                }
                out.data[i * n + j] = acc;
                if i != j {
                    out.data[j * n + i] = acc.conj();
                } else {
                    // force an exactly real diagonal
                    out.data[i * n + i] = Complex64::new(acc.re, 0.0);
                }
            }
        }
        out
    }

    /// Co-Gram matrix A·A*.
    pub fn cogram(&self) -> Self {
        self.conj_transpose().gram()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn row_sums(&self) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<Complex64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> Complex64 {
        match Lu::factor(self) {
            Some(lu) => lu.det(),
            None => C_ZERO,
        }
    }

    /// Largest entrywise distance to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "operand dimensions differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self.get(i, j);
                write!(f, "{:>12.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// LU factorization with partial pivoting, used for determinants and the
/// shifted solves inside inverse iteration.
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    pivots: Vec<usize>,
    sign_flips: usize,
}

impl Lu {
    /// Returns None when a pivot column is exactly zero (singular to working
    /// precision at that column).
    pub fn factor(m: &ComplexMatrix) -> Option<Self> {
        let n = m.n;
        let mut lu = m.data.clone();
        let mut pivots = vec![0usize; n];
        let mut sign_flips = 0usize;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm_sqr();
            for i in (k + 1)..n {
                let v = lu[i * n + k].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                sign_flips += 1;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let sub = factor * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        Some(Lu { n, lu, pivots, sign_flips })
    }

    pub fn det(&self) -> Complex64 {
        let mut d = if self.sign_flips % 2 == 0 { C_ONE } else { -C_ONE };
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            for i in (k + 1)..n {
                let sub = self.lu[i * n + k] * x[k];
                x[i] -= sub;
            }
        }
        for k in (0..n).rev() {
            for j in (k + 1)..n {
                let sub = self.lu[k * n + j] * x[j];
                x[k] -= sub;
            }
            x[k] /= self.lu[k * n + k];
        }
        x
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product ⟨a, b⟩ = a*·b.
pub fn vec_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
