//! Dense square matrices at desk scale.
//!
//! Row-major storage behind a thin newtype; factorizations are delegated to
//! nalgebra. Operator norms are induced 2-norms (largest singular value).

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// An n×n real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("matrix dimension must be >= 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix rows must form a square".into()));
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = diag[i];
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.n, x.len());
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * x[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if i != j && self.data[i * n + j] != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Induced 2-norm (largest singular value).
    pub fn two_norm(&self) -> f64 {
        if self.data.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        self.to_na().singular_values().max()
    }

    /// Inverse with a 2-norm condition estimate ‖A‖‖A⁻¹‖.
    pub fn inverse(&self, what: &str) -> Result<(Self, f64)> {
        let na = self.to_na();
        let inv = na.clone().try_inverse().ok_or_else(|| Error::Singular {
            what: what.to_string(),
            cond: f64::INFINITY,
        })?;
        let inv_m = Self::from_na(&inv);
        let cond = self.two_norm() * inv_m.two_norm();
        if !cond.is_finite() {
            return Err(Error::Singular { what: what.to_string(), cond });
        }
        Ok((inv_m, cond))
    }

    /// Symmetric eigendecomposition A = V diag(λ) Vᵀ (columns of V are
    /// eigenvectors). Caller must ensure symmetry.
    pub fn sym_eigen(&self) -> (Vec<f64>, Self) {
        let se = nalgebra::SymmetricEigen::new(self.to_na());
        let vals = se.eigenvalues.iter().copied().collect();
        (vals, Self::from_na(&se.eigenvectors))
    }

    /// Matrix exponential e^A. Symmetric input goes through the spectral
    /// route; anything else uses scaling and squaring on the Taylor series.
    pub fn expm(&self) -> Self {
        if self.is_symmetric(1e-13 * (1.0 + self.frobenius_norm())) {
            let (vals, v) = self.sym_eigen();
            let exp_d = Self::from_diag(&vals.iter().map(|l| l.exp()).collect::<Vec<_>>());
            return v.matmul(&exp_d).matmul(&v.transpose());
        }
        let norm = self.two_norm();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let scaled = self.scale(0.5f64.powi(squarings as i32));
        let n = self.n;
        let mut term = Self::identity(n);
        let mut sum = Self::identity(n);
        for k in 1..64 {
            term = term.matmul(&scaled).scale(1.0 / k as f64);
            sum = sum.add(&term);
            if term.frobenius_norm() <= 1e-17 * sum.frobenius_norm() {
                break;
            }
        }
        let mut out = sum;
        for _ in 0..squarings {
            out = out.matmul(&out);
        }
        out
    }

    fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    fn from_na(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(m[(i, j)]);
            }
        }
        Self { n, data }
    }
}

/// Euclidean norm of a vector.
pub fn vec_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

/// Solve A x = b through nalgebra's LU.
pub fn solve_linear_system(a: &SquareMatrix, b: &[f64], what: &str) -> Result<Vec<f64>> {
    let na = DMatrix::from_row_slice(a.n(), a.n(), a.entries());
    let rhs = DVector::from_column_slice(b);
    na.lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Singular { what: what.to_string(), cond: f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_and_condition() {
        let a = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let (inv, cond) = a.inverse("test").unwrap();
        let prod = a.matmul(&inv);
        let id = SquareMatrix::identity(2);
        assert!(prod.sub(&id).frobenius_norm() < 1e-12);
        assert!(cond >= 1.0);
    }

    #[test]
    fn singular_inverse_rejected() {
        let a = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(a.inverse("test"), Err(Error::Singular { .. })));
    }

    #[test]
    fn two_norm_of_diagonal() {
        let a = SquareMatrix::from_diag(&[3.0, -7.0, 2.0]);
        assert_relative_eq!(a.two_norm(), 7.0, max_relative = 1e-12);
    }

    #[test]
    fn expm_diagonal_and_rotation() {
        let a = SquareMatrix::from_diag(&[1.0, -2.0]);
        let e = a.expm();
        assert_relative_eq!(e.get(0, 0), 1.0f64.exp(), max_relative = 1e-12);
        assert_relative_eq!(e.get(1, 1), (-2.0f64).exp(), max_relative = 1e-12);
        assert!(e.get(0, 1).abs() < 1e-14);

        // skew-symmetric generator: exp is a rotation
        let r = SquareMatrix::from_rows(&[vec![0.0, -1.5], vec![1.5, 0.0]]).unwrap();
        let e = r.expm();
        assert_relative_eq!(e.get(0, 0), 1.5f64.cos(), max_relative = 1e-12);
        assert_relative_eq!(e.get(1, 0), 1.5f64.sin(), max_relative = 1e-12);
    }

    #[test]
    fn sym_eigen_reconstructs() {
        let a = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let (vals, v) = a.sym_eigen();
        let d = SquareMatrix::from_diag(&vals);
        let back = v.matmul(&d).matmul(&v.transpose());
        assert!(back.sub(&a).frobenius_norm() < 1e-12);
    }
}
