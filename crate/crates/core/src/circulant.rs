use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const PALINDROME_TOL: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-10;

/// Symmetric circulant matrix stored by its first row `ã_0 … ã_{n-1}`, with `ã_j = ã_{n-j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCirculant {
    row: Vec<f64>,
}

impl SymmetricCirculant {
    pub fn new(row: Vec<f64>) -> Result<Self> {
        if row.is_empty() {
            return Err(Error::InvalidInput("circulant row must be non-empty".into()));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("circulant row has non-finite entries".into()));
        }
        let n = row.len();
        let scale = row.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for j in 1..n {
            if (row[j] - row[n - j]).abs() > PALINDROME_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "circulant row is not palindromic at j={j}: {} vs {}",
                    row[j],
                    row[n - j]
                )));
            }
        }
        Ok(Self { row })
    }

    pub fn n(&self) -> usize {
        self.row.len()
    }

    pub fn first_row(&self) -> &[f64] {
        &self.row
    }

    pub fn diagonal(&self) -> f64 {
        self.row[0]
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        let n = self.n();
        self.row[(j + n - k % n) % n]
    }

    pub fn row_sum(&self) -> f64 {
        self.row.iter().sum()
    }

    /// Eigenvalues `λ_k = Σ_j ã_j e^{2πijk/n}`; returns an error if an imaginary residue
    /// above 1e-10 of the row magnitude survives.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.n();
        let scale: f64 = self.row.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
        (0..n)
            .map(|k| {
                let lam: Complex64 = self
                    .row
                    .iter()
                    .enumerate()
                    .map(|(j, &aj)| {
                        let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                        Complex64::from_polar(aj, phase)
                    })
                    .sum();
                if lam.im.abs() > IMAG_TOL * scale {
                    return Err(Error::NotReal { residue: lam.im.abs() / scale, tol: IMAG_TOL });
                }
                Ok(lam.re)
            })
            .collect()
    }

    pub fn determinant(&self) -> Result<f64> {
        let (sign, logabs) = self.log_determinant()?;
        Ok(sign * logabs.exp())
    }

    /// `(sign, log|det|)` from the sum of log-eigenvalues.
    pub fn log_determinant(&self) -> Result<(f64, f64)> {
        let mut sign = 1.0;
        let mut logabs = 0.0;
        for lam in self.eigenvalues()? {
            if lam == 0.0 {
                return Ok((0.0, f64::NEG_INFINITY));
            }
            if lam < 0.0 {
                sign = -sign;
            }
            logabs += lam.abs().ln();
        }
        Ok((sign, logabs))
    }

    /// Common row sum of the inverse, `1/Σ_m ã_m`.
    pub fn inverse_row_sum(&self) -> Result<f64> {
        let s = self.row_sum();
        let scale: f64 = self.row.iter().map(|v| v.abs()).sum();
        if s == 0.0 || s.abs() <= 1e-14 * scale {
            return Err(Error::Singular { what: "circulant row sum".into(), condition: f64::INFINITY });
        }
        Ok(1.0 / s)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |j, k| self.entry(j, k))
    }

    pub fn to_dense_complex(&self) -> DMatrix<Complex64> {
        self.to_dense().map(|v| Complex64::new(v, 0.0))
    }
}

pub fn circulant_determinant(c: &SymmetricCirculant) -> Result<f64> {
    c.determinant()
}

pub fn circulant_inverse_row_sum(c: &SymmetricCirculant) -> Result<f64> {
    c.inverse_row_sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let c = SymmetricCirculant::new(vec![3.5]).unwrap();
        assert_eq!(c.determinant().unwrap(), 3.5);
        let c = SymmetricCirculant::new(vec![3.0, 1.0]).unwrap();
        assert!((c.determinant().unwrap() - 8.0).abs() < 1e-12);
        let c = SymmetricCirculant::new(vec![4.0, 1.0, 1.0]).unwrap();
        assert!((c.inverse_row_sum().unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let id = SymmetricCirculant::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(id.inverse_row_sum().unwrap(), 1.0);
    }

    #[test]
    fn rejects_non_palindromic() {
        assert!(SymmetricCirculant::new(vec![1.0, 0.2, 0.3]).is_err());
    }

    #[test]
    fn singular_row_sum() {
        let c = SymmetricCirculant::new(vec![1.0, -0.5, -0.5]).unwrap();
        assert!(matches!(c.inverse_row_sum(), Err(Error::Singular { .. })));
    }

    #[test]
    fn dense_expansion_is_circulant() {
        let c = SymmetricCirculant::new(vec![5.0, 1.0, 0.5, 1.0]).unwrap();
        let m = c.to_dense();
        for j in 0..4 {
            for k in 0..4 {
                assert_eq!(m[(j, k)], c.first_row()[(j + 4 - k) % 4]);
            }
        }
    }
}
