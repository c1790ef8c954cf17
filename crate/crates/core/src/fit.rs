//! Linear least squares for the curve fits used in figure comparisons.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Coefficients of `y ≈ Σ_k c_k f_k(x)` and the fit residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl LinearFit {
    pub fn rms(&self) -> f64 {
        (self.residuals.iter().map(|r| r * r).sum::<f64>() / self.residuals.len() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }
}

/// Least-squares fit on the given basis columns (each of length `y.len()`), via SVD.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<LinearFit> {
    let rows = y.len();
    let k = columns.len();
    if k == 0 || rows < k || columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidInput(format!("cannot fit {k} basis functions to {rows} points")));
    }
    let a = DMatrix::from_fn(rows, k, |i, j| columns[j][i]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let coeffs = svd
        .solve(&b, 1e-13 * smax)
        .map_err(|e| Error::InvalidInput(format!("least squares failed: {e}")))?;
    let resid = &b - &a * &coeffs;
    Ok(LinearFit { coefficients: coeffs.iter().cloned().collect(), residuals: resid.iter().cloned().collect() })
}

/// Straight-line fit `y ≈ c₀ + c₁ x`.
pub fn line_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    least_squares(&[vec![1.0; x.len()], x.to_vec()], y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 - 2.0 * v).collect();
        let f = line_fit(&x, &y).unwrap();
        assert!((f.coefficients[0] - 0.5).abs() < 1e-13 && (f.coefficients[1] + 2.0).abs() < 1e-13);
        assert!(f.max_abs() < 1e-13);
    }

    #[test]
    fn rejects_underdetermined() {
        assert!(least_squares(&[vec![1.0], vec![2.0]], &[1.0]).is_err());
    }
}
