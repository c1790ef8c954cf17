use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for discarding imaginary residue of quantities that are real by construction.
pub const REAL_TOL: f64 = 1e-10;

/// 2-norm condition number from singular values.
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Return the real part if the imaginary part is below `tol` relative to the modulus.
pub fn ensure_real(z: Complex64, tol: f64) -> Result<f64> {
    let scale = z.norm().max(f64::MIN_POSITIVE);
    if z.im.abs() > tol * scale {
        return Err(Error::NotReal { residue: z.im.abs() / scale, tol });
    }
    Ok(z.re)
}

/// `log det M` as the sum of logs of the LU pivots plus the permutation sign.
/// The imaginary part is only defined modulo 2π.
pub fn log_det(m: &DMatrix<Complex64>) -> Result<Complex64> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::InvalidInput("log_det needs a non-empty square matrix".into()));
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..u.nrows() {
        let p = u[(i, i)];
        if p == Complex64::new(0.0, 0.0) {
            return Err(Error::Singular { what: "log_det".into(), condition: f64::INFINITY });
        }
        acc += p.ln();
    }
    if lu.p().determinant::<f64>() < 0.0 {
        acc += Complex64::new(0.0, std::f64::consts::PI);
    }
    Ok(acc)
}

fn solve_ones(m: &DMatrix<Complex64>) -> Result<DVector<Complex64>> {
    let n = m.nrows();
    let cond = condition_number(m);
    if !cond.is_finite() || cond > 1e14 {
        return Err(Error::Singular { what: "quadratic_form_cn".into(), condition: cond });
    }
    let rhs = DVector::from_element(n, Complex64::new(1.0, 0.0));
    m.clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::Singular { what: "quadratic_form_cn".into(), condition: cond })
}

/// `C_n = v M⁻¹ vᵀ` with `v = (1, …, 1)`, by a linear solve.
pub fn quadratic_form_cn(m: &DMatrix<Complex64>) -> Result<f64> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::InvalidInput("quadratic_form_cn needs a non-empty square matrix".into()));
    }
    let x = solve_ones(m)?;
    ensure_real(x.iter().sum(), REAL_TOL)
}

pub fn quadratic_form_cn_real(m: &DMatrix<f64>) -> Result<f64> {
    quadratic_form_cn(&m.map(|v| Complex64::new(v, 0.0)))
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_scalar() {
        let id = DMatrix::<f64>::identity(5, 5);
        assert!((quadratic_form_cn_real(&id).unwrap() - 5.0).abs() < 1e-14);
        let m = DMatrix::from_element(1, 1, 4.0);
        assert!((quadratic_form_cn_real(&m).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn singular_reports_condition() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        match quadratic_form_cn_real(&m) {
            Err(Error::Singular { condition, .. }) => assert!(condition > 1e14),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn log_det_matches_determinant() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 2.0, 1.0, 1.0, 0.0, 3.0, 2.0, 1.0, 0.0]);
        let c = to_complex(&m);
        let ld = log_det(&c).unwrap();
        let det = m.determinant();
        assert!((ld.exp().re - det).abs() < 1e-12);
    }
}
