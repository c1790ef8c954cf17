//! Matrix functions on dense complex matrices.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Principal matrix logarithm by complex Schur decomposition and Parlett's recurrence.
///
/// Fails with a branch error when an eigenvalue sits on the closed negative real axis,
/// or when two eigenvalues are too close for the recurrence to be reliable.
pub fn principal_log(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = m.nrows();
    if n == 0 || !m.is_square() {
        return Err(Error::InvalidInput("principal_log needs a non-empty square matrix".into()));
    }
    let schur = Schur::try_new(m.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Branch("Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let scale = (0..n).map(|i| t[(i, i)].norm()).fold(0.0_f64, f64::max);
    let mut f = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let z = t[(i, i)];
        if z.norm() == 0.0 || (z.re < 0.0 && z.im.abs() <= 1e-12 * z.norm()) {
            return Err(Error::Branch(format!("eigenvalue {z} on the principal-log branch cut")));
        }
        f[(i, i)] = z.ln();
    }
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            let gap = t[(i, i)] - t[(j, j)];
            if gap.norm() < 1e-8 * scale {
                return Err(Error::Branch(format!(
                    "eigenvalues {} and {} too close for the Parlett recurrence",
                    t[(i, i)],
                    t[(j, j)]
                )));
            }
            let mut acc = t[(i, j)] * (f[(i, i)] - f[(j, j)]);
            for k in i + 1..j {
                acc += f[(i, k)] * t[(k, j)] - t[(i, k)] * f[(k, j)];
            }
            f[(i, j)] = acc / gap;
        }
    }
    Ok(&q * f * q.adjoint())
}

/// Matrix exponential (scaling and squaring, delegated to nalgebra).
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.clone().exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_inverts_exp() {
        let m = DMatrix::from_fn(4, 4, |i, j| {
            Complex64::new(if i == j { 0.3 * i as f64 } else { 0.05 * (i as f64 - j as f64) }, 0.03 * (i * j) as f64 - 0.02)
        });
        let e = expm(&m);
        let l = principal_log(&e).unwrap();
        assert!((l - m).norm() < 1e-11);
    }

    #[test]
    fn negative_axis_is_rejected() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        assert!(matches!(principal_log(&m), Err(Error::Branch(_))));
    }
}
