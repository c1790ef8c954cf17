use std::f64::consts::PI;

use num_complex::Complex64;
use opens_core::{Error, Result};

use crate::sector::Sector;

/// First row of `M` in the coincident limit `a → ε`, `b → L+ε`, where B
/// sits on top of A. The endpoint `a` lies inside A, so `(a/(a−L))^{1/n}`
/// picks up the phase `e^{−iπ/n}` in the holomorphic half and its conjugate
/// in the antiholomorphic half.
pub fn coincident_limit_row(l: f64, eps: f64, n: usize) -> Result<Vec<f64>> {
    if !(l > 0.0 && eps > 0.0 && eps < l) || n == 0 {
        return Err(Error::InvalidInput(format!("coincident limit needs 0 < ε < L and n ≥ 1, got L={l}, ε={eps}, n={n}")));
    }
    let la = Complex64::new((eps / (l - eps)).ln(), -PI);
    let lb = Complex64::new(((l + eps) / eps).ln(), 0.0);
    let holo = Sector::new(la - lb, Complex64::new(l, 0.0), eps, n);
    Ok(holo.row().iter().map(|c| 2.0 * c.re).collect())
}
