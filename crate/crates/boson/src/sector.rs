use std::f64::consts::PI;

use num_complex::Complex64;
use opens_core::special::{log1p_c, log_sinhc};

/// One chiral half of the replica matrix, built from the endpoint logs
/// `ℓ_a = log(z_a/(z_a−L))`, `ℓ_b` and their difference `x = ℓ_a − ℓ_b`.
#[derive(Debug, Clone)]
pub(crate) struct Sector {
    /// Single-copy diagonal `D_1`.
    pub d1: Complex64,
    /// `D_n − D_1`.
    pub shift: Complex64,
    /// `c_j` for `j = 0..n` (index 0 unused).
    pub off: Vec<Complex64>,
}

impl Sector {
    /// `sep = z_b − z_a`. The single-copy map is Möbius, so `D_1 = 2 log(sep/(2ε))`
    /// on every branch; this fixes the 2πi ambiguity of the endpoint logs.
    pub fn new(x: Complex64, sep: Complex64, eps: f64, n: usize) -> Self {
        let half = x / 2.0;
        let d1 = 2.0 * (sep / (2.0 * eps)).ln();
        let shift = 2.0 * (log_sinhc(x / (2.0 * n as f64)) - log_sinhc(half));
        let sh = (x / (2.0 * n as f64)).sinh();
        let sh2 = sh * sh;
        let off = (0..n)
            .map(|j| {
                if j == 0 {
                    return Complex64::new(0.0, 0.0);
                }
                let jj = j.min(n - j);
                let s = (PI * jj as f64 / n as f64).sin();
                log1p_c(sh2 / (s * s))
            })
            .collect();
        Self { d1, shift, off }
    }

    /// Sector for complex endpoints `z_a`, `z_b` off the real axis.
    pub fn from_points(za: Complex64, zb: Complex64, eps: f64, l: f64, n: usize) -> Self {
        let la = -log1p_c(-l / za);
        let lb = -log1p_c(-l / zb);
        let mut x = log1p_c(l * (zb - za) / (zb * (za - l)));
        let wind = ((la - lb - x).im / (2.0 * PI)).round();
        x += Complex64::new(0.0, 2.0 * PI * wind);
        Self::new(x, zb - za, eps, n)
    }

    pub fn conj(&self) -> Self {
        Self { d1: self.d1.conj(), shift: self.shift.conj(), off: self.off.iter().map(|c| c.conj()).collect() }
    }

    pub fn n(&self) -> usize {
        self.off.len()
    }

    pub fn row(&self) -> Vec<Complex64> {
        let mut r = self.off.clone();
        r[0] = self.d1 + self.shift;
        r
    }

    /// `λ_k − D_1` for the circulant eigenvalue with momentum `k`.
    pub fn eigen_excess(&self, k: usize) -> Complex64 {
        let n = self.n();
        let mut s = self.shift;
        for j in 1..n {
            s += self.off[j] * (2.0 * PI * (j * k % n) as f64 / n as f64).cos();
        }
        s
    }
}
