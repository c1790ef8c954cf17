//! Cancellation-free elementary functions used by the replica-matrix formulas.

use num_complex::Complex64;

/// `log(1 + z)` accurate for small `|z|`.
pub fn log1p_c(z: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * z.re + z.re * z.re + z.im * z.im).ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    Complex64::new(re, im)
}

/// `exp(z) − 1` accurate for small `|z|`.
pub fn expm1_c(z: Complex64) -> Complex64 {
    let s = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * z.im.cos() - 2.0 * s * s, z.re.exp() * z.im.sin())
}

// log(sinh y / y) = Σ c_k y^{2k}
const SINHC: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 180.0,
    1.0 / 2835.0,
    -1.0 / 37800.0,
    1.0 / 467775.0,
    -691.0 / 3831077250.0,
    2.0 / 127702575.0,
    -3617.0 / 2605132530000.0,
    43867.0 / 350813659321125.0,
    -174611.0 / 15313294652906250.0,
];

/// `S(y) = log(sinh(y)/y)`, even in `y`, principal branch near the real axis.
pub fn log_sinhc(y: Complex64) -> Complex64 {
    if y.norm() < 0.5 {
        let y2 = y * y;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in SINHC.iter().rev() {
            acc = acc * y2 + c;
        }
        return acc * y2;
    }
    // choose the representative with Re y > 0 so the exponential cannot overflow
    let y = if y.re < 0.0 { -y } else { y };
    // sinh y / y = e^y (1 − e^{−2y}) / (2y)
    y - (2.0 * y).ln() + log1p_c(-(-2.0 * y).exp())
}

pub fn log_sinhc_real(y: f64) -> f64 {
    log_sinhc(Complex64::new(y, 0.0)).re
}

/// `S'(y) = coth y − 1/y`.
pub fn log_sinhc_derivative(y: f64) -> f64 {
    if y.abs() < 1e-3 {
        let y2 = y * y;
        return y / 3.0 - y * y2 / 45.0 + 2.0 * y * y2 * y2 / 945.0;
    }
    1.0 / y.tanh() - 1.0 / y
}

// −log1p(r) − 2 log(log1p(r)/r) = Σ d_k r^k, k ≥ 2
const LOG1P_EXCESS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 12.0,
    109.0 / 1440.0,
    -49.0 / 720.0,
    11153.0 / 181440.0,
    -3383.0 / 60480.0,
    744383.0 / 14515200.0,
    -19087.0 / 403200.0,
    21057907.0 / 479001600.0,
    -3931897.0 / 95800320.0,
];

/// `−log(1+r) − 2 log(log(1+r)/r)`, which is `O(r²)` as `r → 0`; needs `r > −1`.
pub fn log1p_excess(r: f64) -> f64 {
    if r.abs() < 0.05 {
        let mut acc = 0.0;
        for c in LOG1P_EXCESS.iter().rev() {
            acc = acc * r + c;
        }
        return acc * r * r;
    }
    let l = r.ln_1p();
    -l - 2.0 * (l / r).ln()
}
