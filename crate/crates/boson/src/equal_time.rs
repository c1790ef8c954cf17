use std::f64::consts::PI;

use num_complex::Complex64;
use opens_core::special::log_sinhc_real;
use opens_core::{Error, Geometry, Result, SymmetricCirculant};

/// How the coincident-point singularity on the diagonal is regularized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regularization {
    /// `a_k^reg ≈ 2ε w'(a)`, linear in ε.
    #[default]
    LeadingOrder,
    /// `a_k^reg = w(a+ε) − w(a−ε)`, for ε-convergence studies.
    ExactDifference,
}

/// Equal-time replica matrix of the charge fluctuations.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaMatrix {
    geometry: Geometry,
    regularization: Regularization,
    circulant: SymmetricCirculant,
}

impl ReplicaMatrix {
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn regularization(&self) -> Regularization {
        self.regularization
    }

    pub fn circulant(&self) -> &SymmetricCirculant {
        &self.circulant
    }

    pub fn n(&self) -> usize {
        self.circulant.n()
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.circulant.entry(j, k)
    }

    pub fn quadratic_form(&self, gammas: &[f64]) -> Result<f64> {
        let n = self.n();
        if gammas.len() != n {
            return Err(Error::InvalidInput(format!("expected {n} fluxes, got {}", gammas.len())));
        }
        let mut s = 0.0;
        for j in 0..n {
            for k in 0..n {
                s += gammas[j] * gammas[k] * self.entry(j, k);
            }
        }
        Ok(s)
    }
}

/// `log(z/(z−L))` for real z > L.
pub(crate) fn log_ratio(z: f64, l: f64) -> f64 {
    -(-l / z).ln_1p()
}

/// `x = log[a(b−L)/(b(a−L))] > 0`, computed without cancellation.
pub(crate) fn cross_log(g: &Geometry) -> f64 {
    let (l, a, b) = (g.l(), g.a(), g.b());
    (l * (b - a) / (b * (a - l))).ln_1p()
}

/// Branch points `a_k = (a/(a−L))^{1/n} e^{2πik/n}` and the same for `b`.
pub fn branch_points(g: &Geometry) -> Vec<(Complex64, Complex64)> {
    let n = g.n() as f64;
    let alpha = (log_ratio(g.a(), g.l()) / n).exp();
    let beta = (log_ratio(g.b(), g.l()) / n).exp();
    (0..g.n())
        .map(|k| {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n);
            (phase * alpha, phase * beta)
        })
        .collect()
}

/// Off-diagonal entry `ã_j = 2 log1p(sinh²(x/2n)/sin²(πj/n))`.
pub(crate) fn off_diagonal(x: f64, n: usize, j: usize) -> f64 {
    let j = j.min(n - j);
    let s = (PI * j as f64 / n as f64).sin();
    let sh = (x / (2.0 * n as f64)).sinh();
    2.0 * (sh * sh / (s * s)).ln_1p()
}

/// `ã_0(n) − ã_0(1)` in leading-order regularization.
pub(crate) fn diagonal_shift(x: f64, n: usize) -> f64 {
    4.0 * (log_sinhc_real(x / (2.0 * n as f64)) - log_sinhc_real(x / 2.0))
}

fn diagonal_exact_difference(g: &Geometry) -> Result<f64> {
    let (l, a, b, eps) = (g.l(), g.a(), g.b(), g.eps());
    let n = g.n() as f64;
    if a - eps <= l || b - eps <= a + eps {
        return Err(Error::Domain(format!("exact-difference regularization needs ε < min(d, ℓ₂/2), got ε={eps}")));
    }
    // log|w(z+ε) − w(z−ε)| on the principal branch
    let log_reg = |z: f64| {
        let base = log_ratio(z - eps, l) / n;
        let step = (-2.0 * eps * l / ((z - eps) * (z + eps - l))).ln_1p() / n;
        base + step.exp_m1().abs().ln()
    };
    let x = cross_log(g);
    let log_delta = (log_ratio(a, l) + log_ratio(b, l)) / (2.0 * n) + (2.0 * (x / (2.0 * n)).sinh()).ln();
    Ok(-2.0 * (log_reg(a) + log_reg(b) - 2.0 * log_delta))
}

/// Replica matrix with the default leading-order diagonal.
pub fn build_m_boson(g: &Geometry) -> Result<ReplicaMatrix> {
    build_m_boson_with(g, Regularization::LeadingOrder)
}

pub fn build_m_boson_with(g: &Geometry, reg: Regularization) -> Result<ReplicaMatrix> {
    let n = g.n();
    let x = cross_log(g);
    let a00 = match reg {
        Regularization::LeadingOrder => 4.0 * (g.ell2() / (2.0 * g.eps())).ln() + diagonal_shift(x, n),
        Regularization::ExactDifference => diagonal_exact_difference(g)?,
    };
    let mut row = vec![a00];
    row.extend((1..n).map(|j| off_diagonal(x, n, j)));
    let max_off = row[1..].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if n > 1 && a00 <= max_off {
        log::warn!("diagonal {a00} does not dominate off-diagonal {max_off}; the ε ≪ ℓ₂ regime is violated");
    }
    Ok(ReplicaMatrix { geometry: *g, regularization: reg, circulant: SymmetricCirculant::new(row)? })
}
