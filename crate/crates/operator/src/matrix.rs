use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use opens_core::quad::integrate_2d;
use opens_core::special::{log1p_excess, log_sinhc_real};
use opens_core::{DenseMatrix, Error, Geometry, Result};
use rayon::prelude::*;

use crate::flat::flat_interval_exact;
use crate::{OperatorSpec, QuadratureConfig};

/// `w_k(x) = e^{2πik/n} (x/(x−L))^{1/n}` and `dw_k/dx`; `x` must lie outside `[0, L]`.
pub fn replica_map(x: f64, k: usize, g: &Geometry) -> Result<(Complex64, Complex64)> {
    let (l, n) = (g.l(), g.n() as f64);
    if (0.0..=l).contains(&x) {
        return Err(Error::Domain(format!("x = {x} lies inside A = [0, {l}]")));
    }
    let log_ratio = -(-l / x).ln_1p();
    let phase = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n);
    let w = phase * (log_ratio / n).exp();
    let dw = w * (-l / (x * (x - l))) / n;
    Ok((w, dw))
}

#[derive(Clone, Copy)]
struct Kernel {
    l: f64,
    n: f64,
    h: f64,
    vector: bool,
    eps: f64,
}

impl Kernel {
    fn new(g: &Geometry, spec: &OperatorSpec, eps: f64) -> Self {
        let (h, vector) = match *spec {
            OperatorSpec::Scalar { h } => (h, false),
            OperatorSpec::Vector { h } => (h, true),
            OperatorSpec::BosonCharge { .. } => unreachable!("boson charge is handled in closed form"),
        };
        Self { l: g.l(), n: g.n() as f64, h, vector, eps }
    }

    fn log_ratio(&self, x: f64) -> f64 {
        -(-self.l / x).ln_1p()
    }

    fn log_abs_derivative(&self, x: f64) -> f64 {
        (self.l / (x * (x - self.l))).ln()
    }

    /// Integrand for replicas whose phases differ by `θ ≠ 0`.
    fn off_diagonal(&self, theta: f64, x1: f64, x2: f64) -> f64 {
        let (l1, l2) = (self.log_ratio(x1), self.log_ratio(x2));
        let d12 = (self.l * (x2 - x1) / (x2 * (x1 - self.l))).ln_1p();
        let (a1, a2) = ((l1 / self.n).exp(), (l2 / self.n).exp());
        let diff = a2 * (d12 / self.n).exp_m1();
        let s = (0.5 * theta).sin();
        let mod2 = diff * diff + 4.0 * a1 * a2 * s * s;
        // log |w'_1 w'_2|
        let log_j = (l1 + l2) / self.n + self.log_abs_derivative(x1) + self.log_abs_derivative(x2) - 2.0 * self.n.ln();
        if self.vector {
            // Re(1/D²) with D = α₁e^{iθ/2} − α₂e^{−iθ/2}
            let c = (0.5 * theta).cos();
            let re_d = diff * c;
            let im_d = (a1 + a2) * s;
            let re_inv2 = (re_d * re_d - im_d * im_d) / (mod2 * mod2);
            -2.0 * re_inv2 * ((1.0 + self.h) * log_j - self.h * mod2.ln()).exp()
        } else {
            (self.h * (log_j - mod2.ln())).exp()
        }
    }

    /// `log g` where the same-sheet kernel at `x1` and `x1 + u` is `flat(u)·g^p`.
    fn log_g(&self, x1: f64, u: f64) -> f64 {
        let rho = self.l * u / ((x1 + u) * (x1 - self.l));
        let delta = rho.ln_1p();
        -2.0 * log_sinhc_real(delta / (2.0 * self.n)) + log1p_excess(rho)
    }

    /// Same-sheet integrand minus its flat-space part, at separation `u > 0`.
    fn diagonal_excess(&self, x1: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let lg = self.log_g(x1, u);
        if self.vector {
            -2.0 * u.powf(-2.0 - 2.0 * self.h) * ((1.0 + self.h) * lg).exp_m1()
        } else {
            u.powf(-2.0 * self.h) * (self.h * lg).exp_m1()
        }
    }

    /// Same-sheet integrand with the regularized flat factor, at separation `u > 0`.
    fn diagonal_regularized(&self, x1: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let (u2, e2) = (u * u, self.eps * self.eps);
        let lg = self.log_g(x1, u);
        if self.vector {
            let flat = -2.0 * (u2 - e2) / ((u2 + e2).powi(2) * u.powf(2.0 * self.h));
            flat * ((1.0 + self.h) * lg).exp()
        } else {
            (u2 + e2).powf(-self.h) * (self.h * lg).exp()
        }
    }
}

fn inner_points(x1: f64, b: f64, eps: f64) -> Vec<f64> {
    let mut pts = vec![x1];
    let mut step = eps;
    while x1 + step < b {
        pts.push(x1 + step);
        step *= 4.0;
    }
    pts.push(b);
    pts
}

fn boson_matrix(g: &Geometry, k: f64) -> Result<DenseMatrix> {
    let m = opens_boson::build_m_boson(g)?;
    let scale = k / (4.0 * PI * PI);
    Ok(m.circulant().to_dense_complex() * Complex64::new(scale, 0.0))
}

/// `M_ij` for replica sheets `i`, `j`.
pub fn matrix_entry(g: &Geometry, spec: &OperatorSpec, cfg: &QuadratureConfig, i: usize, j: usize) -> Result<f64> {
    spec.validate()?;
    cfg.validate()?;
    let n = g.n();
    if i >= n || j >= n {
        return Err(Error::InvalidInput(format!("replica indices ({i}, {j}) out of range for n = {n}")));
    }
    if let OperatorSpec::BosonCharge { k } = *spec {
        return Ok(boson_matrix(g, k)?[(i, j)].re);
    }
    let kern = Kernel::new(g, spec, cfg.eps_reg);
    let (a, b) = (g.a(), g.b());
    let opts = cfg.quad_options();
    if i == j {
        // the same-sheet kernel behaves as u^s near u = x2 − x1 = 0; u = t^p makes it regular
        let s = match (kern.vector, cfg.subtraction) {
            (true, _) => -2.0 * kern.h,
            (false, true) => 2.0 - 2.0 * kern.h,
            (false, false) => 0.0,
        };
        let p = if s < 0.0 { 1.0 / (1.0 + s) } else { 1.0 };
        let inner = |x1: f64| {
            let us = if cfg.subtraction { vec![0.0, b - x1] } else { inner_points(0.0, b - x1, cfg.eps_reg) };
            us.into_iter().map(|u| u.powf(1.0 / p)).collect::<Vec<_>>()
        };
        let integrand = |x1: f64, t: f64| {
            let u = t.powf(p);
            let jac = if p == 1.0 { 1.0 } else { p * t.powf(p - 1.0) };
            let k = if cfg.subtraction { kern.diagonal_excess(x1, u) } else { kern.diagonal_regularized(x1, u) };
            k * jac
        };
        let r = integrate_2d(integrand, &[a, b], inner, &opts)?;
        let mut value = 2.0 * r.value;
        if cfg.subtraction {
            let flat = flat_interval_exact(spec, b - a, cfg.eps_reg)?;
            value += if kern.vector { 2.0 * flat } else { flat };
        }
        Ok(value)
    } else {
        let theta = 2.0 * PI * (i as f64 - j as f64) / n as f64;
        let r = integrate_2d(|x1, x2| kern.off_diagonal(theta, x1, x2), &[a, b], |_| vec![a, b], &opts)?;
        Ok(r.value)
    }
}

/// Replica matrix using the circulant structure: only `⌊n/2⌋+1` entries are integrated.
pub fn build_m_operator(g: &Geometry, spec: &OperatorSpec, cfg: &QuadratureConfig) -> Result<DenseMatrix> {
    spec.validate()?;
    cfg.validate()?;
    if let OperatorSpec::BosonCharge { k } = *spec {
        return boson_matrix(g, k);
    }
    let n = g.n();
    let row: Vec<f64> =
        (0..=n / 2).into_par_iter().map(|j| matrix_entry(g, spec, cfg, 0, j)).collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(n, n, |i, k| {
        let d = (n + k - i) % n;
        Complex64::new(row[d.min(n - d)], 0.0)
    }))
}

/// Replica matrix with every entry integrated independently.
pub fn build_m_operator_full(g: &Geometry, spec: &OperatorSpec, cfg: &QuadratureConfig) -> Result<DenseMatrix> {
    spec.validate()?;
    cfg.validate()?;
    if let OperatorSpec::BosonCharge { k } = *spec {
        return boson_matrix(g, k);
    }
    let n = g.n();
    let vals: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|p| matrix_entry(g, spec, cfg, p / n, p % n))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(n, n, |i, k| Complex64::new(vals[i * n + k], 0.0)))
}
