use nalgebra::DMatrix;
use num_complex::Complex64;
use opens_continuation::{continue_to_one, ContinuationProblem};
use opens_core::special::log1p_c;
use opens_core::{DenseMatrix, Error, Geometry, Result};

use crate::sector::Sector;

/// Real time `t` at which B is measured, with the regulator `ε′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeParams {
    t: f64,
    eps_prime: f64,
}

impl TimeParams {
    pub fn new(t: f64, eps_prime: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("time must be finite and non-negative, got {t}")));
        }
        if !(eps_prime > 0.0 && eps_prime.is_finite()) {
            return Err(Error::InvalidInput(format!("ε′ must be positive, got {eps_prime}")));
        }
        Ok(Self { t, eps_prime })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }
}

/// Time-dependent replica matrix: a holomorphic and an antiholomorphic
/// circulant block.
#[derive(Debug, Clone)]
pub struct TimeMatrix {
    geometry: Geometry,
    params: TimeParams,
    holo: Sector,
    anti: Sector,
}

fn circulant_dense(row: &[Complex64]) -> DenseMatrix {
    let n = row.len();
    DMatrix::from_fn(n, n, |j, k| row[(n + k - j) % n])
}

impl TimeMatrix {
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn params(&self) -> &TimeParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.holo.n()
    }

    /// The 2n×2n matrix `diag(M^h, M^a)`.
    pub fn block_matrix(&self) -> DenseMatrix {
        let n = self.n();
        let mut m = DenseMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&circulant_dense(&self.holo.row()));
        m.view_mut((n, n), (n, n)).copy_from(&circulant_dense(&self.anti.row()));
        m
    }

    /// `M^h + M^a`, the matrix that multiplies the replica fluxes.
    pub fn effective(&self) -> DenseMatrix {
        circulant_dense(&self.holo.row()) + circulant_dense(&self.anti.row())
    }

    /// First diagonal element of the single-copy matrix at the same time.
    pub fn single_copy_diagonal(&self) -> Complex64 {
        self.holo.d1 + self.anti.d1
    }

    /// `log(M_11^n / det M)` with `M_11` the single-copy element.
    pub fn log_ratio(&self) -> Complex64 {
        let m11 = self.single_copy_diagonal();
        (0..self.n())
            .map(|k| -log1p_c((self.holo.eigen_excess(k) + self.anti.eigen_excess(k)) / m11))
            .sum()
    }
}

pub fn build_m_time(g: &Geometry, tp: &TimeParams) -> Result<TimeMatrix> {
    let (l, a, b, eps, n) = (g.l(), g.a(), g.b(), g.eps(), g.n());
    let (t, ep) = (tp.t, tp.eps_prime);
    let holo = Sector::from_points(Complex64::new(a - t, ep), Complex64::new(b - t, ep), eps, l, n);
    let anti = Sector::from_points(Complex64::new(a + t, ep), Complex64::new(b + t, ep), eps, l, n).conj();
    Ok(TimeMatrix { geometry: *g, params: *tp, holo, anti })
}

/// Samples `log(M_11^n/det M)/(2(n−1))` for the given replica counts.
pub fn time_correction_samples(g: &Geometry, tp: &TimeParams, ns: &[usize]) -> Result<Vec<(f64, Complex64)>> {
    ns.iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::InvalidInput("time samples need n ≥ 2".into()));
            }
            let m = build_m_time(&g.with_n(n)?, tp)?;
            Ok((n as f64, m.log_ratio() / (2.0 * (n as f64 - 1.0))))
        })
        .collect()
}

/// Holevo χ at time t.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChi {
    pub value: f64,
    /// Imaginary part left after continuation; should be small.
    pub imag_residual: f64,
    pub error_estimate: f64,
}

pub fn time_chi(g: &Geometry, tp: &TimeParams, n_max: usize) -> Result<TimeChi> {
    if n_max < 4 {
        return Err(Error::InvalidInput(format!("n_max must be at least 4, got {n_max}")));
    }
    let ns: Vec<usize> = (2..=n_max).collect();
    let samples = time_correction_samples(g, tp, &ns)?;
    let r = continue_to_one(&ContinuationProblem::new(samples))?;
    Ok(TimeChi { value: r.value.re, imag_residual: r.value.im, error_estimate: r.error_estimate })
}
