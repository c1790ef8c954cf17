use std::f64::consts::PI;

use opens_continuation::{continue_to_one, ContinuationProblem};
use opens_core::special::log_sinhc_derivative;
use opens_core::{quadratic_form_cn_real, Error, Geometry, Result, SymmetricCirculant};

use crate::equal_time::{build_m_boson, build_m_boson_with, cross_log, diagonal_shift, off_diagonal, Regularization};
use crate::{cutoff_log, BosonParams};

/// `Tr ∏_k Tr_Ā[ρ e^{iγ_k Q_B}] / Tr ρ_A^n = exp(−K/(8π²) γᵀMγ)`.
pub fn charged_moments_ratio(g: &Geometry, p: &BosonParams, gammas: &[f64]) -> Result<f64> {
    if gammas.iter().all(|&x| x == 0.0) {
        return Ok(1.0);
    }
    let m = build_m_boson(g)?;
    Ok((-p.k() / (8.0 * PI * PI) * m.quadratic_form(gammas)?).exp())
}

/// `C_n = n / (4 log((b−a)/(2ε)))`.
pub fn cn_closed_form(g: &Geometry) -> Result<f64> {
    Ok(g.n() as f64 / (4.0 * cutoff_log(g)?))
}

/// `v M⁻¹ vᵀ` from the constructed matrix.
pub fn cn_numeric(g: &Geometry, reg: Regularization) -> Result<f64> {
    let m = build_m_boson_with(g, reg)?;
    quadratic_form_cn_real(&m.circulant().to_dense())
}

/// Rényi ratio `Tr ρ_{A,q}^n / Tr ρ_A^n` and the MIE correction it induces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiMie {
    pub ratio: f64,
    pub correction: f64,
    /// `log(M_11^n / det M)`.
    pub log_ratio: f64,
}

impl RenyiMie {
    fn from_log_ratio(log_ratio: f64, n: usize) -> Self {
        Self { ratio: (0.5 * log_ratio).exp(), correction: log_ratio / (2.0 * (1.0 - n as f64)), log_ratio }
    }
}

/// Works from an explicit matrix and normalizing element `m11`.
pub fn renyi_ratio_and_mie_from(m: &SymmetricCirculant, m11: f64) -> Result<RenyiMie> {
    let n = m.n();
    if n < 2 {
        return Err(Error::InvalidInput("the Rényi ratio needs n ≥ 2".into()));
    }
    if m11 <= 0.0 {
        return Err(Error::Domain(format!("M_11 must be positive, got {m11}")));
    }
    let (sign, logabs) = m.log_determinant()?;
    if sign <= 0.0 {
        return Err(Error::Domain("det M is not positive".into()));
    }
    Ok(RenyiMie::from_log_ratio(n as f64 * m11.ln() - logabs, n))
}

/// `log(M_11^n/det M)` from the leading-order matrix, with `M_11` the single-copy element.
/// Each eigenvalue enters through `log1p((λ_k − M_11)/M_11)` so that widely separated
/// intervals do not lose digits.
pub(crate) fn log_ratio_stable(g: &Geometry) -> f64 {
    let n = g.n();
    let x = cross_log(g);
    let m11 = 4.0 * (g.ell2() / (2.0 * g.eps())).ln();
    let shift = diagonal_shift(x, n);
    let off: Vec<f64> = (1..n).map(|j| off_diagonal(x, n, j)).collect();
    (0..n)
        .map(|k| {
            let excess = shift
                + off
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * (2.0 * PI * ((i + 1) * k % n) as f64 / n as f64).cos())
                    .sum::<f64>();
            -(excess / m11).ln_1p()
        })
        .sum()
}

/// Rényi ratio and MIE correction for replica count `n ≥ 2`. `M_11` is the element of
/// the single-copy matrix, the normalization of `p_q`.
pub fn renyi_ratio_and_mie(g: &Geometry, n: usize) -> Result<RenyiMie> {
    if n < 2 {
        return Err(Error::InvalidInput("the Rényi ratio needs n ≥ 2".into()));
    }
    cutoff_log(g)?;
    let gn = g.with_n(n)?;
    Ok(RenyiMie::from_log_ratio(log_ratio_stable(&gn), n))
}

/// Leading Rényi entropy `(1/6)(n+1)/n log(L/ε)`; the additive constant is set to zero.
pub fn renyi_entropy_base(g: &Geometry, n: usize) -> f64 {
    let n = n as f64;
    (n + 1.0) / (6.0 * n) * (g.l() / g.eps()).ln()
}

/// Continued Holevo χ together with the samples it was fitted to.
#[derive(Debug, Clone, PartialEq)]
pub struct HolevoChi {
    pub value: f64,
    pub error_estimate: f64,
    pub samples: Vec<(f64, f64)>,
}

/// χ from samples `log(M_11^n/det M)/(2(n−1))` at `n = 2..=n_max`.
pub fn holevo_chi(g: &Geometry, n_max: usize) -> Result<HolevoChi> {
    if n_max < 4 {
        return Err(Error::InvalidInput(format!("n_max must be at least 4, got {n_max}")));
    }
    let ns: Vec<usize> = (2..=n_max).collect();
    holevo_chi_with(g, &ns)
}

pub fn holevo_chi_with(g: &Geometry, ns: &[usize]) -> Result<HolevoChi> {
    cutoff_log(g)?;
    let samples = ns
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::InvalidInput("χ samples need n ≥ 2".into()));
            }
            Ok((n as f64, log_ratio_stable(&g.with_n(n)?) / (2.0 * (n as f64 - 1.0))))
        })
        .collect::<Result<Vec<_>>>()?;
    let r = continue_to_one(&ContinuationProblem::from_real(&samples))?;
    Ok(HolevoChi { value: r.value.re, error_estimate: r.error_estimate, samples })
}

/// Closed approximation of χ, `x S'(x/2) / (4 log((b−a)/(2ε)))` with `x = log[a(b−L)/(b(a−L))]`
/// and `S(y) = log(sinh y / y)`. Equals `−½` of the printed expression, whose sign and
/// normalization do not match the n → 1 limit.
pub fn holevo_chi_approx(g: &Geometry) -> Result<f64> {
    let lam = cutoff_log(g)?;
    let x = cross_log(g);
    Ok(x * log_sinhc_derivative(x / 2.0) / (4.0 * lam))
}

/// The approximation exactly as printed:
/// `1/Λ − (2ab − L(a+b)) log[a(b−L)/(b(a−L))] / (2L(b−a)Λ)`.
pub fn holevo_chi_approx_printed(g: &Geometry) -> Result<f64> {
    let lam = cutoff_log(g)?;
    let x = cross_log(g);
    Ok(-x * log_sinhc_derivative(x / 2.0) / (2.0 * lam))
}

/// Gaussian charge distribution of B on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeDistribution {
    m11: f64,
    k: f64,
}

impl ChargeDistribution {
    pub fn new(g: &Geometry, p: &BosonParams) -> Result<Self> {
        let m = build_m_boson(&g.with_n(1)?)?;
        Ok(Self { m11: m.entry(0, 0), k: p.k() })
    }

    /// Density with log-weight `−2π² q² C_1 / K`, `C_1 = 1/M_11`.
    pub fn density(&self, q: f64) -> f64 {
        let var = self.variance();
        (-q * q / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
    }

    /// `K M_11 / (4π²)`.
    pub fn variance(&self) -> f64 {
        self.k * self.m11 / (4.0 * PI * PI)
    }

    /// `(2π C_1³ M_11)^{−1/2}` as used in the MIE q-average.
    pub fn second_moment_printed(&self) -> f64 {
        let c1 = 1.0 / self.m11;
        1.0 / (2.0 * PI * c1.powi(3) * self.m11).sqrt()
    }
}

pub fn charge_distribution(g: &Geometry, p: &BosonParams, q: f64) -> Result<f64> {
    Ok(ChargeDistribution::new(g, p)?.density(q))
}

pub fn charge_variance(g: &Geometry, p: &BosonParams) -> Result<f64> {
    Ok(ChargeDistribution::new(g, p)?.variance())
}

/// `∫dγ exp(−K/(8π²) γᵀMγ − iqΣγ) = e^{−2π²q²C_n/K} (8π³/K)^{n/2} / √det M`.
pub fn charged_moment_saddle(g: &Geometry, p: &BosonParams, q: f64) -> Result<f64> {
    let m = build_m_boson(g)?;
    let n = g.n() as f64;
    let cn = m.circulant().to_dense();
    let cn = quadratic_form_cn_real(&cn)?;
    let (sign, logdet) = m.circulant().log_determinant()?;
    if sign <= 0.0 {
        return Err(Error::Domain("det M is not positive".into()));
    }
    let k = p.k();
    Ok((-2.0 * PI * PI * q * q * cn / k + 0.5 * n * (8.0 * PI.powi(3) / k).ln() - 0.5 * logdet).exp())
}
