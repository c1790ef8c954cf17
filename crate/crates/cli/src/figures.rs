//! Lattice-versus-field-theory comparisons behind the charged-moment figures.

use num_complex::Complex64;
use opens_boson::build_m_boson;
use opens_core::fit::{least_squares, LinearFit};
use opens_core::{Error, Geometry, Result};
use opens_lattice::{ising_gamma_rescaling, LatticeModel, LatticeState, RescalingConvention, Route, SubsystemLayout};
use opens_operator::{build_m_operator, OperatorSpec, QuadratureConfig};
use rayon::prelude::*;

use std::f64::consts::PI;

/// Points with `ℓ₂ ≥ max ℓ₂ / 10` are used for additive-constant fits.
pub fn largest_decade(l2s: &[usize]) -> Vec<bool> {
    let top = l2s.iter().cloned().max().unwrap_or(0) as f64;
    l2s.iter().map(|&l| l as f64 >= top / 10.0).collect()
}

/// One ℓ₂ point of the hopping-chain comparison.
#[derive(Debug, Clone, Copy)]
pub struct HoppingPoint {
    pub ell2: usize,
    pub lattice: Complex64,
    /// `−γᵀMγ/(8π²)` of the compact boson at `K = 1`, before the fitted constant.
    pub cft: f64,
}

/// Lattice `log Z_n(γ)/Z_n` against the boson formula shifted by one fitted constant.
#[derive(Debug, Clone)]
pub struct HoppingComparison {
    pub points: Vec<HoppingPoint>,
    pub constant: f64,
    pub rms: f64,
    pub max_abs: f64,
}

/// `Re log Z_n(γ)/Z_n` of the hopping chain for `ℓ₁ = L`, gap `d`, against the boson result at cutoff `eps`.
pub fn hopping_comparison(l1: usize, d: usize, gammas: &[f64], l2s: &[usize], eps: f64) -> Result<HoppingComparison> {
    let model = LatticeModel::tight_binding();
    let points: Vec<HoppingPoint> = l2s
        .par_iter()
        .map(|&l2| {
            let layout = SubsystemLayout::new(l1, d, l2)?;
            let lattice = LatticeState::infinite(&model, layout)?.log_charged_moment(gammas)?;
            let g = Geometry::from_lengths(l1 as f64, d as f64, l2 as f64, eps, gammas.len())?;
            let cft = -build_m_boson(&g)?.quadratic_form(gammas)? / (8.0 * PI * PI);
            Ok(HoppingPoint { ell2: l2, lattice, cft })
        })
        .collect::<Result<Vec<_>>>()?;
    let mask = largest_decade(l2s);
    let diffs: Vec<f64> = points.iter().zip(&mask).filter(|(_, &m)| m).map(|(p, _)| p.lattice.re - p.cft).collect();
    if diffs.is_empty() {
        return Err(Error::InvalidInput("no points to fit".into()));
    }
    let constant = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let resid: Vec<f64> = points.iter().map(|p| p.lattice.re - p.cft - constant).collect();
    let rms = (resid.iter().map(|r| r * r).sum::<f64>() / resid.len() as f64).sqrt();
    let max_abs = resid.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    Ok(HoppingComparison { points, constant, rms, max_abs })
}

/// One ℓ₂ point of the Majorana-chain comparison at equal fluxes on two replicas.
#[derive(Debug, Clone, Copy)]
pub struct IsingPoint {
    pub ell2: usize,
    pub lattice_re: f64,
    /// `Σ_ij M_ij` of the `h_s = 1` scalar with the `πℓ₂/ε` same-sheet term removed.
    pub m_sum: f64,
}

/// Fit `Re log Z₂ = A ℓ₂ + c + κ·(−½ γ̃² Σ M)`; `κ = 1` when the prediction matches.
#[derive(Debug, Clone)]
pub struct IsingFit {
    pub gamma_eff: f64,
    pub linear: f64,
    pub constant: f64,
    pub kappa: f64,
    pub fit: LinearFit,
}

#[derive(Debug, Clone)]
pub struct IsingComparison {
    pub gamma: f64,
    pub points: Vec<IsingPoint>,
    pub rescaled: IsingFit,
    pub rescaled_plain: IsingFit,
    pub quadratic: IsingFit,
}

fn ising_fit(points: &[IsingPoint], gamma_eff: f64) -> Result<IsingFit> {
    let x: Vec<f64> = points.iter().map(|p| p.ell2 as f64).collect();
    let pred: Vec<f64> = points.iter().map(|p| -0.5 * gamma_eff * gamma_eff * p.m_sum).collect();
    let y: Vec<f64> = points.iter().map(|p| p.lattice_re).collect();
    let fit = least_squares(&[x, vec![1.0; points.len()], pred], &y)?;
    Ok(IsingFit { gamma_eff, linear: fit.coefficients[0], constant: fit.coefficients[1], kappa: fit.coefficients[2], fit })
}

/// `Σ_ij M_ij` of the `h_s = 1` scalar on two replicas with the `πℓ₂/ε` pieces removed.
pub fn ising_m_sum(l1: usize, d: usize, l2: usize, cfg: &QuadratureConfig) -> Result<f64> {
    let g = Geometry::from_lengths(l1 as f64, d as f64, l2 as f64, cfg.eps_reg, 2)?;
    let m = build_m_operator(&g, &OperatorSpec::scalar(1.0)?, cfg)?;
    let total: f64 = m.iter().map(|z| z.re).sum();
    Ok(total - 2.0 * PI * l2 as f64 / cfg.eps_reg)
}

/// Majorana-chain `Re log Z₂(γ, γ)/Z₂` against the `h_s = 1` Gaussian formula
/// with the rescaled flux (both conventions) and with its quadratic approximation `γ/(2π)`.
pub fn ising_comparison(l1: usize, d: usize, gamma: f64, l2s: &[usize], cfg: &QuadratureConfig) -> Result<IsingComparison> {
    let model = LatticeModel::critical_ising();
    let points: Vec<IsingPoint> = l2s
        .par_iter()
        .map(|&l2| {
            let layout = SubsystemLayout::new(l1, d, l2)?;
            let st = LatticeState::infinite(&model, layout)?.with_route(Route::NambuRealPart)?;
            let lattice_re = st.log_charged_moment(&[gamma, gamma])?.re;
            Ok(IsingPoint { ell2: l2, lattice_re, m_sum: ising_m_sum(l1, d, l2, cfg)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IsingComparison {
        gamma,
        rescaled: ising_fit(&points, ising_gamma_rescaling(gamma, RescalingConvention::OverPi)?)?,
        rescaled_plain: ising_fit(&points, ising_gamma_rescaling(gamma, RescalingConvention::Plain)?)?,
        quadratic: ising_fit(&points, gamma / (2.0 * PI))?,
        points,
    })
}

/// One ℓ₂ point of a Holevo χ panel.
#[derive(Debug, Clone, Copy)]
pub struct HolevoPoint {
    pub ell2: f64,
    pub chi: f64,
    pub error_estimate: f64,
    pub approx: f64,
    pub approx_printed: f64,
}

/// χ continued from `n = 2..=n_max` and both closed approximations along ℓ₂.
pub fn holevo_panel(l: f64, d: f64, l2s: &[f64], eps: f64, n_max: usize) -> Result<Vec<HolevoPoint>> {
    l2s.par_iter()
        .map(|&ell2| {
            let g = Geometry::from_lengths(l, d, ell2, eps, 1)?;
            let chi = opens_boson::holevo_chi(&g, n_max)?;
            Ok(HolevoPoint {
                ell2,
                chi: chi.value,
                error_estimate: chi.error_estimate,
                approx: opens_boson::holevo_chi_approx(&g)?,
                approx_printed: opens_boson::holevo_chi_approx_printed(&g)?,
            })
        })
        .collect()
}

/// Whether a sequence rises strictly to an interior maximum and then falls strictly.
pub fn rises_then_falls(v: &[f64]) -> bool {
    let Some(peak) = v.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).map(|(i, _)| i) else {
        return false;
    };
    peak > 0 && peak + 1 < v.len() && v[..=peak].windows(2).all(|w| w[1] > w[0]) && v[peak..].windows(2).all(|w| w[1] < w[0])
}

/// `C_n` for each `n` and the residuals of its best straight-line fit in `n`.
pub fn cn_series(g: &Geometry, spec: &OperatorSpec, ns: &[usize], cfg: &QuadratureConfig) -> Result<(Vec<f64>, LinearFit)> {
    let cn = ns
        .par_iter()
        .map(|&n| opens_core::quadratic_form_cn(&build_m_operator(&g.with_n(n)?, spec, cfg)?))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let fit = opens_core::fit::line_fit(&x, &cn)?;
    Ok((cn, fit))
}
