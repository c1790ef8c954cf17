//! Compact-boson replica engine for the U(1) charge: the circulant matrix `M`,
//! charged moments, Rényi ratio and MIE correction, Holevo χ, the charge
//! distribution and the real-time generalization.

mod coincident;
mod equal_time;
mod observables;
mod sector;
mod time;

pub use coincident::coincident_limit_row;
pub use equal_time::{branch_points, build_m_boson, build_m_boson_with, Regularization, ReplicaMatrix};
pub use observables::{
    charge_distribution, charge_variance, charged_moment_saddle, charged_moments_ratio, cn_closed_form, cn_numeric,
    holevo_chi, holevo_chi_approx, holevo_chi_approx_printed, holevo_chi_with, renyi_entropy_base,
    renyi_ratio_and_mie, renyi_ratio_and_mie_from, ChargeDistribution, HolevoChi, RenyiMie,
};
pub use time::{build_m_time, time_chi, time_correction_samples, TimeChi, TimeMatrix, TimeParams};

use opens_core::{Error, Result};

/// Luttinger parameter of the compact boson.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BosonParams {
    k: f64,
}

impl BosonParams {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidInput(format!("Luttinger parameter must be positive, got {k}")));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// `log((b−a)/(2ε))`, the cutoff log that controls every diagonal entry.
pub fn cutoff_log(g: &opens_core::Geometry) -> Result<f64> {
    let arg = g.ell2() / (2.0 * g.eps());
    if arg <= 1.0 {
        return Err(Error::Domain(format!("(b-a)/(2 eps) = {arg} must exceed 1")));
    }
    Ok(arg.ln())
}
