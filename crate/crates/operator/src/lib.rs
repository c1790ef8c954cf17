//! Replica matrices for generic Gaussian operators integrated over B, built by
//! regularized quadrature on the uniformized replica plane, and the
//! observables derived from them.

mod flat;
mod matrix;
mod observables;

pub use flat::{flat_interval_exact, flat_interval_integral, vector_universal_continued, vector_universal_printed, FlatIntegral};
pub use matrix::{build_m_operator, build_m_operator_full, matrix_entry, replica_map};
pub use observables::{
    averaged_purity, averaged_purity_uv_finite, interaction_convergence_check, is_relevant_vertex, mie_general,
    overlap_generating, purity_ratio_q, uv_finite_overlap_ratio, AveragedPurity, MieGeneral,
};

use opens_core::{Error, Result};

/// The observable integrated over B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorSpec {
    /// Scalar primary of weight `(h/2, h/2)`, correlator `1/|w−w′|^{2h}`.
    Scalar { h: f64 },
    /// Vector of weight `(1+h/2, h/2)`, correlator `−1/((w−w′)²|w−w′|^{2h})`.
    Vector { h: f64 },
    /// U(1) charge of a compact boson with Luttinger parameter `K`.
    BosonCharge { k: f64 },
}

impl OperatorSpec {
    pub fn scalar(h: f64) -> Result<Self> {
        let s = Self::Scalar { h };
        s.validate()?;
        Ok(s)
    }

    pub fn vector(h: f64) -> Result<Self> {
        let s = Self::Vector { h };
        s.validate()?;
        Ok(s)
    }

    pub fn boson_charge(k: f64) -> Result<Self> {
        let s = Self::BosonCharge { k };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Scalar { h } if h > 0.0 && h < 1.5 => Ok(()),
            Self::Scalar { h } => Err(Error::InvalidInput(format!("scalar weight must lie in (0, 3/2), got {h}"))),
            Self::Vector { h } if (0.0..0.5).contains(&h) => Ok(()),
            Self::Vector { h } => Err(Error::InvalidInput(format!("vector weight must lie in [0, 1/2), got {h}"))),
            Self::BosonCharge { k } if k > 0.0 && k.is_finite() => Ok(()),
            Self::BosonCharge { k } => Err(Error::InvalidInput(format!("Luttinger parameter must be positive, got {k}"))),
        }
    }
}

/// Settings for the replica-matrix quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    /// Point-splitting ε.
    pub eps_reg: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Integrate `f − f_flat` and add the flat piece analytically (on), or
    /// integrate the regularized kernel directly (off).
    pub subtraction: bool,
    /// ε values for Richardson extrapolation of flat integrals.
    pub extrapolation_eps: Vec<f64>,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { eps_reg: 1e-3, abs_tol: 1e-9, rel_tol: 1e-9, subtraction: true, extrapolation_eps: Vec::new(), max_intervals: 4000 }
    }
}

impl QuadratureConfig {
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_reg = eps;
        self
    }

    pub fn with_tolerance(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn without_subtraction(mut self) -> Self {
        self.subtraction = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_reg > 0.0 && self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("ε and tolerances must be positive".into()));
        }
        if self.extrapolation_eps.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidInput("extrapolation ε values must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn quad_options(&self) -> opens_core::quad::QuadOptions {
        opens_core::quad::QuadOptions { abs_tol: self.abs_tol, rel_tol: self.rel_tol, max_intervals: self.max_intervals }
    }
}
