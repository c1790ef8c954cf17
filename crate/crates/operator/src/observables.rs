use std::f64::consts::PI;

use opens_core::dense::ensure_real;
use opens_core::{log_det, quadratic_form_cn, DenseMatrix, Error, Geometry, Result};

use crate::matrix::build_m_operator;
use crate::{OperatorSpec, QuadratureConfig};

fn real_log_det(m: &DenseMatrix) -> Result<f64> {
    let ld = log_det(m)?;
    // a positive determinant has zero phase modulo 2π
    let phase = ld.im.rem_euclid(2.0 * PI);
    let phase = if phase > PI { phase - 2.0 * PI } else { phase };
    if phase.abs() > 1e-8 {
        return Err(Error::Domain(format!("det M is not positive (phase {phase})")));
    }
    Ok(ld.re)
}

fn single_copy_m11(g: &Geometry, spec: &OperatorSpec, cfg: &QuadratureConfig) -> Result<f64> {
    let m1 = build_m_operator(&g.with_n(1)?, spec, cfg)?;
    ensure_real(m1[(0, 0)], 1e-10)
}

/// `Tr ρ_{A,q}^n / Tr ρ_A^n = e^{−q²C_n/2}/√det M · (e^{−q²C_1/2}/√M_11)^{−n}` with
/// `M_11` taken from the single-copy matrix.
pub fn purity_ratio_q(m: &DenseMatrix, m11_single: f64, q: f64) -> Result<f64> {
    if m11_single <= 0.0 {
        return Err(Error::Domain(format!("single-copy M_11 must be positive, got {m11_single}")));
    }
    let n = m.nrows() as f64;
    let cn = quadratic_form_cn(m)?;
    let c1 = 1.0 / m11_single;
    let logdet = real_log_det(m)?;
    Ok((-0.5 * q * q * cn - 0.5 * logdet + n * (0.5 * q * q * c1 + 0.5 * m11_single.ln())).exp())
}

/// Pieces of the measurement-induced entanglement for a Gaussian observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieGeneral {
    /// `S_A^{(n)}` with its non-universal constant set to zero.
    pub base: f64,
    /// `log(M_11^n/det M) / (2(1−n))`.
    pub log_det_term: f64,
    /// `−(C_n − nC_1)⟨q²⟩/(2(1−n))` with the Gaussian `⟨q²⟩ = M_11`.
    pub q_term: f64,
    /// Same with `⟨q²⟩ = (2πC_1³M_11)^{−1/2}`.
    pub q_term_printed: f64,
    pub c_n: f64,
    pub c_1: f64,
    pub m11: f64,
}

impl MieGeneral {
    pub fn from_matrices(m: &DenseMatrix, m11_single: f64, base: f64) -> Result<Self> {
        let n = m.nrows();
        if n < 2 {
            return Err(Error::InvalidInput("the MIE needs n ≥ 2".into()));
        }
        let nf = n as f64;
        let c_n = quadratic_form_cn(m)?;
        let c_1 = 1.0 / m11_single;
        let logdet = real_log_det(m)?;
        let log_det_term = (nf * m11_single.ln() - logdet) / (2.0 * (1.0 - nf));
        let dc = c_n - nf * c_1;
        let q_term = -dc * m11_single / (2.0 * (1.0 - nf));
        let q_term_printed = -dc / (2.0 * (2.0 * PI * c_1.powi(3) * m11_single).sqrt() * (1.0 - nf));
        Ok(Self { base, log_det_term, q_term, q_term_printed, c_n, c_1, m11: m11_single })
    }

    pub fn correction(&self) -> f64 {
        self.log_det_term + self.q_term
    }

    pub fn total(&self) -> f64 {
        self.base + self.correction()
    }

    pub fn total_printed(&self) -> f64 {
        self.base + self.log_det_term + self.q_term_printed
    }
}

pub fn mie_general(g: &Geometry, spec: &OperatorSpec, n: usize, cfg: &QuadratureConfig) -> Result<MieGeneral> {
    if n < 2 {
        return Err(Error::InvalidInput("the MIE needs n ≥ 2".into()));
    }
    let m = build_m_operator(&g.with_n(n)?, spec, cfg)?;
    let m11 = single_copy_m11(g, spec, cfg)?;
    MieGeneral::from_matrices(&m, m11, opens_boson::renyi_entropy_base(g, n))
}

fn two_replica(g: &Geometry, spec: &OperatorSpec, cfg: &QuadratureConfig) -> Result<[f64; 3]> {
    let m = build_m_operator(&g.with_n(2)?, spec, cfg)?;
    Ok([ensure_real(m[(0, 0)], 1e-10)?, ensure_real(m[(0, 1)], 1e-10)?, ensure_real(m[(1, 1)], 1e-10)?])
}

/// `Tr(ρ̃_{A,γ₁} ρ̃_{A,γ₂}) / Tr ρ_A² = exp(−½ Σ γ_i γ_j M_ij)` on two replicas.
pub fn overlap_generating(g: &Geometry, spec: &OperatorSpec, gamma1: f64, gamma2: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let [m11, m12, m22] = two_replica(g, spec, cfg)?;
    Ok((-0.5 * (gamma1 * gamma1 * m11 + 2.0 * gamma1 * gamma2 * m12 + gamma2 * gamma2 * m22)).exp())
}

/// The overlap divided by `⟨e^{iγ₁Q_B}⟩⟨e^{iγ₂Q_B}⟩`.
pub fn uv_finite_overlap_ratio(
    g: &Geometry,
    spec: &OperatorSpec,
    gamma1: f64,
    gamma2: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let [m11, m12, m22] = two_replica(g, spec, cfg)?;
    let s = single_copy_m11(g, spec, cfg)?;
    let log = -gamma1 * gamma2 * m12 - 0.5 * gamma1 * gamma1 * (m11 - s) - 0.5 * gamma2 * gamma2 * (m22 - s);
    Ok(log.exp())
}

/// `Σ_q p_q e^{iγq} Tr ρ_{A,q}²` from the constrained two-replica integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedPurity {
    /// `√π/√(M_11−M_12) · exp(−γ²(M_11+M_12)/4)`.
    pub value: f64,
    /// `√π/√(M_11−M_12)`.
    pub prefactor: f64,
    /// The same prefactor with the exponent `−γ²(M_11−M_12)/4` as usually quoted.
    pub value_printed: f64,
}

impl AveragedPurity {
    pub fn from_entries(m11: f64, m12: f64, gamma: f64) -> Result<Self> {
        if m11 <= m12 {
            return Err(Error::Domain(format!("need M_11 > M_12, got {m11} ≤ {m12}")));
        }
        let prefactor = PI.sqrt() / (m11 - m12).sqrt();
        let g2 = gamma * gamma;
        Ok(Self {
            value: prefactor * (-g2 * (m11 + m12) / 4.0).exp(),
            prefactor,
            value_printed: prefactor * (-g2 * (m11 - m12) / 4.0).exp(),
        })
    }
}

pub fn averaged_purity(g: &Geometry, spec: &OperatorSpec, gamma: f64, cfg: &QuadratureConfig) -> Result<AveragedPurity> {
    let [m11, m12, _] = two_replica(g, spec, cfg)?;
    AveragedPurity::from_entries(m11, m12, gamma)
}

/// Averaged purity normalized by its γ = 0 value and by `⟨e^{iγQ_B/√2}⟩`:
/// `exp(−γ²(M_11 + M_12 − M^{(1)}_11)/4)`. The γ-independent prefactor carries the
/// same-sheet divergence and is divided out.
pub fn averaged_purity_uv_finite(g: &Geometry, spec: &OperatorSpec, gamma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let [m11, m12, _] = two_replica(g, spec, cfg)?;
    let s = single_copy_m11(g, spec, cfg)?;
    if m11 <= m12 {
        return Err(Error::Domain(format!("need M_11 > M_12, got {m11} ≤ {m12}")));
    }
    Ok((-gamma * gamma * (m11 + m12 - s) / 4.0).exp())
}

/// Whether the interaction corrections with vertices of degree up to `k` stay UV-finite:
/// scalars need `h ≤ 1/2 + 1/(2k)`, vectors `h ≤ 1/(2k)`.
pub fn interaction_convergence_check(spec: &OperatorSpec, k: usize) -> Result<bool> {
    if k < 1 {
        return Err(Error::InvalidInput("vertex degree must be at least 1".into()));
    }
    let kf = k as f64;
    Ok(match *spec {
        OperatorSpec::Scalar { h } => h <= 0.5 + 0.5 / kf,
        OperatorSpec::Vector { h } => h <= 0.5 / kf,
        OperatorSpec::BosonCharge { .. } => true,
    })
}

/// Whether a degree-`k` vertex of the operator is relevant, `k h < 2`.
pub fn is_relevant_vertex(spec: &OperatorSpec, k: usize) -> bool {
    match *spec {
        OperatorSpec::Scalar { h } | OperatorSpec::Vector { h } => (k as f64) * h < 2.0,
        OperatorSpec::BosonCharge { .. } => true,
    }
}
