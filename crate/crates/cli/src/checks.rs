//! Cross-route checks: Gaussian determinants against exact diagonalization, and
//! cutoff sensitivity of the operator-quadrature observables.

use num_complex::Complex64;
use opens_core::{Geometry, Result};
use opens_lattice::{EdOracle, EdOrdering, EdSolver, LatticeModel, LatticeState, SubsystemLayout, SECTOR_FLOOR};
use opens_operator::{averaged_purity, averaged_purity_uv_finite, overlap_generating, uv_finite_overlap_ratio, OperatorSpec, QuadratureConfig};

/// Flux vector used for `n` replicas at grid value `γ`: `γ_j = γ (j+1)/n`.
pub fn replica_fluxes(gamma: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| gamma * (j + 1) as f64 / n as f64).collect()
}

/// One quantity evaluated by both routes.
#[derive(Debug, Clone, PartialEq)]
pub struct EdRow {
    pub quantity: &'static str,
    pub label: String,
    pub gaussian: Complex64,
    pub ed: Complex64,
}

impl EdRow {
    pub fn error(&self) -> f64 {
        (self.gaussian - self.ed).norm()
    }
}

/// Gaussian and ED values of charged moments, `p_q` and `R_{q₁q₂}` for one layout
/// embedded at `offset` in an `n_sites` open chain. Overlaps are compared on sectors
/// with `p_q` above the sector floor.
pub fn ed_comparison(
    model: &LatticeModel,
    layout: SubsystemLayout,
    n_sites: usize,
    offset: usize,
    ns: &[usize],
    gammas: &[f64],
) -> Result<Vec<EdRow>> {
    let st = LatticeState::finite_chain(model, layout, n_sites, offset)?;
    let ed = EdOracle::from_chain(model, layout, n_sites, offset, EdOrdering::ABRest, EdSolver::Auto)?;
    let mut rows = Vec::new();
    for &n in ns {
        for &g in gammas {
            let gs = replica_fluxes(g, n);
            rows.push(EdRow {
                quantity: "charged-moment",
                label: format!("n={n} gamma={g}"),
                gaussian: st.log_charged_moment(&gs)?.exp(),
                ed: ed.charged_moment(&gs),
            });
        }
    }
    let p = st.charge_probabilities()?;
    let pe = ed.charge_probabilities();
    let re = |x: f64| Complex64::new(x, 0.0);
    rows.push(EdRow {
        quantity: "probability-sum",
        label: "sum_q p_q".into(),
        gaussian: re(p.iter().sum()),
        ed: re(1.0),
    });
    for (q, (a, b)) in p.iter().zip(&pe).enumerate() {
        rows.push(EdRow { quantity: "probability", label: format!("q={q}"), gaussian: re(*a), ed: re(*b) });
    }
    let t = st.overlap_matrix_unnormalized()?;
    for q1 in 0..p.len() {
        for q2 in q1..p.len() {
            if p[q1] < SECTOR_FLOOR || p[q2] < SECTOR_FLOOR {
                continue;
            }
            rows.push(EdRow {
                quantity: "overlap",
                label: format!("q1={q1} q2={q2}"),
                gaussian: re(t[(q1, q2)] / (p[q1] * p[q2])),
                ed: re(ed.post_measurement_overlap(q1, q2)?),
            });
        }
    }
    Ok(rows)
}

/// Every layout `(ℓ₁, d, ℓ₂)` fitting in an `n_sites` chain, centred.
pub fn all_layouts(n_sites: usize) -> Vec<(SubsystemLayout, usize)> {
    let mut out = Vec::new();
    for ell1 in 1..n_sites {
        for ell2 in 1..=n_sites - ell1 {
            for d in 0..=n_sites - ell1 - ell2 {
                let layout = SubsystemLayout { ell1, d, ell2 };
                out.push((layout, (n_sites - layout.window()) / 2));
            }
        }
    }
    out
}

/// A quantity at `eps_reg` and at `eps_reg/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct UvRow {
    pub quantity: &'static str,
    pub at_eps: f64,
    pub at_half: f64,
    /// Whether the quantity is expected to be cutoff independent.
    pub finite: bool,
}

impl UvRow {
    pub fn change(&self) -> f64 {
        (self.at_half - self.at_eps).abs() / self.at_eps.abs()
    }

    /// Finite quantities move by < 1 %, unnormalized ones by > 10 %.
    pub fn pass(&self) -> bool {
        if self.finite {
            self.change() < 0.01
        } else {
            self.change() > 0.1
        }
    }
}

/// Normalized overlap ratio and averaged purity at `(γ₁, γ₂)` and `γ`, and the raw
/// numerators at the small fluxes `(γ_raw, 2γ_raw)` where they are not underflowed.
pub fn uv_check(g: &Geometry, spec: &OperatorSpec, cfg: &QuadratureConfig, pair: (f64, f64), gamma: f64, gamma_raw: f64) -> Result<Vec<UvRow>> {
    let half = cfg.clone().with_eps(cfg.eps_reg / 2.0);
    let both = |f: &dyn Fn(&QuadratureConfig) -> Result<f64>| -> Result<(f64, f64)> { Ok((f(cfg)?, f(&half)?)) };
    let row = |quantity, (at_eps, at_half), finite| UvRow { quantity, at_eps, at_half, finite };
    Ok(vec![
        row("overlap-ratio", both(&|c| uv_finite_overlap_ratio(g, spec, pair.0, pair.1, c))?, true),
        row("averaged-purity-normalized", both(&|c| averaged_purity_uv_finite(g, spec, gamma, c))?, true),
        row("overlap-numerator", both(&|c| overlap_generating(g, spec, gamma_raw, 2.0 * gamma_raw, c))?, false),
        row("averaged-purity-numerator", both(&|c| Ok(averaged_purity(g, spec, gamma_raw, c)?.value))?, false),
    ])
}
