use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use opens_core::{DenseMatrix, Error, Result};

use crate::model::{LatticeModel, Preset, SubsystemLayout};

/// Eigenvalues of Γ are clipped into `[−1+CLIP, 1−CLIP]` wherever `(1±Γ)⁻¹` or
/// `log((1+Γ)/(1−Γ))` is formed. The determinant routes never invert `1±Γ`.
pub const CLIP: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-10;
const SPECTRUM_TOL: f64 = 1e-10;

/// `Γ_{IJ} = 2⟨ψ_I ψ_J†⟩ − δ_{IJ}` over interleaved Nambu indices:
/// `ψ_{2j} = c_j`, `ψ_{2j+1} = c†_j`.
///
/// The ground state has `Γ = sign(H_BdG)`, and `e^{−h} = (1−Γ)/(1+Γ)` defines
/// the single-particle entanglement Hamiltonian.
#[derive(Debug, Clone)]
pub struct NambuCorrelationMatrix {
    gamma: DenseMatrix,
}

impl NambuCorrelationMatrix {
    /// Validate Hermiticity and the spectral bound.
    pub fn new(gamma: DenseMatrix) -> Result<Self> {
        let dim = gamma.nrows();
        if dim == 0 || !gamma.is_square() || dim % 2 != 0 {
            return Err(Error::InvalidInput(format!("Nambu matrix must be square with even size, got {dim}")));
        }
        let asym = (&gamma - gamma.adjoint()).camax();
        if asym > HERMITIAN_TOL {
            return Err(Error::InvalidInput(format!("correlation matrix not Hermitian (deviation {asym:.2e})")));
        }
        let herm = (&gamma + gamma.adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(herm.clone());
        let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo < -1.0 - SPECTRUM_TOL || hi > 1.0 + SPECTRUM_TOL {
            return Err(Error::InvalidInput(format!("spectrum [{lo}, {hi}] exceeds [−1, 1]")));
        }
        Ok(Self { gamma: herm })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.gamma
    }

    pub fn sites(&self) -> usize {
        self.gamma.nrows() / 2
    }

    /// Restriction to the listed sites, in the given order.
    pub fn restrict(&self, sites: &[usize]) -> Result<Self> {
        if let Some(&s) = sites.iter().find(|&&s| s >= self.sites()) {
            return Err(Error::InvalidInput(format!("site {s} outside a {}-site matrix", self.sites())));
        }
        let idx: Vec<usize> = sites.iter().flat_map(|&s| [2 * s, 2 * s + 1]).collect();
        let g = DenseMatrix::from_fn(idx.len(), idx.len(), |i, j| self.gamma[(idx[i], idx[j])]);
        Ok(Self { gamma: g })
    }

    /// `2⟨c_i c†_j⟩ − δ_ij`, the whole state when the anomalous block vanishes.
    pub fn particle_block(&self) -> DenseMatrix {
        let m = self.sites();
        DenseMatrix::from_fn(m, m, |i, j| self.gamma[(2 * i, 2 * j)])
    }

    /// Largest `|⟨c_i c_j⟩|`-type entry.
    pub fn anomalous_norm(&self) -> f64 {
        let m = self.sites();
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                worst = worst.max(self.gamma[(2 * i, 2 * j + 1)].norm());
            }
        }
        worst
    }

    /// Deviation from `τ Γᵀ τ = −Γ`, with `τ` swapping `c_j ↔ c†_j`.
    pub fn particle_hole_defect(&self) -> f64 {
        let dim = self.gamma.nrows();
        let swap = |i: usize| i ^ 1;
        let mut worst = 0.0_f64;
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((self.gamma[(swap(j), swap(i))] + self.gamma[(i, j)]).norm());
            }
        }
        worst
    }

    /// Eigenvalues of Γ in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.gamma.clone()).eigenvalues.iter().cloned().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

/// Infinite-chain kernels `(Γ_pp(r), Γ_ph(r))` at site separation `r = j − l`.
fn preset_kernel(preset: Preset, r: i64) -> (f64, f64) {
    let rf = r as f64;
    match preset {
        Preset::TightBinding => {
            if r == 0 {
                (0.0, 0.0)
            } else {
                (-2.0 * (PI * rf / 2.0).sin() / (PI * rf), 0.0)
            }
        }
        Preset::CriticalIsing => {
            let sign = if r.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let den = rf * rf - 0.25;
            (sign / (2.0 * PI * den), -sign * rf / (PI * den))
        }
    }
}

fn from_translation_kernel<F: Fn(i64) -> (f64, f64)>(m: usize, kernel: F) -> DenseMatrix {
    let mut g = DenseMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        for l in 0..m {
            let (pp, ph) = kernel(j as i64 - l as i64);
            g[(2 * j, 2 * l)] = Complex64::new(pp, 0.0);
            g[(2 * j + 1, 2 * l + 1)] = Complex64::new(-pp, 0.0);
            g[(2 * j, 2 * l + 1)] = Complex64::new(ph, 0.0);
            g[(2 * j + 1, 2 * l)] = Complex64::new(-ph, 0.0);
        }
    }
    g
}

/// Ground-state Γ of the infinite chain on the `ℓ₁+d+ℓ₂` window of the layout.
pub fn ground_state_correlations(model: &LatticeModel, layout: &SubsystemLayout) -> Result<NambuCorrelationMatrix> {
    infinite_chain_correlations(model, layout.window())
}

/// Ground-state Γ of the infinite chain on `m` consecutive sites.
pub fn infinite_chain_correlations(model: &LatticeModel, m: usize) -> Result<NambuCorrelationMatrix> {
    let preset = model.preset().ok_or_else(|| {
        Error::Domain(format!(
            "no infinite-chain kernel for κ={}, h={}; use a finite chain",
            model.kappa, model.h_field
        ))
    })?;
    NambuCorrelationMatrix::new(from_translation_kernel(m, |r| preset_kernel(preset, r)))
}

/// Real BdG matrix with `H = ½ ψ† H_BdG ψ + const` on an open chain, interleaved ordering.
pub fn bdg_hamiltonian(model: &LatticeModel, n_sites: usize) -> DMatrix<f64> {
    let mut h = DMatrix::<f64>::zeros(2 * n_sites, 2 * n_sites);
    let mut put = |i: usize, j: usize, a: f64, b: f64| {
        h[(2 * i, 2 * j)] += a;
        h[(2 * i + 1, 2 * j + 1)] -= a;
        h[(2 * i, 2 * j + 1)] += b;
        h[(2 * i + 1, 2 * j)] -= b;
    };
    for j in 0..n_sites {
        put(j, j, -model.h_field, 0.0);
        if j + 1 < n_sites {
            put(j, j + 1, -0.5, -0.5 * model.kappa);
            put(j + 1, j, -0.5, 0.5 * model.kappa);
        }
    }
    h
}

/// Ground-state Γ of an open chain of `n_sites`, `Γ = 2P₊ − 1`.
pub fn finite_chain_correlations(model: &LatticeModel, n_sites: usize) -> Result<NambuCorrelationMatrix> {
    if n_sites == 0 {
        return Err(Error::InvalidInput("chain needs at least one site".into()));
    }
    let eig = SymmetricEigen::new(bdg_hamiltonian(model, n_sites));
    let gap = eig.eigenvalues.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
    if gap < 1e-10 {
        return Err(Error::Domain(format!("open chain of {n_sites} sites has a zero mode; ground state is degenerate")));
    }
    let dim = 2 * n_sites;
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for (k, e) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        g += (v * v.transpose()).scale(e.signum());
    }
    NambuCorrelationMatrix::new(g.map(|v| Complex64::new(v, 0.0)))
}

/// Ground-state Γ of an antiperiodic ring of `n_ring` sites, `m` consecutive sites kept,
/// by summing `sign(Ĥ(k))` over the momenta `k = 2π(q+½)/N`.
///
/// For the presets this converges to the infinite-chain kernels as `O(N⁻²)`.
pub fn ring_correlations(model: &LatticeModel, n_ring: usize, m: usize) -> Result<NambuCorrelationMatrix> {
    if m > n_ring || n_ring == 0 {
        return Err(Error::InvalidInput(format!("cannot keep {m} sites of a {n_ring}-site ring")));
    }
    let nf = n_ring as f64;
    let mut symbols = Vec::with_capacity(n_ring);
    for q in 0..n_ring {
        let k = 2.0 * PI * (q as f64 + 0.5) / nf;
        let a = -model.h_field - k.cos();
        let b_im = -model.kappa * k.sin();
        let e = a.hypot(b_im);
        if e < 1e-12 {
            return Err(Error::Domain(format!("ring of {n_ring} sites has a zero mode at k={k}")));
        }
        symbols.push((k, a / e, b_im / e));
    }
    let kernel = |r: i64| {
        let mut pp = 0.0;
        let mut ph = 0.0;
        for &(k, a, b_im) in &symbols {
            let (s, c) = (k * r as f64).sin_cos();
            pp += c * a;
            // Re[e^{ikr} · i b_im]
            ph += -s * b_im;
        }
        (pp / nf, ph / nf)
    };
    NambuCorrelationMatrix::new(from_translation_kernel(m, kernel))
}
