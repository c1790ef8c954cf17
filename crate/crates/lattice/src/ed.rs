//! Brute-force many-body backend for chains of at most 12 sites.
//!
//! Fermionic modes are ordered with A first, so that reduced density matrices of A
//! are ordinary partial traces over the remaining Jordan–Wigner positions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use opens_core::{matfun::expm, DenseMatrix, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{LatticeModel, SubsystemLayout};
use crate::moments::{normalized_overlap, SECTOR_FLOOR};

/// Largest chain handled by the oracle (Fock dimension 4096).
pub const MAX_SITES: usize = 12;
const DENSE_LIMIT: usize = 256;
const LANCZOS_SEED: u64 = 0x5eed;

/// Annihilate (`dagger = false`) or create a fermion at Jordan–Wigner position `pos`.
fn apply(state: usize, pos: usize, dagger: bool) -> Option<(usize, f64)> {
    let bit = 1usize << pos;
    let occupied = state & bit != 0;
    if occupied == dagger {
        return None;
    }
    let sign = if (state & (bit - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((state ^ bit, sign))
}

/// Apply a product of ladder operators, rightmost first.
fn apply_word(state: usize, word: &[(usize, bool)]) -> Option<(usize, f64)> {
    let mut s = state;
    let mut sign = 1.0;
    for &(pos, dagger) in word.iter().rev() {
        let (t, sg) = apply(s, pos, dagger)?;
        s = t;
        sign *= sg;
    }
    Some((s, sign))
}

/// Mode ordering used by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdOrdering {
    /// A, then B, then every other chain site in chain order.
    ABRest,
    /// A, then every other chain site in chain order, B included.
    AChain,
}

/// Diagonalization method for the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdSolver {
    Dense,
    Lanczos,
    /// Dense up to 256 states, Lanczos beyond.
    Auto,
}

type Sparse = Vec<Vec<(usize, f64)>>;

fn chain_hamiltonian(model: &LatticeModel, pos: &[usize]) -> Sparse {
    let n = pos.len();
    let dim = 1usize << n;
    let mut terms: Vec<(f64, Vec<(usize, bool)>)> = Vec::new();
    for j in 0..n {
        if model.h_field != 0.0 {
            terms.push((-model.h_field, vec![(pos[j], true), (pos[j], false)]));
        }
        if j + 1 < n {
            let (a, b) = (pos[j], pos[j + 1]);
            terms.push((-0.5, vec![(a, true), (b, false)]));
            terms.push((-0.5, vec![(b, true), (a, false)]));
            if model.kappa != 0.0 {
                terms.push((-0.5 * model.kappa, vec![(a, true), (b, true)]));
                terms.push((-0.5 * model.kappa, vec![(b, false), (a, false)]));
            }
        }
    }
    let mut rows: Sparse = vec![Vec::new(); dim];
    for s in 0..dim {
        for (c, w) in &terms {
            if let Some((t, sg)) = apply_word(s, w) {
                rows[t].push((s, c * sg));
            }
        }
    }
    rows
}

fn matvec(h: &Sparse, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(h.len(), h.iter().map(|row| row.iter().map(|&(j, v)| v * x[j]).sum()))
}

fn dense_ground_state(h: &Sparse) -> Result<(f64, DVector<f64>)> {
    let dim = h.len();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (i, row) in h.iter().enumerate() {
        for &(j, v) in row {
            m[(i, j)] += v;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    check_gap(eig.eigenvalues[idx[0]], idx.get(1).map(|&k| eig.eigenvalues[k]))?;
    Ok((eig.eigenvalues[idx[0]], eig.eigenvectors.column(idx[0]).into_owned()))
}

fn check_gap(e0: f64, e1: Option<f64>) -> Result<()> {
    if let Some(e1) = e1 {
        if e1 - e0 < 1e-8 {
            return Err(Error::Domain(format!("ground state is degenerate (gap {:.2e})", e1 - e0)));
        }
    }
    Ok(())
}

/// Lanczos with full reorthogonalization from a seeded random start. The Ritz residual
/// is driven to rounding level, since small-amplitude sectors of the reduced state
/// inherit the absolute error of the vector.
fn lanczos_ground_state(h: &Sparse) -> Result<(f64, DVector<f64>)> {
    let dim = h.len();
    let kmax = dim.min(400);
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut v = DVector::from_fn(dim, |_, _| rng.gen::<f64>() - 0.5);
    v /= v.norm();
    let mut basis: Vec<DVector<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for k in 0..kmax {
        let mut w = matvec(h, &basis[k]);
        let a = w.dot(&basis[k]);
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = w.dot(q);
                w.axpy(-c, q, 1.0);
            }
        }
        let b = w.norm();
        let last = k + 1 == kmax || b < 1e-13;
        if (k + 1) % 5 == 0 || last {
            let t = DMatrix::from_fn(k + 1, k + 1, |i, j| {
                if i == j {
                    alpha[i]
                } else if i == j + 1 {
                    beta[j]
                } else if j == i + 1 {
                    beta[i]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let mut idx: Vec<usize> = (0..=k).collect();
            idx.sort_by(|&x, &y| eig.eigenvalues[x].partial_cmp(&eig.eigenvalues[y]).unwrap());
            let y = eig.eigenvectors.column(idx[0]);
            let resid = b * y[k].abs();
            if resid < 1e-14 || last {
                let e0 = eig.eigenvalues[idx[0]];
                let mut psi = DVector::<f64>::zeros(dim);
                for (i, q) in basis.iter().enumerate() {
                    psi.axpy(y[i], q, 1.0);
                }
                psi /= psi.norm();
                let r = (matvec(h, &psi) - &psi * e0).norm();
                if r > 1e-9 {
                    return Err(Error::Domain(format!("Lanczos did not converge (residual {r:.2e})")));
                }
                check_gap(e0, idx.get(1).map(|&i| eig.eigenvalues[i]))?;
                return Ok((e0, psi));
            }
        }
        beta.push(b);
        basis.push(w / b);
    }
    unreachable!("Lanczos loop always returns on its last iteration")
}

/// Exact many-body ground state of an open chain with the reduced-state operations
/// needed to cross-check the determinant routes.
#[derive(Debug, Clone)]
pub struct EdOracle {
    layout: SubsystemLayout,
    energy: f64,
    /// Amplitudes `Ψ[a, r]`, `a` over A configurations, `r` over the rest.
    amplitudes: DMatrix<f64>,
    /// `Q_B` of each rest configuration.
    charges: Vec<usize>,
    /// `ΨᵀΨ` on the rest, used when the rest is the smaller side.
    gram: DMatrix<f64>,
}

impl EdOracle {
    pub fn from_chain(
        model: &LatticeModel,
        layout: SubsystemLayout,
        n_sites: usize,
        offset: usize,
        ordering: EdOrdering,
        solver: EdSolver,
    ) -> Result<Self> {
        if n_sites > MAX_SITES {
            return Err(Error::SizeCap(format!("{n_sites} sites exceed the oracle cap of {MAX_SITES}")));
        }
        if offset + layout.window() > n_sites {
            return Err(Error::InvalidInput(format!(
                "window of {} sites at offset {offset} exceeds a {n_sites}-site chain",
                layout.window()
            )));
        }
        let a_sites: Vec<usize> = layout.a_sites().map(|j| j + offset).collect();
        let b_sites: Vec<usize> = layout.b_sites().map(|j| j + offset).collect();
        let mut order = a_sites.clone();
        match ordering {
            EdOrdering::ABRest => {
                order.extend(&b_sites);
                order.extend((0..n_sites).filter(|s| !a_sites.contains(s) && !b_sites.contains(s)));
            }
            EdOrdering::AChain => order.extend((0..n_sites).filter(|s| !a_sites.contains(s))),
        }
        let mut pos = vec![0usize; n_sites];
        for (p, &site) in order.iter().enumerate() {
            pos[site] = p;
        }
        let h = chain_hamiltonian(model, &pos);
        let dim = h.len();
        let (energy, psi) = match solver {
            EdSolver::Dense => dense_ground_state(&h)?,
            EdSolver::Lanczos => lanczos_ground_state(&h)?,
            EdSolver::Auto if dim <= DENSE_LIMIT => dense_ground_state(&h)?,
            EdSolver::Auto => lanczos_ground_state(&h)?,
        };
        let la = layout.ell1;
        let (da, dr) = (1usize << la, 1usize << (n_sites - la));
        let amplitudes = DMatrix::from_fn(da, dr, |a, r| psi[a | (r << la)]);
        let b_mask: usize = b_sites.iter().map(|&s| 1usize << (pos[s] - la)).sum();
        let charges = (0..dr).map(|r| (r & b_mask).count_ones() as usize).collect();
        let gram = if da > dr { amplitudes.transpose() * &amplitudes } else { DMatrix::zeros(0, 0) };
        Ok(Self { layout, energy, amplitudes, charges, gram })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// `Tr(ρ e^{iγQ_B})`.
    pub fn flux_trace(&self, flux: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, &q) in self.charges.iter().enumerate() {
            let w: f64 = self.amplitudes.column(r).norm_squared();
            acc += Complex64::from_polar(w, flux * q as f64);
        }
        acc
    }

    /// `Tr_{Ā}(ρ w(Q_B))` for a weight per charge.
    fn reduced_with<F: Fn(usize) -> Complex64>(&self, weight: F) -> DenseMatrix {
        let mut scaled = self.amplitudes.map(|v| Complex64::new(v, 0.0));
        for (r, &q) in self.charges.iter().enumerate() {
            let w = weight(q);
            scaled.column_mut(r).iter_mut().for_each(|v| *v *= w);
        }
        scaled * self.amplitudes.transpose().map(|v| Complex64::new(v, 0.0))
    }

    /// `Tr Π_k Tr_{Ā}(ρ w_k(Q_B))`, evaluated on whichever side of the cut is smaller.
    fn weighted_product_trace<F: Fn(usize, usize) -> Complex64>(&self, copies: usize, weight: F) -> Complex64 {
        let (da, dr) = self.amplitudes.shape();
        if da <= dr {
            let ms: Vec<DenseMatrix> = (0..copies).map(|k| self.reduced_with(|q| weight(k, q))).collect();
            return Self::product_trace(&ms);
        }
        // Tr Π_k Ψ W_k Ψᵀ = Tr Π_k W_k G with G = ΨᵀΨ on the rest
        let ms: Vec<DenseMatrix> = (0..copies)
            .map(|k| {
                DenseMatrix::from_fn(dr, dr, |i, j| weight(k, self.charges[i]) * self.gram[(i, j)])
            })
            .collect();
        Self::product_trace(&ms)
    }

    /// `Tr_B(ρ e^{iγQ_B})` on A.
    pub fn flux_reduced(&self, flux: f64) -> DenseMatrix {
        self.reduced_with(|q| Complex64::from_polar(1.0, flux * q as f64))
    }

    /// `ρ_A`.
    pub fn reduced(&self) -> DenseMatrix {
        self.reduced_with(|_| Complex64::new(1.0, 0.0))
    }

    /// `Tr_B(Π_q ρ)` on A, unnormalized.
    pub fn projected_reduced(&self, q: usize) -> DenseMatrix {
        self.reduced_with(|c| if c == q { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    fn product_trace(ms: &[DenseMatrix]) -> Complex64 {
        let mut acc = ms[0].clone();
        for m in &ms[1..] {
            acc = acc * m;
        }
        acc.trace()
    }

    fn indicator(q: usize, c: usize) -> Complex64 {
        Complex64::new(if c == q { 1.0 } else { 0.0 }, 0.0)
    }

    /// Normalized charged moment `Z_n(γ…)/Z_n`.
    pub fn charged_moment(&self, gammas: &[f64]) -> Complex64 {
        let num = self.weighted_product_trace(gammas.len(), |k, q| Complex64::from_polar(1.0, gammas[k] * q as f64));
        let denom = self.weighted_product_trace(gammas.len(), |_, _| Complex64::new(1.0, 0.0));
        num / denom
    }

    /// `p_q` for `q = 0…ℓ₂`.
    pub fn charge_probabilities(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.layout.ell2 + 1];
        for (r, &q) in self.charges.iter().enumerate() {
            p[q] += self.amplitudes.column(r).norm_squared();
        }
        p
    }

    /// Unnormalized `Tr(Tr_B(Π_{q₁}ρ) Tr_B(Π_{q₂}ρ))`.
    pub fn overlap_unnormalized(&self, q1: usize, q2: usize) -> f64 {
        self.weighted_product_trace(2, |k, c| Self::indicator([q1, q2][k], c)).re
    }

    /// `R_{q₁q₂}` of the normalized post-measurement states.
    pub fn post_measurement_overlap(&self, q1: usize, q2: usize) -> Result<f64> {
        let m = self.layout.ell2 + 1;
        if q1 >= m || q2 >= m {
            return Err(Error::InvalidInput(format!("charges must lie in 0..={}", m - 1)));
        }
        let p = self.charge_probabilities();
        normalized_overlap(self.overlap_unnormalized(q1, q2), (q1, p[q1]), (q2, p[q2]))
    }

    /// `Tr ρ_{A,q}^n` for the normalized post-measurement state.
    pub fn resolved_moment(&self, q: usize, n: usize) -> Result<f64> {
        let p = self.charge_probabilities();
        let pq = *p.get(q).ok_or_else(|| Error::InvalidInput(format!("charge {q} out of range")))?;
        if pq < SECTOR_FLOOR {
            return Err(Error::Domain(format!("charge sector has vanishing probability {pq:.3e}")));
        }
        Ok(self.weighted_product_trace(n, |_, c| Self::indicator(q, c)).re / pq.powi(n as i32))
    }

    /// `Σ_q p_q S^{(n)}(ρ_{A,q})` summed explicitly over sectors.
    pub fn measurement_averaged_entropy(&self, n: usize) -> Result<f64> {
        let p = self.charge_probabilities();
        let mut acc = 0.0;
        for (q, &pq) in p.iter().enumerate() {
            if pq < SECTOR_FLOOR {
                continue;
            }
            acc += pq * self.resolved_moment(q, n)?.ln() / (1.0 - n as f64);
        }
        Ok(acc)
    }

    /// `log Tr ρ_A^n`.
    pub fn log_trace_power(&self, n: usize) -> f64 {
        self.weighted_product_trace(n, |_, _| Complex64::new(1.0, 0.0)).re.ln()
    }
}

/// Quantities the oracle can be asked for.
#[derive(Debug, Clone, PartialEq)]
pub enum EdRequest {
    FluxTrace(f64),
    ChargedMoment(Vec<f64>),
    ChargeProbabilities,
    Overlap(usize, usize),
    ResolvedMoment { q: usize, n: usize },
    AveragedEntropy(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdValue {
    Complex(Complex64),
    Real(f64),
    Vector(Vec<f64>),
}

/// Build the ground state of a `total_sites` open chain with the window centred,
/// and evaluate the request.
pub fn ed_oracle(model: &LatticeModel, total_sites: usize, layout: SubsystemLayout, request: &EdRequest) -> Result<EdValue> {
    if layout.window() > total_sites {
        return Err(Error::InvalidInput("layout window exceeds the chain".into()));
    }
    let offset = (total_sites - layout.window()) / 2;
    let ed = EdOracle::from_chain(model, layout, total_sites, offset, EdOrdering::ABRest, EdSolver::Auto)?;
    Ok(match request {
        EdRequest::FluxTrace(g) => EdValue::Complex(ed.flux_trace(*g)),
        EdRequest::ChargedMoment(gs) => EdValue::Complex(ed.charged_moment(gs)),
        EdRequest::ChargeProbabilities => EdValue::Vector(ed.charge_probabilities()),
        EdRequest::Overlap(a, b) => EdValue::Real(ed.post_measurement_overlap(*a, *b)?),
        EdRequest::ResolvedMoment { q, n } => EdValue::Real(ed.resolved_moment(*q, *n)?),
        EdRequest::AveragedEntropy(n) => EdValue::Real(ed.measurement_averaged_entropy(*n)?),
    })
}

/// `Tr exp(½ ψ† H ψ)` by exponentiating the many-body operator, `m ≤ 8` modes.
pub fn ed_gaussian_trace(h: &DenseMatrix) -> Result<Complex64> {
    let dim2 = h.nrows();
    let m = dim2 / 2;
    if m > 8 || dim2 % 2 != 0 || !h.is_square() {
        return Err(Error::SizeCap(format!("Fock trace limited to 8 modes, got {dim2}×{}", h.ncols())));
    }
    let dim = 1usize << m;
    // ψ†_{2j} = c†_j, ψ†_{2j+1} = c_j.
    let ladder = |idx: usize, adjoint: bool| -> (usize, bool) { (idx / 2, (idx % 2 == 0) == adjoint) };
    let mut op = DenseMatrix::zeros(dim, dim);
    for i in 0..dim2 {
        for j in 0..dim2 {
            let c = h[(i, j)] * 0.5;
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let word = [ladder(i, true), ladder(j, false)];
            for s in 0..dim {
                if let Some((t, sg)) = apply_word(s, &word) {
                    op[(t, s)] += c * sg;
                }
            }
        }
    }
    Ok(expm(&op).trace())
}
