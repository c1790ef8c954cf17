use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use opens_core::{DenseMatrix, Error, Result};
use rayon::prelude::*;

use crate::correlation::{finite_chain_correlations, CLIP, ground_state_correlations, NambuCorrelationMatrix};
use crate::gaussian::{apply_flux, product_trace_logs, track_log_dets};
use crate::model::{LatticeModel, SubsystemLayout};

/// How determinant data is turned into traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Particle block only; exact and branch-free, needs zero anomalous correlations.
    U1,
    /// Full Nambu matrices, square-root branches continued from zero flux.
    Nambu,
    /// Full Nambu matrices, real part of the logarithm only (no branch tracking).
    NambuRealPart,
}

impl Route {
    pub fn tag(&self) -> &'static str {
        match self {
            Route::U1 => "lattice-u1",
            Route::Nambu => "lattice-nambu",
            Route::NambuRealPart => "lattice-nambu-re",
        }
    }
}

const U1_TOL: f64 = 1e-12;
const MAX_GRID: usize = 200_000;
/// Fraction of the grid spacing by which the flux grid is shifted.
const FLUX_OFFSET: f64 = 0.318_309_886;

/// `(Γ^γ, log Tr(ρ e^{iγQ_B}))` for a Nambu matrix over the layout window.
#[derive(Debug, Clone)]
pub struct FluxData {
    pub gamma_flux: DenseMatrix,
    pub log_prefactor: Complex64,
}

/// Flux insertion `e^{iγQ_B}` on the window state:
/// `e^{−h^γ} = (1−Γ^γ)/(1+Γ^γ) = e^{−h} e^{iγσ^z_B}`, and the prefactor
/// `log Z^γ/Z = log Tr(ρ e^{iγQ_B})` with its branch continued from γ = 0.
pub fn flux_correlation_matrix(gamma: &NambuCorrelationMatrix, flux: f64, layout: &SubsystemLayout) -> Result<FluxData> {
    if gamma.sites() != layout.window() {
        return Err(Error::InvalidInput(format!(
            "correlation matrix has {} sites, layout window has {}",
            gamma.sites(),
            layout.window()
        )));
    }
    let mut mask = vec![false; layout.window()];
    for j in layout.b_sites() {
        mask[j] = true;
    }
    let g = gamma.matrix();
    let ph = nambu_phases(&mask, flux.into());
    let (_, gamma_flux) = apply_flux(g, &ph)?;
    let logs = track_log_dets(|s| Ok(vec![apply_flux(g, &nambu_phases(&mask, (s * flux).into()))?.0]))?;
    let log_prefactor = logs[0] * 0.5 + Complex64::new(0.0, flux * layout.ell2 as f64 / 2.0);
    Ok(FluxData { gamma_flux, log_prefactor })
}

fn nambu_phases(mask: &[bool], flux: Complex64) -> Vec<Complex64> {
    let (up, down) = ((Complex64::i() * flux).exp(), (-Complex64::i() * flux).exp());
    mask.iter().flat_map(|&b| if b { [up, down] } else { [Complex64::new(1.0, 0.0); 2] }).collect()
}

fn u1_phases(mask: &[bool], flux: Complex64) -> Vec<Complex64> {
    let up = (Complex64::i() * flux).exp();
    mask.iter().map(|&b| if b { up } else { Complex64::new(1.0, 0.0) }).collect()
}

fn restrict_leading(g: &DenseMatrix, k: usize) -> DenseMatrix {
    g.view((0, 0), (k, k)).into_owned()
}

/// Reduced Gaussian state `ρ_AB` of a layout together with the determinant routes
/// for charged moments, charge statistics and post-measurement overlaps.
#[derive(Debug, Clone)]
pub struct LatticeState {
    layout: SubsystemLayout,
    nambu: DenseMatrix,
    particle: Option<DenseMatrix>,
    route: Route,
}

impl LatticeState {
    /// From Γ over the layout window; the gap is traced out.
    pub fn new(window: &NambuCorrelationMatrix, layout: SubsystemLayout) -> Result<Self> {
        if window.sites() != layout.window() {
            return Err(Error::InvalidInput(format!(
                "correlation matrix has {} sites, layout window has {}",
                window.sites(),
                layout.window()
            )));
        }
        let ab = window.restrict(&layout.ab_sites())?;
        let u1 = ab.anomalous_norm() < U1_TOL;
        let particle = u1.then(|| ab.particle_block());
        let route = if u1 { Route::U1 } else { Route::Nambu };
        Ok(Self { layout, nambu: ab.matrix().clone(), particle, route })
    }

    /// Infinite-chain ground state of a preset.
    pub fn infinite(model: &LatticeModel, layout: SubsystemLayout) -> Result<Self> {
        Self::new(&ground_state_correlations(model, &layout)?, layout)
    }

    /// Ground state of an open chain of `n_sites`, window starting at `offset`.
    pub fn finite_chain(model: &LatticeModel, layout: SubsystemLayout, n_sites: usize, offset: usize) -> Result<Self> {
        if offset + layout.window() > n_sites {
            return Err(Error::InvalidInput(format!(
                "window of {} sites at offset {offset} exceeds a {n_sites}-site chain",
                layout.window()
            )));
        }
        let full = finite_chain_correlations(model, n_sites)?;
        let sites: Vec<usize> = (offset..offset + layout.window()).collect();
        Self::new(&full.restrict(&sites)?, layout)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// Select a route; `U1` is refused when the state has anomalous correlations.
    pub fn with_route(mut self, route: Route) -> Result<Self> {
        if route == Route::U1 && self.particle.is_none() {
            return Err(Error::InvalidInput("U(1) route needs a number-conserving state".into()));
        }
        self.route = route;
        Ok(self)
    }

    fn b_mask(&self) -> Vec<bool> {
        let l1 = self.layout.ell1;
        (0..l1 + self.layout.ell2).map(|j| j >= l1).collect()
    }

    /// Principal log-dets at complex fluxes: one per flux, then one per product step.
    fn raw_logs(&self, fluxes: &[Complex64], particle: bool) -> Result<Vec<Complex64>> {
        let mask = self.b_mask();
        let (g, per_site) = if particle { (self.particle.as_ref().unwrap(), 1) } else { (&self.nambu, 2) };
        let ka = per_site * self.layout.ell1;
        let mut logs = Vec::with_capacity(2 * fluxes.len());
        let mut restricted = Vec::with_capacity(fluxes.len());
        for &z in fluxes {
            if z == Complex64::new(0.0, 0.0) {
                logs.push(Complex64::new(0.0, 0.0));
                restricted.push(restrict_leading(g, ka));
                continue;
            }
            let ph = if particle { u1_phases(&mask, z) } else { nambu_phases(&mask, z) };
            let (ld, gf) = apply_flux(g, &ph)?;
            logs.push(ld);
            restricted.push(restrict_leading(&gf, ka));
        }
        logs.extend(product_trace_logs(&restricted)?);
        Ok(logs)
    }

    fn combine(&self, fluxes: &[Complex64], logs: &[Complex64], half: bool) -> Complex64 {
        let w = if half { 0.5 } else { 1.0 };
        let mut acc: Complex64 = logs.iter().map(|z| z * w).sum();
        if half {
            let total: Complex64 = fluxes.iter().sum();
            acc += Complex64::i() * total * (self.layout.ell2 as f64 / 2.0);
        }
        acc
    }

    /// `log Tr(ρ_A^n)` by the product route.
    pub fn log_trace_power(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidInput("Rényi index must be at least 1".into()));
        }
        let zeros = vec![Complex64::new(0.0, 0.0); n];
        let particle = self.route == Route::U1;
        let logs = self.raw_logs(&zeros, particle)?;
        Ok(self.combine(&zeros, &logs, !particle).re)
    }

    /// `log Tr_A[∏_j Tr_B(ρ_AB e^{iγ_j Q_B})]`, not normalized.
    pub fn log_charged_trace(&self, gammas: &[f64]) -> Result<Complex64> {
        let z: Vec<Complex64> = gammas.iter().map(|&g| g.into()).collect();
        self.log_trace_complex(&z)
    }

    /// Charged trace at complex fluxes `z = γ − iλ`. On the Nambu route the square-root
    /// branch is fixed at the pure tilt `−iλ` and then continued in `γ`: each
    /// `Tr_B(ρ e^{λQ_B})` is a positive operator, so two of them, or equal ones, have a
    /// positive trace.
    pub fn log_trace_complex(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.is_empty() {
            return Err(Error::InvalidInput("need at least one flux".into()));
        }
        match self.route {
            Route::U1 => Ok(self.combine(z, &self.raw_logs(z, true)?, false)),
            Route::NambuRealPart => {
                let logs = self.raw_logs(z, false)?;
                Ok(Complex64::new(logs.iter().map(|w| 0.5 * w.re).sum(), 0.0))
            }
            Route::Nambu => {
                let base: Vec<Complex64> = z.iter().map(|w| Complex64::new(0.0, w.im)).collect();
                let shift = if base.iter().all(|b| b.im == 0.0) {
                    0.0
                } else {
                    let start = self.combine(&base, &self.raw_logs(&base, false)?, true);
                    -PI * (start.im / PI).round()
                };
                let logs = track_log_dets(|s| {
                    let path: Vec<Complex64> = z.iter().zip(&base).map(|(w, b)| b + (w - b) * s).collect();
                    self.raw_logs(&path, false)
                })?;
                Ok(self.combine(z, &logs, true) + Complex64::new(0.0, shift))
            }
        }
    }

    /// `log Z_n(γ₁…γ_n)/Z_n`, the normalized charged moment.
    pub fn log_charged_moment(&self, gammas: &[f64]) -> Result<Complex64> {
        Ok(self.log_charged_trace(gammas)? - self.log_trace_power(gammas.len())?)
    }

    /// `Tr(ρ_AB e^{iγQ_B})`.
    pub fn flux_trace(&self, flux: f64) -> Result<Complex64> {
        Ok(self.log_charged_trace(&[flux])?.exp())
    }

    fn sector_count(&self) -> usize {
        self.layout.ell2 + 1
    }

    /// `θ + 2πk/(ℓ₂+1)` folded into `(−π, π]`. Inversion is exact for any offset `θ`
    /// because `Q_B` is integer; a generic `θ` avoids symmetry-enforced zeros such as
    /// `⟨(−1)^{Q_B}⟩ = 0`, where `Γ^γ` would not exist.
    fn fourier_fluxes(&self) -> Vec<f64> {
        let m = self.sector_count();
        let theta = FLUX_OFFSET * 2.0 * PI / m as f64;
        (0..m)
            .map(|k| {
                let g = theta + 2.0 * PI * k as f64 / m as f64;
                if g > PI {
                    g - 2.0 * PI
                } else {
                    g
                }
            })
            .collect()
    }

    fn exact_route(&self) -> Result<()> {
        if self.route == Route::NambuRealPart {
            return Err(Error::InvalidInput("charge-resolved data needs the full complex route".into()));
        }
        Ok(())
    }

    /// `(weight, log scale)` per sector from inverting `Tr(ρ e^{izQ_B})` at `z = θ_k − iλ`.
    fn tilted_inversion(&self, lambda: f64) -> Result<Vec<(Complex64, f64)>> {
        let m = self.sector_count();
        let fluxes = self.fourier_fluxes();
        let logs: Vec<Complex64> = fluxes
            .par_iter()
            .map(|&t| self.log_trace_complex(&[Complex64::new(t, -lambda)]))
            .collect::<Result<Vec<_>>>()?;
        let c = max_re(&logs);
        Ok((0..m)
            .map(|q| {
                let s: Complex64 =
                    fluxes.iter().zip(&logs).map(|(&t, l)| (l - c - Complex64::i() * (t * q as f64)).exp()).sum();
                (s / m as f64, c - lambda * q as f64)
            })
            .collect())
    }

    /// Sector probabilities over a sequence of tilts. The tilt `λ` reweights
    /// sector `q` by `e^{λq}`, so a rare sector is inverted where it carries a sizeable
    /// share of the weight rather than below the rounding floor of the common ones.
    fn charge_statistics(&self) -> Result<Vec<Tilted>> {
        self.exact_route()?;
        let m = self.sector_count();
        let mut best = vec![Tilted::new(SECTOR_FLOOR); m];
        let mut tried: Vec<f64> = Vec::new();
        let mut lambda = 0.0;
        for _ in 0..2 * m + 8 {
            tried.push(lambda);
            absorb_all(&mut best, self.tilted_inversion(lambda)?);
            let est: Vec<f64> = best.iter().map(Tilted::tilt_estimate).collect();
            let next = (0..m)
                .filter(|&q| !best[q].settled())
                .map(|q| tilt_towards(&est, q))
                .find(|l| l.abs() <= MAX_TILT && tried.iter().all(|t| (t - l).abs() > 1e-2));
            match next {
                Some(l) => lambda = l,
                None => break,
            }
        }
        let open = best.iter().filter(|t| !t.settled()).count();
        log::debug!("charge inversion used {} tilts, {open} sectors left unresolved", tried.len());
        Ok(best)
    }

    /// Charge probabilities `p_q = Tr(Π_q ρ)` for `q = 0…ℓ₂`, by exact discrete inversion.
    pub fn charge_probabilities(&self) -> Result<Vec<f64>> {
        Ok(self.charge_statistics()?.iter().map(|t| t.value).collect())
    }

    /// Two-replica inversion at tilts `(λ₁, λ₂)`, entries in row-major sector order.
    fn tilted_inversion_2d(&self, (l1, l2): (f64, f64)) -> Result<Vec<(Complex64, f64)>> {
        let m = self.sector_count();
        let fluxes = self.fourier_fluxes();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
        let logs: Vec<Complex64> = pairs
            .par_iter()
            .map(|&(i, j)| self.log_trace_complex(&[Complex64::new(fluxes[i], -l1), Complex64::new(fluxes[j], -l2)]))
            .collect::<Result<Vec<_>>>()?;
        let c = max_re(&logs);
        let grid = DMatrix::from_fn(m, m, |i, j| (logs[i * m + j] - c).exp());
        let four = DMatrix::from_fn(m, m, |q, k| Complex64::from_polar(1.0, -fluxes[k] * q as f64));
        let t = &four * grid * four.transpose();
        let norm = (m * m) as f64;
        Ok(pairs.iter().map(|&(q1, q2)| (t[(q1, q2)] / norm, c - l1 * q1 as f64 - l2 * q2 as f64)).collect())
    }

    /// Unnormalized overlaps `Tr(Tr_B(Π_{q₁}ρ) Tr_B(Π_{q₂}ρ))` for all sector pairs.
    /// Pairs left below the rounding floor are redone at the tilts of their two sectors.
    pub fn overlap_matrix_unnormalized(&self) -> Result<DMatrix<f64>> {
        let sectors = self.charge_statistics()?;
        let aims = sector_tilts(&sectors);
        let m = self.sector_count();
        let mut best: Vec<Tilted> =
            (0..m * m).map(|idx| Tilted::new(sectors[idx / m].value * sectors[idx % m].value)).collect();
        let mut tilts = vec![(0.0, 0.0)];
        let mut done = 0;
        while done < tilts.len() {
            let tilt = tilts[done];
            done += 1;
            absorb_all(&mut best, self.tilted_inversion_2d(tilt)?);
            if done == 1 {
                for (idx, entry) in best.iter().enumerate() {
                    let t = (aims[idx / m], aims[idx % m]);
                    let needed = sectors[idx / m].value >= SECTOR_FLOOR && sectors[idx % m].value >= SECTOR_FLOOR;
                    if needed && !entry.resolved() && !tilts.contains(&t) {
                        tilts.push(t);
                    }
                }
            }
        }
        Ok(DMatrix::from_fn(m, m, |i, j| best[i * m + j].value))
    }

    /// `R_{q₁q₂} = Tr(ρ_{A,q₁} ρ_{A,q₂})` for the normalized post-measurement states.
    pub fn post_measurement_overlap(&self, q1: usize, q2: usize) -> Result<f64> {
        let m = self.sector_count();
        if q1 >= m || q2 >= m {
            return Err(Error::InvalidInput(format!("charges must lie in 0..={}", m - 1)));
        }
        let p = self.charge_probabilities()?;
        let t = self.overlap_matrix_unnormalized()?;
        normalized_overlap(t[(q1, q2)], (q1, p[q1]), (q2, p[q2]))
    }

    /// `Tr ρ_{A,q}^n` for the normalized post-measurement state of sector `q`.
    pub fn resolved_moment(&self, q: usize, n: usize) -> Result<f64> {
        self.exact_route()?;
        let m = self.sector_count();
        if q >= m {
            return Err(Error::InvalidInput(format!("charge must lie in 0..={}", m - 1)));
        }
        let p = self.charge_probabilities()?;
        let moments = self.resolved_moments_all(n)?;
        sector_ratio(moments[q], p[q], n)
    }

    /// Unnormalized `Tr(Tr_B(Π_q ρ))^n` for every sector, each replica tilted alike.
    fn resolved_moments_all(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 {
            return Err(Error::InvalidInput("resolved moments need n ≥ 2".into()));
        }
        let m = self.sector_count();
        let size = m.checked_pow(n as u32).filter(|&s| s <= MAX_GRID).ok_or_else(|| {
            Error::SizeCap(format!("{m}^{n} flux tuples exceed the cap of {MAX_GRID}"))
        })?;
        let sectors = self.charge_statistics()?;
        let aims = sector_tilts(&sectors);
        let fluxes = self.fourier_fluxes();
        let tuples: Vec<Vec<usize>> = (0..size)
            .map(|mut idx| {
                (0..n)
                    .map(|_| {
                        let d = idx % m;
                        idx /= m;
                        d
                    })
                    .collect()
            })
            .collect();
        let invert = |lambda: f64| -> Result<Vec<(Complex64, f64)>> {
            let vals: Vec<(f64, Complex64)> = tuples
                .par_iter()
                .map(|t| {
                    let z: Vec<Complex64> = t.iter().map(|&k| Complex64::new(fluxes[k], -lambda)).collect();
                    self.log_trace_complex(&z).map(|l| (t.iter().map(|&k| fluxes[k]).sum::<f64>(), l))
                })
                .collect::<Result<Vec<_>>>()?;
            let c = vals.iter().map(|v| v.1.re).fold(f64::NEG_INFINITY, f64::max);
            Ok((0..m)
                .map(|q| {
                    let s: Complex64 =
                        vals.iter().map(|&(gsum, l)| (l - c - Complex64::i() * (gsum * q as f64)).exp()).sum();
                    (s / size as f64, c - (n * q) as f64 * lambda)
                })
                .collect())
        };
        let mut best: Vec<Tilted> = sectors.iter().map(|s| Tilted::new(s.value.max(0.0).powi(n as i32))).collect();
        let mut tilts = vec![0.0];
        let mut done = 0;
        while done < tilts.len() {
            let lambda = tilts[done];
            done += 1;
            absorb_all(&mut best, invert(lambda)?);
            if done == 1 {
                for ((entry, sector), &aim) in best.iter().zip(&sectors).zip(&aims) {
                    if sector.value >= SECTOR_FLOOR && !entry.resolved() && !tilts.contains(&aim) {
                        tilts.push(aim);
                    }
                }
            }
        }
        Ok(best.iter().map(|t| t.value).collect())
    }

    /// Average post-measurement Rényi entropy `Σ_q p_q S^{(n)}(ρ_{A,q})`.
    pub fn measurement_averaged_entropy(&self, n: usize) -> Result<ResolvedEntropies> {
        let p = self.charge_probabilities()?;
        let moments = self.resolved_moments_all(n)?;
        let mut sectors = Vec::with_capacity(p.len());
        let mut avg = 0.0;
        for (q, (&pq, &mq)) in p.iter().zip(&moments).enumerate() {
            if pq < SECTOR_FLOOR {
                sectors.push((q, pq, f64::NAN));
                continue;
            }
            let s = sector_ratio(mq, pq, n)?.ln() / (1.0 - n as f64);
            avg += pq * s;
            sectors.push((q, pq, s));
        }
        let s_a = self.log_trace_power(n)? / (1.0 - n as f64);
        Ok(ResolvedEntropies { n, average: avg, unresolved: s_a, sectors })
    }
}

/// Rounding error, relative to the entry or its reference, at which an entry is resolved.
const REL_TOL: f64 = 1e-10;
const MAX_TILT: f64 = 60.0;
/// Entries bounded below this are not chased with further tilts.
const NEGLIGIBLE: f64 = 1e-4 * SECTOR_FLOOR;

fn max_re(logs: &[Complex64]) -> f64 {
    logs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Best inverted value of one entry over the tilts tried.
#[derive(Debug, Clone, Copy)]
struct Tilted {
    value: f64,
    /// Rounding level of the tilted inversion relative to its largest generating-function
    /// value, read off the imaginary parts, which vanish in exact arithmetic.
    noise: f64,
    /// `log` of the factor from the inverted entry back to `value`.
    log_scale: f64,
    /// Magnitude the rounding error is measured against when the value is smaller.
    reference: f64,
}

impl Tilted {
    fn new(reference: f64) -> Self {
        Self { value: 0.0, noise: f64::INFINITY, log_scale: f64::INFINITY, reference }
    }

    /// Keeps the first resolved inversion, since stronger tilts are worse conditioned;
    /// until then keeps the one with the smaller absolute rounding error.
    fn absorb(&mut self, weight: f64, noise: f64, log_scale: f64) {
        if self.resolved() {
            return;
        }
        let value = if weight > 0.0 { (weight.ln() + log_scale).exp() } else { 0.0 };
        let candidate = Self { value, noise, log_scale, reference: self.reference };
        if candidate.resolved() || candidate.log_error() < self.log_error() {
            *self = candidate;
        }
    }

    fn log_error(&self) -> f64 {
        self.noise.ln() + self.log_scale
    }

    fn resolved(&self) -> bool {
        self.log_error() <= (REL_TOL * self.value.abs().max(self.reference)).ln()
    }

    /// Resolved, or bounded far below any probability that enters a ratio.
    fn settled(&self) -> bool {
        self.resolved() || self.log_estimate() < NEGLIGIBLE.ln()
    }

    /// Upper estimate of `log|value|`, never below the rounding error.
    fn log_estimate(&self) -> f64 {
        let floor = self.log_error();
        if self.value > 0.0 {
            self.value.ln().max(floor)
        } else {
            floor
        }
    }

    /// Log-estimate used to aim tilts; negligible entries count as empty, since their
    /// upper bounds would pull the tilt into badly conditioned territory.
    fn tilt_estimate(&self) -> f64 {
        let e = self.log_estimate();
        if e < NEGLIGIBLE.ln() {
            f64::NEG_INFINITY
        } else {
            e
        }
    }
}

/// Folds one inversion into the running estimates; its noise is the largest imaginary part.
fn absorb_all(best: &mut [Tilted], inversion: Vec<(Complex64, f64)>) {
    let noise = inversion.iter().map(|(s, _)| s.im.abs()).fold(f64::EPSILON, f64::max);
    for (entry, (s, ls)) in best.iter_mut().zip(inversion) {
        entry.absorb(s.re, noise, ls);
    }
}

/// Per sector, the whole-number tilt closest to centring the distribution on it.
fn sector_tilts(sectors: &[Tilted]) -> Vec<f64> {
    let est: Vec<f64> = sectors.iter().map(Tilted::tilt_estimate).collect();
    (0..sectors.len()).map(|q| tilt_towards(&est, q).clamp(-MAX_TILT, MAX_TILT).round()).collect()
}

/// Tilt whose reweighted distribution, from log-estimates `est`, has its mean at sector `q`
/// (half a step inside the edges of the support). Returns a value beyond `MAX_TILT` when out
/// of reach.
fn tilt_towards(est: &[f64], q: usize) -> f64 {
    let support: Vec<usize> = (0..est.len()).filter(|&j| est[j].is_finite()).collect();
    let (Some(&first), Some(&last)) = (support.first(), support.last()) else {
        return f64::INFINITY;
    };
    if last == first {
        return f64::INFINITY;
    }
    let target = (q as f64).clamp(first as f64 + 0.5, last as f64 - 0.5);
    let mean = |l: f64| {
        let top = est.iter().enumerate().map(|(j, e)| e + l * j as f64).fold(f64::NEG_INFINITY, f64::max);
        let (num, den) = est.iter().enumerate().fold((0.0, 0.0), |(a, b), (j, e)| {
            let w = (e + l * j as f64 - top).exp();
            (a + w * j as f64, b + w)
        });
        num / den
    };
    let (mut lo, mut hi) = (-MAX_TILT - 1.0, MAX_TILT + 1.0);
    if mean(lo) > target {
        return lo;
    }
    if mean(hi) < target {
        return hi;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sectors with smaller probability are skipped in averages.
pub const SECTOR_FLOOR: f64 = 1e-12;

/// Per-sector Rényi entropies and their probability-weighted average.
#[derive(Debug, Clone)]
pub struct ResolvedEntropies {
    pub n: usize,
    /// `Σ_q p_q S^{(n)}(ρ_{A,q})` over sectors above [`SECTOR_FLOOR`].
    pub average: f64,
    /// `S^{(n)}(ρ_A)` before measurement.
    pub unresolved: f64,
    /// `(q, p_q, S^{(n)}(q))`, NaN entropy for skipped sectors.
    pub sectors: Vec<(usize, f64, f64)>,
}

impl ResolvedEntropies {
    /// Entropy reduction `S^{(n)}(ρ_A) − Σ_q p_q S^{(n)}(q)`.
    pub fn reduction(&self) -> f64 {
        self.unresolved - self.average
    }
}

fn sector_ratio(moment: f64, p: f64, n: usize) -> Result<f64> {
    if p < SECTOR_FLOOR {
        return Err(Error::Domain(format!("charge sector has vanishing probability {p:.3e}")));
    }
    Ok(moment / p.powi(n as i32))
}

pub(crate) fn normalized_overlap(t: f64, (q1, p1): (usize, f64), (q2, p2): (usize, f64)) -> Result<f64> {
    if p1 < SECTOR_FLOOR || p2 < SECTOR_FLOOR {
        return Err(Error::Domain(format!(
            "charge sectors ({q1}, {q2}) have vanishing probability ({p1:.3e}, {p2:.3e})"
        )));
    }
    Ok(t / (p1 * p2))
}

/// Normalized charged moment of a preset's infinite-chain ground state.
pub fn charged_moments_lattice(model: &LatticeModel, layout: SubsystemLayout, gammas: &[f64]) -> Result<Complex64> {
    Ok(LatticeState::infinite(model, layout)?.log_charged_moment(gammas)?.exp())
}

/// `R_{q₁q₂}` for a preset's infinite-chain ground state.
pub fn post_measurement_overlap(model: &LatticeModel, layout: SubsystemLayout, q1: usize, q2: usize) -> Result<f64> {
    LatticeState::infinite(model, layout)?.post_measurement_overlap(q1, q2)
}

/// Single-particle entanglement Hamiltonian `h = log((1+Γ)/(1−Γ))`, spectrum clipped.
pub fn entanglement_hamiltonian(gamma: &NambuCorrelationMatrix) -> DenseMatrix {
    let eig = SymmetricEigen::new(gamma.matrix().clone());
    let d = eig.eigenvalues.map(|v| {
        let v = v.clamp(-1.0 + CLIP, 1.0 - CLIP);
        Complex64::new(((1.0 + v) / (1.0 - v)).ln(), 0.0)
    });
    &eig.eigenvectors * DenseMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// Rényi entropy of a Nambu correlation matrix from its spectrum; `n = 1` gives von Neumann.
pub fn renyi_entropy(gamma: &NambuCorrelationMatrix, n: f64) -> f64 {
    let half: f64 = gamma
        .spectrum()
        .iter()
        .map(|&v| {
            let (p, q) = ((1.0 + v) / 2.0, (1.0 - v) / 2.0);
            if (n - 1.0).abs() < 1e-14 {
                -xlogx(p) - xlogx(q)
            } else {
                (p.powf(n) + q.powf(n)).ln() / (1.0 - n)
            }
        })
        .sum();
    half / 2.0
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Convention for the Ising flux rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RescalingConvention {
    /// `γ → arctanh(tan(γ/2))`.
    Plain,
    /// `γ → arctanh(tan(γ/2))/π`.
    OverPi,
}

/// Effective flux for the Ising preset fed into the Gaussian formula with `h_s = 1`.
pub fn ising_gamma_rescaling(gamma: f64, convention: RescalingConvention) -> Result<f64> {
    let t = (gamma / 2.0).tan();
    if !t.is_finite() || t.abs() >= 1.0 - 1e-12 {
        return Err(Error::Domain(format!("|tan(γ/2)| = {:.4} must be below 1", t.abs())));
    }
    let r = t.atanh();
    Ok(match convention {
        RescalingConvention::Plain => r,
        RescalingConvention::OverPi => r / PI,
    })
}
