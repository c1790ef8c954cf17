//! Gaussian-operator algebra on Nambu correlation matrices, without matrix logarithms.
//!
//! A normalized Gaussian operator `ρ ∝ exp(−½ ψ† h ψ)` is stored through
//! `Γ = (1−e^{−h})/(1+e^{−h})`. Products and flux insertions only ever need
//! `1 ± Γ` and linear solves.

use std::f64::consts::PI;

use nalgebra::Schur;
use num_complex::Complex64;
use opens_core::{dense::log_det, DenseMatrix, Error, Result};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `N_γ = (1+Γ) + (1−Γ) D` with the diagonal phase `D`.
pub(crate) fn flux_denominator(g: &DenseMatrix, phases: &[Complex64]) -> DenseMatrix {
    let dim = g.nrows();
    DenseMatrix::from_fn(dim, dim, |i, j| {
        let id = if i == j { one() } else { Complex64::new(0.0, 0.0) };
        (id + g[(i, j)]) + (id - g[(i, j)]) * phases[j]
    })
}

/// `(log det(N_γ/2), Γ^γ)` with `Γ^γ = 2 N_γ⁻¹ (1+Γ) − 1`.
pub(crate) fn apply_flux(g: &DenseMatrix, phases: &[Complex64]) -> Result<(Complex64, DenseMatrix)> {
    let dim = g.nrows();
    let n = flux_denominator(g, phases);
    let ld = log_det(&n.scale(0.5))?;
    let id = DenseMatrix::identity(dim, dim);
    let rhs = (&id + g).scale(2.0);
    let sol = n
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular { what: "flux denominator".into(), condition: f64::INFINITY })?;
    Ok((ld, sol - id))
}

/// `(log det((1+Γ₁Γ₂)/2), Γ₁₂)` for the normalized product of two Gaussian operators,
/// `1+Γ₁₂ = (1+Γ₂)(1+Γ₁Γ₂)⁻¹(1+Γ₁)`.
pub(crate) fn gaussian_product(g1: &DenseMatrix, g2: &DenseMatrix) -> Result<(Complex64, DenseMatrix)> {
    let dim = g1.nrows();
    let id = DenseMatrix::identity(dim, dim);
    let x = &id + g1 * g2;
    let ld = log_det(&x.scale(0.5))?;
    let sol = x
        .lu()
        .solve(&(&id + g1))
        .ok_or_else(|| Error::Singular { what: "Gaussian product".into(), condition: f64::INFINITY })?;
    Ok((ld, (&id + g2) * sol - id))
}

/// Log-determinants for `Tr(ρ₁ ρ₂ ⋯ ρ_n)` of normalized Gaussians, one per product step.
pub(crate) fn product_trace_logs(gs: &[DenseMatrix]) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(gs.len().saturating_sub(1));
    let Some(first) = gs.first() else {
        return Ok(out);
    };
    let mut acc = first.clone();
    for (k, g) in gs.iter().enumerate().skip(1) {
        if k + 1 == gs.len() {
            let dim = acc.nrows();
            let x = DenseMatrix::identity(dim, dim) + &acc * g;
            out.push(log_det(&x.scale(0.5))?);
        } else {
            let (ld, next) = gaussian_product(&acc, g)?;
            out.push(ld);
            acc = next;
        }
    }
    Ok(out)
}

fn wrap(phase: f64) -> f64 {
    let mut p = phase % (2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    } else if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

const MAX_PHASE_STEP: f64 = PI / 4.0;
const MIN_STEP: f64 = 1e-7;

/// Continue a vector of log-determinants along `s ∈ [0, 1]` so that each imaginary
/// part varies continuously from its principal value at `s = 0`.
///
/// `f(s)` returns principal logs. Each step is predicted from the rate of the previous
/// one and only the deviation from the prediction is wrapped, so fast but smooth phase
/// windings are not aliased. Steps are halved until every deviation is below π/4; a
/// determinant that passes too close to zero is reported as a branch error.
pub fn track_log_dets<F>(mut f: F) -> Result<Vec<Complex64>>
where
    F: FnMut(f64) -> Result<Vec<Complex64>>,
{
    let mut prev = f(0.0)?;
    let mut cont = prev.clone();
    let mut rate = vec![Complex64::new(0.0, 0.0); prev.len()];
    let mut s = 0.0;
    let mut h: f64 = 1.0 / 32.0;
    let mut evals = 1usize;
    while s < 1.0 {
        let t = (s + h).min(1.0);
        let dt = t - s;
        let cur = f(t)?;
        evals += 1;
        if cur.len() != prev.len() {
            return Err(Error::InvalidInput("homotopy changed the number of determinants".into()));
        }
        let steps: Vec<Complex64> = cur
            .iter()
            .zip(&prev)
            .zip(&rate)
            .map(|((c, p), r)| {
                let pred = r.im * dt;
                Complex64::new(c.re - p.re, pred + wrap(c.im - p.im - pred))
            })
            .collect();
        let worst_phase = steps.iter().zip(&rate).fold(0.0_f64, |m, (d, r)| m.max((d.im - r.im * dt).abs()));
        let worst_mod = steps.iter().zip(&rate).fold(0.0_f64, |m, (d, r)| m.max((d.re - r.re * dt).abs()));
        if worst_phase > MAX_PHASE_STEP || worst_mod > 1.0 {
            h *= 0.5;
            if h < MIN_STEP {
                return Err(Error::Branch(format!(
                    "determinant phase jumps by {worst_phase:.3} at s={s:.3e}; a zero lies near the flux path"
                )));
            }
            continue;
        }
        for ((c, d), z) in cont.iter_mut().zip(&steps).zip(&cur) {
            *c = Complex64::new(z.re, c.im + d.im);
        }
        rate = steps.iter().map(|d| d / dt).collect();
        prev = cur;
        s = t;
        h = (h * 2.0).min(0.25);
    }
    log::trace!("phase tracking used {evals} evaluations");
    Ok(cont)
}

/// Swap matrix `τ` exchanging `c_j ↔ c†_j` in interleaved ordering.
fn swap_transpose(h: &DenseMatrix) -> DenseMatrix {
    let dim = h.nrows();
    DenseMatrix::from_fn(dim, dim, |i, j| h[(j ^ 1, i ^ 1)])
}

/// `Tr exp(½ ψ† H ψ)` over the Fock space of `m` modes, for any complex `2m×2m` matrix `H`
/// in interleaved Nambu ordering.
///
/// Only the part `H_s = (H − τHᵀτ)/2` acts as a quadratic form; the rest is the scalar
/// `e^{Tr H/4}`. For `H_s` the trace equals `√det(1+e^{H_s})`. Its eigenvalues come in pairs
/// `±λ` and the square root continued from `H = 0` is `∏ 2cosh(λ/2)` over one member of each
/// pair, which is entire in `H` and so fixes the branch without a numerical homotopy.
pub fn gaussian_trace(h: &DenseMatrix) -> Result<Complex64> {
    let dim = h.nrows();
    if dim == 0 || !h.is_square() || dim % 2 != 0 {
        return Err(Error::InvalidInput(format!("Nambu generator must be square with even size, got {dim}")));
    }
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite generator".into()));
    }
    let hs = (h - swap_transpose(h)).scale(0.5);
    let shift = h.trace() / 4.0;
    // the Schur iteration stalls on an exactly zero matrix, so work with a shifted copy
    let c = 1.0 + hs.norm();
    let shifted = hs + DenseMatrix::identity(dim, dim).scale(c);
    let schur = Schur::try_new(shifted, 1e-15, 10_000)
        .ok_or_else(|| Error::Branch("Schur decomposition did not converge".into()))?;
    let t = schur.unpack().1;
    let mut eig: Vec<Complex64> = (0..dim).map(|i| t[(i, i)] - c).collect();
    let scale = eig.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    let mut acc = shift.exp();
    while let Some(lam) = eig.pop() {
        let (k, dist) = eig
            .iter()
            .enumerate()
            .map(|(k, mu)| (k, (lam + mu).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
        if k == usize::MAX || dist > 1e-6 * scale {
            return Err(Error::Branch(format!("eigenvalue {lam} has no partner −λ (distance {dist:.2e})")));
        }
        eig.swap_remove(k);
        acc *= (lam / 2.0).cosh() * 2.0;
    }
    Ok(acc)
}
