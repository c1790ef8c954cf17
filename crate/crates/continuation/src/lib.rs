//! Continuation of integer-replica samples to `n = 1` by barycentric rational
//! interpolation with greedy (AAA) support selection.

mod aaa;

pub use aaa::Aaa;

use num_complex::Complex64;
use opens_core::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationProblem {
    /// `(n, value)` pairs with distinct `n`.
    pub samples: Vec<(f64, Complex64)>,
    pub target: f64,
    /// Cap on the rational degree; at most `max_degree + 1` support points are used.
    pub max_degree: usize,
    /// Relative stopping tolerance on the sample residual.
    pub tol: f64,
}

impl ContinuationProblem {
    pub fn new(samples: Vec<(f64, Complex64)>) -> Self {
        Self { samples, target: 1.0, max_degree: 4, tol: 1e-13 }
    }

    pub fn from_real(samples: &[(f64, f64)]) -> Self {
        Self::new(samples.iter().map(|&(n, v)| (n, Complex64::new(v, 0.0))).collect())
    }

    pub fn with_max_degree(mut self, max_degree: usize) -> Self {
        self.max_degree = max_degree;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "continuation needs at least 3 samples, got {}",
                self.samples.len()
            )));
        }
        if self.samples.iter().any(|(n, v)| !n.is_finite() || !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("continuation samples must be finite".into()));
        }
        let mut ns: Vec<f64> = self.samples.iter().map(|s| s.0).collect();
        ns.sort_by(f64::total_cmp);
        if ns.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("continuation sample positions must be distinct".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationResult {
    pub value: Complex64,
    /// Largest deviation of leave-one-out refits from `value`.
    pub error_estimate: f64,
    pub support: Vec<f64>,
    pub leave_one_out: Vec<Complex64>,
    pub max_residual: f64,
}

// Poles whose residue is this small relative to the spread of the data times the
// sampled range are treated as pole-zero doublets and removed by lowering the degree.
const DOUBLET_RESIDUE: f64 = 1e-4;

/// With `strict`, a genuine pole in range is an error; otherwise the degree is lowered
/// until the interpolant is pole-free (used for the leave-one-out diagnostics).
fn fit(p: &ContinuationProblem, samples: &[(f64, Complex64)], strict: bool) -> Result<(Aaa, Complex64)> {
    let z: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let f: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
    let mut spread = 0.0_f64;
    for a in &f {
        for b in &f {
            spread = spread.max((a - b).norm());
        }
    }
    let hi = z.iter().cloned().fold(p.target, f64::max);
    let lo = z.iter().cloned().fold(p.target, f64::min);
    let mut cap = p.max_degree + 1;
    let r = loop {
        let r = Aaa::fit(&z, &f, cap, p.tol)?;
        let poles = r.real_poles_in(lo, hi);
        if poles.is_empty() {
            break r;
        }
        let genuine = poles.iter().find(|(_, res)| res.norm() > DOUBLET_RESIDUE * spread * (hi - lo));
        if let (true, Some((pole, res))) = (strict, genuine) {
            return Err(Error::Continuation(format!(
                "interpolant has a pole at n={pole:.6} (residue {:.3e}) inside [{lo}, {hi}]; support {:?}",
                res.norm(),
                r.support()
            )));
        }
        let used = r.support().len();
        if used <= 1 {
            break r;
        }
        cap = used - 1;
    };
    let value = r.eval(p.target);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Continuation(format!("degenerate interpolant; support {:?}", r.support())));
    }
    Ok((r, value))
}

/// Evaluate the rational interpolant of the samples at `p.target`.
pub fn continue_to_one(p: &ContinuationProblem) -> Result<ContinuationResult> {
    p.validate()?;
    let (r, value) = fit(p, &p.samples, true)?;
    let max_residual = p
        .samples
        .iter()
        .map(|&(n, v)| (r.eval(n) - v).norm())
        .fold(0.0, f64::max);
    let mut leave_one_out = Vec::with_capacity(p.samples.len());
    if p.samples.len() > 3 {
        for i in 0..p.samples.len() {
            let mut rest = p.samples.clone();
            rest.remove(i);
            let (_, v) = fit(p, &rest, false)?;
            leave_one_out.push(v);
        }
    }
    let error_estimate = leave_one_out.iter().map(|v| (v - value).norm()).fold(0.0, f64::max);
    Ok(ContinuationResult { value, error_estimate, support: r.support().to_vec(), leave_one_out, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_samples(f: impl Fn(f64) -> f64) -> ContinuationProblem {
        let s: Vec<(f64, f64)> = (2..=8).map(|n| (n as f64, f(n as f64))).collect();
        ContinuationProblem::from_real(&s)
    }

    #[test]
    fn constant_recovered_with_zero_error() {
        let p = ContinuationProblem::from_real(&[(2.0, 0.7), (3.0, 0.7), (4.0, 0.7)]);
        let r = continue_to_one(&p).unwrap();
        assert_eq!(r.value.re, 0.7);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn linear_recovered() {
        let r = continue_to_one(&real_samples(|n| 0.3 - 1.7 * n)).unwrap();
        assert!((r.value.re - (0.3 - 1.7)).abs() < 1e-12);
    }

    #[test]
    fn known_rational_target() {
        let r = continue_to_one(&real_samples(|n| (n + 2.0) / (n * n + 1.0))).unwrap();
        assert!((r.value.re - 1.5).abs() < 1e-8, "{r:?}");
        assert!(r.error_estimate < 1e-6);
    }

    #[test]
    fn too_few_samples() {
        let p = ContinuationProblem::from_real(&[(2.0, 1.0), (3.0, 2.0)]);
        assert!(continue_to_one(&p).is_err());
    }

    #[test]
    fn pole_in_range_is_rejected() {
        // 1/(n - 1.5) has a pole between the target and the samples
        let r = continue_to_one(&real_samples(|n| 1.0 / (n - 1.5)));
        assert!(matches!(r, Err(Error::Continuation(_))), "{r:?}");
    }
}
