use nalgebra::DMatrix;
use num_complex::Complex64;
use opens_core::{Error, Result};

/// Barycentric rational interpolant `r(x) = Σ w_j f_j/(x−z_j) / Σ w_j/(x−z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Aaa {
    z: Vec<f64>,
    f: Vec<Complex64>,
    w: Vec<Complex64>,
}

impl Aaa {
    /// Greedy AAA fit with at most `max_support` support points.
    ///
    /// The support count is also capped at `(N+1)/2` so that the Loewner system is
    /// never underdetermined.
    pub fn fit(z: &[f64], f: &[Complex64], max_support: usize, tol: f64) -> Result<Self> {
        let n = z.len();
        if n == 0 || n != f.len() {
            return Err(Error::InvalidInput("AAA needs matching non-empty samples".into()));
        }
        let cap = max_support.min(n.div_ceil(2)).max(1);
        let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mean: Complex64 = f.iter().sum::<Complex64>() / n as f64;
        let mut approx = vec![mean; n];
        let mut support: Vec<usize> = Vec::new();
        let mut weights: Vec<Complex64> = Vec::new();
        for _ in 0..cap {
            let next = (0..n)
                .filter(|i| !support.contains(i))
                .max_by(|&i, &j| (f[i] - approx[i]).norm().total_cmp(&(f[j] - approx[j]).norm()))
                .expect("a free sample remains");
            support.push(next);
            let rest: Vec<usize> = (0..n).filter(|i| !support.contains(i)).collect();
            let m = support.len();
            let rows = rest.len().max(m);
            let mut loewner = DMatrix::<Complex64>::zeros(rows, m);
            for (r, &i) in rest.iter().enumerate() {
                for (c, &j) in support.iter().enumerate() {
                    loewner[(r, c)] = (f[i] - f[j]) / (z[i] - z[j]);
                }
            }
            weights = null_vector(loewner)?;
            let r = Self { z: support.iter().map(|&j| z[j]).collect(), f: support.iter().map(|&j| f[j]).collect(), w: weights.clone() };
            for i in 0..n {
                approx[i] = r.eval(z[i]);
            }
            let resid = (0..n).map(|i| (f[i] - approx[i]).norm()).fold(0.0, f64::max);
            if resid <= tol * scale {
                break;
            }
        }
        Ok(Self { z: support.iter().map(|&j| z[j]).collect(), f: support.iter().map(|&j| f[j]).collect(), w: weights })
    }

    pub fn support(&self) -> &[f64] {
        &self.z
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.w
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for ((&zj, &fj), &wj) in self.z.iter().zip(&self.f).zip(&self.w) {
            if x == zj {
                return fj;
            }
            let c = wj / (x - zj);
            num += c * fj;
            den += c;
        }
        num / den
    }

    /// Roots of the denominator polynomial `q(x) = Σ_j w_j Π_{k≠j} (x − z_k)`.
    pub fn poles(&self) -> Vec<Complex64> {
        let m = self.z.len();
        if m < 2 {
            return Vec::new();
        }
        // coefficients in increasing degree
        let mut q = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            let mut p = vec![Complex64::new(1.0, 0.0)];
            for k in (0..m).filter(|&k| k != j) {
                let mut next = vec![Complex64::new(0.0, 0.0); p.len() + 1];
                for (d, c) in p.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= c * self.z[k];
                }
                p = next;
            }
            for (d, c) in p.iter().enumerate() {
                q[d] += self.w[j] * c;
            }
        }
        let scale = q.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while q.len() > 1 && q[q.len() - 1].norm() <= 1e-13 * scale {
            q.pop();
        }
        let deg = q.len() - 1;
        if deg == 0 {
            return Vec::new();
        }
        let lead = q[deg];
        let companion = DMatrix::from_fn(deg, deg, |i, j| {
            if i == 0 {
                -q[deg - 1 - j] / lead
            } else if i == j + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        nalgebra::Schur::try_new(companion, 1e-15, 10_000)
            .and_then(|s| s.eigenvalues())
            .map(|ev| ev.iter().cloned().collect())
            .unwrap_or_default()
    }

    /// Residue of `r` at a simple pole `p`.
    pub fn residue(&self, p: Complex64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut dden = Complex64::new(0.0, 0.0);
        for ((&zj, &fj), &wj) in self.z.iter().zip(&self.f).zip(&self.w) {
            let c = wj / (p - zj);
            num += c * fj;
            dden -= c / (p - zj);
        }
        num / dden
    }

    /// Poles lying (numerically) on the real segment `[lo, hi]`, with their residues.
    pub fn real_poles_in(&self, lo: f64, hi: f64) -> Vec<(f64, Complex64)> {
        let span = (hi - lo).abs().max(1.0);
        self.poles()
            .into_iter()
            .filter(|p| p.im.abs() <= 1e-6 * span && p.re >= lo - 1e-9 * span && p.re <= hi + 1e-9 * span)
            .map(|p| (p.re, self.residue(p)))
            .collect()
    }
}

fn null_vector(a: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let m = a.ncols();
    if a.iter().all(|v| v.norm() == 0.0) {
        let mut w = vec![Complex64::new(0.0, 0.0); m];
        w[m - 1] = Complex64::new(1.0, 0.0);
        return Ok(w);
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Continuation("SVD failed in AAA step".into()))?;
    let idx = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .expect("non-empty singular values");
    Ok(vt.row(idx).iter().map(|v| v.conj()).collect())
}
