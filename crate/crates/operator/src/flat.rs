use opens_core::quad::{integrate, QuadOptions};
use opens_core::{Error, Result};

use crate::OperatorSpec;

/// Regularized flat-space double integral over an interval, split into the
/// ε-dependent piece and the universal piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatIntegral {
    pub divergent: f64,
    pub universal: f64,
    pub total: f64,
}

fn check(length: f64, eps: f64) -> Result<()> {
    if !(length > 0.0 && eps > 0.0) {
        return Err(Error::InvalidInput(format!("length and ε must be positive, got {length}, {eps}")));
    }
    Ok(())
}

/// Closed small-ε forms of `∫∫ dz₁dz₂ (|z₁−z₂|²+ε²)^{−h}` for scalars and of
/// `∫∫ dz₁dz₂ −1/((z₁−z₂+iε)²|z₁−z₂|^{2h})` for vectors, over a square of side `length`.
///
/// The vector kernel is regularized in the holomorphic factor only. Its universal entry is
/// the analytically continued `−2ℓ^{−2h}/(2h(1+2h))` and `total` is the integral at finite ε;
/// the commonly quoted `ℓ^{2h}/(2h(1+2h))` is available as [`vector_universal_printed`].
/// At `h = 0` the vector integral is `log((ℓ²+ε²)/ε²)`, reported as divergent.
pub fn flat_interval_integral(spec: &OperatorSpec, length: f64, eps: f64) -> Result<FlatIntegral> {
    check(length, eps)?;
    spec.validate()?;
    let l = length;
    match *spec {
        OperatorSpec::Scalar { h } if (h - 0.5).abs() < 1e-12 => {
            let divergent = 2.0 * l * (l / eps).ln();
            Ok(FlatIntegral { divergent, universal: -2.0 * l, total: divergent - 2.0 * l })
        }
        OperatorSpec::Scalar { h } if (h - 1.0).abs() < 1e-12 => {
            let divergent = std::f64::consts::PI * l / eps - 2.0 * (l / eps).ln();
            Ok(FlatIntegral { divergent, universal: -2.0, total: divergent - 2.0 })
        }
        OperatorSpec::Scalar { h } => {
            let divergent = l * eps.powf(1.0 - 2.0 * h) / (2.0 * h - 1.0);
            let universal = l.powf(2.0 - 2.0 * h) / (1.0 - 3.0 * h + 2.0 * h * h);
            Ok(FlatIntegral { divergent, universal, total: divergent + universal })
        }
        OperatorSpec::Vector { h } if h == 0.0 => {
            let total = flat_interval_exact(spec, l, eps)?;
            Ok(FlatIntegral { divergent: total, universal: 0.0, total })
        }
        OperatorSpec::Vector { h } => {
            let total = flat_interval_exact(spec, l, eps)?;
            let universal = vector_universal_continued(h, l);
            Ok(FlatIntegral { divergent: total - universal, universal, total })
        }
        OperatorSpec::BosonCharge { .. } => {
            Err(Error::InvalidInput("the boson charge has no flat-integral split; use the closed-form route".into()))
        }
    }
}

/// Universal term of the vector integral from analytic continuation in `h`:
/// `−2ℓ^{−2h}/(2h(1+2h))`.
pub fn vector_universal_continued(h: f64, length: f64) -> f64 {
    -2.0 * length.powf(-2.0 * h) / (2.0 * h * (1.0 + 2.0 * h))
}

/// `ℓ^{2h}/(2h(1+2h))`, the vector universal term in its quoted form.
pub fn vector_universal_printed(h: f64, length: f64) -> f64 {
    length.powf(2.0 * h) / (2.0 * h * (1.0 + 2.0 * h))
}

fn breakpoints(length: f64, eps: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut x = eps;
    while x < length {
        pts.push(x);
        x *= 4.0;
    }
    pts.push(length);
    pts
}

/// The regularized flat integral at finite ε, without the small-ε expansion.
pub fn flat_interval_exact(spec: &OperatorSpec, length: f64, eps: f64) -> Result<f64> {
    check(length, eps)?;
    let (l, e2) = (length, eps * eps);
    let opts = QuadOptions::new(1e-14 * l * l, 1e-13);
    match *spec {
        OperatorSpec::Scalar { h } if (h - 1.0).abs() < 1e-15 => {
            Ok(2.0 * l * (l / eps).atan() / eps - ((l * l + e2) / e2).ln())
        }
        OperatorSpec::Scalar { h } if (h - 0.5).abs() < 1e-15 => {
            Ok(2.0 * l * (l / eps).asinh() - 2.0 * ((l * l + e2).sqrt() - eps))
        }
        OperatorSpec::Scalar { h } => {
            let r = integrate(|u| 2.0 * (l - u) * (u * u + e2).powf(-h), &breakpoints(l, eps), &opts)?;
            Ok(r.value)
        }
        OperatorSpec::Vector { h } if h == 0.0 => Ok(((l * l + e2) / e2).ln()),
        OperatorSpec::Vector { h } => {
            // u = t^p with p(1−2h) = 1 absorbs the u^{−2h} endpoint singularity into the Jacobian
            let p = 1.0 / (1.0 - 2.0 * h);
            let pts: Vec<f64> = breakpoints(l, eps).iter().map(|u| u.powf(1.0 / p)).collect();
            let r = integrate(
                |t| {
                    let u = t.powf(p);
                    let u2 = u * u;
                    2.0 * p * (l - u) * (e2 - u2) / (u2 + e2).powi(2)
                },
                &pts,
                &opts,
            )?;
            Ok(r.value)
        }
        OperatorSpec::BosonCharge { .. } => {
            Err(Error::InvalidInput("the boson charge has no flat-integral split; use the closed-form route".into()))
        }
    }
}
