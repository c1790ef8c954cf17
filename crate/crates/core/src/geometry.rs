use crate::error::{Error, Result};

/// Two-interval geometry: A = [0, L], B = [a, b], UV cutoff `eps`, replica count `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    l: f64,
    a: f64,
    b: f64,
    eps: f64,
    n: usize,
}

impl Geometry {
    pub fn new(l: f64, a: f64, b: f64, eps: f64, n: usize) -> Result<Self> {
        if ![l, a, b, eps].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("geometry parameters must be finite".into()));
        }
        if !(0.0 < l && l < a && a < b) {
            return Err(Error::InvalidInput(format!(
                "need 0 < L < a < b, got L={l}, a={a}, b={b}"
            )));
        }
        if eps <= 0.0 {
            return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("replica count must be >= 1".into()));
        }
        if (b - a) / (2.0 * eps) <= 1.0 {
            log::warn!("(b-a)/(2 eps) = {} <= 1: cutoff logs change sign", (b - a) / (2.0 * eps));
        }
        Ok(Self { l, a, b, eps, n })
    }

    /// Build from lengths: L, gap d = a - L, and ell2 = b - a.
    pub fn from_lengths(l: f64, d: f64, ell2: f64, eps: f64, n: usize) -> Result<Self> {
        Self::new(l, l + d, l + d + ell2, eps, n)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell2(&self) -> f64 {
        self.b - self.a
    }

    pub fn d(&self) -> f64 {
        self.a - self.l
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.l, self.a, self.b, self.eps, n)
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.l, self.a, self.b, eps, self.n)
    }

    pub fn with_l(&self, l: f64) -> Result<Self> {
        Self::new(l, self.a, self.b, self.eps, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_adjacent_and_unordered() {
        assert!(Geometry::new(1.0, 1.0, 2.0, 0.1, 2).is_err());
        assert!(Geometry::new(1.0, 3.0, 2.0, 0.1, 2).is_err());
        assert!(Geometry::new(0.0, 1.0, 2.0, 0.1, 2).is_err());
        assert!(Geometry::new(1.0, 2.0, 3.0, 0.0, 2).is_err());
        assert!(Geometry::new(1.0, 2.0, 3.0, 0.1, 0).is_err());
    }

    #[test]
    fn lengths_roundtrip() {
        let g = Geometry::from_lengths(10.0, 5.0, 100.0, 0.5, 3).unwrap();
        assert_eq!(g.a(), 15.0);
        assert_eq!(g.b(), 115.0);
        assert_eq!(g.d(), 5.0);
        assert_eq!(g.ell2(), 100.0);
    }
}
