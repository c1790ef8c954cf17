use opens_core::{Error, Result};

/// Parameters of `H = −½ Σ_j (c†_j c_{j+1} + κ c†_j c†_{j+1} + h.c. + 2h c†_j c_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeModel {
    pub kappa: f64,
    pub h_field: f64,
}

/// Which closed-form infinite-chain kernel a model has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    TightBinding,
    CriticalIsing,
}

impl LatticeModel {
    pub fn new(kappa: f64, h_field: f64) -> Result<Self> {
        if !kappa.is_finite() || !h_field.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite couplings κ={kappa}, h={h_field}")));
        }
        Ok(Self { kappa, h_field })
    }

    /// Half-filled hopping chain, κ = h = 0.
    pub fn tight_binding() -> Self {
        Self { kappa: 0.0, h_field: 0.0 }
    }

    /// Critical Majorana chain, κ = h = 1.
    pub fn critical_ising() -> Self {
        Self { kappa: 1.0, h_field: 1.0 }
    }

    pub fn preset(&self) -> Option<Preset> {
        if self.kappa == 0.0 && self.h_field == 0.0 {
            Some(Preset::TightBinding)
        } else if self.kappa == 1.0 && self.h_field == 1.0 {
            Some(Preset::CriticalIsing)
        } else {
            None
        }
    }

    /// True when the Hamiltonian conserves particle number.
    pub fn conserves_charge(&self) -> bool {
        self.kappa == 0.0
    }

    /// Parse `xx`/`tight-binding`, `ising`, or `kappa,h`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xx" | "tb" | "tight-binding" | "tight_binding" => Ok(Self::tight_binding()),
            "ising" | "majorana" | "critical-ising" => Ok(Self::critical_ising()),
            other => {
                let parts: Vec<&str> = other.split(',').collect();
                if parts.len() != 2 {
                    return Err(Error::InvalidInput(format!("unknown model '{s}'")));
                }
                let k = parts[0].trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("{s}: {e}")))?;
                let h = parts[1].trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("{s}: {e}")))?;
                Self::new(k, h)
            }
        }
    }
}

/// Sites `A = [0, ℓ₁)`, gap `[ℓ₁, ℓ₁+d)`, `B = [ℓ₁+d, ℓ₁+d+ℓ₂)` of a window of consecutive sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsystemLayout {
    pub ell1: usize,
    pub d: usize,
    pub ell2: usize,
}

impl SubsystemLayout {
    pub fn new(ell1: usize, d: usize, ell2: usize) -> Result<Self> {
        if ell1 == 0 {
            return Err(Error::InvalidInput("subsystem A must contain at least one site".into()));
        }
        Ok(Self { ell1, d, ell2 })
    }

    pub fn window(&self) -> usize {
        self.ell1 + self.d + self.ell2
    }

    pub fn a_sites(&self) -> std::ops::Range<usize> {
        0..self.ell1
    }

    pub fn b_sites(&self) -> std::ops::Range<usize> {
        self.ell1 + self.d..self.window()
    }

    pub fn gap_sites(&self) -> std::ops::Range<usize> {
        self.ell1..self.ell1 + self.d
    }

    /// A followed by B, the sites retained in `ρ_AB`.
    pub fn ab_sites(&self) -> Vec<usize> {
        self.a_sites().chain(self.b_sites()).collect()
    }
}
