use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular matrix in {what} (condition estimate {condition:.3e})")]
    Singular { what: String, condition: f64 },

    #[error("result is not real: imaginary residue {residue:.3e} (tolerance {tol:.1e})")]
    NotReal { residue: f64, tol: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("continuation failed: {0}")]
    Continuation(String),

    #[error("branch ambiguity: {0}")]
    Branch(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
