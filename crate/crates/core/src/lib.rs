//! Shared building blocks: geometry validation, symmetric circulant algebra,
//! dense complex linear algebra, adaptive quadrature and a few stable special
//! functions used by the CFT and lattice engines.

pub mod circulant;
pub mod dense;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod matfun;
pub mod quad;
pub mod special;

pub use circulant::{circulant_determinant, circulant_inverse_row_sum, SymmetricCirculant};
pub use dense::{log_det, quadratic_form_cn, quadratic_form_cn_real};
pub use error::{Error, Result};
pub use geometry::Geometry;
pub use num_complex::Complex64;

/// Complex square matrix used throughout the workspace.
pub type DenseMatrix = nalgebra::DMatrix<Complex64>;
