//! Periodic grid, fields and Fourier-multiplier operators.

pub mod field;
pub mod grid;
pub mod lp;
pub mod ops;

pub use field::{Field, QTensorField, ScalarField, SpectralField, VectorField};
pub use grid::Grid2D;
pub use lp::{hs_norm, lp_decompose, HsMethod, LPDecomposition, LittlewoodPaley, LpProfile};
pub use ops::{dealias, divergence, jn_filter, laplacian, leray_project, relative_divergence, spectral_derivative, JnFilter};
