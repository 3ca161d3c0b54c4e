//! Spectral kernels on the periodic torus.

pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod ops;

pub use field::{forward_transform, inverse_transform, reality_residual, PhysicalField, SpectralField};
pub use grid::Grid;
pub use ops::{curl, dealias, divergence, gradient, helmholtz_project, jacobian, laplacian, pointwise_product, ProductKind};
