//! Mild solutions of the incompressible Hall-MHD system on the periodic torus.
//!
//! The velocity `u` and magnetic field `b` solve
//!
//! ```text
//! u_t - Δu + (u·∇)u - (∇×b)×b + ∇p = 0
//! b_t - Δb + ∇×((∇×b)×b) - ∇×(u×b) = 0,    div u = div b = 0
//! ```
//!
//! in integral (Duhamel) form. The crate provides a pseudo-spectral kernel,
//! heat and Duhamel operators, Besov-type norm estimators, a Picard iteration
//! with contraction diagnostics, an independent time-stepping reference solver
//! and the `hallmild` command-line driver.

pub mod besov;
pub mod cli;
pub mod error;
pub mod heat;
pub mod picard;
pub mod quadrature;
pub mod reference;
pub mod reduce;
pub mod spacetime;
pub mod spectral;

pub use error::{Error, Result};
pub use spacetime::SpaceTimeField;
pub use spectral::{Grid, PhysicalField, SpectralField};
