//! Independent checks: a strong-form time stepper, brute-force oracles and the
//! weak-formulation residual.

mod brute;
mod compare;
mod imex;
mod weak;

pub use brute::{brute_duhamel, brute_product};
pub use compare::{cross_validate, observed_order, tol_model, CompareReport, QUAD_TOL, SOLVER_NOTE};
pub use imex::{imex_run, IMEX_FORM, imex_step, nonlinear_terms, ImexConfig, ImexRun, ImexState, Scheme};
pub use weak::{weak_residual, WeakResidual};
