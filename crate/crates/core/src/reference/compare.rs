use serde::{Deserialize, Serialize};

use crate::besov::spatial_block_norms;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Quadrature tolerance charged to the mild side of a comparison.
pub const QUAD_TOL: f64 = 1e-8;

pub const SOLVER_NOTE: &str =
    "no exact nontrivial Hall-MHD solution is available; this is a solver-vs-solver comparison";

/// `max(5 dt^2, 10 · quad_tol)`.
pub fn tol_model(dt: f64, quad_tol: f64) -> f64 {
    (5.0 * dt * dt).max(10.0 * quad_tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub t: f64,
    pub dt: f64,
    /// `‖u_m - u_i‖ / ‖u_m‖` (0 when both vanish).
    pub rel_l2_u: f64,
    pub rel_l2_b: f64,
    /// Relative gap of the pair `(u, b)`.
    pub rel_l2: f64,
    /// Spatial `B^{3/p}_{p,1}` norm of the magnetic difference.
    pub besov_gap_b: f64,
    pub besov_p: f64,
    pub tol_model: f64,
    pub pass: bool,
    pub note: String,
}

fn rel(diff: f64, base: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if base == 0.0 {
        f64::INFINITY
    } else {
        diff / base
    }
}

/// Compares mild and IMEX states at the same time `t`.
pub fn cross_validate(
    mild: (&SpectralField, &SpectralField),
    imex: (&SpectralField, &SpectralField),
    t: f64,
    dt: f64,
    p: f64,
) -> Result<CompareReport> {
    for f in [mild.1, imex.0, imex.1] {
        mild.0.grid().ensure_same(f.grid())?;
    }
    if !(dt > 0.0) || t < 0.0 {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t >= 0, got dt = {dt}, t = {t}")));
    }
    let du = mild.0.sub(imex.0)?;
    let db = mild.1.sub(imex.1)?;
    let (nu, nb) = (mild.0.l2_norm_sq(), mild.1.l2_norm_sq());
    let (eu, eb) = (du.l2_norm_sq(), db.l2_norm_sq());
    let tol = tol_model(dt, QUAD_TOL);
    let rel_l2 = rel((eu + eb).sqrt(), (nu + nb).sqrt());
    let besov_gap_b = if db.max_abs() == 0.0 { 0.0 } else { spatial_block_norms(&db, p)?.total(3.0 / p, 1.0)? };
    Ok(CompareReport {
        t,
        dt,
        rel_l2_u: rel(eu.sqrt(), nu.sqrt()),
        rel_l2_b: rel(eb.sqrt(), nb.sqrt()),
        rel_l2,
        besov_gap_b,
        besov_p: p,
        tol_model: tol,
        pass: rel_l2 <= tol,
        note: SOLVER_NOTE.into(),
    })
}

/// `log2(gap_coarse / gap_fine)` for a halving of the step.
pub fn observed_order(gap_coarse: f64, gap_fine: f64) -> f64 {
    (gap_coarse / gap_fine).log2()
}
