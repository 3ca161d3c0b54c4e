//! Successive approximation for the mild Hall-MHD system.
//!
//! `(u^1, b^1)` is the heat flow of the data; `(u^{m+1}, b^{m+1})` applies the
//! mild right-hand sides to `(u^m, b^m)` at every time slice. Each iterate is
//! measured in anisotropic Besov E-proxy norms on a fixed dyadic band, and the
//! triple norm `‖U‖_crit + ‖B‖_crit + ‖B‖_lip` of successive differences drives
//! convergence and the contraction ratios.

mod boxsize;
mod data;
mod sweep;
mod trace;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use boxsize::{box_size_study, BoxEntry, BoxStudy};
pub use data::{Family, InitialData};
pub use sweep::{amplitude_sweep, SweepEntry, SweepReport};
pub use trace::{continuity_profile, smallness_report, triple_norm, IterationTrace, NormBound, SmallnessReport, TraceRow, RHO_FLOOR};

use crate::error::{Error, Result};
use crate::heat::{heat_propagate, mild_step, TimeGrid};
use crate::spacetime::SpaceTimeField;
use crate::spectral::field::SOLENOIDAL_TOL;
use crate::spectral::{helmholtz_project, Grid, SpectralField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub n: usize,
    pub box_length: f64,
    pub t_final: f64,
    pub n_t: usize,
    pub quad_order: usize,
    pub ext_order: usize,
    pub max_iterations: usize,
    /// Convergence threshold on the triple norm of successive differences.
    pub tol: f64,
    /// Divergence when `u_crit + b_crit + b_lip` exceeds this multiple of its `m = 1` value.
    pub ceiling_factor: f64,
    /// Coefficient of the Hall term (1 for the standard system).
    pub hall: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            p: 2.0,
            q: 5.0,
            alpha: 3.0,
            n: 32,
            box_length: 2.0 * std::f64::consts::PI,
            t_final: 0.1,
            n_t: 32,
            quad_order: 16,
            ext_order: 2,
            max_iterations: 30,
            tol: 1e-9,
            ceiling_factor: 1e3,
            hall: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.p > 1.0 && self.p < 5.0) {
            return bad(format!("p must lie in (1, 5), got {}", self.p));
        }
        if !(self.alpha > 5.0 / self.p) {
            return bad(format!("alpha must exceed 5/p = {}, got {}", 5.0 / self.p, self.alpha));
        }
        if self.q.is_nan() || self.q < 1.0 {
            return bad(format!("q must lie in [1, inf], got {}", self.q));
        }
        if self.n_t < crate::besov::MIN_TIME_SAMPLES {
            return bad(format!("n_t must be at least {}, got {}", crate::besov::MIN_TIME_SAMPLES, self.n_t));
        }
        if !(self.tol > 0.0) || !(self.ceiling_factor > 1.0) || !self.hall.is_finite() {
            return bad("tol > 0, ceiling_factor > 1 and a finite hall coefficient are required".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive".into());
        }
        self.time_grid()?;
        self.grid()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.box_length)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.t_final, self.n_t, self.quad_order)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    Diverged,
    MaxIter,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::Diverged => "diverged",
            Verdict::MaxIter => "max-iter",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub verdict: Verdict,
    pub trace: IterationTrace,
    /// Last accepted iterate.
    pub u: SpaceTimeField,
    pub b: SpaceTimeField,
    /// Reason for a divergence verdict.
    pub note: Option<String>,
}

impl RunResult {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Heat flows of the data at every slice of `tg`.
pub fn first_iterate(data: &InitialData, tg: &TimeGrid) -> Result<(SpaceTimeField, SpaceTimeField)> {
    tg.validate()?;
    let flow = |f0: &SpectralField| {
        SpaceTimeField::from_fn(tg.t_final, tg.n_steps, |t| {
            let mut s = heat_propagate(f0, t)?;
            s.set_solenoidal_unchecked(true);
            Ok(s)
        })
    };
    Ok((flow(&data.u0)?, flow(&data.b0)?))
}

fn max_div(f: &SpaceTimeField) -> f64 {
    f.max_divergence_residual()
}

/// `(u^{m+1}, b^{m+1})` from `(u^m, b^m)`.
pub fn picard_step(
    u: &SpaceTimeField,
    b: &SpaceTimeField,
    data: &InitialData,
    tg: &TimeGrid,
    hall: f64,
) -> Result<(SpaceTimeField, SpaceTimeField)> {
    for (f, name) in [(u, "u"), (b, "b")] {
        let d = max_div(f);
        if d > SOLENOIDAL_TOL {
            return Err(Error::NotSolenoidal(d));
        }
        if f.n_t() != tg.n_steps {
            return Err(Error::InvalidParameter(format!("{name} has {} slices, time grid {}", f.n_t(), tg.n_steps)));
        }
    }
    let s = mild_step(u, b, &data.u0, &data.b0, tg.quad_order, hall)?;
    Ok((s.u, s.b))
}

pub fn run(cfg: &SolverConfig, data: &InitialData) -> Result<RunResult> {
    cfg.validate()?;
    let start = first_iterate(data, &cfg.time_grid()?)?;
    run_from(cfg, data, start)
}

/// Iterate from an arbitrary solenoidal starting pair.
pub fn run_from(cfg: &SolverConfig, data: &InitialData, start: (SpaceTimeField, SpaceTimeField)) -> Result<RunResult> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    grid.ensure_same(data.grid())?;
    let tg = cfg.time_grid()?;
    let (mut u, mut b) = start;
    let clock = Instant::now();
    let mut trace = IterationTrace::default();

    let (nu, band) = trace::field_norms(&u, cfg)?;
    let (nb, _) = trace::field_norms(&b, cfg)?;
    trace.j_min = band.0;
    trace.j_max = band.1;
    let first_size = nu.crit + nb.crit + nb.lip;
    trace.push(TraceRow {
        m: 1,
        u_crit: nu.crit,
        b_crit: nb.crit,
        b_lip: nb.lip,
        u_alpha: nu.alpha_u,
        b_alpha: nb.alpha_b,
        du_crit: nu.crit,
        db_crit: nb.crit,
        db_lip: nb.lip,
        triple: first_size,
        rho: None,
        max_divergence: max_div(&u).max(max_div(&b)),
        seconds: clock.elapsed().as_secs_f64(),
    });
    if first_size < cfg.tol {
        return Ok(RunResult { verdict: Verdict::Converged, trace, u, b, note: None });
    }
    let ceiling = cfg.ceiling_factor * first_size;

    for m in 2..=cfg.max_iterations {
        let (un, bn) = match picard_step(&u, &b, data, &tg, cfg.hall) {
            Ok(p) => p,
            Err(Error::NonFinite(w)) => {
                return Ok(RunResult { verdict: Verdict::Diverged, trace, u, b, note: Some(format!("non-finite {w}")) });
            }
            Err(e) => return Err(e),
        };
        let (nu, _) = trace::field_norms(&un, cfg)?;
        let (nb, _) = trace::field_norms(&bn, cfg)?;
        let (ndu, _) = trace::field_norms(&un.sub(&u)?, cfg)?;
        let (ndb, _) = trace::field_norms(&bn.sub(&b)?, cfg)?;
        let triple = ndu.crit + ndb.crit + ndb.lip;
        trace.push(TraceRow {
            m,
            u_crit: nu.crit,
            b_crit: nb.crit,
            b_lip: nb.lip,
            u_alpha: nu.alpha_u,
            b_alpha: nb.alpha_b,
            du_crit: ndu.crit,
            db_crit: ndb.crit,
            db_lip: ndb.lip,
            triple,
            rho: None,
            max_divergence: max_div(&un).max(max_div(&bn)),
            seconds: clock.elapsed().as_secs_f64(),
        });
        let size = nu.crit + nb.crit + nb.lip;
        if !size.is_finite() || !triple.is_finite() || size > ceiling {
            let note = format!("norm {size:e} exceeds ceiling {ceiling:e} at m = {m}");
            return Ok(RunResult { verdict: Verdict::Diverged, trace, u: un, b: bn, note: Some(note) });
        }
        u = un;
        b = bn;
        if triple < cfg.tol {
            return Ok(RunResult { verdict: Verdict::Converged, trace, u, b, note: None });
        }
    }
    Ok(RunResult { verdict: Verdict::MaxIter, trace, u, b, note: None })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub base_verdict: Verdict,
    pub perturbed_verdict: Verdict,
    pub delta_l2: f64,
    /// Triple norm of the difference of the two fixed points.
    pub gap: f64,
    pub threshold: f64,
    /// Final fields agree bit for bit.
    pub identical: bool,
    pub pass: bool,
}

/// Random solenoidal field with `|k|^2 ≤ 4` and the given `L^2` norm.
pub fn solenoidal_perturbation(grid: &Grid, l2: f64, seed: u64) -> Result<SpectralField> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let len = grid.len();
    let mut c = vec![num_complex::Complex64::new(0.0, 0.0); 3 * len];
    for idx in 0..len {
        let cj = grid.conj_index(idx);
        if grid.k2(idx) == 0 || grid.k2(idx) > 4 || !grid.is_kept(idx) || cj < idx {
            continue;
        }
        for comp in 0..3 {
            let z = num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            c[comp * len + idx] = z;
            c[comp * len + cj] = z.conj();
        }
    }
    let f = helmholtz_project(&SpectralField::from_coeffs(grid, 3, c)?)?;
    let n = f.l2_norm();
    Ok(if n > 0.0 { f.scale(l2 / n) } else { f })
}

/// Reruns from `(u^1 + δu, b^1 + δb)` and compares the fixed points.
pub fn uniqueness_probe(
    cfg: &SolverConfig,
    data: &InitialData,
    base: Option<&RunResult>,
    delta_u: &SpectralField,
    delta_b: &SpectralField,
) -> Result<UniquenessReport> {
    for d in [delta_u, delta_b] {
        let r = d.divergence_unscaled();
        if r > SOLENOIDAL_TOL {
            return Err(Error::NotSolenoidal(r));
        }
    }
    let owned;
    let base = match base {
        Some(b) => b,
        None => {
            owned = run(cfg, data)?;
            &owned
        }
    };
    let (u1, b1) = first_iterate(data, &cfg.time_grid()?)?;
    let shift = |f: SpaceTimeField, d: &SpectralField| -> Result<SpaceTimeField> {
        f.map(|s| {
            let mut o = s.add(d)?;
            o.set_solenoidal_unchecked(true);
            Ok(o)
        })
    };
    let pert = run_from(cfg, data, (shift(u1, delta_u)?, shift(b1, delta_b)?))?;
    if base.verdict != Verdict::Converged || pert.verdict != Verdict::Converged {
        return Err(Error::ToleranceNotReached { tol: cfg.tol, estimate: pert.trace.rows.last().map_or(f64::NAN, |r| r.triple) });
    }
    let identical = base.u.slices().iter().zip(pert.u.slices()).all(|(a, b)| a.coeffs() == b.coeffs())
        && base.b.slices().iter().zip(pert.b.slices()).all(|(a, b)| a.coeffs() == b.coeffs());
    let gap = triple_norm(&pert.u.sub(&base.u)?, &pert.b.sub(&base.b)?, cfg)?;
    let threshold = 10.0 * cfg.tol;
    Ok(UniquenessReport {
        base_verdict: base.verdict,
        perturbed_verdict: pert.verdict,
        delta_l2: (delta_u.l2_norm_sq() + delta_b.l2_norm_sq()).sqrt(),
        gap,
        threshold,
        identical,
        pass: gap <= threshold,
    })
}
