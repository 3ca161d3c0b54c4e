//! Integrating-factor time stepper for the strong form.
//!
//! Diffusion is exact per mode through `E = e^{-|ξ|^2 dt}`; the nonlinear
//! terms are explicit and written in advective/rotational form,
//!
//! `N_u = P[-(u·∇)u + (∇×b)×b]`, `N_b = ∇×(u×b) - h ∇×((∇×b)×b)`,
//!
//! which is independent code from the divergence-form forcing of the mild map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{curl, dealias, forward_transform, helmholtz_project, inverse_transform, jacobian, PhysicalField, SpectralField};

/// Form of the reference equations, recorded in output manifests.
pub const IMEX_FORM: &str =
    "integrating factor e^{-|xi|^2 dt}; N_u = P[-(u.grad)u + (curl b) x b], N_b = curl(u x b) - h curl((curl b) x b)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// First order: `û ← E(û + dt N)`.
    ImexEuler,
    /// Second-order Adams–Bashforth on the transformed variable, started by one Heun step.
    ImexCnab2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImexConfig {
    pub dt: f64,
    pub steps: usize,
    pub scheme: Scheme,
    pub hall: f64,
    pub diffusion: bool,
    pub nonlinear: bool,
    /// `dt · k_max^2 · |h| · max|b| ≤ c_stab`.
    pub c_stab: f64,
    /// `dt · max(|u|, |b|) ≤ c_cfl · Δx`.
    pub c_cfl: f64,
    /// Keep every `record_every`-th state (0 keeps only the final one).
    pub record_every: usize,
}

impl Default for ImexConfig {
    fn default() -> Self {
        ImexConfig {
            dt: 1e-3,
            steps: 100,
            scheme: Scheme::ImexCnab2,
            hall: 1.0,
            diffusion: true,
            nonlinear: true,
            c_stab: 0.5,
            c_cfl: 0.5,
            record_every: 0,
        }
    }
}

impl ImexConfig {
    /// Steps of size close to `dt` that land exactly on `t_final`.
    pub fn for_horizon(t_final: f64, dt: f64, scheme: Scheme) -> Result<Self> {
        if !(t_final > 0.0 && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("need t_final > 0 and dt > 0, got {t_final}, {dt}")));
        }
        let steps = (t_final / dt).round().max(1.0) as usize;
        Ok(ImexConfig { dt: t_final / steps as f64, steps, scheme, ..Default::default() })
    }

    pub fn t_final(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be positive".into()));
        }
        if !(self.c_stab > 0.0 && self.c_cfl > 0.0) || !self.hall.is_finite() {
            return Err(Error::InvalidParameter("c_stab, c_cfl must be positive and hall finite".into()));
        }
        Ok(())
    }
}

/// Explicit terms `(N_u, N_b)` plus `max|u|`, `max|b|` on the grid.
pub fn nonlinear_terms(u: &SpectralField, b: &SpectralField, hall: f64) -> Result<(SpectralField, SpectralField, f64, f64)> {
    u.grid().ensure_same(b.grid())?;
    let grid = u.grid().clone();
    let len = grid.len();
    let pu = inverse_transform(u)?;
    let pb = inverse_transform(b)?;
    let ju = inverse_transform(&jacobian(u)?)?;
    let cb = inverse_transform(&curl(b)?)?;
    let (uv, bv, jv, cv) = (pu.values(), pb.values(), ju.values(), cb.values());
    let mut fu = vec![0.0; 3 * len];
    let mut fb = vec![0.0; 3 * len];
    let (mut umax, mut bmax) = (0.0f64, 0.0f64);
    for x in 0..len {
        let uu = [uv[x], uv[len + x], uv[2 * len + x]];
        let bb = [bv[x], bv[len + x], bv[2 * len + x]];
        let j = [cv[x], cv[len + x], cv[2 * len + x]];
        umax = umax.max((uu[0] * uu[0] + uu[1] * uu[1] + uu[2] * uu[2]).sqrt());
        bmax = bmax.max((bb[0] * bb[0] + bb[1] * bb[1] + bb[2] * bb[2]).sqrt());
        let lor = cross(j, bb);
        let emf = cross(uu, bb);
        for c in 0..3 {
            let adv: f64 = (0..3).map(|d| uu[d] * jv[(3 * c + d) * len + x]).sum();
            fu[c * len + x] = lor[c] - adv;
            fb[c * len + x] = emf[c] - hall * lor[c];
        }
    }
    let nu = helmholtz_project(&dealias(&forward_transform(&PhysicalField::from_values(&grid, 3, fu)?)?))?;
    let nb = curl(&dealias(&forward_transform(&PhysicalField::from_values(&grid, 3, fb)?)?))?;
    Ok((nu, nb, umax, bmax))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Stepper state; `prev` holds `N` from the previous step for the two-step scheme.
#[derive(Clone, Debug)]
pub struct ImexState {
    pub u: SpectralField,
    pub b: SpectralField,
    pub t: f64,
    pub steps_taken: usize,
    prev: Option<(SpectralField, SpectralField)>,
    decay: Vec<f64>,
}

impl ImexState {
    pub fn new(u0: &SpectralField, b0: &SpectralField, cfg: &ImexConfig) -> Result<Self> {
        cfg.validate()?;
        u0.grid().ensure_same(b0.grid())?;
        for (f, name) in [(u0, "u0"), (b0, "b0")] {
            if f.ncomp() != 3 {
                return Err(Error::ComponentMismatch { expected: format!("3 components for {name}"), got: f.ncomp() });
            }
            let d = f.divergence_residual();
            if d > crate::spectral::field::SOLENOIDAL_TOL {
                return Err(Error::NotSolenoidal(d));
            }
        }
        let g = u0.grid();
        let decay = (0..g.len()).map(|i| if cfg.diffusion { (-g.xi2(i) * cfg.dt).exp() } else { 1.0 }).collect();
        Ok(ImexState { u: u0.clone(), b: b0.clone(), t: 0.0, steps_taken: 0, prev: None, decay })
    }

    pub fn energy(&self) -> f64 {
        self.u.l2_norm_sq() + self.b.l2_norm_sq()
    }
}

fn guard(cfg: &ImexConfig, grid: &crate::spectral::Grid, umax: f64, bmax: f64) -> Result<()> {
    let hall_speed = grid.max_kept_xi2() * cfg.hall.abs() * bmax;
    if hall_speed > 0.0 {
        let limit = cfg.c_stab / hall_speed;
        if cfg.dt > limit {
            return Err(Error::Stability { dt: cfg.dt, limit, reason: "Hall term".into() });
        }
    }
    let speed = umax.max(bmax);
    if speed > 0.0 {
        let limit = cfg.c_cfl * grid.spacing() / speed;
        if cfg.dt > limit {
            return Err(Error::Stability { dt: cfg.dt, limit, reason: "advective CFL".into() });
        }
    }
    Ok(())
}

/// `E^p (x + a y)`, mode by mode.
fn decay_combo(decay: &[f64], power: i32, x: &SpectralField, terms: &[(f64, &SpectralField)]) -> SpectralField {
    let len = decay.len();
    let mut out = x.clone();
    for (a, y) in terms {
        for (o, v) in out.coeffs_mut().iter_mut().zip(y.coeffs()) {
            *o += *v * *a;
        }
    }
    for (j, o) in out.coeffs_mut().iter_mut().enumerate() {
        *o *= decay[j % len].powi(power);
    }
    out
}

fn explicit(u: &SpectralField, b: &SpectralField, cfg: &ImexConfig) -> Result<(SpectralField, SpectralField)> {
    let grid = u.grid();
    if !cfg.nonlinear {
        return Ok((SpectralField::zeros(grid, 3)?, SpectralField::zeros(grid, 3)?));
    }
    let (nu, nb, umax, bmax) = nonlinear_terms(u, b, cfg.hall)?;
    guard(cfg, grid, umax, bmax)?;
    Ok((nu, nb))
}

/// Advance one step of size `cfg.dt`.
pub fn imex_step(state: &mut ImexState, cfg: &ImexConfig) -> Result<()> {
    let dt = cfg.dt;
    let (nu, nb) = explicit(&state.u, &state.b, cfg)?;
    let (u, b) = match (cfg.scheme, state.prev.take()) {
        (Scheme::ImexEuler, _) => {
            (decay_combo(&state.decay, 1, &state.u, &[(dt, &nu)]), decay_combo(&state.decay, 1, &state.b, &[(dt, &nb)]))
        }
        (Scheme::ImexCnab2, None) => {
            let ua = decay_combo(&state.decay, 1, &state.u, &[(dt, &nu)]);
            let ba = decay_combo(&state.decay, 1, &state.b, &[(dt, &nb)]);
            let (na, nba) = explicit(&ua, &ba, cfg)?;
            let u = decay_combo(&state.decay, 1, &state.u, &[(0.5 * dt, &nu)]);
            let b = decay_combo(&state.decay, 1, &state.b, &[(0.5 * dt, &nb)]);
            (decay_combo(&state.decay, 0, &u, &[(0.5 * dt, &na)]), decay_combo(&state.decay, 0, &b, &[(0.5 * dt, &nba)]))
        }
        (Scheme::ImexCnab2, Some((pu, pb))) => {
            // E û + dt (3/2 E N - 1/2 E^2 N_prev)
            let ou = decay_combo(&state.decay, 1, &pu, &[]);
            let ob = decay_combo(&state.decay, 1, &pb, &[]);
            let u = decay_combo(&state.decay, 1, &state.u, &[(1.5 * dt, &nu), (-0.5 * dt, &ou)]);
            let b = decay_combo(&state.decay, 1, &state.b, &[(1.5 * dt, &nb), (-0.5 * dt, &ob)]);
            (u, b)
        }
    };
    let mut u = u;
    let mut b = b;
    u.check_finite("IMEX velocity")?;
    b.check_finite("IMEX magnetic field")?;
    u.mark_solenoidal()?;
    b.mark_solenoidal()?;
    if cfg.scheme == Scheme::ImexCnab2 {
        state.prev = Some((nu, nb));
    }
    state.u = u;
    state.b = b;
    state.steps_taken += 1;
    state.t = state.steps_taken as f64 * dt;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct ImexRun {
    pub u: SpectralField,
    pub b: SpectralField,
    pub t: f64,
    /// `(t, u, b)` at recorded steps, including `t = 0` and the final state.
    pub samples: Vec<(f64, SpectralField, SpectralField)>,
    /// `‖u‖² + ‖b‖²` after every step, starting at `t = 0`.
    pub energy: Vec<f64>,
    pub max_divergence: f64,
}

pub fn imex_run(u0: &SpectralField, b0: &SpectralField, cfg: &ImexConfig) -> Result<ImexRun> {
    let mut st = ImexState::new(u0, b0, cfg)?;
    let mut samples = vec![(0.0, u0.clone(), b0.clone())];
    let mut energy = vec![st.energy()];
    let mut max_div = u0.divergence_residual().max(b0.divergence_residual());
    for k in 1..=cfg.steps {
        imex_step(&mut st, cfg)?;
        energy.push(st.energy());
        max_div = max_div.max(st.u.divergence_residual()).max(st.b.divergence_residual());
        if k == cfg.steps || (cfg.record_every > 0 && k % cfg.record_every == 0) {
            samples.push((st.t, st.u.clone(), st.b.clone()));
        }
    }
    Ok(ImexRun { u: st.u, b: st.b, t: st.t, samples, energy, max_divergence: max_div })
}
