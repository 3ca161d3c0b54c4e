//! Heat semigroup, Duhamel integrals and the mild-formulation right-hand sides.

pub mod duhamel;
pub mod mild;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::ops::{cross_c, diff_xi, map_modes, project_mode};
use crate::spectral::SpectralField;

pub use duhamel::{duhamel, duhamel_trajectory, DuhamelWeights};
pub use mild::{
    hall_operator_t, mild_rhs_b, mild_rhs_u, mild_step, nonlinear_forcing, recover_pressure, Forcing, MildStep,
};

type C = Complex64;
const I: C = C { re: 0.0, im: 1.0 };

/// Output times `t_i = i T / (n_steps - 1)` and the Gauss order per subinterval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_final: f64,
    pub n_steps: usize,
    pub quad_order: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, n_steps: usize, quad_order: usize) -> Result<Self> {
        let g = TimeGrid { t_final, n_steps, quad_order };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidParameter(format!("t_final must be positive, got {}", self.t_final)));
        }
        if self.n_steps < 2 {
            return Err(Error::InvalidParameter(format!("n_steps must be >= 2, got {}", self.n_steps)));
        }
        if self.quad_order < 4 {
            return Err(Error::InvalidParameter(format!("quad_order must be >= 4, got {}", self.quad_order)));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_final / (self.n_steps - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.n_steps {
            self.t_final
        } else {
            i as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_steps).map(|i| self.time(i)).collect()
    }
}

/// `e^{tΔ} f`, exact per mode.
pub fn heat_propagate(f: &SpectralField, t: f64) -> Result<SpectralField> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("time".into()));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let g = f.grid().clone();
    let mut out = map_modes(f, f.ncomp(), |idx, a, out| {
        let e = (-g.xi2(idx) * t).exp();
        for (o, v) in out.iter_mut().zip(a) {
            *o = v * e;
        }
    });
    out.set_solenoidal_unchecked(f.is_solenoidal());
    Ok(out)
}

/// Spatial multiplier applied inside a Duhamel integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DuhamelKind {
    /// Vector forcing, identity multiplier.
    Plain,
    /// Scalar `s ↦ ∇s` (`iξ ŝ`) or tensor `S ↦ ∇·S` (`i Σ_k ξ_k Ŝ_{k·}`).
    Grad,
    /// As `Grad`, followed by the Leray projection.
    GradProj,
    /// Tensor `S ↦ -∇×∇·S`, multiplier `ξ × (ξ·Ŝ)`; the Hall pattern.
    Hess,
    /// Vector `F ↦ ∇×F`, multiplier `iξ × F̂`.
    Curl,
}

impl DuhamelKind {
    pub fn accepts(self, ncomp: usize) -> bool {
        match self {
            DuhamelKind::Plain | DuhamelKind::Curl => ncomp == 3,
            DuhamelKind::Grad | DuhamelKind::GradProj => ncomp == 1 || ncomp == 9,
            DuhamelKind::Hess => ncomp == 9,
        }
    }

    pub fn solenoidal_output(self) -> bool {
        matches!(self, DuhamelKind::GradProj | DuhamelKind::Hess | DuhamelKind::Curl)
    }

    /// Multiplier for one mode; `a` has the forcing's components, `out` has 3.
    pub(crate) fn apply_mode(self, xi: Option<[f64; 3]>, a: &[C], out: &mut [C]) {
        if self == DuhamelKind::Plain {
            out[..3].copy_from_slice(&a[..3]);
            return;
        }
        let Some(xi) = xi else {
            out[..3].fill(C::new(0.0, 0.0));
            return;
        };
        match self {
            DuhamelKind::Plain => unreachable!(),
            DuhamelKind::Grad | DuhamelKind::GradProj => {
                let mut v = [C::new(0.0, 0.0); 3];
                if a.len() == 1 {
                    for d in 0..3 {
                        v[d] = I * xi[d] * a[0];
                    }
                } else {
                    for i in 0..3 {
                        v[i] = I * (xi[0] * a[i] + xi[1] * a[3 + i] + xi[2] * a[6 + i]);
                    }
                }
                if self == DuhamelKind::GradProj {
                    project_mode(xi, &v, out);
                } else {
                    out[..3].copy_from_slice(&v);
                }
            }
            DuhamelKind::Hess => {
                let mut v = [C::new(0.0, 0.0); 3];
                for i in 0..3 {
                    v[i] = xi[0] * a[i] + xi[1] * a[3 + i] + xi[2] * a[6 + i];
                }
                out[..3].copy_from_slice(&cross_c(xi, &v));
            }
            DuhamelKind::Curl => {
                let c = cross_c(xi, a);
                for d in 0..3 {
                    out[d] = I * c[d];
                }
            }
        }
    }
}

/// Apply a kind's spatial multiplier to a whole field.
pub fn apply_kind(kind: DuhamelKind, f: &SpectralField) -> Result<SpectralField> {
    if !kind.accepts(f.ncomp()) {
        return Err(Error::ComponentMismatch { expected: format!("forcing shape for {kind:?}"), got: f.ncomp() });
    }
    let g = f.grid().clone();
    let mut out = map_modes(f, 3, |idx, a, out| kind.apply_mode(diff_xi(&g, idx), a, out));
    out.set_solenoidal_unchecked(kind.solenoidal_output() || (kind == DuhamelKind::Plain && f.is_solenoidal()));
    Ok(out)
}
