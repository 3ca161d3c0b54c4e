//! Space-time fields: spectral slices on a uniform time grid over `[0, T]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{lagrange_weights, stencil_start};
use crate::spectral::{Grid, SpectralField};

/// Slices `f(t_i)` at `t_i = i T / (n_t - 1)`.
#[derive(Clone, Debug)]
pub struct SpaceTimeField {
    t_final: f64,
    slices: Vec<SpectralField>,
}

impl SpaceTimeField {
    pub fn new(t_final: f64, slices: Vec<SpectralField>) -> Result<Self> {
        if slices.len() < 2 {
            return Err(Error::InvalidParameter("space-time field needs at least 2 slices".into()));
        }
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidParameter(format!("t_final must be positive, got {t_final}")));
        }
        let g = slices[0].grid().clone();
        let nc = slices[0].ncomp();
        for s in &slices[1..] {
            g.ensure_same(s.grid())?;
            if s.ncomp() != nc {
                return Err(Error::ComponentMismatch { expected: nc.to_string(), got: s.ncomp() });
            }
        }
        Ok(SpaceTimeField { t_final, slices })
    }

    /// Sample `f(t_i)` at every time in parallel.
    pub fn from_fn<F>(t_final: f64, n_t: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<SpectralField> + Sync,
    {
        if n_t < 2 {
            return Err(Error::InvalidParameter("space-time field needs at least 2 slices".into()));
        }
        let dt = t_final / (n_t - 1) as f64;
        let slices = (0..n_t).into_par_iter().map(|i| f(i as f64 * dt)).collect::<Result<Vec<_>>>()?;
        Self::new(t_final, slices)
    }

    /// The same spatial field at every time.
    pub fn constant(f: &SpectralField, t_final: f64, n_t: usize) -> Result<Self> {
        Self::new(t_final, vec![f.clone(); n_t.max(2)])
    }

    pub fn zeros(grid: &Grid, ncomp: usize, t_final: f64, n_t: usize) -> Result<Self> {
        Self::constant(&SpectralField::zeros(grid, ncomp)?, t_final, n_t)
    }

    pub fn grid(&self) -> &Grid {
        self.slices[0].grid()
    }

    pub fn ncomp(&self) -> usize {
        self.slices[0].ncomp()
    }

    pub fn n_t(&self) -> usize {
        self.slices.len()
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn dt(&self) -> f64 {
        self.t_final / (self.n_t() - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.n_t() {
            self.t_final
        } else {
            i as f64 * self.dt()
        }
    }

    pub fn slices(&self) -> &[SpectralField] {
        &self.slices
    }

    pub fn slices_mut(&mut self) -> &mut [SpectralField] {
        &mut self.slices
    }

    pub fn slice(&self, i: usize) -> &SpectralField {
        &self.slices[i]
    }

    pub fn last(&self) -> &SpectralField {
        self.slices.last().expect("non-empty")
    }

    pub fn into_slices(self) -> Vec<SpectralField> {
        self.slices
    }

    fn check_same(&self, other: &SpaceTimeField) -> Result<()> {
        self.grid().ensure_same(other.grid())?;
        if self.n_t() != other.n_t() || self.t_final.to_bits() != other.t_final.to_bits() {
            return Err(Error::InvalidParameter(format!(
                "time grids differ: {} slices on [0,{}] vs {} on [0,{}]",
                self.n_t(),
                self.t_final,
                other.n_t(),
                other.t_final
            )));
        }
        Ok(())
    }

    pub fn axpy(&self, a: f64, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.check_same(other)?;
        let slices = self.slices.par_iter().zip(&other.slices).map(|(x, y)| x.axpy(a, y)).collect::<Result<Vec<_>>>()?;
        Ok(SpaceTimeField { t_final: self.t_final, slices })
    }

    pub fn sub(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.axpy(-1.0, other)
    }

    pub fn add(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.axpy(1.0, other)
    }

    pub fn scale(&self, a: f64) -> SpaceTimeField {
        SpaceTimeField { t_final: self.t_final, slices: self.slices.iter().map(|s| s.scale(a)).collect() }
    }

    pub fn map<F>(&self, f: F) -> Result<SpaceTimeField>
    where
        F: Fn(&SpectralField) -> Result<SpectralField> + Sync,
    {
        let slices = self.slices.par_iter().map(|s| f(s)).collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(self.t_final, slices)
    }

    pub fn max_abs(&self) -> f64 {
        self.slices.iter().map(|s| s.max_abs()).fold(0.0, f64::max)
    }

    pub fn max_divergence_residual(&self) -> f64 {
        self.slices.iter().map(|s| s.divergence_residual()).fold(0.0, f64::max)
    }

    /// Cubic Lagrange interpolation in time (lower order below 4 slices).
    pub fn interpolate(&self, t: f64) -> Result<SpectralField> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if t > self.t_final * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!("t = {t} beyond t_final = {}", self.t_final)));
        }
        let n_t = self.n_t();
        let dt = self.dt();
        let i = ((t / dt).floor() as usize).min(n_t - 2);
        let s = stencil_start(i, n_t);
        let m = n_t.min(4);
        let nodes: Vec<f64> = (s..s + m).map(|j| j as f64 * dt).collect();
        let w = lagrange_weights(&nodes, t);
        let mut out = self.slices[s].scale(w[0]);
        for (k, wk) in w.iter().enumerate().skip(1) {
            out.add_assign_scaled(*wk, &self.slices[s + k])?;
        }
        out.set_solenoidal_unchecked(self.slices[s..s + m].iter().all(|x| x.is_solenoidal()));
        Ok(out)
    }
}
