//! Experiment configuration: a TOML file with one table per concern.
//!
//! ```toml
//! seed = 1
//! [grid]     n = 32, box_length = 6.283185307179586
//! [time]     t_final = 0.1, n_t = 32, quad_order = 16
//! [solver]   p, q, alpha, ext_order, max_iterations, tol, ceiling_factor, hall
//! [data]     family = "taylor-green", amplitude = 1e-3, u0 = "u0.hmf", b0 = "b0.hmf"
//! [imex]     dt, scheme, diffusion, nonlinear, c_stab, c_cfl, record_every
//! [besov]    s, p, q, flavor, ext_order
//! [battery]  n, box_length, t_final, n_t, samples, seed, ext_order, quad_order
//! [sweep]    amplitudes = [...], refine_rounds
//! [output]   dir, write_fields
//! ```
//!
//! Every table and key is optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::besov::{BatteryConfig, BesovSpec, Flavor};
use crate::error::{Error, Result};
use crate::picard::{Family, InitialData, SolverConfig};
use crate::reference::{ImexConfig, Scheme};
use crate::spectral::io::read_field;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub box_length: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let s = SolverConfig::default();
        GridSection { n: s.n, box_length: s.box_length }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub t_final: f64,
    pub n_t: usize,
    pub quad_order: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        let s = SolverConfig::default();
        TimeSection { t_final: s.t_final, n_t: s.n_t, quad_order: s.quad_order }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub ext_order: usize,
    pub max_iterations: usize,
    pub tol: f64,
    pub ceiling_factor: f64,
    pub hall: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverConfig::default();
        SolverSection {
            p: s.p,
            q: s.q,
            alpha: s.alpha,
            ext_order: s.ext_order,
            max_iterations: s.max_iterations,
            tol: s.tol,
            ceiling_factor: s.ceiling_factor,
            hall: s.hall,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub family: Family,
    pub amplitude: f64,
    /// Field files for `family = "custom"`, relative to the config file.
    pub u0: Option<PathBuf>,
    pub b0: Option<PathBuf>,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection { family: Family::TaylorGreen, amplitude: 1e-3, u0: None, b0: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImexSection {
    pub dt: f64,
    pub scheme: Scheme,
    pub diffusion: bool,
    pub nonlinear: bool,
    pub c_stab: f64,
    pub c_cfl: f64,
    pub record_every: usize,
}

impl Default for ImexSection {
    fn default() -> Self {
        let d = ImexConfig::default();
        ImexSection {
            dt: d.dt,
            scheme: d.scheme,
            diffusion: d.diffusion,
            nonlinear: d.nonlinear,
            c_stab: d.c_stab,
            c_cfl: d.c_cfl,
            record_every: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BesovSection {
    pub s: f64,
    #[serde(with = "crate::besov::spec::exponent")]
    pub p: f64,
    #[serde(with = "crate::besov::spec::exponent")]
    pub q: f64,
    pub flavor: Option<Flavor>,
    pub ext_order: usize,
}

impl Default for BesovSection {
    fn default() -> Self {
        BesovSection { s: 0.5, p: 2.0, q: 2.0, flavor: None, ext_order: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub amplitudes: Vec<f64>,
    pub refine_rounds: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { amplitudes: vec![1e-3, 1e-2, 1e-1, 1.0, 10.0], refine_rounds: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Persist converged fields as `.hmf` files.
    pub write_fields: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("hallmild-out"), write_fields: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub grid: GridSection,
    pub time: TimeSection,
    pub solver: SolverSection,
    pub data: DataSection,
    pub imex: ImexSection,
    pub besov: BesovSection,
    pub battery: BatteryConfig,
    pub sweep: SweepSection,
    pub output: OutputSection,
    /// Directory against which relative data paths resolve.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn solver(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            p: s.p,
            q: s.q,
            alpha: s.alpha,
            n: self.grid.n,
            box_length: self.grid.box_length,
            t_final: self.time.t_final,
            n_t: self.time.n_t,
            quad_order: self.time.quad_order,
            ext_order: s.ext_order,
            max_iterations: s.max_iterations,
            tol: s.tol,
            ceiling_factor: s.ceiling_factor,
            hall: s.hall,
        }
    }

    /// IMEX settings for the configured horizon.
    pub fn imex(&self) -> Result<ImexConfig> {
        let i = &self.imex;
        let base = ImexConfig::for_horizon(self.time.t_final, i.dt, i.scheme)?;
        Ok(ImexConfig {
            hall: self.solver.hall,
            diffusion: i.diffusion,
            nonlinear: i.nonlinear,
            c_stab: i.c_stab,
            c_cfl: i.c_cfl,
            record_every: i.record_every,
            ..base
        })
    }

    pub fn besov_spec(&self, flavor: Flavor) -> Result<BesovSpec> {
        let b = &self.besov;
        let spec = BesovSpec { s: b.s, p: b.p, q: b.q, flavor: b.flavor.unwrap_or(flavor) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        self.solver().validate().map_err(cfg_err)?;
        if !(self.data.amplitude.is_finite() && self.data.amplitude >= 0.0) {
            return Err(Error::Config(format!("data.amplitude must be finite and >= 0, got {}", self.data.amplitude)));
        }
        if self.data.family == Family::Custom && (self.data.u0.is_none() || self.data.b0.is_none()) {
            return Err(Error::Config("data.family = \"custom\" needs data.u0 and data.b0".into()));
        }
        if !(self.imex.dt > 0.0) {
            return Err(Error::Config(format!("imex.dt must be positive, got {}", self.imex.dt)));
        }
        if self.sweep.amplitudes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::Config("sweep.amplitudes must be finite and >= 0".into()));
        }
        let b = &self.besov;
        BesovSpec { s: b.s, p: b.p, q: b.q, flavor: b.flavor.unwrap_or(Flavor::IsotropicSpatial) }
            .validate()
            .map_err(cfg_err)?;
        Ok(())
    }

    /// Initial data at the configured amplitude.
    pub fn initial_data(&self) -> Result<InitialData> {
        self.initial_data_at(self.data.amplitude)
    }

    pub fn initial_data_at(&self, amplitude: f64) -> Result<InitialData> {
        let grid = self.solver().grid()?;
        match self.data.family {
            Family::Custom => {
                let load = |p: &Option<PathBuf>| -> Result<_> {
                    let p = p.as_ref().expect("validated");
                    read_field(&self.base_dir.join(p))
                };
                let (u0, b0) = (load(&self.data.u0)?, load(&self.data.b0)?);
                grid.ensure_same(u0.grid())?;
                InitialData::new(u0, b0, Family::Custom, amplitude)
            }
            fam => InitialData::generate(&grid, fam, amplitude, self.seed),
        }
    }
}
