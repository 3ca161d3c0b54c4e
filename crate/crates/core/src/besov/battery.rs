//! Empirical check of the product, embedding and lifting inequalities.
//!
//! Every inequality is `LHS ≤ c · RHS` with an unknown constant. The corpus is
//! split in half; `c` is the largest ratio on the calibration half and the
//! held-out half passes when its largest ratio stays below `1.05 c`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lorentz::lorentz_norm;
use super::norms::{anisotropic_block_norms, spatial_block_norms};
use super::timeline::spacetime_lp;
use crate::error::{Error, Result};
use crate::heat::{duhamel_trajectory, heat_propagate, DuhamelKind};
use crate::spacetime::SpaceTimeField;
use crate::spectral::{gradient, inverse_transform, pointwise_product, Grid, ProductKind, SpectralField};

pub const MARGIN: f64 = 1.05;
pub const MIN_CORPUS: usize = 100;
/// Below this an RHS counts as zero.
pub const ZERO_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `‖fg‖_{B^1_{2,2}} ≲ ‖f‖_{B^1_{4,2}}‖g‖_{L^4} + ‖f‖_{L^4}‖g‖_{B^1_{4,2}}`
    ProductHolder,
    /// `‖f‖_{L^{4,2}} ≲ ‖f‖_{B^{5/4}_{2,2}}`
    LorentzEmbedding,
    /// `‖f‖_{L^∞} ≲ ‖f‖_{B^{5/2}_{2,1}}`
    LinfEmbedding,
    /// `‖fg‖_{B^1_{2,2}} ≲ ‖f‖_{B^{5/2}_{2,1}}‖g‖_{B^1_{2,2}} + ‖g‖_{B^{5/2}_{2,1}}‖f‖_{B^1_{2,2}}`
    CompositeProduct,
    /// `‖∂_1 f‖_{B^1_{2,2}} ≲ ‖f‖_{B^2_{2,2}}`
    DerivativeLifting,
    /// `‖e^{tΔ} f_0‖_{B^{3/2}_{2,2}} ≲ ‖f_0‖_{B^{1/2}_{2,2}(T^3)}`
    HeatSemigroup,
    /// `‖∫ ∇e^{(t-s)Δ} g ds‖_{B^{3/2}_{2,2}} ≲ ‖g‖_{B^{1/2}_{2,2}}`
    DuhamelGradient,
}

impl Inequality {
    pub const ALL: [Inequality; 7] = [
        Inequality::ProductHolder,
        Inequality::LorentzEmbedding,
        Inequality::LinfEmbedding,
        Inequality::CompositeProduct,
        Inequality::DerivativeLifting,
        Inequality::HeatSemigroup,
        Inequality::DuhamelGradient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::ProductHolder => "product_holder",
            Inequality::LorentzEmbedding => "lorentz_embedding",
            Inequality::LinfEmbedding => "linf_embedding",
            Inequality::CompositeProduct => "composite_product",
            Inequality::DerivativeLifting => "derivative_lifting",
            Inequality::HeatSemigroup => "heat_semigroup",
            Inequality::DuhamelGradient => "duhamel_gradient",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatteryConfig {
    pub n: usize,
    pub box_length: f64,
    pub t_final: f64,
    pub n_t: usize,
    pub samples: usize,
    pub seed: u64,
    pub ext_order: usize,
    pub quad_order: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            n: 16,
            box_length: 2.0 * std::f64::consts::PI,
            t_final: 0.25,
            n_t: 16,
            samples: 100,
            seed: 7,
            ext_order: 2,
            quad_order: 8,
        }
    }
}

/// One corpus entry: heat flows `f = e^{tΔ} f0`, `g = e^{tΔ} g0` of random band-limited data.
#[derive(Clone, Debug)]
pub struct BatterySample {
    pub f0: SpectralField,
    pub f: SpaceTimeField,
    pub g: SpaceTimeField,
    pub stratum: usize,
}

/// `|k|^2` bands cycled through the strata.
const BANDS: [(u32, u32); 8] = [(1, 2), (1, 4), (2, 6), (3, 9), (4, 12), (6, 16), (9, 24), (1, 24)];

/// Random real scalar field with modes `lo ≤ |k|^2 ≤ hi`, scaled to `max |f| = amplitude`.
pub fn random_band_field(grid: &Grid, lo: u32, hi: u32, amplitude: f64, rng: &mut impl Rng) -> Result<SpectralField> {
    let len = grid.len();
    let mut coeffs = vec![num_complex::Complex64::new(0.0, 0.0); len];
    for idx in 0..len {
        let k2 = grid.k2(idx);
        let cj = grid.conj_index(idx);
        if k2 < lo || k2 > hi || !grid.is_kept(idx) || cj < idx {
            continue;
        }
        let z = num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        coeffs[idx] = z;
        coeffs[cj] = z.conj();
        if cj == idx {
            coeffs[idx] = num_complex::Complex64::new(z.re, 0.0);
        }
    }
    let f = SpectralField::from_coeffs(grid, 1, coeffs)?;
    let m = inverse_transform(&f)?.max_abs();
    if m == 0.0 {
        return Ok(f);
    }
    Ok(f.scale(amplitude / m))
}

fn heat_flow(f0: &SpectralField, t_final: f64, n_t: usize) -> Result<SpaceTimeField> {
    SpaceTimeField::from_fn(t_final, n_t, |t| heat_propagate(f0, t))
}

/// Corpus where samples `i` and `i + samples/2` share band and amplitude.
pub fn battery_corpus(cfg: &BatteryConfig) -> Result<Vec<BatterySample>> {
    if cfg.samples < 2 || cfg.samples % 2 != 0 {
        return Err(Error::InvalidParameter(format!("battery needs an even number of samples, got {}", cfg.samples)));
    }
    let grid = Grid::new(cfg.n, cfg.box_length)?;
    let half = cfg.samples / 2;
    (0..cfg.samples)
        .map(|i| {
            let stratum = i % half;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1_000_003).wrapping_add(i as u64));
            let (lo, hi) = BANDS[stratum % BANDS.len()];
            let (glo, ghi) = BANDS[(stratum / BANDS.len() + stratum) % BANDS.len()];
            let amp = 10f64.powf(-2.0 + 4.0 * (stratum as f64 + 0.5) / half as f64);
            let f0 = random_band_field(&grid, lo, hi, amp, &mut rng)?;
            let g0 = random_band_field(&grid, glo, ghi, 1.0, &mut rng)?;
            Ok(BatterySample {
                f: heat_flow(&f0, cfg.t_final, cfg.n_t)?,
                g: heat_flow(&g0, cfg.t_final, cfg.n_t)?,
                f0,
                stratum,
            })
        })
        .collect()
}

fn product(f: &SpaceTimeField, g: &SpaceTimeField) -> Result<SpaceTimeField> {
    let slices = f
        .slices()
        .iter()
        .zip(g.slices())
        .map(|(a, b)| pointwise_product(a, b, ProductKind::Tensor))
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(f.t_final(), slices)
}

fn aniso(f: &SpaceTimeField, s: f64, p: f64, q: f64, ext: usize) -> Result<f64> {
    anisotropic_block_norms(f, p, ext)?.total(s, q)
}

/// `(LHS, RHS)` of one inequality on one sample.
pub fn evaluate(ineq: Inequality, x: &BatterySample, cfg: &BatteryConfig) -> Result<(f64, f64)> {
    let k = cfg.ext_order;
    let (f, g) = (&x.f, &x.g);
    Ok(match ineq {
        Inequality::ProductHolder => {
            let lhs = aniso(&product(f, g)?, 1.0, 2.0, 2.0, k)?;
            let rhs = aniso(f, 1.0, 4.0, 2.0, k)? * spacetime_lp(g, 4.0)?
                + spacetime_lp(f, 4.0)? * aniso(g, 1.0, 4.0, 2.0, k)?;
            (lhs, rhs)
        }
        Inequality::LorentzEmbedding => (lorentz_norm(f, 4.0, 2.0)?, aniso(f, 1.25, 2.0, 2.0, k)?),
        Inequality::LinfEmbedding => (spacetime_lp(f, f64::INFINITY)?, aniso(f, 2.5, 2.0, 1.0, k)?),
        Inequality::CompositeProduct => {
            let bf = anisotropic_block_norms(f, 2.0, k)?;
            let bg = anisotropic_block_norms(g, 2.0, k)?;
            let lhs = aniso(&product(f, g)?, 1.0, 2.0, 2.0, k)?;
            let rhs = bf.total(2.5, 1.0)? * bg.total(1.0, 2.0)? + bg.total(2.5, 1.0)? * bf.total(1.0, 2.0)?;
            (lhs, rhs)
        }
        Inequality::DerivativeLifting => {
            let d1 = f.map(|s| gradient(s)?.components(0, 1))?;
            (aniso(&d1, 1.0, 2.0, 2.0, k)?, aniso(f, 2.0, 2.0, 2.0, k)?)
        }
        Inequality::HeatSemigroup => (aniso(f, 1.5, 2.0, 2.0, k)?, spatial_block_norms(&x.f0, 2.0)?.total(0.5, 2.0)?),
        Inequality::DuhamelGradient => {
            let d = duhamel_trajectory(DuhamelKind::Grad, g, cfg.quad_order)?;
            (aniso(&d, 1.5, 2.0, 2.0, k)?, aniso(g, 0.5, 2.0, 2.0, k)?)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityResult {
    pub inequality: Inequality,
    pub name: String,
    /// `LHS / RHS` per sample; `None` when both sides vanish.
    pub ratios: Vec<Option<f64>>,
    pub fitted_constant: f64,
    pub heldout_max: f64,
    /// Samples with `RHS = 0` and `LHS > 0`.
    pub degenerate: Vec<usize>,
    /// Held-out samples with `ratio > 1.05 c`.
    pub violations: Vec<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub samples: usize,
    pub margin: f64,
    pub results: Vec<InequalityResult>,
    pub warnings: Vec<String>,
}

impl BatteryReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }
}

/// Fits the constant on the first half of `pairs` and checks the second half.
pub fn judge(inequality: Inequality, pairs: &[(f64, f64)]) -> InequalityResult {
    let half = pairs.len() / 2;
    let mut degenerate = Vec::new();
    let ratios: Vec<Option<f64>> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(l, r))| {
            if r.abs() <= ZERO_TOL {
                if l.abs() > ZERO_TOL {
                    degenerate.push(i);
                    Some(f64::INFINITY)
                } else {
                    None
                }
            } else {
                Some(l / r)
            }
        })
        .collect();
    let max_of = |s: &[Option<f64>]| s.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let c = max_of(&ratios[..half]);
    let heldout_max = max_of(&ratios[half..]);
    let violations: Vec<usize> = (half..ratios.len())
        .filter(|&i| matches!(ratios[i], Some(v) if !(v <= MARGIN * c)))
        .collect();
    let pass = violations.is_empty() && degenerate.is_empty() && c.is_finite();
    InequalityResult {
        inequality,
        name: inequality.name().to_string(),
        ratios,
        fitted_constant: c,
        heldout_max,
        degenerate,
        violations,
        pass,
    }
}

pub fn estimate_battery(corpus: &[BatterySample], cfg: &BatteryConfig) -> Result<BatteryReport> {
    let mut warnings = Vec::new();
    if corpus.len() < MIN_CORPUS {
        warnings.push(format!("insufficient calibration samples: corpus has {} < {MIN_CORPUS}", corpus.len()));
    }
    let results = Inequality::ALL
        .iter()
        .map(|&ineq| {
            let pairs = corpus.iter().map(|x| evaluate(ineq, x, cfg)).collect::<Result<Vec<_>>>()?;
            Ok(judge(ineq, &pairs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatteryReport { samples: corpus.len(), margin: MARGIN, results, warnings })
}
