use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{curl, dealias, forward_transform, helmholtz_project, inverse_transform, Grid, PhysicalField, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    TaylorGreen,
    RandomBand,
    ConcentratedBump,
    /// Loaded from files or built by the caller.
    Custom,
}

/// Solenoidal, mean-free initial pair.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub u0: SpectralField,
    pub b0: SpectralField,
    pub family: Family,
    pub amplitude: f64,
}

const MEAN_TOL: f64 = 1e-12;

fn check_field(f: &mut SpectralField, name: &str) -> Result<()> {
    if f.ncomp() != 3 {
        return Err(Error::ComponentMismatch { expected: format!("3 components for {name}"), got: f.ncomp() });
    }
    f.check_finite(name)?;
    f.mark_solenoidal()?;
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    let mean = (0..3).map(|c| f.component(c)[0].norm()).fold(0.0, f64::max);
    if mean > MEAN_TOL * scale && mean > 0.0 {
        return Err(Error::InvalidParameter(format!("{name} must have zero mean, got |mean| = {mean:e}")));
    }
    Ok(())
}

impl InitialData {
    pub fn new(mut u0: SpectralField, mut b0: SpectralField, family: Family, amplitude: f64) -> Result<Self> {
        u0.grid().ensure_same(b0.grid())?;
        check_field(&mut u0, "u0")?;
        check_field(&mut b0, "b0")?;
        Ok(InitialData { u0, b0, family, amplitude })
    }

    pub fn generate(grid: &Grid, family: Family, amplitude: f64, seed: u64) -> Result<Self> {
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::InvalidParameter(format!("amplitude must be finite and >= 0, got {amplitude}")));
        }
        let (u, b) = match family {
            Family::TaylorGreen => taylor_green(grid)?,
            Family::RandomBand => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (random_band(grid, 4, &mut rng)?, random_band(grid, 4, &mut rng)?)
            }
            Family::ConcentratedBump => concentrated_bump(grid)?,
            Family::Custom => {
                return Err(Error::InvalidParameter("custom data must be supplied, not generated".into()));
            }
        };
        Self::new(normalize(&u, amplitude)?, normalize(&b, amplitude)?, family, amplitude)
    }

    /// The concentrated bump with a fixed physical width, independent of the box.
    pub fn localized(grid: &Grid, sigma: f64, amplitude: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("bump width must be positive, got {sigma}")));
        }
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::InvalidParameter(format!("amplitude must be finite and >= 0, got {amplitude}")));
        }
        let (u, b) = localized_bump(grid, sigma)?;
        Self::new(normalize(&u, amplitude)?, normalize(&b, amplitude)?, Family::ConcentratedBump, amplitude)
    }

    pub fn grid(&self) -> &Grid {
        self.u0.grid()
    }

    /// `b0 → -b0` (with the Hall coefficient negated by the caller).
    pub fn negate_b(&self) -> InitialData {
        InitialData { b0: self.b0.scale(-1.0), ..self.clone() }
    }
}

/// Rescale to `max_x |f(x)| = a`.
fn normalize(f: &SpectralField, a: f64) -> Result<SpectralField> {
    let m = inverse_transform(f)?.max_abs();
    let mut out = if m > 0.0 { f.scale(a / m) } else { f.clone() };
    out.mark_solenoidal()?;
    Ok(out)
}

fn taylor_green(grid: &Grid) -> Result<(SpectralField, SpectralField)> {
    let w = 2.0 * PI / grid.box_length();
    let u = PhysicalField::from_fn(grid, 3, |x, v| {
        let (x, y, z) = (w * x[0], w * x[1], w * x[2]);
        v[0] = x.sin() * y.cos() * z.cos();
        v[1] = -x.cos() * y.sin() * z.cos();
        v[2] = 0.0;
    })?;
    let b = PhysicalField::from_fn(grid, 3, |x, v| {
        let (x, y, z) = (w * x[0], w * x[1], w * x[2]);
        v[0] = 0.0;
        v[1] = y.sin() * z.cos() * x.cos();
        v[2] = -y.cos() * z.sin() * x.cos();
    })?;
    Ok((helmholtz_project(&forward_transform(&u)?)?, helmholtz_project(&forward_transform(&b)?)?))
}

fn random_band(grid: &Grid, k2_max: u32, rng: &mut ChaCha8Rng) -> Result<SpectralField> {
    let len = grid.len();
    let mut c = vec![num_complex::Complex64::new(0.0, 0.0); 3 * len];
    for idx in 0..len {
        let k2 = grid.k2(idx);
        let cj = grid.conj_index(idx);
        if k2 == 0 || k2 > k2_max || !grid.is_kept(idx) || cj < idx {
            continue;
        }
        for comp in 0..3 {
            let z = num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            c[comp * len + idx] = z;
            c[comp * len + cj] = z.conj();
        }
    }
    helmholtz_project(&SpectralField::from_coeffs(grid, 3, c)?)
}

/// Curl of a Gaussian vector potential centred in the box, width `L/10`.
fn concentrated_bump(grid: &Grid) -> Result<(SpectralField, SpectralField)> {
    localized_bump(grid, grid.box_length() / 10.0)
}

/// As `concentrated_bump` with an absolute width `sigma`; the magnetic
/// potential is offset by `sigma` along each axis.
fn localized_bump(grid: &Grid, sigma: f64) -> Result<(SpectralField, SpectralField)> {
    let l = grid.box_length();
    let potential = |shift: f64, dir: [f64; 3]| {
        PhysicalField::from_fn(grid, 3, |x, v| {
            let r2: f64 = x
                .iter()
                .map(|&c| {
                    let d = (c - 0.5 * l - shift).rem_euclid(l);
                    let d = if d > 0.5 * l { d - l } else { d };
                    d * d
                })
                .sum();
            let g = (-r2 / (2.0 * sigma * sigma)).exp();
            for i in 0..3 {
                v[i] = g * dir[i];
            }
        })
    };
    let a = dealias(&forward_transform(&potential(0.0, [1.0, 0.5, 0.0])?)?);
    let bpot = dealias(&forward_transform(&potential(sigma, [0.0, 0.3, 1.0])?)?);
    Ok((helmholtz_project(&curl(&a)?)?, helmholtz_project(&curl(&bpot)?)?))
}
