use num_complex::Complex64 as C;

use super::profile::{build_dyadic_profile, DyadicProfile, Flavor};
use super::spec::{BesovReport, BesovSpec, BlockNorms};
use super::timeline::{filtered_l2, filtered_slices, lp_of_slices, physical_slices, power_sum, TimeLine};
use crate::error::{Error, Result};
use crate::reduce::pairwise_sum;
use crate::spacetime::SpaceTimeField;
use crate::spectral::field::inverse_raw;
use crate::spectral::ops::map_modes;
use crate::spectral::{Grid, SpectralField};

fn band(rho_min: f64, rho_max: f64) -> Result<(i32, i32)> {
    let (j_min, _) = DyadicProfile::blocks_touching(rho_min);
    let (_, j_max) = DyadicProfile::blocks_touching(rho_max);
    if j_min > j_max {
        return Err(Error::NoResolvableShell(format!("empty dyadic band for radii [{rho_min}, {rho_max}]")));
    }
    Ok((j_min, j_max))
}

/// Blocks resolvable on `grid`: lowest nonzero mode up to the 2/3 cut.
pub fn spatial_band(grid: &Grid) -> (i32, i32) {
    band(grid.dk(), grid.xi_cut()).expect("dk < xi_cut on any valid grid")
}

fn check_flavor(spec: &BesovSpec, want: Flavor) -> Result<()> {
    spec.validate()?;
    if spec.flavor != want {
        return Err(Error::InvalidParameter(format!("expected a {want:?} spec, got {:?}", spec.flavor)));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p <= 1.0 {
        return Err(Error::InvalidParameter(format!("integrability p must lie in (1, inf], got {p}")));
    }
    Ok(())
}

/// `‖f * φ_j‖_{L^p(T^3)}` over the spatial band.
pub fn spatial_block_norms(f: &SpectralField, p: f64) -> Result<BlockNorms> {
    check_p(p)?;
    f.check_finite("field")?;
    let grid = f.grid();
    let prof = build_dyadic_profile(Flavor::IsotropicSpatial);
    let (j_min, j_max) = spatial_band(grid);
    let len = grid.len();
    let nc = f.ncomp();
    let raw = if p == 2.0 {
        let energy: Vec<f64> =
            (0..len).map(|i| (0..nc).map(|c| f.coeffs()[c * len + i].norm_sqr()).sum()).collect();
        (j_min..=j_max)
            .map(|j| {
                let terms: Vec<f64> = (0..len)
                    .filter(|&i| energy[i] > 0.0)
                    .map(|i| prof.block(j, grid.xi_abs(i)).powi(2) * energy[i])
                    .collect();
                (grid.volume() * pairwise_sum(&terms)).sqrt()
            })
            .collect()
    } else {
        (j_min..=j_max)
            .map(|j| {
                let masked = spatial_block(f, &prof, j);
                let (values, _) = inverse_raw(&masked);
                let s = power_sum(&values, nc, len, p);
                if p.is_infinite() {
                    s
                } else {
                    (s * grid.cell_volume()).powf(1.0 / p)
                }
            })
            .collect()
    };
    Ok(BlockNorms { flavor: Flavor::IsotropicSpatial, p, j_min, j_max, raw, ext_order: None })
}

/// `f * φ_j` for the spatial profile.
pub fn spatial_block(f: &SpectralField, prof: &DyadicProfile, j: i32) -> SpectralField {
    let grid = f.grid().clone();
    map_modes(f, f.ncomp(), |idx, a, out| {
        let m = prof.block(j, grid.xi_abs(idx));
        for (o, x) in out.iter_mut().zip(a) {
            *o = x * m;
        }
    })
}

pub fn besov_norm_spatial(f: &SpectralField, spec: &BesovSpec) -> Result<BesovReport> {
    check_flavor(spec, Flavor::IsotropicSpatial)?;
    spatial_block_norms(f, spec.p)?.report(spec.s, spec.q)
}

/// Parabolic blocks resolvable on the space-time box of `f`.
pub(crate) fn anisotropic_band_for(grid: &Grid, tl: &TimeLine) -> Result<(i32, i32)> {
    let rho_min = grid.dk().min(tl.omega_min().sqrt());
    let rho_max = grid.xi_cut() + (2.0 / 3.0 * tl.omega_nyquist()).sqrt();
    band(rho_min, rho_max)
}

pub fn anisotropic_band(f: &SpaceTimeField, ext_order: usize) -> Result<(i32, i32)> {
    anisotropic_band_for(f.grid(), &TimeLine::for_field(f, ext_order)?)
}

fn fill_block(prof: &DyadicProfile, grid: &Grid, tl: &TimeLine, j: i32, idx: usize, row: &mut [C]) {
    let xi = grid.xi_abs(idx);
    for (z, w) in row.iter_mut().zip(&tl.omega) {
        *z = C::new(prof.block(j, prof.radius(xi, *w)), 0.0);
    }
}

/// `‖f * φ_j‖_{L^p(T^3 × (0,T))}` for parabolic blocks of the windowed extension of `f`.
pub fn anisotropic_block_norms(f: &SpaceTimeField, p: f64, ext_order: usize) -> Result<BlockNorms> {
    check_p(p)?;
    let tl = TimeLine::for_field(f, ext_order)?;
    let grid = f.grid().clone();
    let (j_min, j_max) = anisotropic_band_for(&grid, &tl)?;
    let prof = build_dyadic_profile(Flavor::AnisotropicSpacetime);
    let nb = tl.n_box;
    let nj = (j_max - j_min + 1) as usize;
    let raw = if p == 2.0 {
        filtered_l2(f, &tl, nj, |idx, table| {
            for m in 0..nj {
                fill_block(&prof, &grid, &tl, j_min + m as i32, idx, &mut table[m * nb..(m + 1) * nb]);
            }
            true
        })
        .into_iter()
        .map(f64::sqrt)
        .collect()
    } else {
        (j_min..=j_max)
            .map(|j| {
                let sl = filtered_slices(f, &tl, |idx, table| {
                    fill_block(&prof, &grid, &tl, j, idx, table);
                    true
                });
                lp_of_slices(&grid, f.ncomp(), &physical_slices(&sl), &tl.weights, p)
            })
            .collect()
    };
    Ok(BlockNorms { flavor: Flavor::AnisotropicSpacetime, p, j_min, j_max, raw, ext_order: Some(ext_order) })
}

pub fn besov_norm_anisotropic(f: &SpaceTimeField, spec: &BesovSpec, ext_order: usize) -> Result<BesovReport> {
    check_flavor(spec, Flavor::AnisotropicSpacetime)?;
    anisotropic_block_norms(f, spec.p, ext_order)?.report(spec.s, spec.q)
}
