//! Per-mode time lines on the periodic space-time box.
//!
//! A space-time field is already spectral in space, so every 4D multiplier
//! reduces to: extend each mode's time line to negative times and past `T`,
//! taper the pads, FFT in time, multiply, transform back and keep the
//! original samples.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection};

use super::extension::{extension_coefficients, pad_len};
use super::profile::smooth_step;
use crate::error::{Error, Result};
use crate::reduce::pairwise_sum;
use crate::spacetime::SpaceTimeField;
use crate::spectral::field::inverse_raw;
use crate::spectral::fft::plan;
use crate::spectral::{Grid, SpectralField};

const ZERO: C = C::new(0.0, 0.0);

/// Smallest time grid the space-time norms accept.
pub const MIN_TIME_SAMPLES: usize = 8;

pub(crate) struct TimeLine {
    pub n_t: usize,
    pub pad: usize,
    pub n_box: usize,
    pub dt: f64,
    lambda: Vec<f64>,
    taper: Vec<f64>,
    /// Angular frequency of each box bin.
    pub omega: Vec<f64>,
    /// Trapezoid weights of the original samples.
    pub weights: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl TimeLine {
    pub fn new(n_t: usize, dt: f64, ext_order: usize) -> Result<Self> {
        if n_t < MIN_TIME_SAMPLES {
            return Err(Error::NoResolvableShell(format!("need at least {MIN_TIME_SAMPLES} time samples, got {n_t}")));
        }
        let lambda = extension_coefficients(ext_order)?;
        let pad = pad_len(n_t, ext_order);
        if pad == 0 {
            return Err(Error::InvalidParameter(format!("extension order {ext_order} too high for {n_t} samples")));
        }
        let n_box = n_t + 2 * pad;
        let taper = (1..=pad).map(|i| smooth_step(1.0 - i as f64 / (pad + 1) as f64)).collect();
        let omega = (0..n_box)
            .map(|m| {
                let m = if m <= n_box / 2 { m as f64 } else { m as f64 - n_box as f64 };
                2.0 * PI * m / (n_box as f64 * dt)
            })
            .collect();
        Ok(TimeLine {
            n_t,
            pad,
            n_box,
            dt,
            lambda,
            taper,
            omega,
            weights: trapezoid_weights(n_t, dt),
            fwd: plan(n_box, FftDirection::Forward),
            inv: plan(n_box, FftDirection::Inverse),
        })
    }

    pub fn for_field(f: &SpaceTimeField, ext_order: usize) -> Result<Self> {
        Self::new(f.n_t(), f.dt(), ext_order)
    }

    /// Box bin with an ambiguous sign (even box length).
    pub fn is_nyquist(&self, m: usize) -> bool {
        self.n_box % 2 == 0 && m == self.n_box / 2
    }

    pub fn omega_min(&self) -> f64 {
        self.omega[1]
    }

    pub fn omega_nyquist(&self) -> f64 {
        PI / self.dt
    }

    /// Box layout: original samples, right pad `T + iΔt`, then left pad `-iΔt` reversed.
    pub fn extend(&self, line: &[C], out: &mut [C]) {
        let n_t = self.n_t;
        out[..n_t].copy_from_slice(line);
        for i in 1..=self.pad {
            let w = self.taper[i - 1];
            let mut right = ZERO;
            let mut left = ZERO;
            for (j, l) in self.lambda.iter().enumerate() {
                let o = (j + 1) * i;
                right += line[n_t - 1 - o] * *l;
                left += line[o] * *l;
            }
            out[n_t - 1 + i] = right * w;
            out[self.n_box - i] = left * w;
        }
    }

    fn scratch_len(&self) -> usize {
        self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len())
    }
}

pub(crate) fn trapezoid_weights(n_t: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![dt; n_t];
    w[0] *= 0.5;
    w[n_t - 1] *= 0.5;
    w
}

struct Scratch {
    line: Vec<C>,
    buf: Vec<C>,
    y: Vec<C>,
    table: Vec<C>,
    fft: Vec<C>,
}

impl Scratch {
    fn new(tl: &TimeLine, n_mult: usize) -> Self {
        Scratch {
            line: vec![ZERO; tl.n_t],
            buf: vec![ZERO; tl.n_box],
            y: vec![ZERO; tl.n_box],
            table: vec![ZERO; n_mult * tl.n_box],
            fft: vec![ZERO; tl.scratch_len()],
        }
    }
}

fn gather(f: &SpaceTimeField, c: usize, idx: usize, line: &mut [C]) -> bool {
    let off = c * f.grid().len() + idx;
    let mut any = false;
    for (l, s) in line.iter_mut().zip(f.slices()) {
        *l = s.coeffs()[off];
        any |= *l != ZERO;
    }
    any
}

/// `∫_0^T ∫ |m(D) f|^2 dx dt` for each of `n_mult` multipliers.
///
/// `fill(idx, table)` writes multiplier `m` at box bin `w` into `table[m * n_box + w]`
/// and may return `false` to skip the mode entirely.
pub(crate) fn filtered_l2<M>(f: &SpaceTimeField, tl: &TimeLine, n_mult: usize, fill: M) -> Vec<f64>
where
    M: Fn(usize, &mut [C]) -> bool + Sync,
{
    let grid = f.grid();
    let len = grid.len();
    let nc = f.ncomp();
    let nb = tl.n_box;
    let per_mode: Vec<Vec<f64>> = (0..len)
        .into_par_iter()
        .with_min_len(64)
        .map_init(
            || Scratch::new(tl, n_mult),
            |s, idx| {
                if !(0..nc).any(|c| gather(f, c, idx, &mut s.line)) {
                    return Vec::new();
                }
                if !fill(idx, &mut s.table) {
                    return Vec::new();
                }
                let active: Vec<usize> =
                    (0..n_mult).filter(|&m| s.table[m * nb..(m + 1) * nb].iter().any(|z| *z != ZERO)).collect();
                let mut acc = vec![0.0; n_mult];
                for c in 0..nc {
                    if !gather(f, c, idx, &mut s.line) {
                        continue;
                    }
                    tl.extend(&s.line, &mut s.buf);
                    tl.fwd.process_with_scratch(&mut s.buf, &mut s.fft);
                    for &m in &active {
                        let tab = &s.table[m * nb..(m + 1) * nb];
                        for ((y, b), t) in s.y.iter_mut().zip(&s.buf).zip(tab) {
                            *y = b * t;
                        }
                        tl.inv.process_with_scratch(&mut s.y, &mut s.fft);
                        acc[m] += s.y[..tl.n_t].iter().zip(&tl.weights).map(|(y, w)| w * y.norm_sqr()).sum::<f64>();
                    }
                }
                acc
            },
        )
        .collect();
    let scale = grid.volume() / (nb * nb) as f64;
    (0..n_mult)
        .map(|m| {
            let v: Vec<f64> = per_mode.iter().filter(|a| !a.is_empty()).map(|a| a[m]).collect();
            scale * pairwise_sum(&v)
        })
        .collect()
}

/// Spectral slices of `m(D) f` at the original sample times.
pub(crate) fn filtered_slices<M>(f: &SpaceTimeField, tl: &TimeLine, fill: M) -> Vec<SpectralField>
where
    M: Fn(usize, &mut [C]) -> bool + Sync,
{
    let grid = f.grid();
    let len = grid.len();
    let nc = f.ncomp();
    let n_t = tl.n_t;
    let nb = tl.n_box;
    let per_mode: Vec<Option<Vec<C>>> = (0..len)
        .into_par_iter()
        .with_min_len(64)
        .map_init(
            || Scratch::new(tl, 1),
            |s, idx| {
                if !(0..nc).any(|c| gather(f, c, idx, &mut s.line)) || !fill(idx, &mut s.table) {
                    return None;
                }
                if s.table.iter().all(|z| *z == ZERO) {
                    return None;
                }
                let mut out = vec![ZERO; nc * n_t];
                for c in 0..nc {
                    if !gather(f, c, idx, &mut s.line) {
                        continue;
                    }
                    tl.extend(&s.line, &mut s.buf);
                    tl.fwd.process_with_scratch(&mut s.buf, &mut s.fft);
                    for (b, t) in s.buf.iter_mut().zip(&s.table) {
                        *b *= t;
                    }
                    tl.inv.process_with_scratch(&mut s.buf, &mut s.fft);
                    for i in 0..n_t {
                        out[c * n_t + i] = s.buf[i] / nb as f64;
                    }
                }
                Some(out)
            },
        )
        .collect();
    let mut slices = vec![vec![ZERO; nc * len]; n_t];
    for (idx, v) in per_mode.iter().enumerate() {
        if let Some(v) = v {
            for c in 0..nc {
                for (i, s) in slices.iter_mut().enumerate() {
                    s[c * len + idx] = v[c * n_t + i];
                }
            }
        }
    }
    slices.into_iter().map(|c| SpectralField::from_parts(grid, nc, c, false)).collect()
}

/// `Σ_x |v(x)|^p` (Euclidean magnitude over components), or `max |v|` for `p = ∞`.
pub(crate) fn power_sum(values: &[f64], nc: usize, len: usize, p: f64) -> f64 {
    let mag = |i: usize| -> f64 {
        if nc == 1 {
            values[i].abs()
        } else {
            (0..nc).map(|c| values[c * len + i].powi(2)).sum::<f64>().sqrt()
        }
    };
    if p.is_infinite() {
        (0..len).map(mag).fold(0.0, f64::max)
    } else if p == 2.0 {
        pairwise_sum(&(0..len).map(|i| mag(i).powi(2)).collect::<Vec<_>>())
    } else {
        pairwise_sum(&(0..len).map(|i| mag(i).powf(p)).collect::<Vec<_>>())
    }
}

/// Space-time `L^p` of physical slices: trapezoid in time, cell volume in space.
pub(crate) fn lp_of_slices(grid: &Grid, nc: usize, slices: &[Vec<f64>], weights: &[f64], p: f64) -> f64 {
    let len = grid.len();
    let sums: Vec<f64> = slices.par_iter().map(|v| power_sum(v, nc, len, p)).collect();
    if p.is_infinite() {
        return sums.into_iter().fold(0.0, f64::max);
    }
    let total: Vec<f64> = sums.iter().zip(weights).map(|(s, w)| s * w).collect();
    (pairwise_sum(&total) * grid.cell_volume()).powf(1.0 / p)
}

pub(crate) fn physical_slices(slices: &[SpectralField]) -> Vec<Vec<f64>> {
    slices.iter().map(|s| inverse_raw(s).0).collect()
}

/// Space-time `L^p(ℝ^3 × (0, T))` norm of the sampled field (trapezoid rule in time).
pub fn spacetime_lp(f: &SpaceTimeField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("L^p exponent must be >= 1, got {p}")));
    }
    let phys = physical_slices(f.slices());
    Ok(lp_of_slices(f.grid(), f.ncomp(), &phys, &trapezoid_weights(f.n_t(), f.dt()), p))
}
