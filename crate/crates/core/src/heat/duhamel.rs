//! Duhamel integrals `∫_0^t M(ξ) e^{-|ξ|^2 (t-s)} F̂(ξ, s) ds`.
//!
//! Two paths: [`duhamel`] takes a forcing callable at arbitrary times and uses
//! composite Gauss–Legendre quadrature; [`duhamel_trajectory`] takes sampled
//! slices, interpolates them with cubic Lagrange polynomials and integrates the
//! interpolant exactly up to Gauss error via precomputed exponential weights.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{apply_kind, DuhamelKind, TimeGrid};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_on, lagrange_weights, stencil_start};
use crate::spacetime::SpaceTimeField;
use crate::spectral::{Grid, SpectralField};

type C = Complex64;

/// `∫_0^t M e^{(t-s)Δ} F(s) ds` with Gauss nodes on each `[t_i, t_{i+1}] ∩ [0, t]`.
pub fn duhamel<F>(kind: DuhamelKind, forcing: F, t: f64, quad: &TimeGrid) -> Result<SpectralField>
where
    F: Fn(f64) -> Result<SpectralField> + Sync,
{
    quad.validate()?;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let mut breaks: Vec<f64> = quad.times().into_iter().filter(|&s| s < t).collect();
    breaks.push(t);
    let mut nodes = Vec::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            nodes.extend(gauss_on(quad.quad_order, w[0], w[1]));
        }
    }
    if nodes.is_empty() {
        let f0 = forcing(0.0)?;
        return apply_kind(kind, &SpectralField::zeros(f0.grid(), f0.ncomp())?);
    }
    let values = nodes
        .par_iter()
        .map(|&(s, _)| {
            let f = forcing(s)?;
            f.check_finite(&format!("forcing at s = {s}"))?;
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = values[0].grid().clone();
    let ncomp = values[0].ncomp();
    for v in &values {
        grid.ensure_same(v.grid())?;
        if v.ncomp() != ncomp {
            return Err(Error::ComponentMismatch { expected: ncomp.to_string(), got: v.ncomp() });
        }
    }
    if !kind.accepts(ncomp) {
        return Err(Error::ComponentMismatch { expected: format!("forcing shape for {kind:?}"), got: ncomp });
    }
    let len = grid.len();
    let mut acc = vec![C::new(0.0, 0.0); ncomp * len];
    acc.par_chunks_mut(len).enumerate().for_each(|(c, dst)| {
        for (idx, d) in dst.iter_mut().enumerate() {
            let lam = grid.xi2(idx);
            let mut s = C::new(0.0, 0.0);
            for ((node, w), v) in nodes.iter().zip(&values) {
                s += v.coeffs()[c * len + idx] * (w * (-lam * (t - node)).exp());
            }
            *d = s;
        }
    });
    apply_kind(kind, &SpectralField::from_parts(&grid, ncomp, acc, false))
}

/// Per-mode weights for the sampled Duhamel recursion
/// `D_{i+1} = e^{-λh} D_i + Σ_m W_{o,m}(λ) F_{s+m}` on a uniform grid.
pub struct DuhamelWeights {
    /// `e^{-λ h}` per distinct `|k|^2`.
    decay: Vec<f64>,
    /// `weights[o][m][k2]` for stencil offset `o` and stencil slot `m`.
    weights: Vec<Vec<Vec<f64>>>,
    stencil: usize,
}

impl DuhamelWeights {
    pub fn new(grid: &Grid, n_t: usize, h: f64, quad_order: usize) -> Self {
        let m = n_t.min(4);
        let kmax = grid.max_k2() as usize;
        let dk2 = grid.dk() * grid.dk();
        let nodes = gauss_on(quad_order, 0.0, h);
        let mut weights = vec![vec![vec![0.0; kmax + 1]; m]; m];
        let mut decay = vec![0.0; kmax + 1];
        for (o, wo) in weights.iter_mut().enumerate() {
            let pos: Vec<f64> = (0..m).map(|j| (j as f64 - o as f64) * h).collect();
            let basis: Vec<Vec<f64>> = nodes.iter().map(|&(tau, _)| lagrange_weights(&pos, tau)).collect();
            for k2 in 0..=kmax {
                let lam = dk2 * k2 as f64;
                for (slot, wm) in wo.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for ((tau, w), b) in nodes.iter().zip(&basis) {
                        s += w * (-lam * (h - tau)).exp() * b[slot];
                    }
                    wm[k2] = s;
                }
            }
        }
        for (k2, d) in decay.iter_mut().enumerate() {
            *d = (-dk2 * k2 as f64 * h).exp();
        }
        DuhamelWeights { decay, weights, stencil: m }
    }
}

/// Plain Duhamel integral of sampled forcing at every sample time.
///
/// The forcing is interpolated in time by cubic Lagrange polynomials on the
/// stencil `i-1..=i+2` (shifted at the ends); output slice 0 is zero.
pub fn duhamel_plain_trajectory(forcing: &SpaceTimeField, quad_order: usize) -> Result<SpaceTimeField> {
    let grid = forcing.grid().clone();
    let n_t = forcing.n_t();
    let h = forcing.dt();
    let len = grid.len();
    let ncomp = forcing.ncomp();
    let w = DuhamelWeights::new(&grid, n_t, h, quad_order);
    let k2: Vec<usize> = (0..len).map(|idx| grid.k2(idx) as usize).collect();
    let mut slices = Vec::with_capacity(n_t);
    let mut prev = vec![C::new(0.0, 0.0); ncomp * len];
    slices.push(SpectralField::from_parts(&grid, ncomp, prev.clone(), forcing.slice(0).is_solenoidal()));
    for i in 0..n_t - 1 {
        let s = stencil_start(i, n_t);
        let o = i - s;
        let srcs: Vec<&[C]> = (0..w.stencil).map(|m| forcing.slice(s + m).coeffs()).collect();
        let wo = &w.weights[o];
        let mut next = vec![C::new(0.0, 0.0); ncomp * len];
        next.par_chunks_mut(4096).enumerate().for_each(|(chunk, dst)| {
            let base = chunk * 4096;
            for (off, d) in dst.iter_mut().enumerate() {
                let j = base + off;
                let kk = k2[j % len];
                let mut v = prev[j] * w.decay[kk];
                for (m, src) in srcs.iter().enumerate() {
                    v += src[j] * wo[m][kk];
                }
                *d = v;
            }
        });
        let sol = (s..s + w.stencil).all(|q| forcing.slice(q).is_solenoidal());
        slices.push(SpectralField::from_parts(&grid, ncomp, next.clone(), sol));
        prev = next;
    }
    SpaceTimeField::new(forcing.t_final(), slices)
}

/// Duhamel integral of sampled forcing for any kind, at every sample time.
pub fn duhamel_trajectory(kind: DuhamelKind, forcing: &SpaceTimeField, quad_order: usize) -> Result<SpaceTimeField> {
    if quad_order < 4 {
        return Err(Error::InvalidParameter(format!("quad_order must be >= 4, got {quad_order}")));
    }
    if !kind.accepts(forcing.ncomp()) {
        return Err(Error::ComponentMismatch { expected: format!("forcing shape for {kind:?}"), got: forcing.ncomp() });
    }
    for s in forcing.slices() {
        s.check_finite("forcing slice")?;
    }
    let g = forcing.map(|s| apply_kind(kind, s))?;
    duhamel_plain_trajectory(&g, quad_order)
}
