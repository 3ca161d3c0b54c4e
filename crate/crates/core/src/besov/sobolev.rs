//! Parabolic Sobolev norms `‖h_{-s} * f‖_{L^p}` with symbol `(|ξ|^2 + iω)^{s/2}`.

use num_complex::Complex64 as C;

use super::timeline::{filtered_l2, filtered_slices, lp_of_slices, physical_slices, spacetime_lp, TimeLine};
use crate::error::{Error, Result};
use crate::spacetime::SpaceTimeField;
use crate::spectral::ops::diff_xi;

/// Extension order used when none is given: enough for the derivatives involved.
pub fn default_ext_order(s: f64) -> usize {
    (s.ceil().max(0.0) as usize).max(2)
}

/// Dispatches to the exact `L^2` multiplier path or the derivative path.
pub fn sobolev_norm_parabolic(f: &SpaceTimeField, s: f64, p: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Unsupported(format!("parabolic Sobolev norm with s = {s}")));
    }
    if s == 0.0 {
        return spacetime_lp(f, p);
    }
    let ext = default_ext_order(s);
    if p == 2.0 {
        return sobolev_norm_multiplier(f, s, ext);
    }
    let half = s / 2.0;
    if half.fract() == 0.0 && p > 1.0 && p.is_finite() {
        return Ok(parabolic_derivative_norms(f, half as usize, p, ext)?.iter().sum());
    }
    Err(Error::Unsupported(format!(
        "parabolic Sobolev norm needs p = 2 or s/2 integer with 1 < p < inf, got s = {s}, p = {p}"
    )))
}

/// Real part at the ambiguous-sign time bin keeps the output real.
fn symmetrize(tl: &TimeLine, m: usize, z: C) -> C {
    if tl.is_nyquist(m) {
        C::new(z.re, 0.0)
    } else {
        z
    }
}

/// `‖(|ξ|^2 + iω)^{s/2} Ef‖_{L^2(T^3 × (0,T))}`, principal branch, `c_s = 1`.
pub fn sobolev_norm_multiplier(f: &SpaceTimeField, s: f64, ext_order: usize) -> Result<f64> {
    let tl = TimeLine::for_field(f, ext_order)?;
    let grid = f.grid().clone();
    let e = filtered_l2(f, &tl, 1, |idx, table| {
        let xi2 = grid.xi2(idx);
        for (m, (z, w)) in table.iter_mut().zip(&tl.omega).enumerate() {
            let base = C::new(xi2, *w);
            *z = if base == C::new(0.0, 0.0) { C::new(0.0, 0.0) } else { symmetrize(&tl, m, base.powf(s / 2.0)) };
        }
        true
    });
    Ok(e[0].sqrt())
}

fn multi_indices(m: usize) -> Vec<([usize; 3], f64)> {
    let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
    let mut out = Vec::new();
    for a in 0..=m {
        for b in 0..=m - a {
            let c = m - a - b;
            out.push(([a, b, c], fact(m) / (fact(a) * fact(b) * fact(c))));
        }
    }
    out
}

/// `‖D_t^l D_x^{2(k-l)} f‖_{L^p}` for `l = 0..=k`, with `D_x^m` the full derivative tensor.
pub fn parabolic_derivative_norms(f: &SpaceTimeField, k: usize, p: f64, ext_order: usize) -> Result<Vec<f64>> {
    if p.is_nan() || p <= 1.0 {
        return Err(Error::InvalidParameter(format!("p must lie in (1, inf], got {p}")));
    }
    let tl = TimeLine::for_field(f, ext_order)?;
    let grid = f.grid().clone();
    let len = grid.len();
    let nc = f.ncomp();
    let time_factor = |l: usize, m: usize| symmetrize(&tl, m, C::new(0.0, tl.omega[m]).powu(l as u32));
    (0..=k)
        .map(|l| {
            let order = 2 * (k - l);
            if p == 2.0 {
                let e = filtered_l2(f, &tl, 1, |idx, table| {
                    let xi_m = grid.xi2(idx).powi(order as i32 / 2);
                    let keep = order == 0 || !grid.is_nyquist(idx);
                    for (m, z) in table.iter_mut().enumerate() {
                        *z = if keep { time_factor(l, m) * xi_m } else { C::new(0.0, 0.0) };
                    }
                    true
                });
                return Ok(e[0].sqrt());
            }
            let mut acc = vec![vec![0.0f64; len]; tl.n_t];
            for (beta, weight) in multi_indices(order) {
                let sl = filtered_slices(f, &tl, |idx, table| {
                    let sp = match diff_xi(&grid, idx) {
                        Some(xi) => (0..3).fold(C::new(1.0, 0.0), |a, d| a * C::new(0.0, xi[d]).powu(beta[d] as u32)),
                        None if order == 0 => C::new(1.0, 0.0),
                        None => return false,
                    };
                    for (m, z) in table.iter_mut().enumerate() {
                        *z = time_factor(l, m) * sp;
                    }
                    true
                });
                for (a, v) in acc.iter_mut().zip(physical_slices(&sl)) {
                    for c in 0..nc {
                        for (x, y) in a.iter_mut().zip(&v[c * len..(c + 1) * len]) {
                            *x += weight * y * y;
                        }
                    }
                }
            }
            for a in acc.iter_mut() {
                for x in a.iter_mut() {
                    *x = x.sqrt();
                }
            }
            Ok(lp_of_slices(&grid, 1, &acc, &tl.weights, p))
        })
        .collect()
}
