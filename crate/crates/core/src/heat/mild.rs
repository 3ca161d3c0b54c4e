//! Right-hand sides of the mild formulation.
//!
//! Signs follow the PDE through the identities
//! `(∇×b)×b = ∇·(b⊗b) - ∇|b|^2/2` and `∇×((∇×b)×b) = ∇×∇·(b⊗b)`:
//!
//! ```text
//! u(t) = e^{tΔ}u0 - ∫ e^{(t-s)Δ} P∇·(u⊗u) + ∫ e^{(t-s)Δ} P∇·(b⊗b) - ½ ∫ e^{(t-s)Δ} P∇|b|^2
//! b(t) = e^{tΔ}b0 + h T(b, b) + ∫ e^{(t-s)Δ} ∇×(u×b),   T(b1,b2) = -∫ e^{(t-s)Δ} ∇×∇·(b1⊗b2)
//! ```
//!
//! with Hall coefficient `h` (1 for the standard system).

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

use super::duhamel::{duhamel, duhamel_plain_trajectory};
use super::{heat_propagate, DuhamelKind, TimeGrid};
use crate::error::{Error, Result};
use crate::spacetime::SpaceTimeField;
use crate::spectral::fft::fft3;
use crate::spectral::ops::{cross_c, diff_xi, pointwise_product, project_mode, ProductKind};
use crate::spectral::{Grid, SpectralField};

/// The vector identities the mild right-hand sides are built from.
pub const LORENTZ_IDENTITY: &str =
    "(curl b) x b = div(b (x) b) - grad|b|^2/2 for div b = 0; curl((curl b) x b) = curl div(b (x) b)";

type C = Complex64;
const I: C = C { re: 0.0, im: 1.0 };
const ZERO: C = C { re: 0.0, im: 0.0 };

/// Pairs of symmetric tensor indices `(k, i)` with `k <= i`.
const SYM: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn sym_index(k: usize, i: usize) -> usize {
    let (a, b) = if k <= i { (k, i) } else { (i, k) };
    SYM.iter().position(|&p| p == (a, b)).expect("valid pair")
}

/// Inverse transform of two Hermitian fields at once: `a + i b`.
fn inverse_pair(grid: &Grid, a: &[C], b: &[C]) -> (Vec<f64>, Vec<f64>) {
    let mut z: Vec<C> = a.iter().zip(b).map(|(x, y)| x + I * y).collect();
    fft3(&mut z, grid.n(), FftDirection::Inverse);
    (z.iter().map(|v| v.re).collect(), z.iter().map(|v| v.im).collect())
}

/// Forward transform of two real fields at once, dealiased.
fn forward_pair(grid: &Grid, a: &[f64], b: &[f64]) -> (Vec<C>, Vec<C>) {
    let len = grid.len();
    let norm = 1.0 / len as f64;
    let mut z: Vec<C> = a.iter().zip(b).map(|(x, y)| C::new(x * norm, y * norm)).collect();
    fft3(&mut z, grid.n(), FftDirection::Forward);
    let mut fa = vec![ZERO; len];
    let mut fb = vec![ZERO; len];
    for idx in 0..len {
        if grid.is_kept(idx) {
            let zc = z[grid.conj_index(idx)].conj();
            fa[idx] = (z[idx] + zc) * 0.5;
            fb[idx] = (z[idx] - zc) * C::new(0.0, -0.5);
        }
    }
    (fa, fb)
}

/// Dealiased quadratic products of one time slice.
pub struct Forcing {
    /// Symmetric `u⊗u`, 6 unique components in `SYM` order.
    pub uu: Vec<Vec<C>>,
    pub bb: Vec<Vec<C>>,
    pub bsq: Vec<C>,
    /// `u × b`.
    pub ub: Vec<Vec<C>>,
}

pub fn quadratic_products(u: &SpectralField, b: &SpectralField) -> Result<Forcing> {
    let grid = u.grid();
    grid.ensure_same(b.grid())?;
    if u.ncomp() != 3 || b.ncomp() != 3 {
        return Err(Error::ComponentMismatch { expected: "3".into(), got: u.ncomp().min(b.ncomp()) });
    }
    let len = grid.len();
    let mut pu = Vec::with_capacity(3);
    let mut pb = Vec::with_capacity(3);
    for c in 0..3 {
        let (x, y) = inverse_pair(grid, u.component(c), b.component(c));
        pu.push(x);
        pb.push(y);
    }
    let prod = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(a, b)| a * b).collect() };
    let mut reals: Vec<Vec<f64>> = Vec::with_capacity(16);
    for &(k, i) in &SYM {
        reals.push(prod(&pu[k], &pu[i]));
    }
    for &(k, i) in &SYM {
        reals.push(prod(&pb[k], &pb[i]));
    }
    let mut bsq = vec![0.0; len];
    for c in 0..3 {
        for j in 0..len {
            bsq[j] += pb[c][j] * pb[c][j];
        }
    }
    reals.push(bsq);
    for j in 0..3 {
        let (p, q) = ((j + 1) % 3, (j + 2) % 3);
        reals.push((0..len).map(|x| pu[p][x] * pb[q][x] - pu[q][x] * pb[p][x]).collect());
    }
    let mut spec: Vec<Vec<C>> = Vec::with_capacity(16);
    for pair in reals.chunks(2) {
        let (a, b) = forward_pair(grid, &pair[0], &pair[1]);
        spec.push(a);
        spec.push(b);
    }
    let mut it = spec.into_iter();
    let uu: Vec<Vec<C>> = (0..6).map(|_| it.next().unwrap()).collect();
    let bb: Vec<Vec<C>> = (0..6).map(|_| it.next().unwrap()).collect();
    let bsq = it.next().unwrap();
    let ub: Vec<Vec<C>> = (0..3).map(|_| it.next().unwrap()).collect();
    Ok(Forcing { uu, bb, bsq, ub })
}

/// Combined forcings `(G_u, G_b)` with all spatial multipliers applied:
/// `G_u = P[-∇·(u⊗u) + ∇·(b⊗b) - ∇|b|^2/2]`, `G_b = -h ∇×∇·(b⊗b) + ∇×(u×b)`.
pub fn nonlinear_forcing(u: &SpectralField, b: &SpectralField, hall: f64) -> Result<(SpectralField, SpectralField)> {
    let grid = u.grid().clone();
    let f = quadratic_products(u, b)?;
    let len = grid.len();
    let mut gu = vec![ZERO; 3 * len];
    let mut gb = vec![ZERO; 3 * len];
    for idx in 0..len {
        let Some(xi) = diff_xi(&grid, idx) else { continue };
        if !grid.is_kept(idx) {
            continue;
        }
        let mut du = [ZERO; 3];
        let mut db = [ZERO; 3];
        for i in 0..3 {
            for k in 0..3 {
                let s = sym_index(k, i);
                du[i] += f.uu[s][idx] * xi[k];
                db[i] += f.bb[s][idx] * xi[k];
            }
        }
        let mut v = [ZERO; 3];
        for i in 0..3 {
            v[i] = I * (db[i] - du[i] - 0.5 * xi[i] * f.bsq[idx]);
        }
        let mut pv = [ZERO; 3];
        project_mode(xi, &v, &mut pv);
        let hall_part = cross_c(xi, &db);
        let ub = [f.ub[0][idx], f.ub[1][idx], f.ub[2][idx]];
        let curl_part = cross_c(xi, &ub);
        for i in 0..3 {
            gu[i * len + idx] = pv[i];
            gb[i * len + idx] = hall_part[i] * hall + I * curl_part[i];
        }
    }
    Ok((SpectralField::from_parts(&grid, 3, gu, true), SpectralField::from_parts(&grid, 3, gb, true)))
}

/// One application of the mild map at every time slice.
pub struct MildStep {
    pub u: SpaceTimeField,
    pub b: SpaceTimeField,
}

/// Apply the mild right-hand sides to a trajectory `(u, b)` with data `(u0, b0)`.
pub fn mild_step(
    u: &SpaceTimeField,
    b: &SpaceTimeField,
    u0: &SpectralField,
    b0: &SpectralField,
    quad_order: usize,
    hall: f64,
) -> Result<MildStep> {
    u.grid().ensure_same(b.grid())?;
    u.grid().ensure_same(u0.grid())?;
    if u.n_t() != b.n_t() {
        return Err(Error::InvalidParameter("u and b have different time grids".into()));
    }
    let t_final = u.t_final();
    let pairs = u
        .slices()
        .par_iter()
        .zip(b.slices())
        .map(|(ui, bi)| nonlinear_forcing(ui, bi, hall))
        .collect::<Result<Vec<_>>>()?;
    let (gu, gb): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let du = duhamel_plain_trajectory(&SpaceTimeField::new(t_final, gu)?, quad_order)?;
    let db = duhamel_plain_trajectory(&SpaceTimeField::new(t_final, gb)?, quad_order)?;
    let assemble = |d: SpaceTimeField, f0: &SpectralField| -> Result<SpaceTimeField> {
        let dt = d.dt();
        let n_t = d.n_t();
        let slices = d
            .into_slices()
            .into_par_iter()
            .enumerate()
            .map(|(i, di)| {
                if i == 0 {
                    return Ok(f0.clone());
                }
                let t = if i + 1 == n_t { t_final } else { i as f64 * dt };
                let mut s = heat_propagate(f0, t)?;
                s.add_assign_scaled(1.0, &di)?;
                s.set_solenoidal_unchecked(f0.is_solenoidal());
                s.check_finite("iterate")?;
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(t_final, slices)
    };
    Ok(MildStep { u: assemble(du, u0)?, b: assemble(db, b0)? })
}

fn product_slices(a: &SpaceTimeField, b: &SpaceTimeField, kind: ProductKind) -> Result<SpaceTimeField> {
    a.grid().ensure_same(b.grid())?;
    if a.n_t() != b.n_t() {
        return Err(Error::InvalidParameter("time grids differ".into()));
    }
    let slices = a
        .slices()
        .par_iter()
        .zip(b.slices())
        .map(|(x, y)| pointwise_product(x, y, kind))
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(a.t_final(), slices)
}

fn check_quad_matches(f: &SpaceTimeField, quad: &TimeGrid) -> Result<()> {
    if f.n_t() != quad.n_steps || (f.t_final() - quad.t_final).abs() > 1e-12 * quad.t_final {
        return Err(Error::InvalidParameter(format!(
            "field has {} slices on [0,{}], time grid has {} on [0,{}]",
            f.n_t(),
            f.t_final(),
            quad.n_steps,
            quad.t_final
        )));
    }
    Ok(())
}

/// Hall operator `T(b1, b2)(t) = -∫_0^t e^{(t-s)Δ} ∇×∇·(b1⊗b2)(s) ds`.
pub fn hall_operator_t(b1: &SpaceTimeField, b2: &SpaceTimeField, t: f64, quad: &TimeGrid) -> Result<SpectralField> {
    check_quad_matches(b1, quad)?;
    let p = product_slices(b1, b2, ProductKind::Tensor)?;
    duhamel(DuhamelKind::Hess, |s| p.interpolate(s), t, quad)
}

/// Velocity right-hand side at time `t`, term by term.
pub fn mild_rhs_u(u: &SpaceTimeField, b: &SpaceTimeField, u0: &SpectralField, t: f64, quad: &TimeGrid) -> Result<SpectralField> {
    check_quad_matches(u, quad)?;
    if u0.ncomp() != 3 {
        return Err(Error::ComponentMismatch { expected: "3".into(), got: u0.ncomp() });
    }
    let d = u0.divergence_residual();
    if d > crate::spectral::field::SOLENOIDAL_TOL {
        return Err(Error::NotSolenoidal(d));
    }
    let uu = product_slices(u, u, ProductKind::Tensor)?;
    let bb = product_slices(b, b, ProductKind::Tensor)?;
    let bsq = product_slices(b, b, ProductKind::Dot)?;
    let mut out = heat_propagate(u0, t)?;
    out.add_assign_scaled(-1.0, &duhamel(DuhamelKind::GradProj, |s| uu.interpolate(s), t, quad)?)?;
    out.add_assign_scaled(1.0, &duhamel(DuhamelKind::GradProj, |s| bb.interpolate(s), t, quad)?)?;
    out.add_assign_scaled(-0.5, &duhamel(DuhamelKind::GradProj, |s| bsq.interpolate(s), t, quad)?)?;
    out.set_solenoidal_unchecked(true);
    Ok(out)
}

/// Magnetic right-hand side at time `t` with Hall coefficient `hall`.
pub fn mild_rhs_b(
    u: &SpaceTimeField,
    b: &SpaceTimeField,
    b0: &SpectralField,
    t: f64,
    quad: &TimeGrid,
    hall: f64,
) -> Result<SpectralField> {
    check_quad_matches(b, quad)?;
    if b0.ncomp() != 3 {
        return Err(Error::ComponentMismatch { expected: "3".into(), got: b0.ncomp() });
    }
    let d = b0.divergence_residual();
    if d > crate::spectral::field::SOLENOIDAL_TOL {
        return Err(Error::NotSolenoidal(d));
    }
    let ub = product_slices(u, b, ProductKind::Cross)?;
    let mut out = heat_propagate(b0, t)?;
    if hall != 0.0 {
        out.add_assign_scaled(hall, &hall_operator_t(b, b, t, quad)?)?;
    }
    out.add_assign_scaled(1.0, &duhamel(DuhamelKind::Curl, |s| ub.interpolate(s), t, quad)?)?;
    out.set_solenoidal_unchecked(true);
    Ok(out)
}

/// Pressure from the divergence of the momentum equation:
/// `p̂ = (ξ·Ŝ_b·ξ - ξ·Ŝ_u·ξ)/|ξ|^2 - (|b|^2)^/2`.
pub fn recover_pressure(u: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let grid = u.grid().clone();
    let f = quadratic_products(u, b)?;
    let len = grid.len();
    let mut p = vec![ZERO; len];
    for (idx, pv) in p.iter_mut().enumerate() {
        let Some(xi) = diff_xi(&grid, idx) else { continue };
        let x2 = grid.xi2(idx);
        if x2 == 0.0 || !grid.is_kept(idx) {
            continue;
        }
        let mut q = ZERO;
        for k in 0..3 {
            for i in 0..3 {
                let s = sym_index(k, i);
                q += (f.bb[s][idx] - f.uu[s][idx]) * (xi[k] * xi[i]);
            }
        }
        *pv = q / x2 - 0.5 * f.bsq[idx];
    }
    Ok(SpectralField::from_parts(&grid, 1, p, false))
}
