//! Weak-form identities tested against `Φ(x, t) = θ(t) ψ(x)` with
//! `θ(t) = cos^2(π t / 2T)`, so `θ(0) = 1` and `θ(T) = θ'(T) = 0`.
//!
//! Velocity:  `-∫∫ u·ΔΦ = ∫∫ u·Φ_t + (u⊗u):∇Φ - (b⊗b):∇Φ + <u0, Φ(0)>`
//!
//! Magnetic:  `-∫∫ b·ΔΦ = ∫∫ b·Φ_t - h ((∇×b)×b)·∇×Φ + (u×b)·∇×Φ + <b0, Φ(0)>`

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::picard::InitialData;
use crate::quadrature::{gauss_on, lagrange_weights, stencil_start};
use crate::spacetime::SpaceTimeField;
use crate::spectral::field::SOLENOIDAL_TOL;
use crate::spectral::{curl, dealias, forward_transform, inverse_transform, jacobian, laplacian, PhysicalField, SpectralField};

const GAUSS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    pub residual_u: f64,
    pub residual_b: f64,
    /// Sums of absolute term values used for normalization.
    pub scale_u: f64,
    pub scale_b: f64,
    /// `max(residual_u / scale_u, residual_b / scale_b)`, 0 for vanishing terms.
    pub normalized: f64,
}

fn theta(t: f64, tf: f64) -> f64 {
    (PI * t / (2.0 * tf)).cos().powi(2)
}

fn theta_dot(t: f64, tf: f64) -> f64 {
    -(PI / (2.0 * tf)) * (PI * t / tf).sin()
}

/// `∫_0^T w(t) g(t) dt` with `g` the cubic Lagrange interpolant of its samples.
fn time_integral(g: &[f64], tf: f64, w: impl Fn(f64) -> f64) -> f64 {
    let n_t = g.len();
    let h = tf / (n_t - 1) as f64;
    let m = n_t.min(4);
    let mut total = 0.0;
    for i in 0..n_t - 1 {
        let s = stencil_start(i, n_t);
        let nodes: Vec<f64> = (s..s + m).map(|j| j as f64 * h).collect();
        for (tau, wq) in gauss_on(GAUSS, i as f64 * h, (i + 1) as f64 * h) {
            let l = lagrange_weights(&nodes, tau);
            let v: f64 = l.iter().enumerate().map(|(k, lk)| lk * g[s + k]).sum();
            total += wq * w(tau) * v;
        }
    }
    total
}

/// Real inner product `∫ f·g dx` from Fourier coefficients.
fn inner(f: &SpectralField, g: &SpectralField) -> f64 {
    let vol = f.grid().volume();
    f.coeffs().iter().zip(g.coeffs()).map(|(a, b)| (a * b.conj()).re).sum::<f64>() * vol
}

fn tensor(pa: &PhysicalField, pb: &PhysicalField) -> Result<SpectralField> {
    let grid = pa.grid().clone();
    let len = grid.len();
    let mut v = vec![0.0; 9 * len];
    for i in 0..3 {
        for j in 0..3 {
            for x in 0..len {
                v[(3 * i + j) * len + x] = pa.component(i)[x] * pb.component(j)[x];
            }
        }
    }
    Ok(dealias(&forward_transform(&PhysicalField::from_values(&grid, 9, v)?)?))
}

fn cross_field(pa: &PhysicalField, pb: &PhysicalField) -> Result<SpectralField> {
    let grid = pa.grid().clone();
    let len = grid.len();
    let (a, b) = (pa.values(), pb.values());
    let mut v = vec![0.0; 3 * len];
    for x in 0..len {
        let (a0, a1, a2) = (a[x], a[len + x], a[2 * len + x]);
        let (b0, b1, b2) = (b[x], b[len + x], b[2 * len + x]);
        v[x] = a1 * b2 - a2 * b1;
        v[len + x] = a2 * b0 - a0 * b2;
        v[2 * len + x] = a0 * b1 - a1 * b0;
    }
    Ok(dealias(&forward_transform(&PhysicalField::from_values(&grid, 3, v)?)?))
}

/// Residuals of both weak identities for one spatial profile `ψ`.
pub fn weak_residual(
    u: &SpaceTimeField,
    b: &SpaceTimeField,
    data: &InitialData,
    psi: &SpectralField,
    hall: f64,
) -> Result<WeakResidual> {
    for f in [b.grid(), data.grid(), psi.grid()] {
        u.grid().ensure_same(f)?;
    }
    if psi.ncomp() != 3 {
        return Err(Error::ComponentMismatch { expected: "3 components for the test field".into(), got: psi.ncomp() });
    }
    let d = psi.divergence_residual();
    if d > SOLENOIDAL_TOL {
        return Err(Error::NotSolenoidal(d));
    }
    if u.n_t() != b.n_t() || (u.t_final() - b.t_final()).abs() > 1e-14 * u.t_final() {
        return Err(Error::InvalidParameter("u and b live on different time grids".into()));
    }
    let tf = u.t_final();
    let lap = laplacian(psi);
    let grad = jacobian(psi)?;
    let rot = curl(psi)?;

    let n_t = u.n_t();
    // per slice: [u·Δψ, u·ψ, (u⊗u):∇ψ, (b⊗b):∇ψ, b·Δψ, b·ψ, ((∇×b)×b)·∇×ψ, (u×b)·∇×ψ]
    let mut series = vec![vec![0.0; n_t]; 8];
    for i in 0..n_t {
        let (us, bs) = (u.slice(i), b.slice(i));
        let pu = inverse_transform(us)?;
        let pb = inverse_transform(bs)?;
        let pj = inverse_transform(&curl(bs)?)?;
        let vals = [
            inner(us, &lap),
            inner(us, psi),
            inner(&tensor(&pu, &pu)?, &grad),
            inner(&tensor(&pb, &pb)?, &grad),
            inner(bs, &lap),
            inner(bs, psi),
            inner(&cross_field(&pj, &pb)?, &rot),
            inner(&cross_field(&pu, &pb)?, &rot),
        ];
        for (s, v) in series.iter_mut().zip(vals) {
            s[i] = v;
        }
    }
    let th = |t| theta(t, tf);
    let thd = |t| theta_dot(t, tf);
    let tu = [
        -time_integral(&series[0], tf, th),
        time_integral(&series[1], tf, thd),
        time_integral(&series[2], tf, th),
        -time_integral(&series[3], tf, th),
        inner(&data.u0, psi),
    ];
    let tb = [
        -time_integral(&series[4], tf, th),
        time_integral(&series[5], tf, thd),
        -hall * time_integral(&series[6], tf, th),
        time_integral(&series[7], tf, th),
        inner(&data.b0, psi),
    ];
    let residual_u = (tu[0] - tu[1..].iter().sum::<f64>()).abs();
    let residual_b = (tb[0] - tb[1..].iter().sum::<f64>()).abs();
    let scale_u: f64 = tu.iter().map(|x| x.abs()).sum();
    let scale_b: f64 = tb.iter().map(|x| x.abs()).sum();
    let norm = |r: f64, s: f64| if s == 0.0 { 0.0 } else { r / s };
    Ok(WeakResidual {
        residual_u,
        residual_b,
        scale_u,
        scale_b,
        normalized: norm(residual_u, scale_u).max(norm(residual_b, scale_b)),
    })
}
