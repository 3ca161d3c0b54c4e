//! Brute-force oracles: adaptive Duhamel quadrature and direct convolution.
//!
//! Nothing here calls into the heat or quadrature modules.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::heat::DuhamelKind;
use crate::spectral::{Grid, SpectralField};

const MAX_DEPTH: usize = 48;

/// Spatial multiplier of `kind` for one mode, written out independently.
fn multiplier(kind: DuhamelKind, grid: &Grid, idx: usize, a: &[C]) -> [C; 3] {
    let zero = C::new(0.0, 0.0);
    let i = C::new(0.0, 1.0);
    if kind == DuhamelKind::Plain {
        return [a[0], a[1], a[2]];
    }
    if !grid.is_kept(idx) || grid.k2(idx) == 0 {
        return [zero; 3];
    }
    let xi = grid.xi(idx);
    let x2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let div_t = |a: &[C]| -> [C; 3] {
        let mut v = [zero; 3];
        for (c, vc) in v.iter_mut().enumerate() {
            for d in 0..3 {
                *vc += a[3 * d + c] * xi[d];
            }
        }
        v
    };
    let cross = |x: [f64; 3], y: [C; 3]| [y[2] * x[1] - y[1] * x[2], y[0] * x[2] - y[2] * x[0], y[1] * x[0] - y[0] * x[1]];
    match kind {
        DuhamelKind::Plain => unreachable!(),
        DuhamelKind::Grad | DuhamelKind::GradProj => {
            let v = if a.len() == 1 { [a[0] * xi[0], a[0] * xi[1], a[0] * xi[2]] } else { div_t(a) };
            let mut v = [v[0] * i, v[1] * i, v[2] * i];
            if kind == DuhamelKind::GradProj {
                let dot = (v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]) / x2;
                for (c, vc) in v.iter_mut().enumerate() {
                    *vc -= dot * xi[c];
                }
            }
            v
        }
        DuhamelKind::Hess => cross(xi, div_t(a)),
        DuhamelKind::Curl => {
            let c = cross(xi, [a[0], a[1], a[2]]);
            [c[0] * i, c[1] * i, c[2] * i]
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: Vec<C>,
    fm: Vec<C>,
    fb: Vec<C>,
    whole: Vec<C>,
    depth: usize,
}

fn simpson(h: f64, fa: &[C], fm: &[C], fb: &[C]) -> Vec<C> {
    fa.iter().zip(fm).zip(fb).map(|((x, y), z)| (x + y * 4.0 + z) * (h / 6.0)).collect()
}

/// `∫_0^t M e^{(t-s)Δ} F(s) ds` by adaptive interval bisection.
///
/// Each panel is split until its two halves agree with the whole within a
/// share of `tol` proportional to its length (max norm over coefficients).
pub fn brute_duhamel<F>(kind: DuhamelKind, forcing: F, t: f64, tol: f64) -> Result<SpectralField>
where
    F: Fn(f64) -> Result<SpectralField>,
{
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let f0 = forcing(0.0)?;
    if !kind.accepts(f0.ncomp()) {
        return Err(Error::ComponentMismatch { expected: format!("forcing shape for {kind:?}"), got: f0.ncomp() });
    }
    let grid = f0.grid().clone();
    let len = grid.len();
    let nc = f0.ncomp();
    let mut total = vec![C::new(0.0, 0.0); nc * len];
    if t > 0.0 {
        let lam: Vec<f64> = (0..len).map(|i| grid.xi2(i)).collect();
        let eval = |s: f64| -> Result<Vec<C>> {
            let f = if s == 0.0 { f0.clone() } else { forcing(s)? };
            grid.ensure_same(f.grid())?;
            f.check_finite("forcing")?;
            Ok(f.coeffs().iter().enumerate().map(|(j, c)| c * (-lam[j % len] * (t - s)).exp()).collect())
        };
        let fa = eval(0.0)?;
        let fm = eval(0.5 * t)?;
        let fb = eval(t)?;
        let whole = simpson(t, &fa, &fm, &fb);
        let mut stack = vec![Panel { a: 0.0, b: t, fa, fm, fb, whole, depth: 0 }];
        while let Some(p) = stack.pop() {
            let m = 0.5 * (p.a + p.b);
            let flm = eval(0.5 * (p.a + m))?;
            let frm = eval(0.5 * (m + p.b))?;
            let h = 0.5 * (p.b - p.a);
            let left = simpson(h, &p.fa, &flm, &p.fm);
            let right = simpson(h, &p.fm, &frm, &p.fb);
            let err = left.iter().zip(&right).zip(&p.whole).map(|((l, r), w)| (l + r - w).norm()).fold(0.0, f64::max) / 15.0;
            let share = tol * (p.b - p.a) / t;
            if err <= share {
                for ((o, l), (r, w)) in total.iter_mut().zip(&left).zip(right.iter().zip(&p.whole)) {
                    *o += l + r + (l + r - w) / 15.0;
                }
                continue;
            }
            if p.depth >= MAX_DEPTH {
                return Err(Error::ToleranceNotReached { tol, estimate: err });
            }
            stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm.clone(), whole: left, depth: p.depth + 1 });
            stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, depth: p.depth + 1 });
        }
    }
    let mut out = vec![C::new(0.0, 0.0); 3 * len];
    for idx in 0..len {
        let a: Vec<C> = (0..nc).map(|c| total[c * len + idx]).collect();
        let v = multiplier(kind, &grid, idx, &a);
        for c in 0..3 {
            out[c * len + idx] = v[c];
        }
    }
    SpectralField::from_coeffs(&grid, 3, out)
}

/// Fourier coefficients of `a_i b_j` by direct convolution over all mode pairs,
/// truncated to the kept modes. Quadratic cost; meant for `n ≤ 8`.
pub fn brute_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.grid().ensure_same(b.grid())?;
    let grid = a.grid().clone();
    let len = grid.len();
    if grid.n() > 16 {
        return Err(Error::InvalidParameter(format!("brute_product is limited to n <= 16, got {}", grid.n())));
    }
    let (na, nb) = (a.ncomp(), b.ncomp());
    let mut out = vec![C::new(0.0, 0.0); na * nb * len];
    for p in 0..len {
        let kp = grid.k(p);
        for q in 0..len {
            let kq = grid.k(q);
            let ks = [(kp[0] + kq[0]) as i64, (kp[1] + kq[1]) as i64, (kp[2] + kq[2]) as i64];
            let half = grid.n() as i64 / 2;
            if ks.iter().any(|&k| k < -half || k >= half) {
                continue;
            }
            let r = grid.index_of(ks);
            if !grid.is_kept(r) {
                continue;
            }
            for i in 0..na {
                let x = a.coeffs()[i * len + p];
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..nb {
                    out[(i * nb + j) * len + r] += x * b.coeffs()[j * len + q];
                }
            }
        }
    }
    SpectralField::from_coeffs(&grid, na * nb, out)
}
