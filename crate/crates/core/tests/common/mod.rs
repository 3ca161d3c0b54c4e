#![allow(dead_code)]

use hallmild::spectral::{helmholtz_project, Grid, SpectralField};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random real field with modes `|k|^2 <= kmax2`, excluding the mean.
pub fn random_modes(grid: &Grid, ncomp: usize, kmax2: i64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = grid.len();
    let kmax = (kmax2 as f64).sqrt() as i64;
    let mut coeffs = vec![C::new(0.0, 0.0); ncomp * len];
    for c in 0..ncomp {
        for a in -kmax..=kmax {
            for b in -kmax..=kmax {
                for d in -kmax..=kmax {
                    let k2 = a * a + b * b + d * d;
                    if k2 == 0 || k2 > kmax2 {
                        continue;
                    }
                    let idx = grid.index_of([a, b, d]);
                    let cj = grid.index_of([-a, -b, -d]);
                    if idx > cj {
                        continue;
                    }
                    let z = C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    coeffs[c * len + idx] = z;
                    coeffs[c * len + cj] = z.conj();
                }
            }
        }
    }
    SpectralField::from_coeffs(grid, ncomp, coeffs).unwrap()
}

pub fn random_solenoidal(grid: &Grid, kmax2: i64, seed: u64) -> SpectralField {
    helmholtz_project(&random_modes(grid, 3, kmax2, seed)).unwrap()
}

/// Adaptive Simpson with Richardson correction on a vector-valued integrand.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Vec<C>
where
    F: Fn(f64) -> Vec<C>,
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, &fa, &fm, &fb);
    recurse(f, a, b, &fa, &fm, &fb, &whole, tol, 0)
}

fn simpson(a: f64, b: f64, fa: &[C], fm: &[C], fb: &[C]) -> Vec<C> {
    let h = (b - a) / 6.0;
    fa.iter().zip(fm).zip(fb).map(|((x, y), z)| (x + y * 4.0 + z) * h).collect()
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(f: &F, a: f64, b: f64, fa: &[C], fm: &[C], fb: &[C], whole: &[C], tol: f64, depth: usize) -> Vec<C>
where
    F: Fn(f64) -> Vec<C>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, &flm, fm);
    let right = simpson(m, b, fm, &frm, fb);
    let err = left.iter().zip(&right).zip(whole).map(|((l, r), w)| (l + r - w).norm()).fold(0.0, f64::max);
    if depth > 40 || err <= 15.0 * tol {
        return left.iter().zip(&right).zip(whole).map(|((l, r), w)| l + r + (l + r - w) / 15.0).collect();
    }
    let mut out = recurse(f, a, m, fa, &flm, fm, &left, tol / 2.0, depth + 1);
    let r = recurse(f, m, b, fm, &frm, fb, &right, tol / 2.0, depth + 1);
    for (o, v) in out.iter_mut().zip(r) {
        *o += v;
    }
    out
}

/// Truncated spectral convolution `(x * y)` onto the 2/3-rule modes.
pub fn convolve(grid: &Grid, x: &[C], y: &[C]) -> Vec<C> {
    let len = grid.len();
    let nx: Vec<usize> = (0..len).filter(|&i| x[i].norm() > 0.0).collect();
    let ny: Vec<usize> = (0..len).filter(|&i| y[i].norm() > 0.0).collect();
    let mut out = vec![C::new(0.0, 0.0); len];
    for &i in &nx {
        for &j in &ny {
            let (ki, kj) = (grid.k(i), grid.k(j));
            let k = [(ki[0] + kj[0]) as i64, (ki[1] + kj[1]) as i64, (ki[2] + kj[2]) as i64];
            let idx = grid.index_of(k);
            if grid.is_kept(idx) {
                out[idx] += x[i] * y[j];
            }
        }
    }
    out
}

pub fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
