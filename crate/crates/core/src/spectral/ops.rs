//! Spectral differential operators, the Helmholtz projection and dealiased products.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{forward_transform, inverse_transform, PhysicalField, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

type C = Complex64;
const I: C = C { re: 0.0, im: 1.0 };
const ZERO: C = C { re: 0.0, im: 0.0 };

fn need(f: &SpectralField, ncomp: usize) -> Result<()> {
    if f.ncomp() == ncomp {
        Ok(())
    } else {
        Err(Error::ComponentMismatch { expected: ncomp.to_string(), got: f.ncomp() })
    }
}

/// Build a field mode by mode: `op(idx, input, output)`.
pub(crate) fn map_modes<F>(f: &SpectralField, out_ncomp: usize, op: F) -> SpectralField
where
    F: Fn(usize, &[C], &mut [C]) + Sync,
{
    let grid = f.grid();
    let len = grid.len();
    let nin = f.ncomp();
    let src = f.coeffs();
    let per_mode: Vec<[C; 9]> = (0..len)
        .into_par_iter()
        .map(|idx| {
            let mut input = [ZERO; 9];
            for c in 0..nin {
                input[c] = src[c * len + idx];
            }
            let mut out = [ZERO; 9];
            op(idx, &input[..nin], &mut out[..out_ncomp]);
            out
        })
        .collect();
    let mut coeffs = vec![ZERO; out_ncomp * len];
    for (idx, m) in per_mode.iter().enumerate() {
        for c in 0..out_ncomp {
            coeffs[c * len + idx] = m[c];
        }
    }
    SpectralField::from_parts(grid, out_ncomp, coeffs, false)
}

/// Wavevector used for differentiation: zero on Nyquist modes.
#[inline]
pub(crate) fn diff_xi(grid: &Grid, idx: usize) -> Option<[f64; 3]> {
    if grid.is_nyquist(idx) {
        None
    } else {
        Some(grid.xi(idx))
    }
}

pub fn gradient(f: &SpectralField) -> Result<SpectralField> {
    need(f, 1)?;
    let g = f.grid().clone();
    Ok(map_modes(f, 3, |idx, a, out| {
        if let Some(xi) = diff_xi(&g, idx) {
            for d in 0..3 {
                out[d] = I * xi[d] * a[0];
            }
        }
    }))
}

/// Gradient of every component: output component `3*c + d` is `∂_d f_c`.
pub fn jacobian(f: &SpectralField) -> Result<SpectralField> {
    need(f, 3)?;
    let g = f.grid().clone();
    Ok(map_modes(f, 9, |idx, a, out| {
        if let Some(xi) = diff_xi(&g, idx) {
            for c in 0..3 {
                for d in 0..3 {
                    out[3 * c + d] = I * xi[d] * a[c];
                }
            }
        }
    }))
}

pub fn divergence(f: &SpectralField) -> Result<SpectralField> {
    need(f, 3)?;
    let g = f.grid().clone();
    Ok(map_modes(f, 1, |idx, a, out| {
        if let Some(xi) = diff_xi(&g, idx) {
            out[0] = I * (a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2]);
        }
    }))
}

#[inline]
pub(crate) fn cross_c(a: [f64; 3], b: &[C]) -> [C; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn curl(f: &SpectralField) -> Result<SpectralField> {
    need(f, 3)?;
    let g = f.grid().clone();
    let mut out = map_modes(f, 3, |idx, a, out| {
        if let Some(xi) = diff_xi(&g, idx) {
            let c = cross_c(xi, a);
            for d in 0..3 {
                out[d] = I * c[d];
            }
        }
    });
    out.set_solenoidal_unchecked(true);
    Ok(out)
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    let sol = f.is_solenoidal();
    let mut out = map_modes(f, f.ncomp(), |idx, a, out| {
        if !g.is_nyquist(idx) {
            let x2 = g.xi2(idx);
            for (o, v) in out.iter_mut().zip(a) {
                *o = -x2 * v;
            }
        }
    });
    out.set_solenoidal_unchecked(sol);
    out
}

/// Leray projection `û - ξ(ξ·û)/|ξ|^2`; the mean and Nyquist modes are zeroed.
pub fn helmholtz_project(f: &SpectralField) -> Result<SpectralField> {
    need(f, 3)?;
    let g = f.grid().clone();
    let mut out = map_modes(f, 3, |idx, a, out| {
        if let Some(xi) = diff_xi(&g, idx) {
            project_mode(xi, a, out);
        }
    });
    out.set_solenoidal_unchecked(true);
    Ok(out)
}

#[inline]
pub(crate) fn project_mode(xi: [f64; 3], a: &[C], out: &mut [C]) {
    let x2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if x2 == 0.0 {
        out[..3].fill(ZERO);
        return;
    }
    let d = (a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2]) / x2;
    for k in 0..3 {
        out[k] = a[k] - d * xi[k];
    }
}

/// Zero every mode outside the 2/3-rule set.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let g = f.grid().clone();
    let sol = f.is_solenoidal();
    let mut out = map_modes(f, f.ncomp(), |idx, a, out| {
        if g.is_kept(idx) {
            out.copy_from_slice(a);
        }
    });
    out.set_solenoidal_unchecked(sol);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    /// `a_i b_j` at component `i * nb + j`.
    Tensor,
    /// `a × b` for two vector fields.
    Cross,
    /// `Σ_i a_i b_i`.
    Dot,
}

/// Pointwise product in physical space, transformed back and dealiased.
pub fn pointwise_product(a: &SpectralField, b: &SpectralField, kind: ProductKind) -> Result<SpectralField> {
    a.grid().ensure_same(b.grid())?;
    let pa = inverse_transform(a)?;
    let pb = inverse_transform(b)?;
    let p = physical_product(&pa, &pb, kind)?;
    Ok(dealias(&forward_transform(&p)?))
}

pub fn physical_product(pa: &PhysicalField, pb: &PhysicalField, kind: ProductKind) -> Result<PhysicalField> {
    let grid = pa.grid();
    grid.ensure_same(pb.grid())?;
    let len = grid.len();
    let (na, nb) = (pa.ncomp(), pb.ncomp());
    let (va, vb) = (pa.values(), pb.values());
    match kind {
        ProductKind::Tensor => {
            let nc = na * nb;
            if nc != 1 && nc != 3 && nc != 9 {
                return Err(Error::ComponentMismatch { expected: "product with 1, 3 or 9 components".into(), got: nc });
            }
            let mut out = vec![0.0; nc * len];
            for i in 0..na {
                for j in 0..nb {
                    let dst = &mut out[(i * nb + j) * len..(i * nb + j + 1) * len];
                    let (x, y) = (&va[i * len..(i + 1) * len], &vb[j * len..(j + 1) * len]);
                    for k in 0..len {
                        dst[k] = x[k] * y[k];
                    }
                }
            }
            PhysicalField::from_values(grid, nc, out)
        }
        ProductKind::Cross => {
            if na != 3 || nb != 3 {
                return Err(Error::ComponentMismatch { expected: "3 and 3".into(), got: na.max(nb) });
            }
            let mut out = vec![0.0; 3 * len];
            for k in 0..len {
                let x = [va[k], va[len + k], va[2 * len + k]];
                let y = [vb[k], vb[len + k], vb[2 * len + k]];
                out[k] = x[1] * y[2] - x[2] * y[1];
                out[len + k] = x[2] * y[0] - x[0] * y[2];
                out[2 * len + k] = x[0] * y[1] - x[1] * y[0];
            }
            PhysicalField::from_values(grid, 3, out)
        }
        ProductKind::Dot => {
            if na != nb {
                return Err(Error::ComponentMismatch { expected: na.to_string(), got: nb });
            }
            let mut out = vec![0.0; len];
            for c in 0..na {
                for k in 0..len {
                    out[k] += va[c * len + k] * vb[c * len + k];
                }
            }
            PhysicalField::from_values(grid, 1, out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tg(grid: &Grid) -> SpectralField {
        let p = PhysicalField::from_fn(grid, 3, |x, v| {
            v[0] = x[0].sin() * x[1].cos() * x[2].cos();
            v[1] = -x[0].cos() * x[1].sin() * x[2].cos();
            v[2] = 0.0;
        })
        .unwrap();
        forward_transform(&p).unwrap()
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let g = Grid::periodic(8).unwrap();
        let p = PhysicalField::from_fn(&g, 1, |x, v| v[0] = (x[0] + 2.0 * x[1]).sin() * x[2].cos()).unwrap();
        let f = forward_transform(&p).unwrap();
        let c = curl(&gradient(&f).unwrap()).unwrap();
        assert!(c.max_abs() < 1e-14);
    }

    #[test]
    fn projection_idempotent_and_solenoidal() {
        let g = Grid::periodic(8).unwrap();
        let p = PhysicalField::from_fn(&g, 3, |x, v| {
            v[0] = x[0].sin() + x[1].cos();
            v[1] = (2.0 * x[1]).sin();
            v[2] = x[0].cos() * x[2].sin();
        })
        .unwrap();
        let f = forward_transform(&p).unwrap();
        let pf = helmholtz_project(&f).unwrap();
        let ppf = helmholtz_project(&pf).unwrap();
        assert!(pf.sub(&ppf).unwrap().max_abs() < 1e-15);
        assert!(pf.divergence_residual() < 1e-15);
    }

    #[test]
    fn taylor_green_is_divergence_free() {
        let g = Grid::periodic(8).unwrap();
        let u = tg(&g);
        assert!(divergence(&u).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn product_shapes() {
        let g = Grid::periodic(8).unwrap();
        let u = tg(&g);
        assert_eq!(pointwise_product(&u, &u, ProductKind::Tensor).unwrap().ncomp(), 9);
        assert_eq!(pointwise_product(&u, &u, ProductKind::Cross).unwrap().max_abs(), 0.0);
        assert_eq!(pointwise_product(&u, &u, ProductKind::Dot).unwrap().ncomp(), 1);
    }
}
