//! Spectral and physical fields with 1 (scalar), 3 (vector) or 9 (tensor) components.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

use super::fft::fft3;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::reduce::{par_max, par_sum};

pub type C = Complex64;

/// Relative imaginary residue above which a field is rejected as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Scaled divergence allowed for fields flagged solenoidal.
pub const SOLENOIDAL_TOL: f64 = 1e-10;

fn check_ncomp(ncomp: usize) -> Result<()> {
    if matches!(ncomp, 1 | 3 | 9) {
        Ok(())
    } else {
        Err(Error::ComponentMismatch { expected: "1, 3 or 9".into(), got: ncomp })
    }
}

/// Fourier coefficients `c_k` with `f(x) = Σ_k c_k e^{iξ·x}`, component-major.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    ncomp: usize,
    coeffs: Vec<C>,
    solenoidal: bool,
}

/// Real samples at the grid points, component-major.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: Grid,
    ncomp: usize,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(grid: &Grid, ncomp: usize) -> Result<Self> {
        check_ncomp(ncomp)?;
        Ok(PhysicalField { grid: grid.clone(), ncomp, values: vec![0.0; ncomp * grid.len()] })
    }

    pub fn from_values(grid: &Grid, ncomp: usize, values: Vec<f64>) -> Result<Self> {
        check_ncomp(ncomp)?;
        if values.len() != ncomp * grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                ncomp * grid.len(),
                values.len()
            )));
        }
        Ok(PhysicalField { grid: grid.clone(), ncomp, values })
    }

    /// Sample `f(x)` at every grid point; `f` writes `ncomp` values.
    pub fn from_fn<F>(grid: &Grid, ncomp: usize, f: F) -> Result<Self>
    where
        F: Fn([f64; 3], &mut [f64]) + Sync,
    {
        check_ncomp(ncomp)?;
        let len = grid.len();
        let pts: Vec<Vec<f64>> = (0..len)
            .into_par_iter()
            .map(|idx| {
                let mut v = vec![0.0; ncomp];
                f(grid.point(idx), &mut v);
                v
            })
            .collect();
        let mut values = vec![0.0; ncomp * len];
        for (idx, v) in pts.iter().enumerate() {
            for c in 0..ncomp {
                values[c * len + idx] = v[c];
            }
        }
        Ok(PhysicalField { grid: grid.clone(), ncomp, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.values[c * len..(c + 1) * len]
    }

    /// Euclidean magnitude of the components at point `idx`.
    pub fn magnitude_at(&self, idx: usize) -> f64 {
        let len = self.grid.len();
        let mut s = 0.0;
        for c in 0..self.ncomp {
            let v = self.values[c * len + idx];
            s += v * v;
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        par_max(self.grid.len(), |i| self.magnitude_at(i))
    }

    /// `L^p` norm of the pointwise Euclidean magnitude; `p = ∞` gives the max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let s = par_sum(self.grid.len(), |i| self.magnitude_at(i).powf(p));
        (s * self.grid.cell_volume()).powf(1.0 / p)
    }
}

impl SpectralField {
    pub fn zeros(grid: &Grid, ncomp: usize) -> Result<Self> {
        check_ncomp(ncomp)?;
        Ok(SpectralField { grid: grid.clone(), ncomp, coeffs: vec![C::new(0.0, 0.0); ncomp * grid.len()], solenoidal: ncomp == 3 })
    }

    /// Wrap raw coefficients, checking finiteness and Hermitian symmetry.
    pub fn from_coeffs(grid: &Grid, ncomp: usize, coeffs: Vec<C>) -> Result<Self> {
        check_ncomp(ncomp)?;
        if coeffs.len() != ncomp * grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                ncomp * grid.len(),
                coeffs.len()
            )));
        }
        let f = SpectralField { grid: grid.clone(), ncomp, coeffs, solenoidal: false };
        f.check_finite("coefficients")?;
        let r = f.hermitian_residual();
        if r > HERMITIAN_TOL {
            return Err(Error::Hermitian { residue: r });
        }
        Ok(f)
    }

    pub(crate) fn from_parts(grid: &Grid, ncomp: usize, coeffs: Vec<C>, solenoidal: bool) -> Self {
        debug_assert_eq!(coeffs.len(), ncomp * grid.len());
        SpectralField { grid: grid.clone(), ncomp, coeffs, solenoidal }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Mutable access; clears the solenoidal flag.
    pub fn coeffs_mut(&mut self) -> &mut [C] {
        self.solenoidal = false;
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[C] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub fn is_solenoidal(&self) -> bool {
        self.solenoidal
    }

    /// Set the solenoidal flag after checking the divergence.
    pub fn mark_solenoidal(&mut self) -> Result<()> {
        if self.ncomp != 3 {
            return Err(Error::ComponentMismatch { expected: "3".into(), got: self.ncomp });
        }
        let d = self.divergence_unscaled();
        if d > SOLENOIDAL_TOL {
            return Err(Error::NotSolenoidal(d));
        }
        self.solenoidal = true;
        Ok(())
    }

    pub(crate) fn set_solenoidal_unchecked(&mut self, flag: bool) {
        self.solenoidal = flag;
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        if self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }

    pub fn max_abs(&self) -> f64 {
        par_max(self.coeffs.len(), |i| self.coeffs[i].norm())
    }

    /// `max_k |c(-k) - conj(c(k))|` relative to the largest coefficient.
    pub fn hermitian_residual(&self) -> f64 {
        let len = self.grid.len();
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let r = par_max(self.coeffs.len(), |i| {
            let c = i / len;
            let idx = i % len;
            let j = c * len + self.grid.conj_index(idx);
            (self.coeffs[j] - self.coeffs[i].conj()).norm()
        });
        r / scale
    }

    /// `max_k |ξ·û(k)| / max|û|`; zero for the zero field.
    pub fn divergence_unscaled(&self) -> f64 {
        if self.ncomp != 3 {
            return f64::INFINITY;
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        self.divergence_residual() * self.grid.dk() * self.grid.n() as f64
    }

    /// `max_k |ξ·û(k)| / (max|ξ| max|û|)` with `max|ξ| ≈ 2πn/L`; zero for the zero field.
    pub fn divergence_residual(&self) -> f64 {
        if self.ncomp != 3 {
            return f64::INFINITY;
        }
        let len = self.grid.len();
        let scale = self.max_abs() * self.grid.dk() * self.grid.n() as f64;
        if scale == 0.0 {
            return 0.0;
        }
        let m = par_max(len, |idx| {
            let xi = self.grid.xi(idx);
            let d = self.coeffs[idx] * xi[0] + self.coeffs[len + idx] * xi[1] + self.coeffs[2 * len + idx] * xi[2];
            d.norm()
        });
        m / scale
    }

    /// Squared `L^2` norm by Parseval: `L^3 Σ|c_k|^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        par_sum(self.coeffs.len(), |i| self.coeffs[i].norm_sqr()) * self.grid.volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `L^2` inner product `∫ f·g dx` of two real fields.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        if self.ncomp != other.ncomp {
            return Err(Error::ComponentMismatch { expected: self.ncomp.to_string(), got: other.ncomp });
        }
        let s = par_sum(self.coeffs.len(), |i| (self.coeffs[i] * other.coeffs[i].conj()).re);
        Ok(s * self.grid.volume())
    }

    fn same_shape(&self, other: &SpectralField) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.ncomp != other.ncomp {
            return Err(Error::ComponentMismatch { expected: self.ncomp.to_string(), got: other.ncomp });
        }
        Ok(())
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralField) -> Result<SpectralField> {
        self.same_shape(other)?;
        let coeffs = self.coeffs.par_iter().zip(&other.coeffs).map(|(x, y)| x + y * a).collect();
        Ok(SpectralField::from_parts(&self.grid, self.ncomp, coeffs, self.solenoidal && other.solenoidal))
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(-1.0, other)
    }

    pub fn add_assign_scaled(&mut self, a: f64, other: &SpectralField) -> Result<()> {
        self.same_shape(other)?;
        let keep = self.solenoidal && other.solenoidal;
        self.coeffs.par_iter_mut().zip(&other.coeffs).for_each(|(x, y)| *x += y * a);
        self.solenoidal = keep;
        Ok(())
    }

    pub fn scale(&self, a: f64) -> SpectralField {
        let coeffs = self.coeffs.par_iter().map(|x| x * a).collect();
        SpectralField::from_parts(&self.grid, self.ncomp, coeffs, self.solenoidal)
    }

    /// Components `range` as a new field (e.g. one component of a vector).
    pub fn components(&self, start: usize, count: usize) -> Result<SpectralField> {
        if start + count > self.ncomp {
            return Err(Error::InvalidParameter("component range out of bounds".into()));
        }
        check_ncomp(count)?;
        let len = self.grid.len();
        Ok(SpectralField::from_parts(&self.grid, count, self.coeffs[start * len..(start + count) * len].to_vec(), false))
    }

    /// Stack components of several fields.
    pub fn stack(parts: &[&SpectralField]) -> Result<SpectralField> {
        let grid = parts.first().ok_or_else(|| Error::InvalidParameter("empty stack".into()))?.grid.clone();
        let mut coeffs = Vec::new();
        let mut ncomp = 0;
        for p in parts {
            grid.ensure_same(&p.grid)?;
            coeffs.extend_from_slice(&p.coeffs);
            ncomp += p.ncomp;
        }
        check_ncomp(ncomp)?;
        Ok(SpectralField::from_parts(&grid, ncomp, coeffs, false))
    }
}

/// Physical samples to Fourier coefficients (`c = N^{-3} Σ f e^{-iξ·x}`).
pub fn forward_transform(f: &PhysicalField) -> Result<SpectralField> {
    if f.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("physical field".into()));
    }
    let grid = &f.grid;
    let len = grid.len();
    let n = grid.n();
    let norm = 1.0 / len as f64;
    let mut coeffs: Vec<C> = f.values.iter().map(|&v| C::new(v * norm, 0.0)).collect();
    coeffs.par_chunks_mut(len).for_each(|chunk| fft3(chunk, n, FftDirection::Forward));
    Ok(SpectralField::from_parts(grid, f.ncomp, coeffs, false))
}

/// Fourier coefficients to physical samples; rejects non-Hermitian input.
pub fn inverse_transform(f: &SpectralField) -> Result<PhysicalField> {
    f.check_finite("spectral field")?;
    let (values, residue) = inverse_raw(f);
    if residue > HERMITIAN_TOL {
        return Err(Error::Hermitian { residue });
    }
    Ok(PhysicalField { grid: f.grid.clone(), ncomp: f.ncomp, values })
}

/// Inverse transform returning real parts and the relative imaginary residue.
pub(crate) fn inverse_raw(f: &SpectralField) -> (Vec<f64>, f64) {
    let len = f.grid.len();
    let n = f.grid.n();
    let mut buf = f.coeffs.clone();
    buf.par_chunks_mut(len).for_each(|chunk| fft3(chunk, n, FftDirection::Inverse));
    let mut re_max = 0.0_f64;
    let mut im_max = 0.0_f64;
    for z in &buf {
        re_max = re_max.max(z.re.abs());
        im_max = im_max.max(z.im.abs());
    }
    let residue = if im_max == 0.0 { 0.0 } else { im_max / re_max.max(f64::MIN_POSITIVE) };
    (buf.into_iter().map(|z| z.re).collect(), residue)
}

/// Largest relative imaginary part left by the inverse transform.
pub fn reality_residual(f: &SpectralField) -> f64 {
    inverse_raw(f).1
}
