//! Reflection extension to negative times,
//! `Ef(x, -t) = Σ_{j=1}^{k+1} λ_j f(x, j t)` with `Σ_j (-j)^l λ_j = 1` for `l ≤ k`.

use crate::error::{Error, Result};
use crate::spacetime::SpaceTimeField;
use crate::spectral::SpectralField;

/// Solves the `(k+1)×(k+1)` Vandermonde system for `λ_1..λ_{k+1}`.
pub fn extension_coefficients(k: usize) -> Result<Vec<f64>> {
    let m = k + 1;
    let mut a = vec![vec![0.0f64; m + 1]; m];
    for (l, row) in a.iter_mut().enumerate() {
        for j in 0..m {
            row[j] = (-((j + 1) as f64)).powi(l as i32);
        }
        row[m] = 1.0;
    }
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::SingularExtension(k));
        }
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
    if lambda.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularExtension(k));
    }
    Ok(lambda)
}

/// Extension of a scalar function of time given on `[0, ∞)`.
pub fn extend_fn<F: Fn(f64) -> f64>(f: &F, lambda: &[f64], t: f64) -> f64 {
    if t >= 0.0 {
        f(t)
    } else {
        lambda.iter().enumerate().map(|(j, l)| l * f(-(j as f64 + 1.0) * t)).sum()
    }
}

/// Samples of `Ef` on the uniform grid `t_i = t_start + i·dt`, `t_start ≤ 0`.
#[derive(Clone, Debug)]
pub struct ExtendedField {
    pub t_start: f64,
    pub dt: f64,
    pub lambda: Vec<f64>,
    pub slices: Vec<SpectralField>,
}

impl ExtendedField {
    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.dt
    }

    pub fn n_samples(&self) -> usize {
        self.slices.len()
    }

    /// Number of samples before `t = 0`.
    pub fn pad(&self) -> usize {
        (-self.t_start / self.dt).round() as usize
    }
}

/// Negative-time pad length usable with order `k` on `n_t` samples.
pub fn pad_len(n_t: usize, k: usize) -> usize {
    (n_t - 1) / (k + 1)
}

/// Extends `f` to `[-P dt, T]` with `P = ⌊(n_t - 1)/(k + 1)⌋`, i.e. roughly `[-T/(k+1), T]`,
/// the largest range where every reflected sample `f(j·t)` lies on the time grid.
pub fn extension_operator(f: &SpaceTimeField, k: usize) -> Result<ExtendedField> {
    let lambda = extension_coefficients(k)?;
    let n_t = f.n_t();
    let p = pad_len(n_t, k);
    let mut slices = Vec::with_capacity(p + n_t);
    for i in (1..=p).rev() {
        let mut acc = SpectralField::zeros(f.grid(), f.ncomp())?;
        for (j, l) in lambda.iter().enumerate() {
            acc.add_assign_scaled(*l, f.slice((j + 1) * i))?;
        }
        slices.push(acc);
    }
    slices.extend(f.slices().iter().cloned());
    Ok(ExtendedField { t_start: -(p as f64) * f.dt(), dt: f.dt(), lambda, slices })
}
