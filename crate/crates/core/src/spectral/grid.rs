//! Periodic cubic grid and its wavenumber tables.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Per-mode lookup tables, shared between clones of a [`Grid`].
#[derive(Debug)]
struct Modes {
    /// Integer wavenumber of each storage index.
    k: Vec<[i32; 3]>,
    /// Angular wavenumber 2πk/L.
    xi: Vec<[f64; 3]>,
    /// |k|² as an integer.
    k2: Vec<u32>,
    /// Mode kept by the 2/3 rule (and not a Nyquist mode).
    kept: Vec<bool>,
    /// Mode has a Nyquist index on some axis.
    nyquist: Vec<bool>,
    /// Storage index of -k.
    conj: Vec<u32>,
}

/// Cubic grid with `n` points per axis on the torus `[0, L)^3`.
///
/// Storage is row-major over FFT indices `(i, j, l)`: `idx = (i*n + j)*n + l`.
/// Index `j < n/2` carries wavenumber `j`, index `j > n/2` carries `j - n`,
/// and `j = n/2` is the Nyquist index (wavenumber `-n/2`).
#[derive(Clone)]
pub struct Grid {
    n: usize,
    box_length: f64,
    modes: Arc<Modes>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid(n={}, L={})", self.n, self.box_length)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^3 on L={}", self.n, self.box_length)
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.box_length.to_bits() == other.box_length.to_bits()
    }
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n must be a power of two >= 4, got {n}")));
        }
        if n > 512 {
            return Err(Error::InvalidGrid(format!("n = {n} is too large")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {box_length}")));
        }
        let dk = 2.0 * PI / box_length;
        let len = n * n * n;
        let mut m = Modes {
            k: Vec::with_capacity(len),
            xi: Vec::with_capacity(len),
            k2: Vec::with_capacity(len),
            kept: Vec::with_capacity(len),
            nyquist: Vec::with_capacity(len),
            conj: Vec::with_capacity(len),
        };
        let half = n / 2;
        let cut2 = (n * n) as f64 / 9.0;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let k = [wavenumber(i, n), wavenumber(j, n), wavenumber(l, n)];
                    let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as u32;
                    let nyq = i == half || j == half || l == half;
                    m.k.push(k);
                    m.xi.push([dk * k[0] as f64, dk * k[1] as f64, dk * k[2] as f64]);
                    m.k2.push(k2);
                    m.nyquist.push(nyq);
                    m.kept.push(!nyq && (k2 as f64) < cut2);
                    let c = |a: usize| (n - a) % n;
                    m.conj.push(((c(i) * n + c(j)) * n + c(l)) as u32);
                }
            }
        }
        Ok(Grid { n, box_length, modes: Arc::new(m) })
    }

    /// Default torus `[0, 2π)^3`.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Number of modes, `n^3`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    pub fn cell_volume(&self) -> f64 {
        (self.box_length / self.n as f64).powi(3)
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Lowest nonzero angular wavenumber `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Largest angular wavenumber kept by the 2/3 rule, `(2π/L) n/3`.
    pub fn xi_cut(&self) -> f64 {
        self.dk() * self.n as f64 / 3.0
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n + j) * self.n + l
    }

    /// Storage index of integer wavenumber `k` (components taken mod n).
    pub fn index_of(&self, k: [i64; 3]) -> usize {
        let n = self.n as i64;
        let w = |a: i64| a.rem_euclid(n) as usize;
        self.index(w(k[0]), w(k[1]), w(k[2]))
    }

    pub fn k(&self, idx: usize) -> [i32; 3] {
        self.modes.k[idx]
    }

    pub fn xi(&self, idx: usize) -> [f64; 3] {
        self.modes.xi[idx]
    }

    pub fn k2(&self, idx: usize) -> u32 {
        self.modes.k2[idx]
    }

    /// `|ξ|^2`.
    pub fn xi2(&self, idx: usize) -> f64 {
        let dk = self.dk();
        dk * dk * self.modes.k2[idx] as f64
    }

    pub fn xi_abs(&self, idx: usize) -> f64 {
        self.xi2(idx).sqrt()
    }

    pub fn is_kept(&self, idx: usize) -> bool {
        self.modes.kept[idx]
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.modes.nyquist[idx]
    }

    pub fn conj_index(&self, idx: usize) -> usize {
        self.modes.conj[idx] as usize
    }

    /// Largest `|k|^2` over all storage indices.
    pub fn max_k2(&self) -> u32 {
        3 * (self.n as u32 / 2).pow(2)
    }

    /// Largest `|ξ|^2` over the modes kept by the 2/3 rule.
    pub fn max_kept_xi2(&self) -> f64 {
        let m = (0..self.len())
            .filter(|&i| self.modes.kept[i])
            .map(|i| self.modes.k2[i])
            .max()
            .unwrap_or(0);
        self.dk() * self.dk() * m as f64
    }

    /// Physical coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let h = self.spacing();
        let l = idx % n;
        let j = (idx / n) % n;
        let i = idx / (n * n);
        [i as f64 * h, j as f64 * h, l as f64 * h]
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

fn wavenumber(j: usize, n: usize) -> i32 {
    if j <= n / 2 - 1 {
        j as i32
    } else {
        j as i32 - n as i32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_layout() {
        let g = Grid::periodic(8).unwrap();
        assert_eq!(g.k(g.index(0, 0, 3)), [0, 0, 3]);
        assert_eq!(g.k(g.index(0, 0, 4)), [0, 0, -4]);
        assert_eq!(g.k(g.index(7, 0, 5)), [-1, 0, -3]);
        assert!(g.is_nyquist(g.index(4, 1, 1)));
        assert_eq!(g.index_of([-1, 2, -3]), g.index(7, 2, 5));
        for idx in 0..g.len() {
            let k = g.k(idx);
            if !g.is_nyquist(idx) {
                let c = g.conj_index(idx);
                let kc = g.k(c);
                assert_eq!([kc[0], kc[1], kc[2]], [-k[0], -k[1], -k[2]]);
            }
        }
    }

    #[test]
    fn two_thirds_rule() {
        let g = Grid::periodic(16).unwrap();
        // (n/3)^2 = 28.4
        assert!(g.is_kept(g.index_of([5, 0, 0])));
        assert!(!g.is_kept(g.index_of([5, 2, 0])));
        assert!(g.is_kept(g.index_of([3, 3, 3])));
        assert!(g.is_kept(g.index_of([0, 0, 0])));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::periodic(7).is_err());
        assert!(Grid::periodic(12).is_err());
        assert!(Grid::periodic(2).is_err());
        assert!(Grid::new(8, -1.0).is_err());
        assert!(Grid::new(8, f64::NAN).is_err());
    }
}
