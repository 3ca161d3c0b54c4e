//! Dyadic Littlewood–Paley profile.
//!
//! `χ` is a smooth step, 1 on `[0, 1]` and 0 on `[2, ∞)`, built from
//! `ψ(x) = e^{-1/x}` and tabulated on `[1, 2]`. The radial bump is
//! `φ̂(r) = χ(r) - χ(2r)`, supported in `(1/2, 2)`, and the dyadic copies
//! `φ̂(2^{-j} r)` telescope to 1 for every `r > 0`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub const TABLE_SIZE: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// Blocks in `|ξ|`.
    IsotropicSpatial,
    /// Parabolic blocks in `|ξ| + |τ|^{1/2}`.
    AnisotropicSpacetime,
}

/// Tabulated profile; cheap to clone, shared table.
#[derive(Clone, Debug)]
pub struct DyadicProfile {
    flavor: Flavor,
    table: &'static [f64],
}

fn psi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Exact smooth step: 0 for `x <= 0`, 1 for `x >= 1`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = psi(x);
        a / (a + psi(1.0 - x))
    }
}

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..TABLE_SIZE)
            .map(|i| 1.0 - smooth_step(i as f64 / (TABLE_SIZE - 1) as f64))
            .collect()
    })
}

impl DyadicProfile {
    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Plateau function `χ(r)` by linear interpolation of the table.
    pub fn chi(&self, r: f64) -> f64 {
        if r <= 1.0 {
            return 1.0;
        }
        if r >= 2.0 {
            return 0.0;
        }
        let x = (r - 1.0) * (TABLE_SIZE - 1) as f64;
        let i = (x.floor() as usize).min(TABLE_SIZE - 2);
        let f = x - i as f64;
        self.table[i] * (1.0 - f) + self.table[i + 1] * f
    }

    /// Radial bump `φ̂(r)`.
    pub fn phi(&self, r: f64) -> f64 {
        self.chi(r) - self.chi(2.0 * r)
    }

    /// Block `j` at radial variable `r` (`|ξ|` or `|ξ| + |τ|^{1/2}`).
    pub fn block(&self, j: i32, r: f64) -> f64 {
        self.phi(r * (-(j as f64)).exp2())
    }

    /// Radial variable for a space-time frequency.
    pub fn radius(&self, xi_abs: f64, omega: f64) -> f64 {
        match self.flavor {
            Flavor::IsotropicSpatial => xi_abs,
            Flavor::AnisotropicSpacetime => xi_abs + omega.abs().sqrt(),
        }
    }

    /// Largest `j` whose shell `(2^{j-1}, 2^{j+1})` contains `r`, and the smallest.
    pub fn blocks_touching(r: f64) -> (i32, i32) {
        let l = r.log2();
        ((l - 1.0).floor() as i32 + 1, (l + 1.0).ceil() as i32 - 1)
    }
}

pub fn build_dyadic_profile(flavor: Flavor) -> DyadicProfile {
    DyadicProfile { flavor, table: table() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_sign() {
        let p = build_dyadic_profile(Flavor::IsotropicSpatial);
        assert_eq!(p.phi(3.0), 0.0);
        assert_eq!(p.phi(0.5), 0.0);
        assert_eq!(p.phi(2.0), 0.0);
        assert_eq!(p.phi(1.0), 1.0);
        for i in 0..10_000 {
            let r = 0.3 + 2.0 * i as f64 / 10_000.0;
            assert!(p.phi(r) >= 0.0);
        }
    }

    #[test]
    fn blocks_touching_brackets() {
        let (lo, hi) = DyadicProfile::blocks_touching(3.0);
        assert_eq!((lo, hi), (1, 2));
        let (lo, hi) = DyadicProfile::blocks_touching(4.0);
        assert_eq!((lo, hi), (2, 2));
    }
}
