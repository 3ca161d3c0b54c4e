//! Box-size study: a bump of fixed physical width on boxes `m L`, `m = 1, 2, 4, ...`,
//! at fixed grid spacing, compared on the central `L`-cube at `t = T`.

use serde::{Deserialize, Serialize};

use super::{run, InitialData, SolverConfig, Verdict};
use crate::error::{Error, Result};
use crate::spectral::{inverse_transform, PhysicalField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxEntry {
    pub factor: usize,
    pub box_length: f64,
    pub n: usize,
    pub verdict: Verdict,
    pub iterations: usize,
    pub rho_bar: Option<f64>,
    /// `max |u(T)|, max |b(T)|` over the central cube.
    pub u_max: f64,
    pub b_max: f64,
    /// Relative max difference of `(u, b)(T)` on the central cube against the
    /// previous factor; empty for the first.
    pub change: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxStudy {
    pub sigma: f64,
    pub amplitude: f64,
    pub entries: Vec<BoxEntry>,
    /// Every run converged and the changes do not grow.
    pub stabilizing: bool,
}

/// Values of `f` on the `n³` points of the central cube of its grid.
fn central(f: &PhysicalField, n: usize) -> Vec<f64> {
    let big = f.grid().n();
    let off = (big - n) / 2;
    let mut out = Vec::with_capacity(f.ncomp() * n * n * n);
    for c in 0..f.ncomp() {
        let v = f.component(c);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    out.push(v[f.grid().index(off + i, off + j, off + l)]);
                }
            }
        }
    }
    out
}

/// Runs the study for increasing integer `factors` (the first is the base box
/// of `cfg`); the bump width is `cfg.box_length / 10`.
pub fn box_size_study(cfg: &SolverConfig, amplitude: f64, factors: &[usize]) -> Result<BoxStudy> {
    cfg.validate()?;
    if factors.is_empty() || factors.windows(2).any(|w| w[1] <= w[0]) || factors[0] == 0 {
        return Err(Error::InvalidParameter(format!("box factors must be positive and increasing, got {factors:?}")));
    }
    let sigma = cfg.box_length / 10.0;
    let mut entries: Vec<BoxEntry> = Vec::new();
    let mut prev: Option<(Vec<f64>, f64)> = None;
    for &m in factors {
        let c = SolverConfig { n: cfg.n * m, box_length: cfg.box_length * m as f64, ..cfg.clone() };
        let grid = c.grid()?;
        let data = InitialData::localized(&grid, sigma, amplitude)?;
        let r = run(&c, &data)?;
        let u = inverse_transform(r.u.last())?;
        let b = inverse_transform(r.b.last())?;
        let (cu, cb) = (central(&u, cfg.n), central(&b, cfg.n));
        let max = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let both: Vec<f64> = cu.iter().chain(&cb).copied().collect();
        let scale = max(&both);
        let change = prev.as_ref().map(|(p, s)| {
            let d = both.iter().zip(p).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            d / s.max(scale).max(f64::MIN_POSITIVE)
        });
        entries.push(BoxEntry {
            factor: m,
            box_length: c.box_length,
            n: c.n,
            verdict: r.verdict,
            iterations: r.iterations(),
            rho_bar: r.trace.rho_bar(),
            u_max: max(&cu),
            b_max: max(&cb),
            change,
        });
        prev = Some((both, scale));
    }
    let changes: Vec<f64> = entries.iter().filter_map(|e| e.change).collect();
    let stabilizing =
        entries.iter().all(|e| e.verdict == Verdict::Converged) && changes.windows(2).all(|w| w[1] <= w[0]);
    Ok(BoxStudy { sigma, amplitude, entries, stabilizing })
}
