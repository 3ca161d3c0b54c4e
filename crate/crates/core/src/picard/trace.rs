use serde::{Deserialize, Serialize};

use super::SolverConfig;
use crate::besov::{anisotropic_block_norms, spatial_block_norms, BlockNorms};
use crate::error::Result;
use crate::spacetime::SpaceTimeField;
use crate::spectral::SpectralField;

/// One row of the iteration table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub m: usize,
    /// `‖u^m‖` in `B^{5/p-1, 5/2p-1/2}_{p,5}`.
    pub u_crit: f64,
    pub b_crit: f64,
    /// `‖b^m‖` in `B^{5/p, 5/2p}_{p,1}`.
    pub b_lip: f64,
    /// `‖u^m‖` in `B^{α-1, (α-1)/2}_{p,q}`.
    pub u_alpha: f64,
    /// `‖b^m‖` in `B^{α, α/2}_{p,q}`.
    pub b_alpha: f64,
    /// Norms of `U^m = u^m - u^{m-1}`, `B^m = b^m - b^{m-1}` (with `u^0 = b^0 = 0`).
    pub du_crit: f64,
    pub db_crit: f64,
    pub db_lip: f64,
    /// `du_crit + db_crit + db_lip`.
    pub triple: f64,
    /// `triple_{m+1} / triple_m`, once the next row exists and `triple_m > 1e-14`.
    pub rho: Option<f64>,
    pub max_divergence: f64,
    /// Wall-clock time since the start of the run; kept out of serialized output.
    #[serde(skip)]
    pub seconds: f64,
}

pub const RHO_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
    pub j_min: i32,
    pub j_max: i32,
}

impl IterationTrace {
    pub fn push(&mut self, row: TraceRow) {
        if let Some(prev) = self.rows.last_mut() {
            if prev.triple > RHO_FLOOR {
                prev.rho = Some(row.triple / prev.triple);
            }
        }
        self.rows.push(row);
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rho).collect()
    }

    /// Geometric mean of the measured ratios.
    pub fn rho_bar(&self) -> Option<f64> {
        let r: Vec<f64> = self.rhos().into_iter().filter(|v| *v > 0.0).collect();
        if r.is_empty() {
            return None;
        }
        Some((r.iter().map(|v| v.ln()).sum::<f64>() / r.len() as f64).exp())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub(crate) fn blocks(f: &SpaceTimeField, cfg: &SolverConfig) -> Result<BlockNorms> {
    anisotropic_block_norms(f, cfg.p, cfg.ext_order)
}

pub(crate) struct FieldNorms {
    pub crit: f64,
    pub lip: f64,
    pub alpha_u: f64,
    pub alpha_b: f64,
}

pub(crate) fn field_norms(f: &SpaceTimeField, cfg: &SolverConfig) -> Result<(FieldNorms, (i32, i32))> {
    let b = blocks(f, cfg)?;
    let p = cfg.p;
    Ok((
        FieldNorms {
            crit: b.total(5.0 / p - 1.0, 5.0)?,
            lip: b.total(5.0 / p, 1.0)?,
            alpha_u: b.total(cfg.alpha - 1.0, cfg.q)?,
            alpha_b: b.total(cfg.alpha, cfg.q)?,
        },
        (b.j_min, b.j_max),
    ))
}

/// Triple norm `‖U‖_crit + ‖B‖_crit + ‖B‖_lip` of a difference pair.
pub fn triple_norm(du: &SpaceTimeField, db: &SpaceTimeField, cfg: &SolverConfig) -> Result<f64> {
    let (nu, _) = field_norms(du, cfg)?;
    let (nb, _) = field_norms(db, cfg)?;
    Ok(nu.crit + nb.crit + nb.lip)
}

/// `‖b(t_i) - b0‖` in the spatial `B^{3/p}_{p,1}` norm for the first `count` slices.
pub fn continuity_profile(b: &SpaceTimeField, b0: &SpectralField, p: f64, count: usize) -> Result<Vec<f64>> {
    b.slices()
        .iter()
        .take(count)
        .map(|s| spatial_block_norms(&s.sub(b0)?, p)?.total(3.0 / p, 1.0))
        .collect()
}

/// Per-norm bounds over a trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub name: String,
    pub first: f64,
    pub sup: f64,
    pub argsup: usize,
    pub last: f64,
    /// Some iterate exceeds twice the `m = 1` value.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub norms: Vec<NormBound>,
    pub any_flag: bool,
}

pub fn smallness_report(trace: &IterationTrace) -> Result<SmallnessReport> {
    if trace.rows.is_empty() {
        return Err(crate::Error::InvalidParameter("smallness report needs a nonempty trace".into()));
    }
    let getters: [(&str, fn(&TraceRow) -> f64); 5] = [
        ("u_crit", |r| r.u_crit),
        ("b_crit", |r| r.b_crit),
        ("b_lip", |r| r.b_lip),
        ("u_alpha", |r| r.u_alpha),
        ("b_alpha", |r| r.b_alpha),
    ];
    let norms: Vec<NormBound> = getters
        .iter()
        .map(|(name, g)| {
            let v: Vec<f64> = trace.rows.iter().map(g).collect();
            let first = v[0];
            let (argsup, sup) = v.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, &x)| {
                if x > a.1 || x.is_nan() {
                    (i, x)
                } else {
                    a
                }
            });
            let flagged = v.iter().any(|&x| !(x <= 2.0 * first));
            NormBound { name: name.to_string(), first, sup, argsup: trace.rows[argsup].m, last: *v.last().unwrap(), flagged }
        })
        .collect();
    let any_flag = norms.iter().any(|n| n.flagged);
    Ok(SmallnessReport { norms, any_flag })
}
