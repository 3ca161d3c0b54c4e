//! Lorentz norms from the decreasing rearrangement of `|f|`.

use super::timeline::{physical_slices, trapezoid_weights};
use crate::error::{Error, Result};
use crate::spacetime::SpaceTimeField;

/// `‖f‖_{L^{p,r}}` for a step function taking value `values[i]` on a set of measure `measures[i]`.
///
/// With `f*` piecewise constant, `∫ (t^{1/p} f*(t))^r dt/t` is integrated exactly:
/// each level contributes `v^r (p/r) (M_i^{r/p} - M_{i-1}^{r/p})`, `M_i` the cumulative measure.
pub fn lorentz_from_samples(values: &[f64], measures: &[f64], p: f64, r: f64) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| values[i] != 0.0).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()));
    let mut m_prev = 0.0f64;
    if r.is_infinite() {
        let mut best = 0.0f64;
        for &i in &order {
            m_prev += measures[i];
            best = best.max(values[i].abs() * m_prev.powf(1.0 / p));
        }
        return best;
    }
    let vmax = order.first().map(|&i| values[i].abs()).unwrap_or(0.0);
    if vmax == 0.0 {
        return 0.0;
    }
    let e = r / p;
    let mut acc = 0.0;
    let mut pow_prev = 0.0;
    for &i in &order {
        let m = m_prev + measures[i];
        let pow = m.powf(e);
        acc += (values[i].abs() / vmax).powf(r) * (pow - pow_prev);
        m_prev = m;
        pow_prev = pow;
    }
    vmax * (acc * p / r).powf(1.0 / r)
}

/// Lorentz norm over `T^3 × (0, T)` with measure `cell volume × trapezoid time weight`.
pub fn lorentz_norm(f: &SpaceTimeField, p: f64, r: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("Lorentz p must lie in [1, inf), got {p}")));
    }
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidParameter(format!("Lorentz r must lie in [1, inf], got {r}")));
    }
    let grid = f.grid();
    let len = grid.len();
    let nc = f.ncomp();
    let cell = grid.cell_volume();
    let tw = trapezoid_weights(f.n_t(), f.dt());
    let mut values = Vec::with_capacity(len * f.n_t());
    let mut measures = Vec::with_capacity(len * f.n_t());
    for (v, w) in physical_slices(f.slices()).iter().zip(&tw) {
        for i in 0..len {
            let mag = (0..nc).map(|c| v[c * len + i].powi(2)).sum::<f64>().sqrt();
            values.push(mag);
            measures.push(cell * w);
        }
    }
    Ok(lorentz_from_samples(&values, &measures, p, r))
}
