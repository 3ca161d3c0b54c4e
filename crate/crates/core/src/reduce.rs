//! Deterministic reductions.
//!
//! Sums are taken pairwise over fixed-size chunks so the result does not
//! depend on the number of worker threads.

use rayon::prelude::*;

/// Chunk length used by the parallel reductions. Fixed so results are
/// reproducible across thread counts.
pub const CHUNK: usize = 4096;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sum of `f(i)` for `i` in `0..n`, evaluated in parallel with a fixed chunking.
pub fn par_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let nchunks = n.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let vals: Vec<f64> = (lo..hi).map(&f).collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&partials)
}

/// Maximum of `f(i)` over `0..n`; NaN propagates.
pub fn par_max<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| f(i))
        .reduce(|| 0.0_f64, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integers() {
        let xs: Vec<f64> = (1..=10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 50_005_000.0);
        assert_eq!(par_sum(xs.len(), |i| xs[i]), 50_005_000.0);
    }

    #[test]
    fn max_propagates_nan() {
        assert!(par_max(5, |i| if i == 3 { f64::NAN } else { 1.0 }).is_nan());
        assert_eq!(par_max(5, |i| i as f64), 4.0);
    }
}
