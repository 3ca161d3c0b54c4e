//! Unnormalized 3D complex FFTs on rustfft, axis by axis, with cached plans.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type C = Complex64;

fn planner_cache() -> &'static Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached 1D plan of length `n`.
pub fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let inverse = direction == FftDirection::Inverse;
    let mut cache = planner_cache().lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut p = FftPlanner::new();
            p.plan_fft(n, direction)
        })
        .clone()
}

/// In-place unnormalized 3D transform of an `n^3` row-major cube.
pub fn fft3(data: &mut [C], n: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), n * n * n);
    let f = plan(n, direction);
    let mut scratch = vec![C::new(0.0, 0.0); f.get_inplace_scratch_len().max(n * n)];
    // last axis: contiguous rows
    f.process_with_scratch(data, &mut scratch[..f.get_inplace_scratch_len()]);

    let mut plane = vec![C::new(0.0, 0.0); n * n];
    // middle axis: transpose each i-plane
    for i in 0..n {
        let base = i * n * n;
        for j in 0..n {
            for l in 0..n {
                plane[l * n + j] = data[base + j * n + l];
            }
        }
        f.process_with_scratch(&mut plane, &mut scratch[..f.get_inplace_scratch_len()]);
        for j in 0..n {
            for l in 0..n {
                data[base + j * n + l] = plane[l * n + j];
            }
        }
    }
    // first axis: gather (i) lines for each fixed j, batch over l
    for j in 0..n {
        for i in 0..n {
            for l in 0..n {
                plane[l * n + i] = data[(i * n + j) * n + l];
            }
        }
        f.process_with_scratch(&mut plane, &mut scratch[..f.get_inplace_scratch_len()]);
        for i in 0..n {
            for l in 0..n {
                data[(i * n + j) * n + l] = plane[l * n + i];
            }
        }
    }
}
