mod common;

use std::f64::consts::PI;

use common::random_modes;
use hallmild::besov::*;
use hallmild::heat::heat_propagate;
use hallmild::spectral::{gradient, inverse_transform, Grid, SpectralField};
use hallmild::{Error, SpaceTimeField};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cos_mode(grid: &Grid, k: [i64; 3], amp: f64) -> SpectralField {
    let mut c = vec![C::new(0.0, 0.0); grid.len()];
    c[grid.index_of(k)] += C::new(0.5 * amp, 0.0);
    c[grid.index_of([-k[0], -k[1], -k[2]])] += C::new(0.5 * amp, 0.0);
    SpectralField::from_coeffs(grid, 1, c).unwrap()
}

fn heat_flow(f0: &SpectralField, t: f64, n_t: usize) -> SpaceTimeField {
    SpaceTimeField::from_fn(t, n_t, |s| heat_propagate(f0, s)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

// ---------- profile ----------

#[test]
fn profile_vanishes_outside_shell_and_is_nonnegative() {
    for flavor in [Flavor::IsotropicSpatial, Flavor::AnisotropicSpacetime] {
        let p = build_dyadic_profile(flavor);
        assert_eq!(p.phi(3.0), 0.0);
        assert_eq!(p.phi(0.5), 0.0);
        assert_eq!(p.phi(0.1), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5000 {
            assert!(p.phi(rng.random_range(0.0..4.0)) >= 0.0);
        }
    }
    let p = build_dyadic_profile(Flavor::AnisotropicSpacetime);
    assert_eq!(p.block(0, p.radius(2.0, 1.0)), 0.0);
}

#[test]
fn profile_partition_of_unity() {
    let p = build_dyadic_profile(Flavor::AnisotropicSpacetime);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let xi = 2f64.powf(rng.random_range(-12.0..12.0));
        let tau = 2f64.powf(rng.random_range(-24.0..24.0));
        let r = p.radius(xi, tau);
        let s: f64 = (-20..=20).map(|j| p.phi(r * 2f64.powi(-j))).sum();
        worst = worst.max((s - 1.0).abs());
    }
    assert!(worst <= 1e-10, "partition residual {worst}");
}

// ---------- spatial norms ----------

#[test]
fn spatial_single_shell_is_exact() {
    let g = Grid::periodic(16).unwrap();
    for (k, j0) in [(1i64, 0), (2, 1), (4, 2)] {
        let f = cos_mode(&g, [0, k, 0], 1.3);
        let phys = inverse_transform(&f).unwrap();
        for (s, p) in [(0.0, 2.0), (1.5, 2.0), (0.7, 3.0), (2.0, f64::INFINITY)] {
            let rep = besov_norm_spatial(&f, &BesovSpec::spatial(s, p, 2.0)).unwrap();
            let expect = 2f64.powf(s * j0 as f64) * phys.lp_norm(p);
            assert!(rel(rep.total, expect) <= 0.02, "k={k} s={s} p={p}: {} vs {expect}", rep.total);
            assert_eq!(rep.label, "spatial");
        }
    }
}

#[test]
fn spatial_l2_matches_square_function_oracle() {
    let g = Grid::periodic(16).unwrap();
    let prof = build_dyadic_profile(Flavor::IsotropicSpatial);
    // dyadic radii: the square function is exactly the L2 norm
    let f = cos_mode(&g, [1, 0, 0], 1.0).add(&cos_mode(&g, [0, 2, 0], 0.5)).unwrap().add(&cos_mode(&g, [0, 0, 4], 0.2)).unwrap();
    let rep = besov_norm_spatial(&f, &BesovSpec::spatial(0.0, 2.0, 2.0)).unwrap();
    assert!(rel(rep.total, f.l2_norm()) < 1e-12);

    // broadband: compare with Σ_k |c_k|^2 Σ_j φ_j^2 and record the constant
    let f = random_modes(&g, 3, 25, 11);
    let rep = besov_norm_spatial(&f, &BesovSpec::spatial(0.0, 2.0, 2.0)).unwrap();
    let len = g.len();
    let mut oracle = 0.0;
    for idx in 0..len {
        let e: f64 = (0..3).map(|c| f.coeffs()[c * len + idx].norm_sqr()).sum();
        let w: f64 = (rep.j_min..=rep.j_max).map(|j| prof.phi(g.xi_abs(idx) * 2f64.powi(-j)).powi(2)).sum();
        oracle += e * w;
    }
    let oracle = (oracle * g.volume()).sqrt();
    assert!(rel(rep.total, oracle) < 1e-12);
    let constant = rep.total / f.l2_norm();
    println!("square-function constant for a broadband field: {constant:.4}");
    assert!(constant > 0.5f64.sqrt() - 1e-12 && constant <= 1.0 + 1e-12);
}

#[test]
fn spatial_zero_and_range_errors() {
    let g = Grid::periodic(8).unwrap();
    let z = SpectralField::zeros(&g, 3).unwrap();
    assert_eq!(besov_norm_spatial(&z, &BesovSpec::spatial(1.0, 3.0, 1.0)).unwrap().total, 0.0);
    for spec in [BesovSpec::spatial(0.0, 1.0, 2.0), BesovSpec::spatial(0.0, 2.0, 0.5), BesovSpec::spatial(f64::NAN, 2.0, 2.0)] {
        assert!(matches!(besov_norm_spatial(&z, &spec), Err(Error::InvalidParameter(_))));
    }
    assert!(besov_norm_spatial(&z, &BesovSpec::anisotropic(0.0, 2.0, 2.0)).is_err());
}

#[test]
fn report_total_is_lq_of_blocks() {
    let g = Grid::periodic(16).unwrap();
    let f = random_modes(&g, 1, 20, 3);
    let rep = besov_norm_spatial(&f, &BesovSpec::spatial(0.5, 3.0, 2.5)).unwrap();
    let s: f64 = rep.per_block.iter().map(|b| b.weighted.powf(2.5)).sum();
    assert!(rel(rep.total, s.powf(1.0 / 2.5)) < 1e-13);
    for b in &rep.per_block {
        assert!(rel(b.weighted, 2f64.powf(0.5 * b.j as f64) * b.raw) < 1e-14 || b.raw == 0.0);
    }
}

#[test]
fn lq_monotonicity() {
    let g = Grid::periodic(16).unwrap();
    let f = random_modes(&g, 3, 28, 4);
    let st = heat_flow(&random_modes(&g, 1, 20, 5), 0.3, 12);
    let bs = spatial_block_norms(&f, 2.0).unwrap();
    let ba = anisotropic_block_norms(&st, 3.0, 2).unwrap();
    for b in [&bs, &ba] {
        let qs = [1.0, 1.5, 2.0, 5.0, f64::INFINITY];
        for w in qs.windows(2) {
            assert!(b.total(0.7, w[1]).unwrap() <= b.total(0.7, w[0]).unwrap() * (1.0 + 1e-14));
        }
    }
}

#[test]
fn block_mask_idempotency() {
    let g = Grid::periodic(16).unwrap();
    let prof = build_dyadic_profile(Flavor::IsotropicSpatial);
    let f = random_modes(&g, 3, 28, 6);
    for j in 0..4 {
        let twice = spatial_block(&spatial_block(&f, &prof, j), &prof, j);
        let len = g.len();
        for c in 0..3 {
            for idx in 0..len {
                let m = prof.phi(g.xi_abs(idx) * 2f64.powi(-j));
                let want = f.coeffs()[c * len + idx] * (m * m);
                assert!((twice.coeffs()[c * len + idx] - want).norm() <= 1e-15 * (1.0 + want.norm()));
            }
        }
    }
}

#[test]
fn spatial_physical_path_is_continuous_at_p2() {
    let g = Grid::periodic(16).unwrap();
    let f = random_modes(&g, 1, 24, 8);
    let a = spatial_block_norms(&f, 2.0).unwrap();
    let b = spatial_block_norms(&f, 2.0 + 1e-9).unwrap();
    for (x, y) in a.raw.iter().zip(&b.raw) {
        assert!((x - y).abs() <= 1e-7 * (1.0 + x));
    }
}

// ---------- anisotropic norms ----------

/// Naive 4D transform of the windowed extension, built independently of the library.
fn naive_block_energies(f: &SpaceTimeField, k: usize, js: std::ops::RangeInclusive<i32>) -> Vec<f64> {
    let lambda: Vec<f64> = match k {
        2 => vec![6.0, -8.0, 3.0],
        _ => unreachable!(),
    };
    let grid = f.grid();
    let len = grid.len();
    let n_t = f.n_t();
    let pad = (n_t - 1) / (k + 1);
    let nb = n_t + 2 * pad;
    let dt = f.dt();
    let step = |x: f64| -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            let a = (-1.0 / x).exp();
            a / (a + (-1.0 / (1.0 - x)).exp())
        }
    };
    let prof = build_dyadic_profile(Flavor::AnisotropicSpacetime);
    // physical samples on the box, box index b <-> time (b < n_t ? b : ...)
    let phys: Vec<Vec<f64>> = f.slices().iter().map(|s| inverse_transform(s).unwrap().values().to_vec()).collect();
    let mut boxed = vec![vec![0.0; len]; nb];
    for x in 0..len {
        for b in 0..n_t {
            boxed[b][x] = phys[b][x];
        }
        for i in 1..=pad {
            let w = step(1.0 - i as f64 / (pad as f64 + 1.0));
            let right: f64 = lambda.iter().enumerate().map(|(j, l)| l * phys[n_t - 1 - (j + 1) * i][x]).sum();
            let left: f64 = lambda.iter().enumerate().map(|(j, l)| l * phys[(j + 1) * i][x]).sum();
            boxed[n_t - 1 + i][x] = w * right;
            boxed[nb - i][x] = w * left;
        }
    }
    // naive spatial DFT per box time, then naive time DFT per mode
    let n = grid.n();
    let mut spec_t = vec![vec![C::new(0.0, 0.0); len]; nb];
    for b in 0..nb {
        for idx in 0..len {
            let kk = grid.k(idx);
            let mut acc = C::new(0.0, 0.0);
            for x in 0..len {
                let pt = [x / (n * n), (x / n) % n, x % n];
                let ph = -2.0 * PI * (kk[0] as f64 * pt[0] as f64 + kk[1] as f64 * pt[1] as f64 + kk[2] as f64 * pt[2] as f64) / n as f64;
                acc += C::from_polar(boxed[b][x], ph);
            }
            spec_t[b][idx] = acc / len as f64;
        }
    }
    let omega = |m: usize| {
        let m = if m <= nb / 2 { m as f64 } else { m as f64 - nb as f64 };
        2.0 * PI * m / (nb as f64 * dt)
    };
    let weights: Vec<f64> = (0..n_t).map(|i| if i == 0 || i == n_t - 1 { dt / 2.0 } else { dt }).collect();
    js.map(|j| {
        let mut e = 0.0;
        for idx in 0..len {
            if (0..nb).all(|b| spec_t[b][idx].norm() < 1e-300) {
                continue;
            }
            let hat: Vec<C> = (0..nb)
                .map(|m| (0..nb).map(|b| spec_t[b][idx] * C::from_polar(1.0, -2.0 * PI * (m * b) as f64 / nb as f64)).sum())
                .collect();
            let masked: Vec<C> = (0..nb).map(|m| hat[m] * prof.phi(prof.radius(grid.xi_abs(idx), omega(m)) * 2f64.powi(-j))).collect();
            for (i, w) in weights.iter().enumerate() {
                let y: C = (0..nb).map(|m| masked[m] * C::from_polar(1.0, 2.0 * PI * (m * i) as f64 / nb as f64)).sum::<C>() / nb as f64;
                e += w * y.norm_sqr();
            }
        }
        (e * grid.volume()).sqrt()
    })
    .collect()
}

#[test]
fn heat_mode_dominant_block_and_4d_oracle() {
    let g = Grid::periodic(8).unwrap();
    for (k, j_expect) in [([1i64, 0, 0], 0), ([1, 1, 1], 1), ([2, 0, 0], 1)] {
        let f0 = cos_mode(&g, k, 1.0);
        let f = heat_flow(&f0, 1.0, 16);
        let b = anisotropic_block_norms(&f, 2.0, 2).unwrap();
        let oracle = naive_block_energies(&f, 2, b.j_min..=b.j_max);
        for (x, y) in b.raw.iter().zip(&oracle) {
            assert!((x - y).abs() <= 1e-10 * (1.0 + y), "{x} vs {y}");
        }
        let (arg, _) = b.raw.iter().enumerate().fold((0, 0.0), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
        assert_eq!(b.j_min + arg as i32, j_expect, "k={k:?} blocks {:?}", b.raw);
        let rep = besov_norm_anisotropic(&f, &BesovSpec::anisotropic(0.0, 2.0, 2.0), 2).unwrap();
        assert_eq!(rep.label, "E-proxy");
        assert_eq!(rep.ext_order, Some(2));
    }
}

#[test]
fn anisotropic_zero_field_and_guards() {
    let g = Grid::periodic(8).unwrap();
    let z = SpaceTimeField::zeros(&g, 3, 0.5, 10).unwrap();
    for p in [2.0, 3.0, f64::INFINITY] {
        assert_eq!(besov_norm_anisotropic(&z, &BesovSpec::anisotropic(1.0, p, 2.0), 2).unwrap().total, 0.0);
    }
    let short = SpaceTimeField::zeros(&g, 1, 0.5, 7).unwrap();
    assert!(matches!(
        besov_norm_anisotropic(&short, &BesovSpec::anisotropic(1.0, 2.0, 2.0), 2),
        Err(Error::NoResolvableShell(_))
    ));
    assert!(besov_norm_anisotropic(&z, &BesovSpec::spatial(1.0, 2.0, 2.0), 2).is_err());
}

/// Parabolic dilation on the torus: same coefficients on a box of side `L/λ`, horizon `T/λ^2`.
#[test]
fn parabolic_rescaling_law() {
    let lam = 2.0;
    let g = Grid::periodic(32).unwrap();
    let gl = Grid::new(32, 2.0 * PI / lam).unwrap();
    let f0 = cos_mode(&g, [2, 1, 0], 1.0).add(&cos_mode(&g, [1, 1, 1], 0.4)).unwrap();
    let f0l = SpectralField::from_coeffs(&gl, 1, f0.coeffs().to_vec()).unwrap();
    let t = 0.2;
    let f = heat_flow(&f0, t, 32);
    let fl = heat_flow(&f0l, t / (lam * lam), 32);
    for (s, p, q) in [(1.0, 2.0, 2.0), (0.5, 2.0, 1.0), (1.0, 4.0, 2.0), (2.0, 3.0, f64::INFINITY)] {
        let a = besov_norm_anisotropic(&f, &BesovSpec::anisotropic(s, p, q), 2).unwrap();
        let b = besov_norm_anisotropic(&fl, &BesovSpec::anisotropic(s, p, q), 2).unwrap();
        let expect = lam.powf(s - 5.0 / p);
        assert!(rel(b.total / a.total, expect) <= 0.10, "s={s} p={p}: {} vs {expect}", b.total / a.total);
        assert_eq!(b.j_min, a.j_min + 1);
    }
}

#[test]
fn anisotropic_physical_path_is_continuous_at_p2() {
    let g = Grid::periodic(8).unwrap();
    let f = heat_flow(&random_modes(&g, 3, 6, 9), 0.5, 12);
    let a = anisotropic_block_norms(&f, 2.0, 2).unwrap();
    let b = anisotropic_block_norms(&f, 2.0 + 1e-9, 2).unwrap();
    for (x, y) in a.raw.iter().zip(&b.raw) {
        assert!((x - y).abs() <= 1e-7 * (1.0 + x));
    }
}

#[test]
fn triangle_inequality_for_all_norms() {
    let g = Grid::periodic(8).unwrap();
    for seed in 0..4 {
        let a = heat_flow(&random_modes(&g, 1, 6, 100 + seed), 0.4, 10);
        let b = heat_flow(&random_modes(&g, 1, 8, 200 + seed), 0.4, 10).scale(2.0);
        let ab = a.add(&b).unwrap();
        let norms: Vec<Box<dyn Fn(&SpaceTimeField) -> f64>> = vec![
            Box::new(|f| besov_norm_anisotropic(f, &BesovSpec::anisotropic(1.0, 2.0, 2.0), 2).unwrap().total),
            Box::new(|f| besov_norm_anisotropic(f, &BesovSpec::anisotropic(0.5, 3.0, 1.0), 2).unwrap().total),
            Box::new(|f| besov_norm_spatial(f.last(), &BesovSpec::spatial(1.0, 4.0, 2.0)).unwrap().total),
            Box::new(|f| sobolev_norm_parabolic(f, 2.0, 2.0).unwrap()),
            Box::new(|f| sobolev_norm_parabolic(f, 1.0, 2.0).unwrap()),
            Box::new(|f| sobolev_norm_parabolic(f, 2.0, 3.0).unwrap()),
            Box::new(|f| lorentz_norm(f, 3.0, 2.0).unwrap()),
            Box::new(|f| lorentz_norm(f, 3.0, 3.0).unwrap()),
            Box::new(|f| spacetime_lp(f, 1.5).unwrap()),
        ];
        for (i, n) in norms.iter().enumerate() {
            let (x, y, z) = (n(&a), n(&b), n(&ab));
            assert!(z <= (x + y) * (1.0 + 1e-12), "norm {i}: {z} > {x} + {y}");
        }
    }
}

// ---------- extension ----------

#[test]
fn extension_coefficients_solve_vandermonde() {
    assert_eq!(extension_coefficients(0).unwrap(), vec![1.0]);
    let l = extension_coefficients(1).unwrap();
    assert!((l[0] + l[1] - 1.0).abs() < 1e-14);
    assert!((-l[0] - 2.0 * l[1] - 1.0).abs() < 1e-14);
    assert!((l[0] - 3.0).abs() < 1e-14 && (l[1] + 2.0).abs() < 1e-14);
    for k in 0..6 {
        let l = extension_coefficients(k).unwrap();
        for p in 0..=k {
            let s: f64 = l.iter().enumerate().map(|(j, v)| v * (-(j as f64 + 1.0)).powi(p as i32)).sum();
            assert!((s - 1.0).abs() < 1e-9, "k={k} l={p}: {s}");
        }
    }
}

#[test]
fn extension_k0_is_even_reflection() {
    let g = Grid::periodic(8).unwrap();
    let f = heat_flow(&random_modes(&g, 3, 8, 12), 0.7, 9);
    let e = extension_operator(&f, 0).unwrap();
    let pad = e.pad();
    assert_eq!(pad, 8);
    for i in 1..=pad {
        assert_eq!(e.slices[pad - i].coeffs(), f.slice(i).coeffs());
        assert!((e.time(pad - i) + f.time(i)).abs() < 1e-15);
    }
    assert_eq!(e.slices[pad].coeffs(), f.slice(0).coeffs());
}

#[test]
fn extension_of_t_squared_is_c2() {
    let lam = extension_coefficients(2).unwrap();
    let f = |t: f64| t * t;
    let h = 1e-3;
    let e = |t: f64| extend_fn(&f, &lam, t);
    let right = (e(2.0 * h) - 2.0 * e(h) + e(0.0)) / (h * h);
    let left = (e(-2.0 * h) - 2.0 * e(-h) + e(0.0)) / (h * h);
    assert!((right - left).abs() <= 1e-6);

    // sampled field: the pad reproduces t^2 exactly
    let g = Grid::periodic(8).unwrap();
    let m = cos_mode(&g, [1, 0, 0], 1.0);
    let st = SpaceTimeField::from_fn(1.0, 16, |t| Ok(m.scale(t * t))).unwrap();
    let ext = extension_operator(&st, 2).unwrap();
    for i in 0..ext.n_samples() {
        let t = ext.time(i);
        let got = ext.slices[i].coeffs()[g.index_of([1, 0, 0])].re * 2.0;
        assert!((got - t * t).abs() < 1e-12);
    }
}

/// One-sided derivative weights on nodes `0, ±h, ..., ±m h` (Fornberg).
fn fornberg(nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    for i in 1..n {
        let mut c2 = 1.0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            for k in (0..=order.min(i)).rev() {
                let prev_i = if k > 0 { c[i - 1][k - 1] } else { 0.0 };
                if j == i - 1 {
                    c[i][k] = c1 * (k as f64 * prev_i - nodes[i - 1] * c[i - 1][k]) / c2;
                }
                let prev_j = if k > 0 { c[j][k - 1] } else { 0.0 };
                c[j][k] = (nodes[i] * c[j][k] - k as f64 * prev_j) / c3;
            }
        }
        c1 = c2;
    }
    c.iter().map(|r| r[order]).collect()
}

#[test]
fn extension_matches_one_sided_derivatives() {
    // degree-7 polynomial: the 12-node stencils are exact up to rounding
    let poly = |t: f64| 1.0 + t * (2.0 + t * (-1.0 + t * (0.5 + t * (0.25 + t * (-0.1 + t * (0.03 - 0.01 * t))))));
    let smooth = |t: f64| (0.7 * t).sin() + (0.5 * t).exp() + 0.3 * t * t;
    let fs: [&dyn Fn(f64) -> f64; 2] = [&poly, &smooth];
    let m = 11;
    for (which, f) in fs.iter().enumerate() {
        for k in 0..=3 {
            let lam = extension_coefficients(k).unwrap();
            let e = |t: f64| extend_fn(f, &lam, t);
            for d in 0..=k {
                let mut best = f64::INFINITY;
                for h in [0.1, 0.07, 0.05, 0.035] {
                    let right_nodes: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
                    let left_nodes: Vec<f64> = (0..=m).map(|i| -(i as f64) * h).collect();
                    let wr = fornberg(&right_nodes, d);
                    let wl = fornberg(&left_nodes, d);
                    let dr: f64 = right_nodes.iter().zip(&wr).map(|(t, w)| w * e(*t)).sum();
                    let dl: f64 = left_nodes.iter().zip(&wl).map(|(t, w)| w * e(*t)).sum();
                    best = best.min((dr - dl).abs());
                }
                assert!(best <= 1e-6, "f{which} k={k} d={d}: {best}");
            }
        }
    }
}

// ---------- Sobolev ----------

#[test]
fn sobolev_s0_is_lp() {
    let g = Grid::periodic(8).unwrap();
    let f = heat_flow(&random_modes(&g, 3, 8, 13), 0.5, 9);
    for p in [1.5, 2.0, 3.0, 6.0] {
        let mut acc = 0.0;
        for i in 0..f.n_t() {
            let v = inverse_transform(f.slice(i)).unwrap();
            let w = if i == 0 || i == f.n_t() - 1 { 0.5 } else { 1.0 } * f.dt();
            let s: f64 = (0..g.len()).map(|x| v.magnitude_at(x).powf(p)).sum();
            acc += w * s * g.cell_volume();
        }
        let oracle = acc.powf(1.0 / p);
        assert!(rel(sobolev_norm_parabolic(&f, 0.0, p).unwrap(), oracle) < 1e-12);
    }
}

#[test]
fn sobolev_dual_path_agreement() {
    let g = Grid::periodic(16).unwrap();
    let f0 = cos_mode(&g, [1, 2, 0], 1.0).add(&cos_mode(&g, [2, 0, 1], 0.3)).unwrap();
    let t = 0.5;
    let f = SpaceTimeField::from_fn(t, 32, |s| Ok(f0.scale(1.0 + 0.5 * (2.0 * PI * s / t).sin()))).unwrap();
    let m = sobolev_norm_parabolic(&f, 2.0, 2.0).unwrap();
    let d = parabolic_derivative_norms(&f, 1, 2.0, 2).unwrap();
    let sq = (d[0] * d[0] + d[1] * d[1]).sqrt();
    println!("equivalence constant (multiplier / derivative): {:.5}", m / sq);
    assert!(rel(m, sq) <= 0.05);
    // derivative path at p != 2 reduces to the p = 2 values as p -> 2
    let d2 = parabolic_derivative_norms(&f, 1, 2.0 + 1e-8, 2).unwrap();
    for (a, b) in d.iter().zip(&d2) {
        assert!(rel(*a, *b) < 1e-6);
    }
}

#[test]
fn sobolev_zero_and_unsupported() {
    let g = Grid::periodic(8).unwrap();
    let z = SpaceTimeField::zeros(&g, 1, 0.5, 9).unwrap();
    assert_eq!(sobolev_norm_parabolic(&z, 2.0, 2.0).unwrap(), 0.0);
    assert_eq!(sobolev_norm_parabolic(&z, 1.3, 2.0).unwrap(), 0.0);
    assert_eq!(sobolev_norm_parabolic(&z, 4.0, 3.0).unwrap(), 0.0);
    assert!(matches!(sobolev_norm_parabolic(&z, 1.0, 3.0), Err(Error::Unsupported(_))));
    assert!(matches!(sobolev_norm_parabolic(&z, -1.0, 2.0), Err(Error::Unsupported(_))));
}

// ---------- Lorentz ----------

#[test]
fn lorentz_pp_is_lp() {
    let g = Grid::periodic(8).unwrap();
    let f = heat_flow(&random_modes(&g, 3, 8, 14), 0.5, 9);
    for p in [1.0, 2.0, 3.5] {
        let l = lorentz_norm(&f, p, p).unwrap();
        assert!(rel(l, spacetime_lp(&f, p).unwrap()) <= 1e-10);
    }
}

#[test]
fn lorentz_homogeneity_and_zero() {
    let g = Grid::periodic(8).unwrap();
    let f = heat_flow(&random_modes(&g, 1, 8, 15), 0.5, 9);
    for (p, r) in [(2.0, 1.0), (4.0, 2.0), (3.0, f64::INFINITY)] {
        let a = lorentz_norm(&f, p, r).unwrap();
        let b = lorentz_norm(&f.scale(-3.0), p, r).unwrap();
        assert!(rel(b, 3.0 * a) < 1e-13);
    }
    assert_eq!(lorentz_norm(&f.scale(0.0), 2.0, 1.0).unwrap(), 0.0);
}

#[test]
fn lorentz_two_level_brute_force() {
    let (a, b, ma, mb) = (3.0, 1.2, 0.4, 1.7);
    let mut values = vec![b; 17];
    values.extend(vec![a; 4]);
    let mut measures = vec![mb / 17.0; 17];
    measures.extend(vec![ma / 4.0; 4]);
    for (p, r) in [(2.0, 1.0), (4.0, 2.0), (1.5, 3.0), (3.0, f64::INFINITY)] {
        // brute force: midpoint sum of (t^{1/p} f*(t))^r / t on a fine log grid
        let fstar = |t: f64| if t < ma { a } else if t < ma + mb { b } else { 0.0 };
        let oracle = if r.is_infinite() {
            (1..=200_000).map(|i| (ma + mb) * i as f64 / 200_000.0).map(|t| t.powf(1.0 / p) * fstar(t - 1e-12)).fold(0.0, f64::max)
        } else {
            let n = 400_000;
            let (lo, hi) = ((1e-12f64).ln(), (ma + mb).ln());
            let du = (hi - lo) / n as f64;
            (0..n)
                .map(|i| {
                    let t = (lo + (i as f64 + 0.5) * du).exp();
                    (t.powf(1.0 / p) * fstar(t)).powf(r) * du
                })
                .sum::<f64>()
                .powf(1.0 / r)
        };
        let got = lorentz_from_samples(&values, &measures, p, r);
        assert!(rel(got, oracle) < 1e-4, "p={p} r={r}: {got} vs {oracle}");
    }
}

#[test]
fn lorentz_shuffle_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let values: Vec<f64> = (0..500).map(|_| rng.random_range(-2.0..2.0)).collect();
    let measures = vec![0.01; 500];
    let base = lorentz_from_samples(&values, &measures, 2.5, 1.5);
    let mut perm: Vec<usize> = (0..500).collect();
    for i in (1..500).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let shuffled: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
    assert!(rel(lorentz_from_samples(&shuffled, &measures, 2.5, 1.5), base) < 1e-13);

    // a periodic shift of the field permutes cells
    let g = Grid::periodic(8).unwrap();
    let f0 = random_modes(&g, 1, 8, 17);
    let shifted = {
        let mut c = f0.coeffs().to_vec();
        for (idx, z) in c.iter_mut().enumerate() {
            let k = g.k(idx);
            *z *= C::from_polar(1.0, -g.spacing() * 3.0 * g.dk() * k[0] as f64);
        }
        SpectralField::from_coeffs(&g, 1, c).unwrap()
    };
    let a = lorentz_norm(&heat_flow(&f0, 0.5, 9), 3.0, 2.0).unwrap();
    let b = lorentz_norm(&heat_flow(&shifted, 0.5, 9), 3.0, 2.0).unwrap();
    assert!(rel(a, b) < 1e-10);
}

// ---------- battery ----------

#[test]
fn battery_zero_pair_is_consistent() {
    let g = Grid::periodic(8).unwrap();
    let z = SpectralField::zeros(&g, 1).unwrap();
    let zf = heat_flow(&z, 0.25, 16);
    let cfg = BatteryConfig { n: 8, samples: 2, ..BatteryConfig::default() };
    let sample = BatterySample { f0: z, f: zf.clone(), g: zf, stratum: 0 };
    let rep = estimate_battery(&[sample.clone(), sample], &cfg).unwrap();
    for r in &rep.results {
        assert!(r.ratios.iter().all(|x| x.is_none()));
        assert!(r.degenerate.is_empty());
    }
    assert!(rep.warnings.iter().any(|w| w.contains("insufficient calibration samples")));
}

#[test]
fn battery_flags_degenerate_rhs() {
    let pairs = [(0.0, 1.0), (1.0, 0.0), (0.5, 1.0), (0.4, 1.0)];
    let r = battery::judge(Inequality::LinfEmbedding, &pairs);
    assert_eq!(r.degenerate, vec![1]);
    assert!(!r.pass);
    let r = battery::judge(Inequality::LinfEmbedding, &[(1.0, 1.0), (1.0, 1.0), (1.04, 1.0), (1.06, 1.0)]);
    assert_eq!(r.violations, vec![3]);
}

#[test]
fn linf_embedding_on_gaussian_bump() {
    let g = Grid::periodic(16).unwrap();
    let bump = hallmild::PhysicalField::from_fn(&g, 1, |x, v| {
        let r2: f64 = x.iter().map(|c| (c - PI).powi(2)).sum();
        v[0] = (-r2).exp();
    })
    .unwrap();
    let f0 = hallmild::spectral::dealias(&hallmild::spectral::forward_transform(&bump).unwrap());
    let f = heat_flow(&f0, 0.25, 16);
    let sample = BatterySample { f0, f: f.clone(), g: f, stratum: 0 };
    let (l, r) = battery::evaluate(Inequality::LinfEmbedding, &sample, &BatteryConfig::default()).unwrap();
    assert!(l > 0.0 && r > 0.0 && (l / r).is_finite());
}

#[test]
fn lifting_constant_is_shell_independent() {
    let g = Grid::periodic(32).unwrap();
    let ratios: Vec<f64> = [2i64, 4, 8]
        .iter()
        .map(|&k| {
            let f = SpaceTimeField::constant(&cos_mode(&g, [k, 0, 0], 1.0), 4.0, 16).unwrap();
            let d1 = f.map(|s| gradient(s)?.components(0, 1)).unwrap();
            anisotropic_block_norms(&d1, 2.0, 2).unwrap().total(1.0, 2.0).unwrap()
                / anisotropic_block_norms(&f, 2.0, 2).unwrap().total(2.0, 2.0).unwrap()
        })
        .collect();
    println!("lifting ratios over shells 1..3: {ratios:?}");
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo <= 1.1);
}
