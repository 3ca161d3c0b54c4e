use std::ffi::{CStr, CString};
use std::ptr;

use hallmild_ffi::*;

fn last_error() -> String {
    let p = hm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn key(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn small_config() -> *mut HmConfig {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(hm_config_new(&mut cfg), HM_OK);
        for (k, v) in [("n", 16.0), ("n_t", 16.0), ("quad_order", 8.0)] {
            assert_eq!(hm_config_set(cfg, key(k).as_ptr(), v), HM_OK, "{k}");
        }
    }
    cfg
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(hm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn config_round_trip_and_validation() {
    let cfg = small_config();
    unsafe {
        let mut v = 0.0;
        assert_eq!(hm_config_get(cfg, key("n").as_ptr(), &mut v), HM_OK);
        assert_eq!(v, 16.0);
        assert_eq!(hm_config_set(cfg, key("n").as_ptr(), 12.0), HM_ERR_INVALID_ARG);
        assert!(last_error().contains("grid"), "{}", last_error());
        assert_eq!(hm_config_get(cfg, key("n").as_ptr(), &mut v), HM_OK);
        assert_eq!(v, 16.0, "a rejected update leaves the config unchanged");
        assert_eq!(hm_config_set(cfg, key("n_t").as_ptr(), 8.5), HM_ERR_INVALID_ARG);
        assert_eq!(hm_config_set(cfg, key("nope").as_ptr(), 1.0), HM_ERR_INVALID_ARG);
        assert_eq!(hm_config_set(cfg, key("p").as_ptr(), 6.0), HM_ERR_INVALID_ARG);
        let mut len = 0;
        assert_eq!(hm_config_field_len(cfg, &mut len), HM_OK);
        assert_eq!(len, 3 * 16 * 16 * 16);
        hm_config_free(cfg);
    }
}

#[test]
fn config_from_toml() {
    unsafe {
        let mut cfg = ptr::null_mut();
        let text = key("[grid]\nn = 8\n[solver]\nhall = 0.5\n");
        assert_eq!(hm_config_from_toml(text.as_ptr(), &mut cfg), HM_OK);
        let mut v = 0.0;
        assert_eq!(hm_config_get(cfg, key("hall").as_ptr(), &mut v), HM_OK);
        assert_eq!(v, 0.5);
        hm_config_free(cfg);
        let mut bad = ptr::null_mut();
        assert_eq!(hm_config_from_toml(key("[grid]\nsize = 8\n").as_ptr(), &mut bad), HM_ERR_FORMAT);
        assert!(bad.is_null());
        assert!(last_error().contains("size"));
    }
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        assert_eq!(hm_config_new(ptr::null_mut()), HM_ERR_NULL);
        let mut v = 0.0;
        assert_eq!(hm_config_get(ptr::null(), key("n").as_ptr(), &mut v), HM_ERR_NULL);
        assert_eq!(hm_run(ptr::null(), ptr::null(), ptr::null_mut()), HM_ERR_NULL);
        hm_config_free(ptr::null_mut());
        hm_data_free(ptr::null_mut());
        hm_run_free(ptr::null_mut());
    }
}

#[test]
fn small_data_run_through_the_abi() {
    let cfg = small_config();
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(hm_data_generate(cfg, HM_FAMILY_TAYLOR_GREEN, 1e-3, 0, &mut data), HM_OK);
        let mut run = ptr::null_mut();
        assert_eq!(hm_run(cfg, data, &mut run), HM_OK);
        let mut verdict = -1;
        assert_eq!(hm_run_verdict(run, &mut verdict), HM_OK);
        assert_eq!(verdict, HM_VERDICT_CONVERGED);
        let mut count = 0;
        assert_eq!(hm_run_iterations(run, &mut count), HM_OK);
        assert!(count >= 2);
        let mut row = HmTraceRow::default();
        assert_eq!(hm_run_trace_row(run, 0, &mut row), HM_OK);
        assert_eq!(row.m, 1);
        assert!(row.rho > 0.0 && row.rho < 1.0);
        assert_eq!(hm_run_trace_row(run, count - 1, &mut row), HM_OK);
        assert!(row.rho.is_nan());
        assert_eq!(hm_run_trace_row(run, count, &mut row), HM_ERR_INVALID_ARG);
        let mut rho_bar = 0.0;
        assert_eq!(hm_run_rho_bar(run, &mut rho_bar), HM_OK);
        assert!(rho_bar < 1.0);

        let len = 3 * 16usize.pow(3);
        let (mut u, mut b) = (vec![0.0; len], vec![0.0; len]);
        assert_eq!(hm_run_final_fields(run, u.as_mut_ptr(), b.as_mut_ptr(), len), HM_OK);
        let umax = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(umax > 0.0 && umax <= 1e-3 * (1.0 + 1e-9));
        assert_eq!(hm_run_final_fields(run, u.as_mut_ptr(), b.as_mut_ptr(), len - 1), HM_ERR_INVALID_ARG);

        // the reference stepper lands on the same state
        let (mut ru, mut rb) = (vec![0.0; len], vec![0.0; len]);
        assert_eq!(hm_reference(cfg, data, 1e-3, HM_SCHEME_AB2, ru.as_mut_ptr(), rb.as_mut_ptr(), len), HM_OK);
        let gap = u.iter().zip(&ru).chain(b.iter().zip(&rb)).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(gap <= 1e-8 * umax, "{gap:e}");
        assert_eq!(hm_reference(cfg, data, 1e-3, 7, ru.as_mut_ptr(), rb.as_mut_ptr(), len), HM_ERR_INVALID_ARG);

        hm_run_free(run);
        hm_data_free(data);
        hm_config_free(cfg);
    }
}

#[test]
fn data_from_physical_samples() {
    let cfg = small_config();
    let n = 16usize;
    let len = 3 * n.pow(3);
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut u = vec![0.0; len];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let (x, y) = (i as f64 * h, j as f64 * h);
                let idx = (i * n + j) * n + l;
                u[idx] = x.sin() * y.cos();
                u[n.pow(3) + idx] = -x.cos() * y.sin();
            }
        }
    }
    let zero = vec![0.0; len];
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(hm_data_from_physical(cfg, u.as_ptr(), zero.as_ptr(), len, &mut data), HM_OK);
        hm_data_free(data);
        // a gradient field is rejected
        let mut g = vec![0.0; len];
        for (idx, v) in g.iter_mut().take(n.pow(3)).enumerate() {
            *v = ((idx / (n * n)) as f64 * h).cos();
        }
        let mut bad = ptr::null_mut();
        assert_eq!(hm_data_from_physical(cfg, g.as_ptr(), zero.as_ptr(), len, &mut bad), HM_ERR_INVALID_ARG);
        assert!(last_error().contains("solenoidal"), "{}", last_error());
        assert_eq!(hm_data_from_physical(cfg, u.as_ptr(), zero.as_ptr(), len + 3, &mut bad), HM_ERR_INVALID_ARG);
        let mut nan = u.clone();
        nan[5] = f64::NAN;
        assert_eq!(hm_data_from_physical(cfg, nan.as_ptr(), zero.as_ptr(), len, &mut bad), HM_ERR_NUMERIC);
        assert_eq!(hm_data_generate(cfg, 99, 1.0, 0, &mut bad), HM_ERR_INVALID_ARG);
        hm_config_free(cfg);
    }
}

#[test]
fn besov_norm_of_a_single_mode() {
    // sin(x) sits in one dyadic block; its B^0_{2,2} norm is its L² norm
    let n = 16usize;
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let f: Vec<f64> = (0..n.pow(3)).map(|idx| ((idx / (n * n)) as f64 * h).sin()).collect();
    let mut norm = 0.0;
    let st = unsafe { hm_besov_norm(n, 2.0 * std::f64::consts::PI, 1, f.as_ptr(), 0.0, 2.0, 2.0, &mut norm) };
    assert_eq!(st, HM_OK);
    let l2 = (f.iter().map(|x| x * x).sum::<f64>() * h.powi(3)).sqrt();
    assert!((norm - l2).abs() <= 1e-10 * l2, "{norm} vs {l2}");
    let st = unsafe { hm_besov_norm(12, 1.0, 1, f.as_ptr(), 0.0, 2.0, 2.0, &mut norm) };
    assert_eq!(st, HM_ERR_INVALID_ARG);
}

#[test]
fn header_declares_every_exported_function() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/hallmild.h")).unwrap();
    let src = std::fs::read_to_string(format!("{dir}/src/lib.rs")).unwrap();
    let names: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(names.len() >= 15);
    for name in names {
        assert!(header.contains(&format!("{name}(")), "{name}");
    }
    for c in ["HM_OK", "HM_ERR_PANIC", "HM_VERDICT_MAX_ITER", "typedef struct HmRun HmRun"] {
        assert!(header.contains(c), "{c}");
    }
}
