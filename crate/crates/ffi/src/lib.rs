//! C ABI over the `hallmild` solver.
//!
//! Objects cross the boundary as opaque handles (`HmConfig`, `HmData`,
//! `HmRun`) created by `hm_*_new` style calls and released by the matching
//! `hm_*_free`. Every entry point returns an `HmStatus`; on failure the
//! message is available from `hm_last_error` on the same thread.
//!
//! Physical arrays are component-major: value `(c, i, j, l)` lives at
//! `c * n³ + (i * n + j) * n + l`, point `(i, j, l)` at `(i, j, l) * L / n`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hallmild::besov::spatial_block_norms;
use hallmild::picard::{run, Family, InitialData, RunResult, SolverConfig, Verdict};
use hallmild::reference::{imex_run, ImexConfig, Scheme};
use hallmild::spectral::{forward_transform, inverse_transform, Grid, PhysicalField, SpectralField};
use hallmild::Error;

pub type HmStatus = i32;

pub const HM_OK: HmStatus = 0;
/// A required pointer argument was null.
pub const HM_ERR_NULL: HmStatus = 1;
pub const HM_ERR_INVALID_ARG: HmStatus = 2;
pub const HM_ERR_IO: HmStatus = 3;
/// Malformed configuration text or field file.
pub const HM_ERR_FORMAT: HmStatus = 4;
/// Non-finite values, a stability guard or an unreached tolerance.
pub const HM_ERR_NUMERIC: HmStatus = 5;
/// A Rust panic was caught at the boundary.
pub const HM_ERR_PANIC: HmStatus = 6;

pub const HM_VERDICT_CONVERGED: i32 = 0;
pub const HM_VERDICT_DIVERGED: i32 = 1;
pub const HM_VERDICT_MAX_ITER: i32 = 2;

pub const HM_FAMILY_TAYLOR_GREEN: i32 = 0;
pub const HM_FAMILY_RANDOM_BAND: i32 = 1;
pub const HM_FAMILY_CONCENTRATED_BUMP: i32 = 2;

pub const HM_SCHEME_EULER: i32 = 0;
pub const HM_SCHEME_AB2: i32 = 1;

/// Solver parameters.
pub struct HmConfig {
    inner: SolverConfig,
}

/// A solenoidal, mean-free initial pair `(u0, b0)`.
pub struct HmData {
    inner: InitialData,
}

/// Outcome of a Picard run.
pub struct HmRun {
    inner: RunResult,
}

/// One row of the iteration trace. `rho` is NaN where no ratio was recorded.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct HmTraceRow {
    pub m: usize,
    pub u_crit: f64,
    pub b_crit: f64,
    pub b_lip: f64,
    pub u_alpha: f64,
    pub b_alpha: f64,
    pub du_crit: f64,
    pub db_crit: f64,
    pub db_lip: f64,
    pub triple: f64,
    pub rho: f64,
    pub max_divergence: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HmStatus {
    match e {
        Error::Io { .. } => HM_ERR_IO,
        Error::Format(_) | Error::Config(_) => HM_ERR_FORMAT,
        Error::NonFinite(_) | Error::Stability { .. } | Error::ToleranceNotReached { .. } | Error::SingularExtension(_) => {
            HM_ERR_NUMERIC
        }
        _ => HM_ERR_INVALID_ARG,
    }
}

struct Fail(HmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HM_ERR_NULL, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(HM_ERR_INVALID_ARG, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> HmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HM_OK,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HM_ERR_PANIC
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn out_handle<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    let slot = as_mut(out, "out")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

fn field_len(grid: &Grid) -> usize {
    3 * grid.len()
}

unsafe fn physical_in(grid: &Grid, values: *const f64, len: usize, what: &str) -> Result<SpectralField, Fail> {
    if values.is_null() {
        return Err(null(what));
    }
    if len != field_len(grid) {
        return Err(invalid(format!("{what}: expected {} values, got {len}", field_len(grid))));
    }
    let v = std::slice::from_raw_parts(values, len).to_vec();
    Ok(forward_transform(&PhysicalField::from_values(grid, 3, v)?)?)
}

unsafe fn physical_out(f: &SpectralField, out: *mut f64, len: usize, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    let p = inverse_transform(f)?;
    if len != p.values().len() {
        return Err(invalid(format!("{what}: expected room for {} values, got {len}", p.values().len())));
    }
    std::slice::from_raw_parts_mut(out, len).copy_from_slice(p.values());
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default solver parameters.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn hm_config_new(out: *mut *mut HmConfig) -> HmStatus {
    guard(|| out_handle(out, HmConfig { inner: SolverConfig::default() }))
}

/// Solver parameters from TOML text in the command-line config format.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` as for `hm_config_new`.
#[no_mangle]
pub unsafe extern "C" fn hm_config_from_toml(toml: *const c_char, out: *mut *mut HmConfig) -> HmStatus {
    guard(|| {
        let text = as_str(toml, "toml")?;
        let cfg = hallmild::cli::RunConfig::from_toml_str(text)?;
        out_handle(out, HmConfig { inner: cfg.solver() })
    })
}

fn config_slot<'a>(cfg: &'a mut SolverConfig, key: &str) -> Result<ConfigSlot<'a>, Fail> {
    Ok(match key {
        "p" => ConfigSlot::F(&mut cfg.p),
        "q" => ConfigSlot::F(&mut cfg.q),
        "alpha" => ConfigSlot::F(&mut cfg.alpha),
        "box_length" => ConfigSlot::F(&mut cfg.box_length),
        "t_final" => ConfigSlot::F(&mut cfg.t_final),
        "tol" => ConfigSlot::F(&mut cfg.tol),
        "ceiling_factor" => ConfigSlot::F(&mut cfg.ceiling_factor),
        "hall" => ConfigSlot::F(&mut cfg.hall),
        "n" => ConfigSlot::U(&mut cfg.n),
        "n_t" => ConfigSlot::U(&mut cfg.n_t),
        "quad_order" => ConfigSlot::U(&mut cfg.quad_order),
        "ext_order" => ConfigSlot::U(&mut cfg.ext_order),
        "max_iterations" => ConfigSlot::U(&mut cfg.max_iterations),
        _ => return Err(invalid(format!("unknown config key {key:?}"))),
    })
}

enum ConfigSlot<'a> {
    F(&'a mut f64),
    U(&'a mut usize),
}

/// Sets one parameter by name (`p`, `q`, `alpha`, `n`, `box_length`,
/// `t_final`, `n_t`, `quad_order`, `ext_order`, `max_iterations`, `tol`,
/// `ceiling_factor`, `hall`). Integer keys need an integral value. The
/// whole configuration is validated; on failure it is left unchanged.
///
/// # Safety
/// `cfg` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hm_config_set(cfg: *mut HmConfig, key: *const c_char, value: f64) -> HmStatus {
    guard(|| {
        let cfg = as_mut(cfg, "cfg")?;
        let key = as_str(key, "key")?;
        let mut next = cfg.inner.clone();
        match config_slot(&mut next, key)? {
            ConfigSlot::F(x) => *x = value,
            ConfigSlot::U(x) => {
                if !(value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(invalid(format!("{key} needs a non-negative integer, got {value}")));
                }
                *x = value as usize;
            }
        }
        next.validate()?;
        cfg.inner = next;
        Ok(())
    })
}

/// Reads one parameter by name (see `hm_config_set`).
///
/// # Safety
/// `cfg` must be a live handle, `key` a NUL-terminated string and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_config_get(cfg: *const HmConfig, key: *const c_char, value: *mut f64) -> HmStatus {
    guard(|| {
        let mut inner = as_ref(cfg, "cfg")?.inner.clone();
        let key = as_str(key, "key")?;
        let v = match config_slot(&mut inner, key)? {
            ConfigSlot::F(x) => *x,
            ConfigSlot::U(x) => *x as f64,
        };
        *as_mut(value, "value")? = v;
        Ok(())
    })
}

/// Number of doubles in one physical vector field, `3 n³`.
///
/// # Safety
/// `cfg` must be a live handle and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_config_field_len(cfg: *const HmConfig, len: *mut usize) -> HmStatus {
    guard(|| {
        let g = as_ref(cfg, "cfg")?.inner.grid()?;
        *as_mut(len, "len")? = field_len(&g);
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hm_config_free(cfg: *mut HmConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Generated initial data (`HM_FAMILY_*`) with `max|u0| = max|b0| = amplitude`.
///
/// # Safety
/// `cfg` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_data_generate(
    cfg: *const HmConfig,
    family: i32,
    amplitude: f64,
    seed: u64,
    out: *mut *mut HmData,
) -> HmStatus {
    guard(|| {
        let g = as_ref(cfg, "cfg")?.inner.grid()?;
        let fam = match family {
            HM_FAMILY_TAYLOR_GREEN => Family::TaylorGreen,
            HM_FAMILY_RANDOM_BAND => Family::RandomBand,
            HM_FAMILY_CONCENTRATED_BUMP => Family::ConcentratedBump,
            _ => return Err(invalid(format!("unknown family {family}"))),
        };
        out_handle(out, HmData { inner: InitialData::generate(&g, fam, amplitude, seed)? })
    })
}

/// Initial data from physical samples of `u0` and `b0`, each `len = 3 n³`
/// doubles. Both fields must be divergence free and mean free to round-off.
///
/// # Safety
/// `u0` and `b0` must point to `len` readable doubles; `cfg` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_data_from_physical(
    cfg: *const HmConfig,
    u0: *const f64,
    b0: *const f64,
    len: usize,
    out: *mut *mut HmData,
) -> HmStatus {
    guard(|| {
        let g = as_ref(cfg, "cfg")?.inner.grid()?;
        let u = physical_in(&g, u0, len, "u0")?;
        let b = physical_in(&g, b0, len, "b0")?;
        let amp = inverse_transform(&u)?.max_abs().max(inverse_transform(&b)?.max_abs());
        out_handle(out, HmData { inner: InitialData::new(u, b, Family::Custom, amp)? })
    })
}

/// # Safety
/// `data` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hm_data_free(data: *mut HmData) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Picard iteration. A diverged or capped run is still `HM_OK`; inspect
/// `hm_run_verdict`.
///
/// # Safety
/// `cfg` and `data` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_run(cfg: *const HmConfig, data: *const HmData, out: *mut *mut HmRun) -> HmStatus {
    guard(|| {
        let cfg = as_ref(cfg, "cfg")?;
        let data = as_ref(data, "data")?;
        cfg.inner.grid()?.ensure_same(data.inner.grid())?;
        out_handle(out, HmRun { inner: run(&cfg.inner, &data.inner)? })
    })
}

/// `HM_VERDICT_*` of the run.
///
/// # Safety
/// `r` must be a live handle and `verdict` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_run_verdict(r: *const HmRun, verdict: *mut i32) -> HmStatus {
    guard(|| {
        let v = match as_ref(r, "run")?.inner.verdict {
            Verdict::Converged => HM_VERDICT_CONVERGED,
            Verdict::Diverged => HM_VERDICT_DIVERGED,
            Verdict::MaxIter => HM_VERDICT_MAX_ITER,
        };
        *as_mut(verdict, "verdict")? = v;
        Ok(())
    })
}

/// Trace length.
///
/// # Safety
/// `r` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_run_iterations(r: *const HmRun, count: *mut usize) -> HmStatus {
    guard(|| {
        *as_mut(count, "count")? = as_ref(r, "run")?.inner.iterations();
        Ok(())
    })
}

/// Geometric mean of the contraction ratios; NaN when none were recorded.
///
/// # Safety
/// `r` must be a live handle and `rho_bar` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_run_rho_bar(r: *const HmRun, rho_bar: *mut f64) -> HmStatus {
    guard(|| {
        *as_mut(rho_bar, "rho_bar")? = as_ref(r, "run")?.inner.trace.rho_bar().unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Trace row `index` (0-based).
///
/// # Safety
/// `r` must be a live handle and `row` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_run_trace_row(r: *const HmRun, index: usize, row: *mut HmTraceRow) -> HmStatus {
    guard(|| {
        let rows = &as_ref(r, "run")?.inner.trace.rows;
        let x = rows.get(index).ok_or_else(|| invalid(format!("row {index} out of range (trace has {})", rows.len())))?;
        *as_mut(row, "row")? = HmTraceRow {
            m: x.m,
            u_crit: x.u_crit,
            b_crit: x.b_crit,
            b_lip: x.b_lip,
            u_alpha: x.u_alpha,
            b_alpha: x.b_alpha,
            du_crit: x.du_crit,
            db_crit: x.db_crit,
            db_lip: x.db_lip,
            triple: x.triple,
            rho: x.rho.unwrap_or(f64::NAN),
            max_divergence: x.max_divergence,
        };
        Ok(())
    })
}

/// Physical samples of the last iterate at `t = T` into `u` and `b`, each
/// with room for `len = 3 n³` doubles.
///
/// # Safety
/// `u` and `b` must point to `len` writable doubles; `r` must be live.
#[no_mangle]
pub unsafe extern "C" fn hm_run_final_fields(r: *const HmRun, u: *mut f64, b: *mut f64, len: usize) -> HmStatus {
    guard(|| {
        let r = &as_ref(r, "run")?.inner;
        physical_out(r.u.last(), u, len, "u")?;
        physical_out(r.b.last(), b, len, "b")
    })
}

/// # Safety
/// `r` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hm_run_free(r: *mut HmRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Strong-form reference solution at `t = T` by exponential time stepping
/// (`HM_SCHEME_*`) with step `dt`, which must divide `T`. The Hall
/// coefficient and horizon come from `cfg`.
///
/// # Safety
/// `u` and `b` must point to `len` writable doubles; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn hm_reference(
    cfg: *const HmConfig,
    data: *const HmData,
    dt: f64,
    scheme: i32,
    u: *mut f64,
    b: *mut f64,
    len: usize,
) -> HmStatus {
    guard(|| {
        let cfg = &as_ref(cfg, "cfg")?.inner;
        let data = &as_ref(data, "data")?.inner;
        let scheme = match scheme {
            HM_SCHEME_EULER => Scheme::ImexEuler,
            HM_SCHEME_AB2 => Scheme::ImexCnab2,
            _ => return Err(invalid(format!("unknown scheme {scheme}"))),
        };
        let ic = ImexConfig { hall: cfg.hall, ..ImexConfig::for_horizon(cfg.t_final, dt, scheme)? };
        let r = imex_run(&data.u0, &data.b0, &ic)?;
        physical_out(&r.u, u, len, "u")?;
        physical_out(&r.b, b, len, "b")
    })
}

/// Spatial Besov norm `‖f‖_{B^s_{p,q}}` of a physical field with `ncomp`
/// components on the `n³` grid of side `box_length`. `p` or `q` may be
/// `INFINITY`.
///
/// # Safety
/// `values` must point to `ncomp n³` readable doubles and `norm` be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_besov_norm(
    n: usize,
    box_length: f64,
    ncomp: usize,
    values: *const f64,
    s: f64,
    p: f64,
    q: f64,
    norm: *mut f64,
) -> HmStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let g = Grid::new(n, box_length)?;
        if ncomp == 0 {
            return Err(invalid("ncomp must be positive"));
        }
        let v = std::slice::from_raw_parts(values, ncomp * g.len()).to_vec();
        let f = forward_transform(&PhysicalField::from_values(&g, ncomp, v)?)?;
        *as_mut(norm, "norm")? = spatial_block_norms(&f, p)?.report(s, q)?.total;
        Ok(())
    })
}
