use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::config::RunConfig;
use super::manifest::{read_manifest, OutputDir};
use super::{Command, GlobalOpts, EXIT_DIVERGED, EXIT_MAX_ITER, EXIT_OK};
use crate::besov::{
    anisotropic_block_norms, battery_corpus, estimate_battery, spatial_block_norms, BesovReport, Flavor,
};
use crate::error::{Error, Result};
use crate::heat::mild::LORENTZ_IDENTITY;
use crate::picard::{amplitude_sweep, box_size_study, continuity_profile, run, smallness_report, Verdict};
use crate::reference::{cross_validate, IMEX_FORM, imex_run, observed_order, CompareReport, ImexConfig};
use crate::spectral::io::{read_field, read_sidecar, read_spacetime, write_field, write_spacetime};

fn load_config(g: &GlobalOpts) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
        cfg.battery.seed = seed;
    }
    if let Some(out) = &g.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

fn snapshot(cfg: &RunConfig) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null)
}

pub(super) fn dispatch(g: &GlobalOpts, cmd: &Command) -> Result<i32> {
    let cfg = load_config(g)?;
    match cmd {
        Command::Run => cmd_run(&cfg),
        Command::Sweep { amplitudes, refine } => {
            let mut cfg = cfg;
            if let Some(a) = amplitudes {
                cfg.sweep.amplitudes = a.clone();
            }
            if let Some(r) = refine {
                cfg.sweep.refine_rounds = *r;
            }
            cmd_sweep(&cfg)
        }
        Command::Boxsize { factors } => cmd_boxsize(&cfg, factors),
        Command::Norms { field, s, p, q, flavor } => {
            let mut cfg = cfg;
            if let Some(v) = s {
                cfg.besov.s = *v;
            }
            if let Some(v) = p {
                cfg.besov.p = *v;
            }
            if let Some(v) = q {
                cfg.besov.q = *v;
            }
            if flavor.is_some() {
                cfg.besov.flavor = *flavor;
            }
            cmd_norms(&cfg, field)
        }
        Command::Verify { samples } => {
            let mut cfg = cfg;
            if let Some(n) = samples {
                cfg.battery.samples = *n;
            }
            cmd_verify(&cfg)
        }
        Command::Reference => cmd_reference(&cfg),
        Command::Compare { mild, imex } => match (mild, imex) {
            (Some(m), Some(i)) => cmd_compare_dirs(&cfg, m, i),
            _ => cmd_compare(&cfg),
        },
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Converged => EXIT_OK,
        Verdict::Diverged => EXIT_DIVERGED,
        Verdict::MaxIter => EXIT_MAX_ITER,
    }
}

#[derive(Serialize)]
struct RunSummary<'a> {
    verdict: Verdict,
    iterations: usize,
    rho_bar: Option<f64>,
    final_triple: f64,
    note: Option<&'a str>,
    j_min: i32,
    j_max: i32,
    /// `‖b(t_i) - b0‖` in spatial `B^{3/p}_{p,1}` over the first slices.
    continuity: Vec<f64>,
    smallness: &'a crate::picard::SmallnessReport,
}

pub fn cmd_run(cfg: &RunConfig) -> Result<i32> {
    let mut out = OutputDir::create(&cfg.output.dir)?;
    out.note(format!("mild form: {LORENTZ_IDENTITY}"));
    let data = cfg.initial_data()?;
    let solver = cfg.solver();
    let clock = Instant::now();
    let r = run(&solver, &data)?;
    out.time("solve_seconds", clock.elapsed().as_secs_f64());
    out.timings.insert(
        "iteration_seconds".into(),
        serde_json::json!(r.trace.rows.iter().map(|x| x.seconds).collect::<Vec<_>>()),
    );
    let small = smallness_report(&r.trace)?;
    let continuity = continuity_profile(&r.b, &data.b0, solver.p, solver.n_t.min(4))?;
    out.write_csv("trace.csv", &r.trace.rows)?;
    out.write_csv("smallness.csv", &small.norms)?;
    out.write_json(
        "run.json",
        &RunSummary {
            verdict: r.verdict,
            iterations: r.iterations(),
            rho_bar: r.trace.rho_bar(),
            final_triple: r.trace.rows.last().map_or(f64::NAN, |x| x.triple),
            note: r.note.as_deref(),
            j_min: r.trace.j_min,
            j_max: r.trace.j_max,
            continuity,
            smallness: &small,
        },
    )?;
    if r.verdict == Verdict::Converged && cfg.output.write_fields {
        let prov = serde_json::json!({ "family": data.family, "amplitude": data.amplitude, "seed": cfg.seed });
        for (name, f) in [("u.hmf", &r.u), ("b.hmf", &r.b)] {
            write_spacetime(&out.path(name), f, "picard fixed point", prov.clone())?;
            out.register(name);
            out.register(&format!("{name}.json"));
        }
    }
    let code = verdict_code(r.verdict);
    println!("verdict {} after {} iterations", r.verdict.as_str(), r.iterations());
    out.finish("run", snapshot(cfg), r.verdict.as_str(), code)?;
    Ok(code)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<i32> {
    let mut out = OutputDir::create(&cfg.output.dir)?;
    out.note(format!("mild form: {LORENTZ_IDENTITY}"));
    if cfg.data.family == crate::picard::Family::Custom {
        return Err(Error::Config("sweep needs a generated data family".into()));
    }
    let solver = cfg.solver();
    let clock = Instant::now();
    let rep = amplitude_sweep(&solver, cfg.data.family, cfg.seed, &cfg.sweep.amplitudes, cfg.sweep.refine_rounds)?;
    out.time("sweep_seconds", clock.elapsed().as_secs_f64());
    out.write_csv("sweep.csv", &rep.entries)?;
    out.write_json("sweep.json", &rep)?;
    for e in &rep.entries {
        println!("a = {:<12e} {:<10} rho_bar = {}", e.amplitude, e.verdict.as_str(), e.rho_bar.map_or("-".into(), |r| format!("{r:.4e}")));
    }
    match rep.a_star {
        Some(a) => println!("a* = {a:e}"),
        None => println!("a* = none (no amplitude converged)"),
    }
    if !rep.exceptions.is_empty() {
        println!("boundary exceptions: {:?}", rep.exceptions);
    }
    let code = if rep.monotone { EXIT_OK } else { EXIT_DIVERGED };
    out.finish("sweep", snapshot(cfg), if rep.monotone { "monotone" } else { "non-monotone" }, code)?;
    Ok(code)
}

pub fn cmd_boxsize(cfg: &RunConfig, factors: &[usize]) -> Result<i32> {
    let mut out = OutputDir::create(&cfg.output.dir)?;
    out.note(format!("mild form: {LORENTZ_IDENTITY}"));
    let clock = Instant::now();
    let study = box_size_study(&cfg.solver(), cfg.data.amplitude, factors)?;
    out.time("boxsize_seconds", clock.elapsed().as_secs_f64());
    out.write_csv("boxsize.csv", &study.entries)?;
    out.write_json("boxsize.json", &study)?;
    for e in &study.entries {
        println!(
            "L = {:<10.4} n = {:<4} {:<10} change = {}",
            e.box_length,
            e.n,
            e.verdict.as_str(),
            e.change.map_or("-".into(), |c| format!("{c:.3e}"))
        );
    }
    let code = if study.stabilizing { EXIT_OK } else { EXIT_DIVERGED };
    out.finish("boxsize", snapshot(cfg), if study.stabilizing { "stabilizing" } else { "not-stabilizing" }, code)?;
    Ok(code)
}

pub fn cmd_norms(cfg: &RunConfig, field: &Path) -> Result<i32> {
    let sidecar = read_sidecar(field).ok();
    let layout = sidecar.as_ref().map(|s| s.layout.clone());
    let mut out = OutputDir::create(&cfg.output.dir)?;
    let report: BesovReport = match layout.as_deref() {
        Some("spacetime") => {
            let f = read_spacetime(field)?;
            let spec = cfg.besov_spec(Flavor::AnisotropicSpacetime)?;
            if spec.flavor != Flavor::AnisotropicSpacetime {
                return Err(Error::InvalidParameter("a space-time field needs the anisotropic flavor".into()));
            }
            anisotropic_block_norms(&f, spec.p, cfg.besov.ext_order)?.report(spec.s, spec.q)?
        }
        _ => {
            let f = match read_field(field) {
                Ok(f) => f,
                Err(Error::Format(m)) if layout.is_none() => {
                    // no sidecar: try the space-time layout before giving up
                    match read_spacetime(field) {
                        Ok(st) => {
                            let spec = cfg.besov_spec(Flavor::AnisotropicSpacetime)?;
                            let rep = anisotropic_block_norms(&st, spec.p, cfg.besov.ext_order)?.report(spec.s, spec.q)?;
                            return finish_norms(cfg, out, rep);
                        }
                        Err(_) => return Err(Error::Format(m)),
                    }
                }
                Err(e) => return Err(e),
            };
            let spec = cfg.besov_spec(Flavor::IsotropicSpatial)?;
            if spec.flavor != Flavor::IsotropicSpatial {
                return Err(Error::InvalidParameter("a single slice needs the spatial flavor".into()));
            }
            spatial_block_norms(&f, spec.p)?.report(spec.s, spec.q)?
        }
    };
    out.time("norms_seconds", 0.0);
    finish_norms(cfg, out, report)
}

fn finish_norms(cfg: &RunConfig, mut out: OutputDir, report: BesovReport) -> Result<i32> {
    out.write_csv("norms.csv", &report.per_block)?;
    out.write_json("norms.json", &report)?;
    println!("{} norm total = {:.6e} over blocks {}..={}", report.label, report.total, report.j_min, report.j_max);
    out.finish("norms", snapshot(cfg), "ok", EXIT_OK)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BatteryRow<'a> {
    inequality: &'a str,
    fitted_constant: f64,
    heldout_max: f64,
    violations: usize,
    degenerate: usize,
    pass: bool,
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<i32> {
    let mut out = OutputDir::create(&cfg.output.dir)?;
    let clock = Instant::now();
    let corpus = battery_corpus(&cfg.battery)?;
    let rep = estimate_battery(&corpus, &cfg.battery)?;
    out.time("battery_seconds", clock.elapsed().as_secs_f64());
    let rows: Vec<BatteryRow> = rep
        .results
        .iter()
        .map(|r| BatteryRow {
            inequality: &r.name,
            fitted_constant: r.fitted_constant,
            heldout_max: r.heldout_max,
            violations: r.violations.len(),
            degenerate: r.degenerate.len(),
            pass: r.pass,
        })
        .collect();
    out.write_csv("battery.csv", &rows)?;
    out.write_json("battery.json", &rep)?;
    for w in &rep.warnings {
        println!("warning: {w}");
    }
    for r in &rep.results {
        println!(
            "{} {:<20} c = {:.4e} held-out max = {:.4e} violations = {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.fitted_constant,
            r.heldout_max,
            r.violations.len()
        );
    }
    let ok = rep.all_pass();
    let code = if ok { EXIT_OK } else { EXIT_DIVERGED };
    out.finish("verify", snapshot(cfg), if ok { "pass" } else { "fail" }, code)?;
    Ok(code)
}

#[derive(Serialize)]
struct EnergyRow {
    step: usize,
    t: f64,
    energy: f64,
}

#[derive(Serialize)]
struct ReferenceSummary {
    dt: f64,
    steps: usize,
    t_final: f64,
    scheme: crate::reference::Scheme,
    max_divergence: f64,
    initial_energy: f64,
    final_energy: f64,
}

pub fn cmd_reference(cfg: &RunConfig) -> Result<i32> {
    let mut out = OutputDir::create(&cfg.output.dir)?;
    out.note(format!("reference: {IMEX_FORM}"));
    let data = cfg.initial_data()?;
    let ic = cfg.imex()?;
    let clock = Instant::now();
    let r = imex_run(&data.u0, &data.b0, &ic)?;
    out.time("imex_seconds", clock.elapsed().as_secs_f64());
    let rows: Vec<EnergyRow> = r
        .energy
        .iter()
        .enumerate()
        .map(|(k, &e)| EnergyRow { step: k, t: k as f64 * ic.dt, energy: e })
        .filter(|row| ic.record_every == 0 || row.step % ic.record_every == 0 || row.step == ic.steps)
        .collect();
    out.write_csv("imex.csv", &rows)?;
    out.write_json(
        "reference.json",
        &ReferenceSummary {
            dt: ic.dt,
            steps: ic.steps,
            t_final: ic.t_final(),
            scheme: ic.scheme,
            max_divergence: r.max_divergence,
            initial_energy: r.energy[0],
            final_energy: *r.energy.last().unwrap(),
        },
    )?;
    if cfg.output.write_fields {
        let prov = serde_json::json!({ "dt": ic.dt, "steps": ic.steps, "scheme": ic.scheme });
        for (name, f) in [("u_final.hmf", &r.u), ("b_final.hmf", &r.b)] {
            write_field(&out.path(name), f, "imex final state", prov.clone())?;
            out.register(name);
            out.register(&format!("{name}.json"));
        }
    }
    println!("imex {} steps of dt = {:e}; max divergence {:.2e}", ic.steps, ic.dt, r.max_divergence);
    out.finish("reference", snapshot(cfg), "ok", EXIT_OK)?;
    Ok(EXIT_OK)
}

fn compare_row(rep: &CompareReport) -> serde_json::Value {
    serde_json::json!({
        "dt": rep.dt, "rel_l2": rep.rel_l2, "rel_l2_u": rep.rel_l2_u, "rel_l2_b": rep.rel_l2_b,
        "besov_gap_b": rep.besov_gap_b, "tol_model": rep.tol_model, "pass": rep.pass,
    })
}

#[derive(Serialize)]
struct CompareRow {
    dt: f64,
    rel_l2: f64,
    rel_l2_u: f64,
    rel_l2_b: f64,
    besov_gap_b: f64,
    tol_model: f64,
    pass: bool,
}

impl From<&CompareReport> for CompareRow {
    fn from(r: &CompareReport) -> Self {
        CompareRow {
            dt: r.dt,
            rel_l2: r.rel_l2,
            rel_l2_u: r.rel_l2_u,
            rel_l2_b: r.rel_l2_b,
            besov_gap_b: r.besov_gap_b,
            tol_model: r.tol_model,
            pass: r.pass,
        }
    }
}

/// Picard at the configured data against IMEX at `dt` and `dt/2`.
pub fn cmd_compare(cfg: &RunConfig) -> Result<i32> {
    let mut out = OutputDir::create(&cfg.output.dir)?;
    out.note(format!("mild form: {LORENTZ_IDENTITY}"));
    out.note(format!("reference: {IMEX_FORM}"));
    let data = cfg.initial_data()?;
    let solver = cfg.solver();
    let r = run(&solver, &data)?;
    if r.verdict != Verdict::Converged {
        return Err(Error::InvalidParameter(format!("Picard run did not converge ({})", r.verdict.as_str())));
    }
    let base = cfg.imex()?;
    let mut reports = Vec::new();
    for dt in [base.dt, base.dt / 2.0] {
        let ic = ImexConfig { dt, steps: base.steps * (base.dt / dt).round() as usize, ..base.clone() };
        let im = imex_run(&data.u0, &data.b0, &ic)?;
        reports.push(cross_validate((r.u.last(), r.b.last()), (&im.u, &im.b), solver.t_final, dt, solver.p)?);
    }
    let order = observed_order(reports[0].rel_l2, reports[1].rel_l2);
    let ok = reports[0].pass && order >= 1.8;
    let rows: Vec<CompareRow> = reports.iter().map(CompareRow::from).collect();
    out.write_csv("compare.csv", &rows)?;
    out.write_json(
        "compare.json",
        &serde_json::json!({
            "t": solver.t_final,
            "reports": reports.iter().map(compare_row).collect::<Vec<_>>(),
            "observed_order": order,
            "pass": ok,
            "note": reports[0].note,
        }),
    )?;
    for rep in &reports {
        println!("dt = {:e}: relative L2 gap {:.3e} (tol_model {:.1e})", rep.dt, rep.rel_l2, rep.tol_model);
    }
    println!("observed order {order:.2}");
    let code = if ok { EXIT_OK } else { EXIT_DIVERGED };
    out.finish("compare", snapshot(cfg), if ok { "pass" } else { "fail" }, code)?;
    Ok(code)
}

/// Compares the final slices of a `run` directory with a `reference` directory.
pub fn cmd_compare_dirs(cfg: &RunConfig, mild: &Path, imex: &Path) -> Result<i32> {
    let m = read_manifest(mild)?;
    let i = read_manifest(imex)?;
    if m.command != "run" || i.command != "reference" {
        return Err(Error::InvalidParameter(format!(
            "expected a run and a reference directory, got {} and {}",
            m.command, i.command
        )));
    }
    let u = read_spacetime(&mild.join("u.hmf"))?;
    let b = read_spacetime(&mild.join("b.hmf"))?;
    let iu = read_field(&imex.join("u_final.hmf"))?;
    let ib = read_field(&imex.join("b_final.hmf"))?;
    let summary: serde_json::Value = {
        let p = imex.join("reference.json");
        let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?
    };
    let dt = summary["dt"].as_f64().ok_or_else(|| Error::Format("reference.json lacks dt".into()))?;
    let t_imex = summary["t_final"].as_f64().unwrap_or(f64::NAN);
    if (t_imex - u.t_final()).abs() > 1e-12 * u.t_final() {
        return Err(Error::InvalidParameter(format!("horizons differ: {} vs {t_imex}", u.t_final())));
    }
    let p = m.config["solver"]["p"].as_f64().unwrap_or(cfg.solver.p);
    let rep = cross_validate((u.last(), b.last()), (&iu, &ib), u.t_final(), dt, p)?;
    let mut out = OutputDir::create(&cfg.output.dir)?;
    out.write_csv("compare.csv", &[CompareRow::from(&rep)])?;
    out.write_json("compare.json", &rep)?;
    println!("relative L2 gap {:.3e} (tol_model {:.1e}) {}", rep.rel_l2, rep.tol_model, if rep.pass { "PASS" } else { "FAIL" });
    let code = if rep.pass { EXIT_OK } else { EXIT_DIVERGED };
    out.finish("compare", snapshot(cfg), if rep.pass { "pass" } else { "fail" }, code)?;
    Ok(code)
}
