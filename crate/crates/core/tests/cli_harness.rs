use std::fs;
use std::path::{Path, PathBuf};

use hallmild::cli::{main_with_args, read_manifest, EXIT_IO, EXIT_OK, EXIT_USAGE};
use hallmild::spectral::io::write_field;
use hallmild::spectral::{Grid, SpectralField};
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn hm(args: &[&str]) -> i32 {
    let mut v = vec!["hallmild"];
    v.extend_from_slice(args);
    main_with_args(v)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    fs::write(&p, body).unwrap();
    p
}

const SMALL: &str = "
seed = 3
[grid]
n = 16
[time]
n_t = 16
quad_order = 8
";

fn run_small(dir: &Path, extra: &str, out: &str) -> (i32, PathBuf) {
    let cfg = write_config(dir, &format!("{SMALL}{extra}"));
    let out = dir.join(out);
    let code = hm(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    (code, out)
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

fn header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().map(String::from).collect()
}

#[test]
fn zero_amplitude_converges_at_once() {
    let tmp = TempDir::new().unwrap();
    let (code, out) = run_small(tmp.path(), "[data]\namplitude = 0.0\n", "zero");
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv_rows(&out.join("trace.csv")).len(), 1);
    let m = read_manifest(&out).unwrap();
    assert_eq!(m.verdict, "converged");
    assert!(m.complete);
}

#[test]
fn small_run_records_contraction_ratios() {
    let tmp = TempDir::new().unwrap();
    let (code, out) = run_small(tmp.path(), "", "run");
    assert_eq!(code, EXIT_OK);
    let trace = out.join("trace.csv");
    let h = header(&trace);
    let rho = h.iter().position(|c| c == "rho").unwrap();
    let rows = csv_rows(&trace);
    assert!(rows.len() >= 2);
    for r in &rows[..rows.len() - 1] {
        let v: f64 = r[rho].parse().unwrap();
        assert!(v > 0.0 && v < 1.0, "{v}");
    }
    assert_eq!(&rows[rows.len() - 1][rho], "");
    for f in ["u.hmf", "b.hmf", "smallness.csv", "run.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn manifest_hashes_match_and_reruns_are_identical() {
    let tmp = TempDir::new().unwrap();
    let (c1, a) = run_small(tmp.path(), "", "a");
    let (c2, b) = run_small(tmp.path(), "", "b");
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    let ma = read_manifest(&a).unwrap();
    let mb = read_manifest(&b).unwrap();
    assert!(!ma.files.is_empty());
    for f in &ma.files {
        let bytes = fs::read(a.join(&f.path)).unwrap();
        assert_eq!(bytes.len() as u64, f.bytes);
        assert_eq!(hex::encode(Sha256::digest(&bytes)), f.sha256, "{}", f.path);
    }
    let ha: Vec<_> = ma.files.iter().map(|f| (&f.path, &f.sha256)).collect();
    let hb: Vec<_> = mb.files.iter().map(|f| (&f.path, &f.sha256)).collect();
    assert_eq!(ha, hb);
    assert!(ma.timings.contains_key("total_seconds"));
}

#[test]
fn stale_manifest_is_removed_on_failure() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join("manifest.json"), "{}").unwrap();
    let missing = tmp.path().join("nope.hmf");
    let code = hm(&["norms", "--field", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_IO);
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn malformed_config_names_the_key() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[grid]\nn = \"sixteen\"\n");
    let code = hm(&["run", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    let err = hallmild::cli::RunConfig::load(&cfg).unwrap_err().to_string();
    assert!(err.contains("n") && err.contains("line 2"), "{err}");
}

#[test]
fn unknown_keys_and_bad_values_are_usage_errors() {
    let tmp = TempDir::new().unwrap();
    for body in ["[grid]\nsize = 16\n", "bogus = 1\n", "[grid]\nn = 12\n", "[solver]\np = 6.0\n", "[data]\namplitude = -1.0\n"] {
        let cfg = write_config(tmp.path(), body);
        let code = hm(&["run", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
        assert_eq!(code, EXIT_USAGE, "{body}");
    }
    assert_eq!(hm(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(hm(&[]), EXIT_USAGE);
    assert_eq!(hm(&["run", "--threads", "0"]), EXIT_USAGE);
}

#[test]
fn missing_config_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let p = tmp.path().join("absent.toml");
    assert_eq!(hm(&["run", "--config", p.to_str().unwrap()]), EXIT_IO);
}

#[test]
fn describe_and_help_exit_cleanly() {
    assert_eq!(hm(&["--describe-output"]), EXIT_OK);
    assert_eq!(hm(&["--help"]), EXIT_OK);
    assert_eq!(hm(&["--version"]), EXIT_OK);
    let text = hallmild::cli::describe::render();
    for col in ["rho", "triple", "rho_bar", "fitted_constant", "tol_model"] {
        assert!(text.contains(col), "{col}");
    }
}

#[test]
fn sweep_of_tiny_amplitudes_converges() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[grid]\nn = 8\n[time]\nn_t = 8\nquad_order = 8\n");
    let out = tmp.path().join("sweep");
    let code = hm(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--amplitudes", "0,1e-6,1e-5"]);
    assert_eq!(code, EXIT_OK);
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 3);
    let h = header(&out.join("sweep.csv"));
    let v = h.iter().position(|c| c == "verdict").unwrap();
    assert!(rows.iter().all(|r| &r[v] == "converged"));
}

#[test]
fn norms_of_a_zero_field_vanish() {
    let tmp = TempDir::new().unwrap();
    let g = Grid::new(16, 2.0 * std::f64::consts::PI).unwrap();
    let f = tmp.path().join("zero.hmf");
    write_field(&f, &SpectralField::zeros(&g, 3).unwrap(), "zeros", serde_json::json!({})).unwrap();
    let out = tmp.path().join("norms");
    assert_eq!(hm(&["norms", "--field", f.to_str().unwrap(), "--out", out.to_str().unwrap()]), EXIT_OK);
    let h = header(&out.join("norms.csv"));
    let w = h.iter().position(|c| c == "weighted").unwrap();
    let rows = csv_rows(&out.join("norms.csv"));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[w].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn norms_reads_a_spacetime_run_output() {
    let tmp = TempDir::new().unwrap();
    let (code, run) = run_small(tmp.path(), "", "run");
    assert_eq!(code, EXIT_OK);
    let out = tmp.path().join("norms");
    let field = run.join("b.hmf");
    assert_eq!(hm(&["norms", "--field", field.to_str().unwrap(), "--out", out.to_str().unwrap(), "--s", "1.5"]), EXIT_OK);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("norms.json")).unwrap()).unwrap();
    assert!(json["total"].as_f64().unwrap() > 0.0);
    // the spatial flavor does not apply to a space-time field
    let code = hm(&["norms", "--field", field.to_str().unwrap(), "--out", out.to_str().unwrap(), "--flavor", "spatial"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn verify_warns_on_a_small_corpus_and_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[battery]\nn = 8\nn_t = 8\n");
    let go = |name: &str| {
        let out = tmp.path().join(name);
        let code = hm(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--samples", "10"]);
        (code, out)
    };
    let (c1, a) = go("a");
    let (c2, b) = go("b");
    assert_eq!(c1, c2);
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("battery.json")).unwrap()).unwrap();
    let warnings = rep["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("insufficient calibration samples")));
    assert_eq!(fs::read(a.join("battery.csv")).unwrap(), fs::read(b.join("battery.csv")).unwrap());
}

#[test]
fn reference_and_compare_directories() {
    let tmp = TempDir::new().unwrap();
    let extra = "[data]\namplitude = 1.0\n[imex]\ndt = 1e-3\n";
    let (code, run) = run_small(tmp.path(), extra, "run");
    assert_eq!(code, EXIT_OK);
    let cfg = tmp.path().join("cfg.toml");
    let reference = tmp.path().join("ref");
    assert_eq!(hm(&["reference", "--config", cfg.to_str().unwrap(), "--out", reference.to_str().unwrap()]), EXIT_OK);
    assert!(reference.join("u_final.hmf").exists());
    let out = tmp.path().join("cmp");
    let code = hm(&[
        "compare",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--mild",
        run.to_str().unwrap(),
        "--imex",
        reference.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("compare.json")).unwrap()).unwrap();
    assert!(rep["rel_l2"].as_f64().unwrap() <= 5e-6);
    // the arguments are swapped: not a run directory
    let code = hm(&["compare", "--out", out.to_str().unwrap(), "--mild", reference.to_str().unwrap(), "--imex", run.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn in_process_compare_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SMALL}[data]\namplitude = 1.0\n"));
    let out = tmp.path().join("cmp");
    assert_eq!(hm(&["compare", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), EXIT_OK);
    assert_eq!(csv_rows(&out.join("compare.csv")).len(), 2);
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let go = |threads: &str, name: &str| {
        let out = tmp.path().join(name);
        assert_eq!(hm(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]), EXIT_OK);
        fs::read(out.join("trace.csv")).unwrap()
    };
    assert_eq!(go("1", "one"), go("3", "three"));
}

fn cos_field(g: &Grid, k: [i64; 3], amp: f64) -> SpectralField {
    let len = g.len();
    let mut c = vec![num_complex::Complex64::new(0.0, 0.0); 3 * len];
    c[g.index_of(k)] += 0.5 * amp;
    c[g.index_of([-k[0], -k[1], -k[2]])] += 0.5 * amp;
    SpectralField::from_coeffs(g, 3, c).unwrap()
}

fn norms_json(tmp: &Path, f: &SpectralField, name: &str, extra: &[&str]) -> serde_json::Value {
    let file = tmp.join(format!("{name}.hmf"));
    write_field(&file, f, "synthetic", serde_json::json!({})).unwrap();
    let out = tmp.join(name);
    let mut args = vec!["norms", "--field", file.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    assert_eq!(hm(&args), EXIT_OK);
    serde_json::from_str(&fs::read_to_string(out.join("norms.json")).unwrap()).unwrap()
}

#[test]
fn single_shell_field_has_the_constructed_dominant_block() {
    let tmp = TempDir::new().unwrap();
    let g = Grid::new(32, 2.0 * std::f64::consts::PI).unwrap();
    for (k, j) in [([2, 0, 0], 1), ([4, 0, 0], 2), ([8, 0, 0], 3)] {
        let rep = norms_json(tmp.path(), &cos_field(&g, k, 1.0), &format!("shell{j}"), &[]);
        let blocks = rep["per_block"].as_array().unwrap();
        let best = blocks.iter().max_by(|a, b| a["raw"].as_f64().unwrap().total_cmp(&b["raw"].as_f64().unwrap())).unwrap();
        assert_eq!(best["j"].as_i64().unwrap(), j, "{k:?}");
    }
}

#[test]
fn norms_agree_across_resolutions() {
    let tmp = TempDir::new().unwrap();
    let l = 2.0 * std::f64::consts::PI;
    let (g16, g32) = (Grid::new(16, l).unwrap(), Grid::new(32, l).unwrap());
    let build = |g: &Grid| {
        cos_field(g, [1, 2, 0], 1.0).add(&cos_field(g, [3, 0, 1], 0.5)).unwrap().add(&cos_field(g, [0, 1, 4], 0.25)).unwrap()
    };
    for (p, tag) in [("2", "p2"), ("3", "p3")] {
        let a = norms_json(tmp.path(), &build(&g16), &format!("r16{tag}"), &["--p", p, "--s", "0.5"]);
        let b = norms_json(tmp.path(), &build(&g32), &format!("r32{tag}"), &["--p", p, "--s", "0.5"]);
        let (x, y) = (a["total"].as_f64().unwrap(), b["total"].as_f64().unwrap());
        assert!((x - y).abs() <= 0.02 * y, "p={p}: {x} vs {y}");
    }
}

#[test]
fn boxsize_study_and_manifest_notes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[grid]\nn = 8\n[time]\nn_t = 16\nt_final = 0.05\n[data]\namplitude = 0.1\n");
    let out = tmp.path().join("box");
    assert_eq!(hm(&["boxsize", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--factors", "1,2"]), EXIT_OK);
    assert_eq!(csv_rows(&out.join("boxsize.csv")).len(), 2);
    let m = read_manifest(&out).unwrap();
    assert!(m.notes.iter().any(|n| n.contains("grad|b|^2/2")), "{:?}", m.notes);
    assert_eq!(hm(&["boxsize", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--factors", "2,1"]), EXIT_USAGE);
}
