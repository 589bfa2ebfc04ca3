use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use biphoton::crystal::CrystalSpec;
use biphoton::scan::optimize_fiber;
use biphoton::units::{CM, NM, PER_CM2};
use biphoton::{FilterSpec, MaterialSet, Pipeline};

const BIN: &str = env!("CARGO_BIN_EXE_biphoton");

fn biphoton(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("BIPHOTON_MATERIALS")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn golden_keys(name: &str) -> Vec<String> {
    let text = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap();
    text.lines().map(str::to_string).collect()
}

fn keys(v: &Value) -> Vec<String> {
    let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
    k.sort();
    k
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse::<f64>().unwrap()).collect())
        .collect();
    (headers, rows)
}

fn check_csv(path: &Path) {
    let (_, rows) = read_csv(path);
    assert!(rows.len() >= 2, "{}", path.display());
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]), "{}", path.display());
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SCENARIO_A: &str = r#"
[crystal]
length_cm = 0.8
alpha_cm2 = -20
pump_nm = 458
degenerate_nm = 916

[fiber]
l_s_m = 1.06
"#;

#[test]
fn run_writes_every_artifact_with_pinned_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("missing/dir");
    ok(&biphoton(&["run", "fig4", "--out", out.to_str().unwrap(), "--grid-points", "16384"]));
    let s = summary(&out);
    assert_eq!(keys(&s), golden_keys("run_summary_keys.txt"));
    assert_eq!(s["schema_version"], 1);
    assert_eq!(s["grid_points"], 16384);
    let files: Vec<&str> = s["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert_eq!(files, ["spectrum.csv", "g2_before.csv", "g2_after.csv", "plot.gp", "summary.json"]);
    for f in &files {
        assert!(out.join(f).is_file(), "{f}");
    }
    for f in ["spectrum.csv", "g2_before.csv", "g2_after.csv"] {
        check_csv(&out.join(f));
    }
    let (headers, _) = read_csv(&out.join("spectrum.csv"));
    assert_eq!(headers, ["wavelength_nm", "intensity_norm", "hp_fs2", "ofp_fs2"]);
    let (headers, rows) = read_csv(&out.join("g2_after.csv"));
    assert_eq!(headers, ["tau_ps", "g2_norm"]);
    assert!(rows.iter().any(|r| r[1] == 1.0));
}

#[test]
fn rerun_overwrites_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let args = ["run", "fig6", "--out", out.to_str().unwrap(), "--grid-points", "8192"];
    ok(&biphoton(&args));
    let first: Vec<Vec<u8>> = ["spectrum.csv", "g2_after.csv", "summary.json"]
        .iter()
        .map(|f| fs::read(out.join(f)).unwrap())
        .collect();
    ok(&biphoton(&args));
    for (f, before) in ["spectrum.csv", "g2_after.csv", "summary.json"].iter().zip(first) {
        assert_eq!(fs::read(out.join(f)).unwrap(), before, "{f}");
    }
}

#[test]
fn scenario_a_summary_matches_reported_compression() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("a");
    ok(&biphoton(&["run", "fig4", "--out", out.to_str().unwrap()]));
    let s = summary(&out);
    let before = s["fwhm_before_fs"].as_f64().unwrap();
    let after = s["fwhm_after_fs"].as_f64().unwrap();
    assert!((before - 2800.0).abs() <= 0.3 * 2800.0, "before {before} fs");
    assert!((after - 67.0).abs() <= 0.3 * 67.0, "after {after} fs");
}

#[test]
fn optimize_matches_manual_two_step_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SCENARIO_A.replace("1.06", "\"optimize\"").replace("alpha_cm2 = -20", "alpha_cm2 = -100"));
    let out = tmp.path().join("opt");
    ok(&biphoton(&["run", &cfg, "--out", out.to_str().unwrap(), "--grid-points", "16384"]));
    let s = summary(&out);
    assert_eq!(s["fiber_optimized"], true);
    assert!(s["files"].as_array().unwrap().iter().any(|f| f == "fiber_scan.csv"));
    check_csv(&out.join("fiber_scan.csv"));

    let m = MaterialSet::bundled();
    let c = CrystalSpec::new(&m, 0.8 * CM, -100.0 * PER_CM2, 458.0 * NM, 916.0 * NM).unwrap();
    let p = Pipeline::new(&m, c, FilterSpec::Flat, FilterSpec::Flat, 16384).unwrap();
    let range = biphoton::scan::default_fiber_range(&p).unwrap();
    let (_, best) = optimize_fiber(&p, range, 41).unwrap();
    assert_eq!(s["fiber_length_signal_m"].as_f64().unwrap(), best.length);
    assert_eq!(s["fwhm_after_fs"].as_f64().unwrap(), best.correlation_time * 1e15);
}

#[test]
fn fiber_scan_reports_argmin() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    ok(&biphoton(&["scan", "fig3", "--out", out.to_str().unwrap(), "--grid-points", "16384"]));
    let s = summary(&out);
    assert_eq!(keys(&s), golden_keys("scan_summary_keys.txt"));
    let (headers, rows) = read_csv(&out.join("scan.csv"));
    assert_eq!(headers, ["fiber_length_m", "correlation_time_fs", "correlation_time_opposite_chirp_fs"]);
    assert_eq!(rows.len(), 41);
    check_csv(&out.join("scan.csv"));
    let argmin = s["argmin_value"].as_f64().unwrap();
    assert!((argmin - 1.06).abs() <= 0.15 * 1.06, "argmin {argmin} m");
}

#[test]
fn chirp_scan_endpoints() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!(
            "{}\n[scan]\nkind = \"chirp\"\nfrom_cm2 = 50\nto_cm2 = 500\nsteps = 4\n",
            SCENARIO_A.replace("length_cm = 0.8", "length_cm = 2.5")
        ),
    );
    let out = tmp.path().join("c");
    ok(&biphoton(&["scan", &cfg, "--out", out.to_str().unwrap()]));
    let s = summary(&out);
    assert_eq!(s["metric_unit"], "nm");
    let first = s["first_metric"].as_f64().unwrap();
    let last = s["last_metric"].as_f64().unwrap();
    let (_, rows) = read_csv(&out.join("scan.csv"));
    assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1]));
    assert!((first - 53.28).abs() <= 0.2 * 53.28, "{first} nm at 50 cm^-2");
    assert!((last - 425.86).abs() <= 0.2 * 425.86, "{last} nm at 500 cm^-2");
}

#[test]
fn zero_step_scan_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &format!("{SCENARIO_A}\n[scan]\nkind = \"fiber_length\"\nfrom_m = 0\nto_m = 2\nsteps = 0\n"),
    );
    let out = biphoton(&["scan", &cfg, "--out", tmp.path().join("z").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scan.steps"));
    assert!(!tmp.path().join("z").exists());
}

#[test]
fn unknown_key_is_reported_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SCENARIO_A.replace("pump_nm", "pump_wavelength_nm"));
    let out = biphoton(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pump_wavelength_nm") && err.contains("line"), "{err}");
}

#[test]
fn scan_without_stanza_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SCENARIO_A);
    let out = biphoton(&["scan", &cfg, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn numeric_failures_carry_a_module_tag() {
    let tmp = tempfile::tempdir().unwrap();
    // 3.6 µm degenerate signal lies outside the KTP models
    let cfg = write_config(tmp.path(), &SCENARIO_A.replace("pump_nm = 458", "pump_nm = 1800").replace("916", "3600"));
    let out = biphoton(&["run", &cfg, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dispersion:"));
}

#[test]
fn materials_path_from_flag_and_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/materials.toml");
    let copy = tmp.path().join("m.toml");
    fs::copy(&bundled, &copy).unwrap();
    let out_dir = tmp.path().join("o");
    let out = Command::new(BIN)
        .args(["run", "fig4", "--out", out_dir.to_str().unwrap(), "--grid-points", "4096"])
        .env("BIPHOTON_MATERIALS", &copy)
        .output()
        .unwrap();
    ok(&out);
    let out = Command::new(BIN)
        .args(["run", "fig4", "--grid-points", "4096"])
        .env("BIPHOTON_MATERIALS", tmp.path().join("absent.toml"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let out = biphoton(&["run", "fig4", "--materials", "/nonexistent/m.toml"]);
    assert!(!out.status.success());
}

#[test]
fn figures_catalog() {
    let out = biphoton(&["figures"]);
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 14);
    let fig4 = lines.iter().find(|l| l.starts_with("fig4 ")).unwrap();
    assert!(fig4.contains("L = 0.8 cm") && fig4.contains("alpha = -20") && fig4.contains("fiber 1.06 m"));
    for id in ["fig13 ", "fig14 "] {
        let l = lines.iter().find(|l| l.starts_with(id)).unwrap();
        assert!(l.contains("gaussian filter 532 nm / 250 nm"), "{l}");
    }
    let tmp = tempfile::tempdir().unwrap();
    ok(&biphoton(&["figures", "--write", tmp.path().to_str().unwrap()]));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 14);
}
