//! Scenario and scan runners.

use serde::Serialize;

use biphoton::dispersion::{fiber_curvature, harris_curvature};
use biphoton::propagation::{g2, ttpa, TemporalProfile};
use biphoton::scan::{
    default_fiber_range, optimize_fiber, refine_optimal_fiber_length, scan_chirp, scan_crystal_length,
    scan_fiber_length, FiberOptimum, ScanResult, ScanSetup,
};
use biphoton::units::{wavelength_of, CM, FS, NM, PER_CM, PER_CM2, PS};
use biphoton::{FiberSpec, Pipeline};

use crate::config::{ArmLength, Artifact, ScanConfig, Scenario};
use crate::error::CliError;
use crate::output::{OutputDir, Panel, Plot, Table, MAX_ROWS, SCHEMA_VERSION};

/// s² → fs²
const FS2: f64 = 1e-30;
/// The τ window written to the G² files, in units of the wider FWHM.
const TAU_WINDOW_FWHM: f64 = 6.0;
/// Relative agreement expected between the HP = OFP estimate and the optimum.
const HEURISTIC_TOLERANCE: f64 = 0.25;

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub kind: &'static str,
    pub title: Option<String>,
    pub crystal_length_cm: f64,
    pub alpha_cm2: f64,
    pub pump_nm: f64,
    pub degenerate_nm: f64,
    pub k0_per_cm: f64,
    pub grid_points: usize,
    pub grid_edge_ratio: f64,
    pub spectral_fwhm_nm: f64,
    pub spectral_mean_nm: f64,
    pub fiber_material: String,
    pub fiber_length_signal_m: f64,
    pub fiber_length_idler_m: f64,
    pub fiber_optimized: bool,
    pub optimum_at_boundary: Option<bool>,
    pub curvature_matched_length_m: Option<f64>,
    pub heuristic_agrees: Option<bool>,
    pub fwhm_before_fs: f64,
    pub fwhm_after_fs: f64,
    pub fourier_limit_fs: f64,
    pub compression_ratio: f64,
}

pub fn pipeline(s: &Scenario) -> Result<Pipeline, CliError> {
    Ok(Pipeline::new(
        &s.materials,
        s.crystal.clone(),
        s.signal_filter,
        s.idler_filter,
        s.n_points,
    )?)
}

fn optimizer_range(s: &Scenario, p: &Pipeline) -> Result<(f64, f64), CliError> {
    match s.config.fiber.search_max_m {
        Some(hi) => Ok((0.0, hi)),
        None => Ok(default_fiber_range(p)?),
    }
}

fn fiber_scan_table(scan: &ScanResult) -> Table {
    let mut t = Table::new(["fiber_length_m", "correlation_time_fs"]);
    for (l, v) in scan.parameter_values.iter().zip(&scan.metric_values) {
        t.push(vec![*l, v / FS]);
    }
    t
}

fn spectrum_table(s: &Scenario, p: &Pipeline, fiber: &FiberSpec) -> Result<Table, CliError> {
    let tpsa = p.tpsa();
    let norm = tpsa.normalized_intensity();
    let wp = tpsa.pump_frequency;
    let n = tpsa.grid.len();
    let stride = n.div_ceil(MAX_ROWS).max(1);
    let mut t = Table::new(["wavelength_nm", "intensity_norm", "hp_fs2", "ofp_fs2"]);
    // descending ω is ascending λ
    for j in (0..n).rev().step_by(stride) {
        let w = tpsa.grid.omega(j);
        let hp = harris_curvature(&s.crystal, &s.materials, w)?;
        let ofp = fiber_curvature(fiber, w, wp)?;
        t.push(vec![wavelength_of(w) / NM, norm[j], hp / FS2, ofp / FS2]);
    }
    Ok(t)
}

fn g2_table(profile: &TemporalProfile, half_window: f64) -> Table {
    let mut t = Table::new(["tau_ps", "g2_norm"]);
    for (tau, g) in profile.taus().zip(&profile.g2_values) {
        if (tau - profile.peak_tau).abs() <= half_window {
            t.push(vec![tau / PS, *g]);
        }
    }
    t.decimated(MAX_ROWS)
}

pub fn run_scenario(s: &Scenario, out: &mut OutputDir) -> Result<RunSummary, CliError> {
    let cfg = &s.config;
    let p = pipeline(s)?;
    let heuristic = p.curvature_matched_length()?;

    let mut optimum: Option<FiberOptimum> = None;
    let l_s = match cfg.fiber.l_s_m {
        ArmLength::Meters(l) => l,
        ArmLength::Optimize => {
            let range = optimizer_range(s, &p)?;
            let (scan, best) = optimize_fiber(&p, range, cfg.fiber.search_steps)?;
            out.csv("fiber_scan.csv", &fiber_scan_table(&scan))?;
            optimum = Some(best);
            best.length
        }
    };
    let fiber = FiberSpec::new(s.fiber_material.clone(), l_s, cfg.fiber.l_i_m)?;

    let before = g2(&ttpa(p.tpsa()))?;
    let after = p.profile(&fiber)?;
    let tpsa = p.tpsa();

    if cfg.outputs.artifacts.contains(&Artifact::Spectrum) {
        out.csv("spectrum.csv", &spectrum_table(s, &p, &fiber)?)?;
    }
    if cfg.outputs.artifacts.contains(&Artifact::G2) {
        let half = 0.5 * TAU_WINDOW_FWHM * before.fwhm.max(after.fwhm);
        out.csv("g2_before.csv", &g2_table(&before, half))?;
        out.csv("g2_after.csv", &g2_table(&after, half))?;
    }
    if cfg.outputs.artifacts.contains(&Artifact::Plot) {
        out.text("plot.gp", &run_plot(cfg.outputs.artifacts.as_slice()).script())?;
    }

    let c = &cfg.crystal;
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        kind: "run",
        title: cfg.title.clone(),
        crystal_length_cm: c.length_cm,
        alpha_cm2: c.alpha_cm2,
        pump_nm: c.pump_nm,
        degenerate_nm: c.degenerate_nm,
        k0_per_cm: s.crystal.grating_k0() / PER_CM,
        grid_points: tpsa.grid.len(),
        grid_edge_ratio: tpsa.edge_ratio(),
        spectral_fwhm_nm: tpsa.spectral_fwhm_wavelength()? / NM,
        spectral_mean_nm: tpsa.mean_wavelength() / NM,
        fiber_material: s.fiber_material.name().to_string(),
        fiber_length_signal_m: l_s,
        fiber_length_idler_m: cfg.fiber.l_i_m,
        fiber_optimized: optimum.is_some(),
        optimum_at_boundary: optimum.map(|o| o.at_boundary),
        curvature_matched_length_m: heuristic,
        heuristic_agrees: optimum.and_then(|o| o.heuristic_agrees(HEURISTIC_TOLERANCE)),
        fwhm_before_fs: before.fwhm / FS,
        fwhm_after_fs: after.fwhm / FS,
        fourier_limit_fs: after.fourier_limit_fwhm / FS,
        compression_ratio: before.fwhm / after.fwhm,
    };
    if cfg.outputs.artifacts.contains(&Artifact::Summary) {
        out.summary(&summary)?;
    }
    Ok(summary)
}

fn run_plot(artifacts: &[Artifact]) -> Plot {
    let mut panels = Vec::new();
    if artifacts.contains(&Artifact::Spectrum) {
        panels.push(Panel {
            xlabel: "signal wavelength (nm)".into(),
            ylabel: "normalized |F|^2".into(),
            logscale_y: false,
            series: vec![("spectrum.csv".into(), 1, 2, "spectrum".into())],
        });
        panels.push(Panel {
            xlabel: "signal wavelength (nm)".into(),
            ylabel: "curvature (fs^2)".into(),
            logscale_y: false,
            series: vec![
                ("spectrum.csv".into(), 1, 3, "HP".into()),
                ("spectrum.csv".into(), 1, 4, "OFP".into()),
            ],
        });
    }
    if artifacts.contains(&Artifact::G2) {
        panels.push(Panel {
            xlabel: "tau (ps)".into(),
            ylabel: "normalized G2".into(),
            logscale_y: false,
            series: vec![
                ("g2_before.csv".into(), 1, 2, "no fiber".into()),
                ("g2_after.csv".into(), 1, 2, "with fiber".into()),
            ],
        });
    }
    Plot {
        output: "plot.png".into(),
        panels,
    }
}

#[derive(Debug, Serialize)]
pub struct ScanSummary {
    pub schema_version: u32,
    pub kind: &'static str,
    pub title: Option<String>,
    pub scan_kind: &'static str,
    pub parameter_name: String,
    pub parameter_unit: &'static str,
    pub metric_name: String,
    pub metric_unit: &'static str,
    pub points: usize,
    pub argmin_value: f64,
    pub min_metric: f64,
    pub first_metric: f64,
    pub last_metric: f64,
    pub refined_optimum_m: Option<f64>,
    pub refined_metric_fs: Option<f64>,
    pub optimum_at_boundary: Option<bool>,
    pub curvature_matched_length_m: Option<f64>,
}

fn scan_setup(s: &Scenario) -> ScanSetup {
    ScanSetup {
        materials: s.materials.clone(),
        pump_wavelength: s.crystal.pump_wavelength(),
        degenerate_wavelength: s.crystal.degenerate_wavelength(),
        signal_filter: s.signal_filter,
        idler_filter: s.idler_filter,
        n_points: s.n_points,
        fiber_steps: s.config.fiber.search_steps,
    }
}

/// Summary fields of a scan after rescaling the parameter and metric.
fn scan_summary(s: &Scenario, kind: &'static str, scan: &ScanResult, units: (&'static str, f64, &'static str, f64)) -> ScanSummary {
    let (pu, ps, mu, ms) = units;
    ScanSummary {
        schema_version: SCHEMA_VERSION,
        kind: "scan",
        title: s.config.title.clone(),
        scan_kind: kind,
        parameter_name: scan.parameter_name.clone(),
        parameter_unit: pu,
        metric_name: scan.metric_name.clone(),
        metric_unit: mu,
        points: scan.len(),
        argmin_value: scan.argmin_value / ps,
        min_metric: scan.min_metric / ms,
        first_metric: scan.metric_values[0] / ms,
        last_metric: scan.metric_values[scan.len() - 1] / ms,
        refined_optimum_m: None,
        refined_metric_fs: None,
        optimum_at_boundary: None,
        curvature_matched_length_m: None,
    }
}

pub fn run_scan(s: &Scenario, out: &mut OutputDir) -> Result<ScanSummary, CliError> {
    let scan_cfg = s
        .config
        .scan
        .clone()
        .ok_or_else(|| CliError::config("scan", "the scan command needs a [scan] table"))?;
    let (summary, plot) = match scan_cfg {
        ScanConfig::FiberLength {
            from_m,
            to_m,
            steps,
            both_signs,
        } => {
            let p = pipeline(s)?;
            let scan = scan_fiber_length(&p, (from_m, to_m), steps)?;
            let mut headers = vec!["fiber_length_m".to_string(), "correlation_time_fs".to_string()];
            let opposite = if both_signs {
                let flipped = Pipeline::new(
                    &s.materials,
                    s.crystal.with_chirp(-s.crystal.chirp())?,
                    s.signal_filter,
                    s.idler_filter,
                    s.n_points,
                )?;
                headers.push("correlation_time_opposite_chirp_fs".into());
                Some(scan_fiber_length(&flipped, (from_m, to_m), steps)?)
            } else {
                None
            };
            let mut t = Table::new(headers);
            for j in 0..scan.len() {
                let mut row = vec![scan.parameter_values[j], scan.metric_values[j] / FS];
                if let Some(o) = &opposite {
                    row.push(o.metric_values[j] / FS);
                }
                t.push(row);
            }
            out.csv("scan.csv", &t)?;
            let mut summary = scan_summary(s, "fiber_length", &scan, ("m", 1.0, "fs", FS));
            summary.curvature_matched_length_m = p.curvature_matched_length()?;
            if scan.len() >= 3 {
                let best = refine_optimal_fiber_length(&scan, &p)?;
                summary.refined_optimum_m = Some(best.length);
                summary.refined_metric_fs = Some(best.correlation_time / FS);
                summary.optimum_at_boundary = Some(best.at_boundary);
            }
            let mut series = vec![("scan.csv".to_string(), 1, 2, "configured chirp".to_string())];
            if opposite.is_some() {
                series.push(("scan.csv".into(), 1, 3, "opposite chirp".into()));
            }
            (summary, panel("fiber length (m)", "correlation time (fs)", series))
        }
        ScanConfig::CrystalLength { from_cm, to_cm, steps } => {
            let r = scan_crystal_length(&scan_setup(s), s.crystal.chirp().abs(), (from_cm * CM, to_cm * CM), steps)?;
            let fiber = &r.negative.series("fiber_length").expect("fiber column").values;
            let free = &r.positive.series("uncompressed_correlation_time").expect("column").values;
            let mut t = Table::new([
                "crystal_length_cm",
                "compressed_negative_chirp_fs",
                "positive_chirp_same_fiber_fs",
                "fiber_length_m",
                "positive_chirp_no_fiber_fs",
            ]);
            for j in 0..r.negative.len() {
                t.push(vec![
                    r.negative.parameter_values[j] / CM,
                    r.negative.metric_values[j] / FS,
                    r.positive.metric_values[j] / FS,
                    fiber[j],
                    free[j] / FS,
                ]);
            }
            out.csv("scan.csv", &t)?;
            let series = vec![
                ("scan.csv".to_string(), 1, 2, "alpha < 0".to_string()),
                ("scan.csv".to_string(), 1, 3, "alpha > 0".to_string()),
            ];
            (
                scan_summary(s, "crystal_length", &r.negative, ("cm", CM, "fs", FS)),
                panel("crystal length (cm)", "correlation time (fs)", series),
            )
        }
        ScanConfig::Chirp {
            from_cm2,
            to_cm2,
            steps,
            lengths_cm,
            compress,
        } => {
            let lengths = lengths_cm.unwrap_or_else(|| vec![s.config.crystal.length_cm]);
            let setup = scan_setup(s);
            let scans = lengths
                .iter()
                .map(|l| scan_chirp(&setup, l * CM, (from_cm2 * PER_CM2, to_cm2 * PER_CM2), steps, compress))
                .collect::<Result<Vec<_>, _>>()?;
            let mut headers = vec!["alpha_abs_cm2".to_string()];
            let mut series = Vec::new();
            for l in &lengths {
                series.push(("scan.csv".to_string(), 1, headers.len() + 1, format!("L = {l} cm")));
                headers.push(format!("spectral_width_nm_l{l}cm"));
                if compress {
                    headers.push(format!("optimal_fiber_m_l{l}cm"));
                    headers.push(format!("compressed_fs_l{l}cm"));
                    headers.push(format!("uncompressed_fs_l{l}cm"));
                }
            }
            let mut t = Table::new(headers);
            for j in 0..scans[0].len() {
                let mut row = vec![scans[0].parameter_values[j] / PER_CM2];
                for sc in &scans {
                    row.push(sc.metric_values[j] / NM);
                    if compress {
                        for (name, scale) in [
                            ("optimal_fiber_length", 1.0),
                            ("compressed_correlation_time", FS),
                            ("uncompressed_correlation_time", FS),
                        ] {
                            row.push(sc.series(name).expect("compressed column").values[j] / scale);
                        }
                    }
                }
                t.push(row);
            }
            out.csv("scan.csv", &t)?;
            (
                scan_summary(s, "chirp", &scans[0], ("cm^-2", PER_CM2, "nm", NM)),
                panel("|alpha| (cm^-2)", "spectral FWHM (nm)", series),
            )
        }
    };
    if s.config.outputs.artifacts.contains(&Artifact::Plot) {
        out.text("plot.gp", &plot.script())?;
    }
    out.summary(&summary)?;
    Ok(summary)
}

fn panel(xlabel: &str, ylabel: &str, series: Vec<(String, usize, usize, String)>) -> Plot {
    Plot {
        output: "scan.png".into(),
        panels: vec![Panel {
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            logscale_y: false,
            series,
        }],
    }
}
