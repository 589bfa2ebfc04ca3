use biphoton::crystal::DEFAULT_POINTS;
use biphoton::scan::{
    default_fiber_range, optimize_fiber, refine_optimal_fiber_length, scan_chirp, scan_crystal_length,
    scan_fiber_length, ScanSetup, DEFAULT_STEPS,
};
use biphoton::units::{CM, NM, PER_CM2};
use biphoton::{CrystalSpec, Error, FilterSpec, MaterialSet, Pipeline};

const PUMP: f64 = 458.0 * NM;
const DEGENERATE: f64 = 916.0 * NM;

fn pipeline(length_cm: f64, alpha_cm2: f64) -> Pipeline {
    let m = MaterialSet::bundled();
    let c = CrystalSpec::new(&m, length_cm * CM, alpha_cm2 * PER_CM2, PUMP, DEGENERATE).unwrap();
    Pipeline::new(&m, c, FilterSpec::Flat, FilterSpec::Flat, DEFAULT_POINTS).unwrap()
}

fn setup(fiber_steps: usize) -> ScanSetup {
    ScanSetup {
        materials: MaterialSet::bundled(),
        pump_wavelength: PUMP,
        degenerate_wavelength: DEGENERATE,
        signal_filter: FilterSpec::Flat,
        idler_filter: FilterSpec::Flat,
        n_points: DEFAULT_POINTS,
        fiber_steps,
    }
}

#[test]
fn collapsed_range_gives_the_unfibered_point() {
    let p = pipeline(0.8, -20.0);
    let s = scan_fiber_length(&p, (0.0, 0.0), 0).unwrap();
    assert_eq!(s.parameter_values, vec![0.0]);
    assert_eq!(s.metric_values[0], p.correlation_time(0.0).unwrap());
}

#[test]
fn too_few_steps_is_a_config_error() {
    let p = pipeline(0.8, -20.0);
    assert!(matches!(scan_fiber_length(&p, (0.0, 2.0), 0), Err(Error::Config(_))));
    assert!(matches!(scan_fiber_length(&p, (0.0, 2.0), 2), Err(Error::Config(_))));
    assert!(matches!(scan_fiber_length(&p, (-1.0, 2.0), 5), Err(Error::Config(_))));
}

#[test]
fn positive_chirp_never_compresses() {
    let p = pipeline(0.8, 20.0);
    let s = scan_fiber_length(&p, (0.0, 2.0), DEFAULT_STEPS).unwrap();
    assert!(s.metric_values.windows(2).all(|w| w[1] >= w[0]), "{:?}", s.metric_values);
    assert!(default_fiber_range(&p).is_err());
}

#[test]
fn negative_chirp_scan_has_an_interior_minimum() {
    let p = pipeline(0.8, -20.0);
    let range = default_fiber_range(&p).unwrap();
    let (scan, best) = optimize_fiber(&p, range, DEFAULT_STEPS).unwrap();
    assert!(!best.at_boundary);
    let first = scan.metric_values[0];
    let last = *scan.metric_values.last().unwrap();
    assert!(first > scan.min_metric && last > scan.min_metric);
    assert!(best.correlation_time <= scan.min_metric);
    assert!(best.length >= range.0 && best.length <= range.1);
}

#[test]
fn scenario_a_optimum_near_paper_fiber() {
    let p = pipeline(0.8, -20.0);
    let (_, best) = optimize_fiber(&p, (0.0, 2.5), DEFAULT_STEPS).unwrap();
    assert!((best.length - 1.06).abs() <= 0.15 * 1.06, "optimum {} m", best.length);
}

#[test]
fn curvature_matched_length_scenario_b() {
    let p = pipeline(1.8, -50.0);
    let l = p.curvature_matched_length().unwrap().unwrap();
    assert!((l - 0.52).abs() <= 0.25 * 0.52, "HP = OFP at {l} m");
}

#[test]
fn heuristic_agrees_with_refined_optimum() {
    let p = pipeline(0.8, -20.0);
    let scan = scan_fiber_length(&p, default_fiber_range(&p).unwrap(), DEFAULT_STEPS).unwrap();
    let best = refine_optimal_fiber_length(&scan, &p).unwrap();
    assert_eq!(
        best.heuristic_agrees(0.25),
        Some(true),
        "heuristic {:?} m vs refined {} m",
        best.curvature_matched_length,
        best.length
    );
}

#[test]
fn near_perfect_compensation_reaches_fourier_limit() {
    let p = pipeline(0.8, -20.0);
    let (_, best) = optimize_fiber(&p, default_fiber_range(&p).unwrap(), DEFAULT_STEPS).unwrap();
    let profile = p.profile(&p.signal_fiber(best.length).unwrap()).unwrap();
    let ratio = profile.fwhm / profile.fourier_limit_fwhm;
    assert!(ratio <= 1.25, "{} fs vs limit {} fs", profile.fwhm * 1e15, profile.fourier_limit_fwhm * 1e15);
}

#[test]
fn crystal_length_curves() {
    let s = scan_crystal_length(&setup(21), 100.0 * PER_CM2, (0.8 * CM, 2.5 * CM), 5).unwrap();
    let pos = &s.positive.metric_values;
    assert!(pos.windows(2).all(|w| w[1] > w[0]), "{pos:?}");
    let neg = &s.negative.metric_values;
    let spread = neg.iter().cloned().fold(0.0, f64::max) / neg.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 2.0, "{neg:?}");
    assert_eq!(s.negative.series("fiber_length").unwrap().values.len(), 5);
}

#[test]
fn chirp_scan_rejects_out_of_window_values() {
    assert!(matches!(
        scan_chirp(&setup(5), 2.5 * CM, (10.0 * PER_CM2, 500.0 * PER_CM2), 5, false),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        scan_chirp(&setup(5), 2.5 * CM, (20.0 * PER_CM2, 600.0 * PER_CM2), 5, false),
        Err(Error::Config(_))
    ));
}

#[test]
fn chirp_scan_widths_are_monotone() {
    let s = scan_chirp(&setup(5), 1.8 * CM, (20.0 * PER_CM2, 500.0 * PER_CM2), 9, false).unwrap();
    assert!(s.metric_values.windows(2).all(|w| w[1] >= w[0]));
    assert!(s.extra.is_empty());
}

#[test]
fn scans_are_deterministic() {
    let p = pipeline(0.8, -20.0);
    let a = scan_fiber_length(&p, (0.0, 3.0), 11).unwrap();
    let b = scan_fiber_length(&pipeline(0.8, -20.0), (0.0, 3.0), 11).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.metric_values), bits(&b.metric_values));
}
