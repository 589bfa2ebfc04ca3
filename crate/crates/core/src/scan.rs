//! Parameter sweeps: fiber length, crystal length and chirp.

use rayon::prelude::*;

use crate::crystal::CrystalSpec;
use crate::dispersion::MaterialSet;
use crate::error::{Error, Result};
use crate::pipeline::Pipeline;
use crate::propagation::FilterSpec;
use crate::units::PER_CM2;

/// Points per sweep unless configured otherwise.
pub const DEFAULT_STEPS: usize = 41;
/// Golden-section resolution for fiber lengths, m.
pub const FIBER_RESOLUTION: f64 = 0.01;

/// Named column attached to a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub parameter_name: String,
    pub parameter_unit: String,
    pub parameter_values: Vec<f64>,
    pub metric_name: String,
    pub metric_unit: String,
    pub metric_values: Vec<f64>,
    pub argmin_value: f64,
    pub min_metric: f64,
    pub extra: Vec<Series>,
}

impl ScanResult {
    pub fn new(
        parameter: (&str, &str),
        metric: (&str, &str),
        parameter_values: Vec<f64>,
        metric_values: Vec<f64>,
    ) -> Result<Self> {
        if parameter_values.is_empty() || parameter_values.len() != metric_values.len() {
            return Err(Error::Numeric(format!(
                "scan has {} parameter values and {} metric values",
                parameter_values.len(),
                metric_values.len()
            )));
        }
        let idx = argmin(&metric_values);
        Ok(Self {
            parameter_name: parameter.0.into(),
            parameter_unit: parameter.1.into(),
            argmin_value: parameter_values[idx],
            min_metric: metric_values[idx],
            parameter_values,
            metric_name: metric.0.into(),
            metric_unit: metric.1.into(),
            metric_values,
            extra: Vec::new(),
        })
    }

    pub fn argmin_index(&self) -> usize {
        argmin(&self.metric_values)
    }

    pub fn len(&self) -> usize {
        self.parameter_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameter_values.is_empty()
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.extra.iter().find(|s| s.name == name)
    }
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (j, &v)| if v < best.1 { (j, v) } else { best })
        .0
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|j| if j + 1 == n { hi } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 })
        .collect()
}

fn check_range(name: &str, lo: f64, hi: f64, n_steps: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Config(format!("{name} range [{lo}, {hi}] is not increasing")));
    }
    if lo < hi && n_steps < 3 {
        return Err(Error::Config(format!("{name} scan needs at least 3 steps, got {n_steps}")));
    }
    Ok(())
}

/// Minimizes `f` on `[a, b]` by golden-section search until the bracket is
/// narrower than `tol`. Returns the best point seen and its value.
pub fn golden_section<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// Refined minimum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub value: f64,
    pub metric: f64,
    /// The sampled minimum sat on the scan boundary; no refinement was done.
    pub at_boundary: bool,
}

/// Golden-section refinement of a scan's minimum inside the bracket formed
/// by its neighbours.
pub fn refine_minimum<F>(scan: &ScanResult, f: F, resolution: f64) -> Result<Refinement>
where
    F: FnMut(f64) -> Result<f64>,
{
    let j = scan.argmin_index();
    if j == 0 || j + 1 == scan.len() {
        return Ok(Refinement {
            value: scan.parameter_values[j],
            metric: scan.metric_values[j],
            at_boundary: true,
        });
    }
    let (x, fx) = golden_section(f, scan.parameter_values[j - 1], scan.parameter_values[j + 1], resolution)?;
    // keep the sampled point if the search settled on something worse
    let (value, metric) = if fx <= scan.metric_values[j] {
        (x, fx)
    } else {
        (scan.parameter_values[j], scan.metric_values[j])
    };
    Ok(Refinement {
        value,
        metric,
        at_boundary: false,
    })
}

/// Optimal signal-arm fiber length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberOptimum {
    pub length: f64,
    pub correlation_time: f64,
    pub at_boundary: bool,
    /// Length at which OFP equals HP at the degenerate frequency.
    pub curvature_matched_length: Option<f64>,
}

impl FiberOptimum {
    /// Whether the curvature-matching estimate lies within `tolerance`
    /// (relative) of the refined optimum.
    pub fn heuristic_agrees(&self, tolerance: f64) -> Option<bool> {
        self.curvature_matched_length
            .map(|h| (h - self.length).abs() <= tolerance * self.length)
    }
}

/// Correlation time versus signal-arm fiber length.
pub fn scan_fiber_length(pipeline: &Pipeline, range: (f64, f64), n_steps: usize) -> Result<ScanResult> {
    let (lo, hi) = range;
    check_range("fiber length", lo, hi, n_steps)?;
    if lo < 0.0 {
        return Err(Error::Config(format!("fiber length {lo} m must be >= 0")));
    }
    let lengths = if lo == hi { vec![lo] } else { linspace(lo, hi, n_steps) };
    let times = lengths
        .par_iter()
        .map(|&l| pipeline.correlation_time(l))
        .collect::<Result<Vec<_>>>()?;
    ScanResult::new(("fiber_length", "m"), ("correlation_time", "s"), lengths, times)
}

pub fn refine_optimal_fiber_length(scan: &ScanResult, pipeline: &Pipeline) -> Result<FiberOptimum> {
    let r = refine_minimum(scan, |l| pipeline.correlation_time(l), FIBER_RESOLUTION)?;
    Ok(FiberOptimum {
        length: r.value,
        correlation_time: r.metric,
        at_boundary: r.at_boundary,
        curvature_matched_length: pipeline.curvature_matched_length()?,
    })
}

/// Search range for the fiber optimum: twice the curvature-matched length.
pub fn default_fiber_range(pipeline: &Pipeline) -> Result<(f64, f64)> {
    match pipeline.curvature_matched_length()? {
        Some(l) => Ok((0.0, 2.0 * l)),
        None => Err(Error::Config(
            "normally dispersive fiber cannot compensate this crystal's chirp; give an explicit fiber range".into(),
        )),
    }
}

/// Coarse scan plus golden-section refinement of the fiber length.
pub fn optimize_fiber(pipeline: &Pipeline, range: (f64, f64), n_steps: usize) -> Result<(ScanResult, FiberOptimum)> {
    let scan = scan_fiber_length(pipeline, range, n_steps)?;
    let best = refine_optimal_fiber_length(&scan, pipeline)?;
    Ok((scan, best))
}

/// Settings shared by the crystal-length and chirp sweeps.
#[derive(Debug, Clone)]
pub struct ScanSetup {
    pub materials: MaterialSet,
    pub pump_wavelength: f64,
    pub degenerate_wavelength: f64,
    pub signal_filter: FilterSpec,
    pub idler_filter: FilterSpec,
    pub n_points: usize,
    /// Coarse points in each fiber optimization.
    pub fiber_steps: usize,
}

impl ScanSetup {
    pub fn pipeline(&self, length: f64, chirp: f64) -> Result<Pipeline> {
        let crystal = CrystalSpec::new(
            &self.materials,
            length,
            chirp,
            self.pump_wavelength,
            self.degenerate_wavelength,
        )?;
        Pipeline::new(&self.materials, crystal, self.signal_filter, self.idler_filter, self.n_points)
    }
}

/// Compressed correlation time against crystal length for both chirp signs.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalLengthScan {
    /// α < 0, fiber optimized per point.
    pub negative: ScanResult,
    /// α > 0, same fiber as the negative-chirp point of equal length.
    pub positive: ScanResult,
}

pub fn scan_crystal_length(
    setup: &ScanSetup,
    chirp_magnitude: f64,
    length_range: (f64, f64),
    n_steps: usize,
) -> Result<CrystalLengthScan> {
    let (lo, hi) = length_range;
    check_range("crystal length", lo, hi, n_steps)?;
    if !(lo > 0.0) {
        return Err(Error::Config("crystal lengths must be positive".into()));
    }
    let alpha = chirp_magnitude.abs();
    let lengths = if lo == hi { vec![lo] } else { linspace(lo, hi, n_steps) };
    let rows = lengths
        .par_iter()
        .map(|&length| -> Result<(f64, f64, f64, f64)> {
            let neg = setup.pipeline(length, -alpha)?;
            let range = default_fiber_range(&neg)?;
            let (_, best) = optimize_fiber(&neg, range, setup.fiber_steps)?;
            let pos = setup.pipeline(length, alpha)?;
            let pos_time = pos.correlation_time(best.length)?;
            let pos_free = pos.correlation_time(0.0)?;
            Ok((best.correlation_time, pos_time, best.length, pos_free))
        })
        .collect::<Result<Vec<_>>>()?;
    let fiber = Series {
        name: "fiber_length".into(),
        unit: "m".into(),
        values: rows.iter().map(|r| r.2).collect(),
    };
    let mut negative = ScanResult::new(
        ("crystal_length", "m"),
        ("correlation_time", "s"),
        lengths.clone(),
        rows.iter().map(|r| r.0).collect(),
    )?;
    negative.extra.push(fiber.clone());
    let mut positive = ScanResult::new(
        ("crystal_length", "m"),
        ("correlation_time", "s"),
        lengths,
        rows.iter().map(|r| r.1).collect(),
    )?;
    positive.extra.push(fiber);
    positive.extra.push(Series {
        name: "uncompressed_correlation_time".into(),
        unit: "s".into(),
        values: rows.iter().map(|r| r.3).collect(),
    });
    Ok(CrystalLengthScan { negative, positive })
}

/// Admissible |α| window for chirp sweeps, m⁻².
pub const CHIRP_WINDOW: (f64, f64) = (20.0 * PER_CM2, 500.0 * PER_CM2);

/// Spectral width against |α| at fixed crystal length. With `compress`, each
/// point also gets an optimized signal-arm fiber (negative chirp) and the
/// resulting correlation time, as extra columns.
pub fn scan_chirp(
    setup: &ScanSetup,
    length: f64,
    chirp_range: (f64, f64),
    n_steps: usize,
    compress: bool,
) -> Result<ScanResult> {
    let (lo, hi) = (chirp_range.0.abs(), chirp_range.1.abs());
    check_range("chirp", lo, hi, n_steps)?;
    let tol = 1e-9 * CHIRP_WINDOW.1;
    if lo < CHIRP_WINDOW.0 - tol || hi > CHIRP_WINDOW.1 + tol {
        return Err(Error::Config(format!(
            "|alpha| range [{}, {}] cm^-2 leaves [20, 500] cm^-2",
            lo / PER_CM2,
            hi / PER_CM2
        )));
    }
    let chirps = if lo == hi { vec![lo] } else { linspace(lo, hi, n_steps) };
    let rows = chirps
        .par_iter()
        .map(|&alpha| -> Result<(f64, f64, f64, f64)> {
            let p = setup.pipeline(length, -alpha)?;
            let width = p.spectral_width()?;
            if !compress {
                return Ok((width, f64::NAN, f64::NAN, f64::NAN));
            }
            let uncompressed = p.correlation_time(0.0)?;
            let range = default_fiber_range(&p)?;
            let (_, best) = optimize_fiber(&p, range, setup.fiber_steps)?;
            Ok((width, best.length, best.correlation_time, uncompressed))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut scan = ScanResult::new(
        ("chirp_magnitude", "m^-2"),
        ("spectral_width", "m"),
        chirps,
        rows.iter().map(|r| r.0).collect(),
    )?;
    if compress {
        for (name, unit, col) in [
            ("optimal_fiber_length", "m", 1),
            ("compressed_correlation_time", "s", 2),
            ("uncompressed_correlation_time", "s", 3),
        ] {
            scan.extra.push(Series {
                name: name.into(),
                unit: unit.into(),
                values: rows
                    .iter()
                    .map(|r| match col {
                        1 => r.1,
                        2 => r.2,
                        _ => r.3,
                    })
                    .collect(),
            });
        }
    }
    Ok(scan)
}
