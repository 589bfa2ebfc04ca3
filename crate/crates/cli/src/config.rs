//! Scenario configuration. Keys carry their units; everything is converted
//! to SI when a [`Scenario`] is built.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use biphoton::crystal::DEFAULT_POINTS;
use biphoton::scan::DEFAULT_STEPS;
use biphoton::units::{omega_of, CM, NM, PER_CM2, SPEED_OF_LIGHT};
use biphoton::{CrystalSpec, FilterSpec, MaterialSet, SellmeierModel};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub crystal: CrystalConfig,
    #[serde(default)]
    pub fiber: FiberConfig,
    #[serde(default)]
    pub filters: FiltersConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalConfig {
    pub length_cm: f64,
    pub alpha_cm2: f64,
    #[serde(default = "default_pump")]
    pub pump_nm: f64,
    #[serde(default = "default_degenerate")]
    pub degenerate_nm: f64,
}

fn default_pump() -> f64 {
    458.0
}

fn default_degenerate() -> f64 {
    916.0
}

/// A fiber arm length in meters, or a request to optimize it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmLength {
    Meters(f64),
    Optimize,
}

impl Default for ArmLength {
    fn default() -> Self {
        ArmLength::Meters(0.0)
    }
}

impl Serialize for ArmLength {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ArmLength::Meters(v) => s.serialize_f64(*v),
            ArmLength::Optimize => s.serialize_str("optimize"),
        }
    }
}

impl<'de> Deserialize<'de> for ArmLength {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ArmLength;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a length in meters or \"optimize\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ArmLength, E> {
                Ok(ArmLength::Meters(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ArmLength, E> {
                Ok(ArmLength::Meters(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ArmLength, E> {
                Ok(ArmLength::Meters(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ArmLength, E> {
                if v == "optimize" {
                    Ok(ArmLength::Optimize)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberConfig {
    /// Model name in the materials file; the set's fiber when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<String>,
    #[serde(default)]
    pub l_s_m: ArmLength,
    #[serde(default)]
    pub l_i_m: f64,
    /// Upper end of the optimization search; twice the HP = OFP length when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_max_m: Option<f64>,
    #[serde(default = "default_steps")]
    pub search_steps: usize,
}

impl Default for FiberConfig {
    fn default() -> Self {
        Self {
            material: None,
            l_s_m: ArmLength::default(),
            l_i_m: 0.0,
            search_max_m: None,
            search_steps: DEFAULT_STEPS,
        }
    }
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FilterConfig {
    Flat,
    Gaussian { center_nm: f64, width_nm: f64 },
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig::Flat
    }
}

impl FilterConfig {
    /// The width is converted from wavelength to angular frequency at the
    /// filter center, `δω = 2πc·Δλ/λ²`.
    pub fn to_spec(&self) -> Result<FilterSpec, CliError> {
        match *self {
            FilterConfig::Flat => Ok(FilterSpec::Flat),
            FilterConfig::Gaussian { center_nm, width_nm } => {
                if !(center_nm > 0.0) {
                    return Err(CliError::config("filters", "center_nm must be positive"));
                }
                let center = center_nm * NM;
                let width = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * width_nm * NM / (center * center);
                Ok(FilterSpec::gaussian(omega_of(center), width)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltersConfig {
    #[serde(default)]
    pub signal: FilterConfig,
    #[serde(default)]
    pub idler: FilterConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Artifact {
    Spectrum,
    G2,
    Summary,
    Plot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_artifacts")]
    pub artifacts: Vec<Artifact>,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            artifacts: default_artifacts(),
        }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_artifacts() -> Vec<Artifact> {
    vec![Artifact::Spectrum, Artifact::G2, Artifact::Summary, Artifact::Plot]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScanConfig {
    /// Signal-arm fiber length on the configured crystal.
    FiberLength {
        from_m: f64,
        to_m: f64,
        steps: usize,
        /// Also scan the crystal with the opposite chirp sign.
        #[serde(default)]
        both_signs: bool,
    },
    /// Crystal length at ±|alpha| of the configured crystal.
    CrystalLength { from_cm: f64, to_cm: f64, steps: usize },
    /// |alpha| at one or more crystal lengths.
    Chirp {
        from_cm2: f64,
        to_cm2: f64,
        steps: usize,
        /// Crystal lengths to sweep; the configured length when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lengths_cm: Option<Vec<f64>>,
        #[serde(default)]
        compress: bool,
    },
}

impl ScanConfig {
    pub fn steps(&self) -> usize {
        match self {
            ScanConfig::FiberLength { steps, .. }
            | ScanConfig::CrystalLength { steps, .. }
            | ScanConfig::Chirp { steps, .. } => *steps,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| e.in_file(path))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Checks that do not need the materials file.
    pub fn validate(&self) -> Result<(), CliError> {
        let c = &self.crystal;
        for (key, v) in [("length_cm", c.length_cm), ("pump_nm", c.pump_nm), ("degenerate_nm", c.degenerate_nm)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::config(&format!("crystal.{key}"), "must be positive"));
            }
        }
        if !c.alpha_cm2.is_finite() || c.alpha_cm2 == 0.0 {
            return Err(CliError::config("crystal.alpha_cm2", "must be finite and nonzero"));
        }
        if let ArmLength::Meters(l) = self.fiber.l_s_m {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(CliError::config("fiber.l_s_m", "must be >= 0 or \"optimize\""));
            }
        }
        if !(self.fiber.l_i_m >= 0.0 && self.fiber.l_i_m.is_finite()) {
            return Err(CliError::config("fiber.l_i_m", "must be >= 0"));
        }
        if let Some(m) = self.fiber.search_max_m {
            if !(m > 0.0) {
                return Err(CliError::config("fiber.search_max_m", "must be positive"));
            }
        }
        if self.fiber.search_steps < 3 {
            return Err(CliError::config("fiber.search_steps", "must be at least 3"));
        }
        let n = self.grid.n_points;
        if n < 4 || !n.is_power_of_two() {
            return Err(CliError::config("grid.n_points", "must be a power of two >= 4"));
        }
        if self.outputs.artifacts.is_empty() {
            return Err(CliError::config("outputs.artifacts", "must name at least one artifact"));
        }
        if let Some(scan) = &self.scan {
            if scan.steps() == 0 {
                return Err(CliError::config("scan.steps", "must be at least 1"));
            }
            let (lo, hi) = match scan {
                ScanConfig::FiberLength { from_m, to_m, .. } => (*from_m, *to_m),
                ScanConfig::CrystalLength { from_cm, to_cm, .. } => (*from_cm, *to_cm),
                ScanConfig::Chirp { from_cm2, to_cm2, .. } => (*from_cm2, *to_cm2),
            };
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(CliError::config("scan", "range must be finite and increasing"));
            }
            if lo < hi && scan.steps() < 3 {
                return Err(CliError::config("scan.steps", "must be at least 3 for a non-empty range"));
            }
            if let ScanConfig::Chirp {
                lengths_cm: Some(ls), ..
            } = scan
            {
                if ls.is_empty() || ls.iter().any(|l| !(*l > 0.0)) {
                    return Err(CliError::config("scan.lengths_cm", "must list positive lengths"));
                }
            }
        }
        Ok(())
    }
}

/// Configuration resolved against a materials set, in SI units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub materials: MaterialSet,
    pub crystal: CrystalSpec,
    pub fiber_material: SellmeierModel,
    pub signal_filter: FilterSpec,
    pub idler_filter: FilterSpec,
    pub n_points: usize,
}

impl Scenario {
    pub fn new(config: ScenarioConfig, mut materials: MaterialSet) -> Result<Self, CliError> {
        config.validate()?;
        let c = &config.crystal;
        let crystal = CrystalSpec::new(
            &materials,
            c.length_cm * CM,
            c.alpha_cm2 * PER_CM2,
            c.pump_nm * NM,
            c.degenerate_nm * NM,
        )?;
        let fiber_material = match &config.fiber.material {
            Some(name) => materials
                .find(name)
                .cloned()
                .ok_or_else(|| CliError::config("fiber.material", &format!("no model named `{name}`")))?,
            None => materials.fiber.clone(),
        };
        materials.fiber = fiber_material.clone();
        Ok(Self {
            signal_filter: config.filters.signal.to_spec()?,
            idler_filter: config.filters.idler.to_spec()?,
            n_points: config.grid.n_points,
            config,
            materials,
            crystal,
            fiber_material,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG4: &str = r#"
        [crystal]
        length_cm = 0.8
        alpha_cm2 = -20
        pump_nm = 458
        degenerate_nm = 916

        [fiber]
        l_s_m = 1.06
    "#;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let c = ScenarioConfig::from_toml_str(FIG4).unwrap();
        assert_eq!(c.crystal.alpha_cm2, -20.0);
        assert_eq!(c.fiber.l_s_m, ArmLength::Meters(1.06));
        assert_eq!(c.grid.n_points, DEFAULT_POINTS);
        assert_eq!(c.filters.signal, FilterConfig::Flat);
        assert!(c.scan.is_none());
    }

    #[test]
    fn round_trip_is_lossless() {
        let text = format!(
            "{FIG4}\n[filters.signal]\nkind = \"gaussian\"\ncenter_nm = 532\nwidth_nm = 250\n\
             [scan]\nkind = \"chirp\"\nfrom_cm2 = 20\nto_cm2 = 500\nsteps = 17\nlengths_cm = [0.8, 2.5]\ncompress = true\n"
        );
        let c = ScenarioConfig::from_toml_str(&text).unwrap();
        let again = ScenarioConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(c, again);
        let mut opt = c.clone();
        opt.fiber.l_s_m = ArmLength::Optimize;
        assert_eq!(ScenarioConfig::from_toml_str(&opt.to_toml_string()).unwrap(), opt);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ScenarioConfig::from_toml_str(&format!("{FIG4}\nwavelength = 3\n")).unwrap_err();
        assert!(err.to_string().contains("wavelength"), "{err}");
        let err = ScenarioConfig::from_toml_str(&FIG4.replace("l_s_m", "ls_m")).unwrap_err();
        assert!(err.to_string().contains("ls_m"), "{err}");
    }

    #[test]
    fn optimize_keyword_and_bad_strings() {
        let c = ScenarioConfig::from_toml_str(&FIG4.replace("1.06", "\"optimize\"")).unwrap();
        assert_eq!(c.fiber.l_s_m, ArmLength::Optimize);
        assert!(ScenarioConfig::from_toml_str(&FIG4.replace("1.06", "\"long\"")).is_err());
    }

    #[test]
    fn zero_step_scan_is_rejected() {
        let text = format!("{FIG4}\n[scan]\nkind = \"fiber_length\"\nfrom_m = 0\nto_m = 2\nsteps = 0\n");
        let err = ScenarioConfig::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, CliError::Config { .. }));
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(ScenarioConfig::from_toml_str(&FIG4.replace("-20", "0")).is_err());
        assert!(ScenarioConfig::from_toml_str(&format!("{FIG4}\n[grid]\nn_points = 1000\n")).is_err());
        assert!(ScenarioConfig::from_toml_str(&FIG4.replace("1.06", "-1.0")).is_err());
    }

    #[test]
    fn filter_width_conversion() {
        let f = FilterConfig::Gaussian {
            center_nm: 532.0,
            width_nm: 250.0,
        }
        .to_spec()
        .unwrap();
        let FilterSpec::Gaussian { center, width } = f else {
            panic!("expected gaussian");
        };
        assert!((center - omega_of(532e-9)).abs() < 1.0);
        // δω/ω = Δλ/λ
        assert!((width / center - 250.0 / 532.0).abs() < 1e-12);
    }

    #[test]
    fn scenario_resolves_si_units() {
        let s = Scenario::new(ScenarioConfig::from_toml_str(FIG4).unwrap(), MaterialSet::bundled()).unwrap();
        assert!((s.crystal.length() - 0.008).abs() < 1e-15);
        assert!((s.crystal.chirp() + 2e5).abs() < 1e-9);
        let bad = FIG4.replace("l_s_m = 1.06", "material = \"water\"");
        let err = Scenario::new(ScenarioConfig::from_toml_str(&bad).unwrap(), MaterialSet::bundled()).unwrap_err();
        assert!(err.to_string().contains("water"));
    }
}
