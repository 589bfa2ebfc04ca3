//! Bundled figure-reproduction configurations.

use crate::config::{ArmLength, FilterConfig, ScanConfig, ScenarioConfig};

pub struct Figure {
    pub id: &'static str,
    pub source: &'static str,
}

macro_rules! figure {
    ($id:literal) => {
        Figure {
            id: $id,
            source: include_str!(concat!("../figures/", $id, ".toml")),
        }
    };
}

pub const FIGURES: [Figure; 14] = [
    figure!("fig2"),
    figure!("fig3"),
    figure!("fig4"),
    figure!("fig5"),
    figure!("fig6"),
    figure!("fig7"),
    figure!("fig8"),
    figure!("fig9"),
    figure!("fig10"),
    figure!("fig11"),
    figure!("fig13"),
    figure!("fig14"),
    figure!("fig15"),
    figure!("fig16"),
];

pub fn find(id: &str) -> Option<&'static Figure> {
    FIGURES.iter().find(|f| f.id == id)
}

impl Figure {
    pub fn config(&self) -> ScenarioConfig {
        ScenarioConfig::from_toml_str(self.source).expect("bundled figure configs are valid")
    }

    /// `run` or `scan`.
    pub fn command(&self) -> &'static str {
        if self.config().scan.is_some() {
            "scan"
        } else {
            "run"
        }
    }

    pub fn summary_line(&self) -> String {
        let c = self.config();
        let mut parts = vec![format!(
            "L = {} cm, alpha = {} cm^-2",
            c.crystal.length_cm, c.crystal.alpha_cm2
        )];
        match c.fiber.l_s_m {
            ArmLength::Meters(l) if l > 0.0 => parts.push(format!("fiber {l} m")),
            ArmLength::Optimize => parts.push("fiber optimized".into()),
            _ => {}
        }
        if let FilterConfig::Gaussian { center_nm, width_nm } = c.filters.signal {
            parts.push(format!("gaussian filter {center_nm} nm / {width_nm} nm"));
        }
        match &c.scan {
            Some(ScanConfig::FiberLength { from_m, to_m, .. }) => {
                parts.push(format!("scan fiber length {from_m}-{to_m} m"))
            }
            Some(ScanConfig::CrystalLength { from_cm, to_cm, .. }) => {
                parts.push(format!("scan crystal length {from_cm}-{to_cm} cm"))
            }
            Some(ScanConfig::Chirp { from_cm2, to_cm2, .. }) => {
                parts.push(format!("scan |alpha| {from_cm2}-{to_cm2} cm^-2"))
            }
            None => {}
        }
        format!(
            "{:<6} {:<4} {}: {}",
            self.id,
            self.command(),
            c.title.as_deref().unwrap_or(""),
            parts.join(", ")
        )
    }
}

pub fn list() -> String {
    FIGURES.iter().map(|f| f.summary_line() + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_covers_figures_2_to_11_and_13_to_16() {
        let ids: Vec<&str> = FIGURES.iter().map(|f| f.id).collect();
        let want: Vec<String> = (2..=11).chain(13..=16).map(|n| format!("fig{n}")).collect();
        assert_eq!(ids, want);
        for f in &FIGURES {
            let c = f.config();
            assert!(c.title.is_some(), "{}", f.id);
            assert_eq!(c.outputs.directory.to_str().unwrap(), format!("out/{}", f.id));
        }
        assert!(find("fig1").is_none() && find("fig12").is_none());
    }

    #[test]
    fn fig4_entry() {
        let c = find("fig4").unwrap().config();
        assert_eq!(c.crystal.length_cm, 0.8);
        assert_eq!(c.crystal.alpha_cm2.abs(), 20.0);
        assert_eq!(c.fiber.l_s_m, ArmLength::Meters(1.06));
    }

    #[test]
    fn filtered_entries() {
        for id in ["fig13", "fig14"] {
            let c = find(id).unwrap().config();
            let want = FilterConfig::Gaussian {
                center_nm: 532.0,
                width_nm: 250.0,
            };
            assert_eq!(c.filters.signal, want);
            assert_eq!(c.filters.idler, want);
        }
    }
}
