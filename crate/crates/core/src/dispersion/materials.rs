use std::path::Path;

use serde::Deserialize;

use super::{FormulaKind, SellmeierModel};
use crate::error::{Error, Result};
use crate::units::NM;

const BUNDLED: &str = include_str!("../../data/materials.toml");

/// Shortest and longest wavelength every role must cover, meters.
pub const REQUIRED_WINDOW: (f64, f64) = (400.0 * NM, 1600.0 * NM);

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialsFile {
    set: SetRecord,
    model: Vec<ModelRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetRecord {
    ordinary: String,
    extraordinary: String,
    fiber: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRecord {
    name: String,
    formula: FormulaKind,
    coefficients: Vec<f64>,
    range_um: [f64; 2],
    #[allow(dead_code)]
    source: String,
}

/// The three dispersion roles of the simulation plus every model the
/// materials file declared.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSet {
    pub ktp_ordinary: SellmeierModel,
    pub ktp_extraordinary: SellmeierModel,
    pub fiber: SellmeierModel,
    catalog: Vec<SellmeierModel>,
}

impl MaterialSet {
    /// Materials shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_toml_str(BUNDLED).expect("bundled materials file is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Materials(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: MaterialsFile =
            toml::from_str(text).map_err(|e| Error::Materials(e.to_string()))?;
        let mut catalog = Vec::with_capacity(file.model.len());
        for rec in file.model {
            if catalog.iter().any(|m: &SellmeierModel| m.name() == rec.name) {
                return Err(Error::Materials(format!("duplicate model {}", rec.name)));
            }
            catalog.push(SellmeierModel::new(
                rec.name,
                rec.formula,
                rec.coefficients,
                (rec.range_um[0], rec.range_um[1]),
            )?);
        }
        let pick = |name: &str| -> Result<SellmeierModel> {
            let model = catalog
                .iter()
                .find(|m| m.name() == name)
                .cloned()
                .ok_or_else(|| Error::Materials(format!("set refers to unknown model {name}")))?;
            if !model.covers(REQUIRED_WINDOW.0, REQUIRED_WINDOW.1) {
                return Err(Error::Materials(format!(
                    "{name}: validity range {:?} um does not cover 0.4-1.6 um",
                    model.range_um()
                )));
            }
            Ok(model)
        };
        Ok(Self {
            ktp_ordinary: pick(&file.set.ordinary)?,
            ktp_extraordinary: pick(&file.set.extraordinary)?,
            fiber: pick(&file.set.fiber)?,
            catalog,
        })
    }

    /// Looks a model up by name among everything the file declared.
    pub fn find(&self, name: &str) -> Option<&SellmeierModel> {
        self.catalog.iter().find(|m| m.name() == name)
    }

    pub fn models(&self) -> &[SellmeierModel] {
        &self.catalog
    }

    /// Same set with the ordinary and extraordinary roles exchanged.
    pub fn swapped_axes(&self) -> Self {
        let mut out = self.clone();
        std::mem::swap(&mut out.ktp_ordinary, &mut out.ktp_extraordinary);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_set_parses() {
        let m = MaterialSet::bundled();
        assert_eq!(m.ktp_ordinary.name(), "KTP-ny");
        assert_eq!(m.ktp_extraordinary.name(), "KTP-nz");
        assert_eq!(m.fiber.name(), "fused-silica");
        assert!(m.find("KTP-nx").is_some());
        assert_eq!(m.models().len(), 4);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = BUNDLED.replace("fiber = \"fused-silica\"", "fiber = \"fused-silica\"\ncolour = 1");
        let err = MaterialSet::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn narrow_range_rejected_for_role() {
        let text = BUNDLED.replace("range_um = [0.21, 3.71]", "range_um = [0.5, 1.0]");
        assert!(MaterialSet::from_toml_str(&text).is_err());
    }

    #[test]
    fn missing_model_rejected() {
        let text = BUNDLED.replace("fiber = \"fused-silica\"", "fiber = \"SMF-28\"");
        let err = MaterialSet::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("SMF-28"));
    }
}
