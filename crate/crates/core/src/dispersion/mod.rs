//! Refractive-index models, wavevectors and phase-curvature quantities.
//!
//! Two curvature quantities drive the compression analysis:
//!
//! - HP, the curvature of the crystal phase factor, `-d²φ/dω_s²`;
//! - OFP, the curvature added by fiber in the signal and idler arms,
//!   `d²/dω_s² [k_m(ω_s) l_s + k_m(ω_p - ω_s) l_i]`.
//!
//! Compression at the Fourier limit needs OFP to track HP across the
//! support of the spectrum.

mod materials;

pub use materials::MaterialSet;

use serde::{Deserialize, Serialize};

use crate::crystal::CrystalSpec;
use crate::error::{Error, Result};
use crate::propagation::FiberSpec;
use crate::units::{wavelength_of, SPEED_OF_LIGHT, UM};

/// Relative finite-difference step used for curvature evaluations.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

/// Functional form of a Sellmeier fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaKind {
    /// `n² = 1 + Σ B_i λ² / (λ² − C_i²)`, coefficients `[B1, C1, B2, C2, ...]`, `C_i` in µm.
    Poles,
    /// `n² = A + B λ² / (λ² − C) − D λ²`, coefficients `[A, B, C, D]`, `C` in µm².
    Polynomial,
}

/// Refractive-index dispersion of one material along one polarization axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierModel {
    name: String,
    kind: FormulaKind,
    coefficients: Vec<f64>,
    range_um: (f64, f64),
}

impl SellmeierModel {
    /// Builds a model and checks that `n` is finite and above one over the
    /// whole validity window.
    pub fn new(
        name: impl Into<String>,
        kind: FormulaKind,
        coefficients: Vec<f64>,
        range_um: (f64, f64),
    ) -> Result<Self> {
        let name = name.into();
        let arity_ok = match kind {
            FormulaKind::Poles => !coefficients.is_empty() && coefficients.len() % 2 == 0,
            FormulaKind::Polynomial => coefficients.len() == 4,
        };
        if !arity_ok {
            return Err(Error::Materials(format!(
                "{name}: {} coefficients do not fit the {kind:?} formula",
                coefficients.len()
            )));
        }
        let (lo, hi) = range_um;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Materials(format!(
                "{name}: invalid validity range [{lo}, {hi}] um"
            )));
        }
        let model = Self {
            name,
            kind,
            coefficients,
            range_um,
        };
        for i in 0..=1000 {
            let um = lo + (hi - lo) * i as f64 / 1000.0;
            let n = model.index_unchecked(um);
            if !(n.is_finite() && n > 1.0) {
                return Err(Error::Materials(format!(
                    "{}: n = {n} at {um:.4} um is not a physical index",
                    model.name
                )));
            }
        }
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FormulaKind {
        self.kind
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Validity window in micrometres.
    pub fn range_um(&self) -> (f64, f64) {
        self.range_um
    }

    /// True when every wavelength in `[lo, hi]` (meters) is inside the window.
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        lo / UM >= self.range_um.0 && hi / UM <= self.range_um.1
    }

    fn index_unchecked(&self, um: f64) -> f64 {
        let l2 = um * um;
        let c = &self.coefficients;
        let n2 = match self.kind {
            FormulaKind::Poles => {
                1.0 + c
                    .chunks_exact(2)
                    .map(|p| p[0] * l2 / (l2 - p[1] * p[1]))
                    .sum::<f64>()
            }
            FormulaKind::Polynomial => c[0] + c[1] * l2 / (l2 - c[2]) - c[3] * l2,
        };
        n2.sqrt()
    }

    /// Refractive index at a vacuum wavelength given in meters.
    pub fn refractive_index(&self, wavelength: f64) -> Result<f64> {
        let um = wavelength / UM;
        let (lo, hi) = self.range_um;
        // NaN fails both comparisons and lands here too.
        if !(um >= lo && um <= hi) {
            return Err(Error::Domain {
                model: self.name.clone(),
                wavelength_um: um,
                min_um: lo,
                max_um: hi,
            });
        }
        Ok(self.index_unchecked(um))
    }

    /// Wavevector `k = n(2πc/ω) ω / c` in rad/m.
    pub fn wavevector(&self, omega: f64) -> Result<f64> {
        let n = self.refractive_index(wavelength_of(omega))?;
        Ok(n * omega / SPEED_OF_LIGHT)
    }
}

/// Central second finite difference of `phase` at `omega` with one step of
/// Richardson extrapolation (`h` and `2h`), so the result is exact for
/// polynomials up to degree five apart from rounding.
pub fn phase_curvature<F>(phase: F, omega: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Numeric(format!("finite-difference step {step} must be positive")));
    }
    let mut samples = [0.0; 5];
    for (slot, k) in samples.iter_mut().zip(-2i32..=2) {
        let w = omega + f64::from(k) * step;
        let v = phase(w)?;
        if !v.is_finite() {
            return Err(Error::Numeric(format!("phase is not finite at omega = {w:e} rad/s")));
        }
        *slot = v;
    }
    let [m2, m1, c0, p1, p2] = samples;
    let d_h = (p1 - 2.0 * c0 + m1) / (step * step);
    let d_2h = (p2 - 2.0 * c0 + m2) / (4.0 * step * step);
    Ok((4.0 * d_h - d_2h) / 3.0)
}

/// Group-velocity dispersion `d²k/dω²` (s²/m) of one model.
pub fn gvd(model: &SellmeierModel, omega: f64) -> Result<f64> {
    phase_curvature(|w| model.wavevector(w), omega, DEFAULT_RELATIVE_STEP * omega)
}

/// HP: `−d²φ/dω_s²` of the crystal phase factor, in s².
pub fn harris_curvature(crystal: &CrystalSpec, materials: &MaterialSet, omega_s: f64) -> Result<f64> {
    let curvature = phase_curvature(
        |w| crystal.phase_phi(crystal.delta_k(materials, w)?),
        omega_s,
        DEFAULT_RELATIVE_STEP * omega_s,
    )?;
    Ok(-curvature)
}

/// OFP: curvature of the phase the fiber adds, in s². The arms are evaluated
/// separately, so the result is exactly linear in each length.
pub fn fiber_curvature(fiber: &FiberSpec, omega_s: f64, omega_p: f64) -> Result<f64> {
    let mut total = 0.0;
    if fiber.length_signal > 0.0 {
        total += fiber.length_signal * gvd(&fiber.material, omega_s)?;
    }
    if fiber.length_idler > 0.0 {
        total += fiber.length_idler * gvd(&fiber.material, omega_p - omega_s)?;
    }
    Ok(total)
}
