//! One crystal/filter configuration evaluated for varying fiber lengths.

use crate::crystal::{tpsa_closed_form, CrystalSpec, FrequencyGrid, Tpsa};
use crate::dispersion::{fiber_curvature, gvd, harris_curvature, MaterialSet};
use crate::error::Result;
use crate::propagation::{
    apply_filters, apply_medium, correlation_time, g2, ttpa, FiberSpec, FilterSpec, TemporalProfile,
};

/// Filtered closed-form TPSA of one crystal, ready to be sent through fiber.
#[derive(Debug, Clone)]
pub struct Pipeline {
    materials: MaterialSet,
    crystal: CrystalSpec,
    signal_filter: FilterSpec,
    idler_filter: FilterSpec,
    unfiltered: Tpsa,
    filtered: Tpsa,
}

impl Pipeline {
    /// Builds the pipeline on an automatically sized grid of `n_points`.
    pub fn new(
        materials: &MaterialSet,
        crystal: CrystalSpec,
        signal_filter: FilterSpec,
        idler_filter: FilterSpec,
        n_points: usize,
    ) -> Result<Self> {
        let grid = FrequencyGrid::auto(&crystal, materials, n_points)?;
        Self::with_grid(materials, crystal, signal_filter, idler_filter, grid)
    }

    pub fn with_grid(
        materials: &MaterialSet,
        crystal: CrystalSpec,
        signal_filter: FilterSpec,
        idler_filter: FilterSpec,
        grid: FrequencyGrid,
    ) -> Result<Self> {
        let unfiltered = tpsa_closed_form(&crystal, materials, &grid)?;
        let filtered = apply_filters(&unfiltered, &signal_filter, &idler_filter);
        Ok(Self {
            materials: materials.clone(),
            crystal,
            signal_filter,
            idler_filter,
            unfiltered,
            filtered,
        })
    }

    pub fn materials(&self) -> &MaterialSet {
        &self.materials
    }

    pub fn crystal(&self) -> &CrystalSpec {
        &self.crystal
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.filtered.grid
    }

    pub fn filters(&self) -> (FilterSpec, FilterSpec) {
        (self.signal_filter, self.idler_filter)
    }

    /// TPSA after the detection filters.
    pub fn tpsa(&self) -> &Tpsa {
        &self.filtered
    }

    /// TPSA leaving the crystal, before any filter.
    pub fn unfiltered_tpsa(&self) -> &Tpsa {
        &self.unfiltered
    }

    /// Fiber of the configured material in the signal arm.
    pub fn signal_fiber(&self, length: f64) -> Result<FiberSpec> {
        FiberSpec::signal_only(self.materials.fiber.clone(), length)
    }

    pub fn profile(&self, fiber: &FiberSpec) -> Result<TemporalProfile> {
        g2(&ttpa(&apply_medium(&self.filtered, fiber)?))
    }

    /// Correlation time with `length` meters of fiber in the signal arm.
    pub fn correlation_time(&self, length: f64) -> Result<f64> {
        let fiber = self.signal_fiber(length)?;
        correlation_time(&ttpa(&apply_medium(&self.filtered, &fiber)?))
    }

    /// Spectral FWHM of the filtered spectrum, m.
    pub fn spectral_width(&self) -> Result<f64> {
        self.filtered.spectral_fwhm_wavelength()
    }

    /// HP at the degenerate frequency, s².
    pub fn harris_curvature_at_degeneracy(&self) -> Result<f64> {
        harris_curvature(&self.crystal, &self.materials, self.crystal.degenerate_frequency())
    }

    /// Signal-arm fiber length whose OFP equals HP at the degenerate
    /// frequency, or `None` when HP is not positive (a normally dispersive
    /// fiber cannot cancel it).
    pub fn curvature_matched_length(&self) -> Result<Option<f64>> {
        let hp = self.harris_curvature_at_degeneracy()?;
        let w0 = self.crystal.degenerate_frequency();
        let beta2 = gvd(&self.materials.fiber, w0)?;
        if hp > 0.0 && beta2 > 0.0 {
            Ok(Some(hp / beta2))
        } else {
            Ok(None)
        }
    }

    /// OFP of a signal-arm fiber at `omega_s`.
    pub fn fiber_curvature(&self, length: f64, omega_s: f64) -> Result<f64> {
        fiber_curvature(&self.signal_fiber(length)?, omega_s, self.crystal.pump_frequency())
    }
}
