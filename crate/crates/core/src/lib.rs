//! Numerical model of spontaneous parametric down-conversion in linearly
//! chirped quasi-phase-matched crystals, and of the temporal compression of
//! the resulting two-photon wavepacket by group-velocity dispersion in a
//! standard optical fiber.
//!
//! The crate is organised bottom-up:
//!
//! - [`dispersion`]: Sellmeier models, wavevectors and phase-curvature
//!   quantities (the Harris-phase curvature and the fiber curvature).
//! - [`crystal`]: chirped grating geometry, phase mismatch, and the two-photon
//!   spectral amplitude, both in closed form and by direct quadrature.
//! - [`propagation`]: detection filters, dispersive media, Fourier transform
//!   to the time domain, the Glauber correlation function and width metrics.
//! - [`scan`]: parameter sweeps and fiber-length optimisation.
//!
//! All quantities are SI internally (m, s, rad/s); the [`units`] module holds
//! the boundary conversions.

pub mod crystal;
pub mod dispersion;
pub mod error;
pub mod faddeeva;
pub mod pipeline;
pub mod propagation;
pub mod quadrature;
pub mod scan;
pub mod units;

pub use crystal::{CrystalSpec, FrequencyGrid, Polarization, Tpsa};
pub use dispersion::{FormulaKind, MaterialSet, SellmeierModel};
pub use error::{Error, Result};
pub use pipeline::Pipeline;
pub use propagation::{FiberSpec, FilterSpec, TemporalAmplitude, TemporalProfile};
pub use scan::ScanResult;
