//! Linearly chirped quasi-phase-matching grating and the two-photon spectral
//! amplitude (TPSA) it produces under a monochromatic pump.
//!
//! The grating wavevector varies along the crystal as
//! `κ(z) = K₀ − 2α(z + L/2)` for `z ∈ [−L, 0]`, so the grating phase is
//! `Φ₀(z) = −α(z + L/2)²`. With a cw pump the idler frequency is fixed by
//! energy conservation, `ω_i = ω_p − ω_s`, and the TPSA reduces to a function
//! of `ω_s` alone:
//!
//! ```text
//! F(ω_s) = ∫_{−L}^{0} exp(−iΔk z − iα(z + L/2)²) dz
//!        = e^{iφ} √π/(2s) [erf(s(Lα − Δk)/2α) + erf(s(Lα + Δk)/2α)],
//! φ = ΔkL/2 + Δk²/(4α),   s = e^{iπ/4} √α.
//! ```
//!
//! Both forms are implemented: [`tpsa_closed_form`] through the complex error
//! function, and [`tpsa_numeric`] by direct quadrature, which serves as the
//! oracle for the former. The product `s(Lα ± Δk)/2α` does not depend on the
//! sign chosen for `√α`, so negative chirp needs no special branch handling.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::MaterialSet;
use crate::error::{Error, Result};
use crate::faddeeva::erf_sum;
use crate::quadrature::GaussLegendre;
use crate::units::{omega_of, wavelength_of};

/// Polarization axis a field travels on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Ordinary,
    Extraordinary,
}

/// Which axis the pump, signal and idler use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarizationMap {
    pub pump: Polarization,
    pub signal: Polarization,
    pub idler: Polarization,
}

impl Default for PolarizationMap {
    /// Type-II interaction: pump and idler ordinary, signal extraordinary.
    fn default() -> Self {
        Self {
            pump: Polarization::Ordinary,
            signal: Polarization::Extraordinary,
            idler: Polarization::Ordinary,
        }
    }
}

impl PolarizationMap {
    /// Signal and idler polarizations exchanged.
    pub fn swapped(self) -> Self {
        Self {
            pump: self.pump,
            signal: self.idler,
            idler: self.signal,
        }
    }
}

fn wavevector(materials: &MaterialSet, axis: Polarization, omega: f64) -> Result<f64> {
    match axis {
        Polarization::Ordinary => materials.ktp_ordinary.wavevector(omega),
        Polarization::Extraordinary => materials.ktp_extraordinary.wavevector(omega),
    }
}

/// Grating wavevector giving perfect collinear phase matching at `λ_s0`:
/// `K₀ = k_p(ω_p) − k_s(ω_s0) − k_i(ω_p − ω_s0)`.
pub fn solve_k0(materials: &MaterialSet, pump_wavelength: f64, signal_wavelength: f64) -> Result<f64> {
    solve_k0_with(materials, PolarizationMap::default(), pump_wavelength, signal_wavelength)
}

pub fn solve_k0_with(
    materials: &MaterialSet,
    map: PolarizationMap,
    pump_wavelength: f64,
    signal_wavelength: f64,
) -> Result<f64> {
    let wp = omega_of(pump_wavelength);
    let ws = omega_of(signal_wavelength);
    if !(ws > 0.0 && ws < wp) {
        return Err(Error::Config(format!(
            "signal wavelength {signal_wavelength:e} m must be longer than the pump {pump_wavelength:e} m"
        )));
    }
    let k0 = wavevector(materials, map.pump, wp)?
        - wavevector(materials, map.signal, ws)?
        - wavevector(materials, map.idler, wp - ws)?;
    if !(k0 > 0.0) {
        return Err(Error::Config(format!(
            "phase matching needs a grating wavevector of {k0:e} rad/m, which is unphysical"
        )));
    }
    Ok(k0)
}

/// Chirped-QPM crystal geometry and phase-matching parameters (SI).
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSpec {
    length: f64,
    chirp: f64,
    pump_wavelength: f64,
    degenerate_wavelength: f64,
    grating_k0: f64,
    polarization: PolarizationMap,
}

impl CrystalSpec {
    /// `length` in m, `chirp` (α) in m⁻², wavelengths in m. Solves for `K₀`.
    pub fn new(
        materials: &MaterialSet,
        length: f64,
        chirp: f64,
        pump_wavelength: f64,
        degenerate_wavelength: f64,
    ) -> Result<Self> {
        Self::with_polarization(
            materials,
            length,
            chirp,
            pump_wavelength,
            degenerate_wavelength,
            PolarizationMap::default(),
        )
    }

    pub fn with_polarization(
        materials: &MaterialSet,
        length: f64,
        chirp: f64,
        pump_wavelength: f64,
        degenerate_wavelength: f64,
        polarization: PolarizationMap,
    ) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("crystal length {length} m must be positive")));
        }
        if !chirp.is_finite() {
            return Err(Error::Config("chirp parameter is not finite".into()));
        }
        let grating_k0 = solve_k0_with(materials, polarization, pump_wavelength, degenerate_wavelength)?;
        // κ(z) spans K₀ ± αL over the crystal; the poling period must stay finite.
        if grating_k0 - chirp.abs() * length <= 0.0 {
            return Err(Error::Config(format!(
                "|alpha| L = {:e} rad/m exceeds K0 = {grating_k0:e} rad/m; the poling period would diverge",
                chirp.abs() * length
            )));
        }
        Ok(Self {
            length,
            chirp,
            pump_wavelength,
            degenerate_wavelength,
            grating_k0,
            polarization,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Chirp parameter α in m⁻².
    pub fn chirp(&self) -> f64 {
        self.chirp
    }

    pub fn pump_wavelength(&self) -> f64 {
        self.pump_wavelength
    }

    pub fn degenerate_wavelength(&self) -> f64 {
        self.degenerate_wavelength
    }

    /// `K₀` in rad/m.
    pub fn grating_k0(&self) -> f64 {
        self.grating_k0
    }

    pub fn polarization(&self) -> PolarizationMap {
        self.polarization
    }

    pub fn pump_frequency(&self) -> f64 {
        omega_of(self.pump_wavelength)
    }

    pub fn degenerate_frequency(&self) -> f64 {
        omega_of(self.degenerate_wavelength)
    }

    /// Local grating wavevector `κ(z)`, `z ∈ [−L, 0]`.
    pub fn local_grating_wavevector(&self, z: f64) -> f64 {
        self.grating_k0 - 2.0 * self.chirp * (z + 0.5 * self.length)
    }

    /// Same crystal with a different chirp; `K₀` is unchanged.
    pub fn with_chirp(&self, chirp: f64) -> Result<Self> {
        let mut out = self.clone();
        out.chirp = chirp;
        if self.grating_k0 - chirp.abs() * self.length <= 0.0 {
            return Err(Error::Config("chirp too strong for this grating".into()));
        }
        Ok(out)
    }

    /// Phase mismatch `Δk = k_p − k_s − k_i − K₀` with `ω_i = ω_p − ω_s`.
    pub fn delta_k(&self, materials: &MaterialSet, omega_s: f64) -> Result<f64> {
        let wp = self.pump_frequency();
        let map = self.polarization;
        Ok(wavevector(materials, map.pump, wp)?
            - wavevector(materials, map.signal, omega_s)?
            - wavevector(materials, map.idler, wp - omega_s)?
            - self.grating_k0)
    }

    /// Phase factor `φ = ΔkL/2 + Δk²/(4α)`.
    pub fn phase_phi(&self, delta_k: f64) -> Result<f64> {
        phase_phi(self.length, self.chirp, delta_k)
    }
}

/// `φ = ΔkL/2 + Δk²/(4α)`; undefined for an unchirped grating.
pub fn phase_phi(length: f64, chirp: f64, delta_k: f64) -> Result<f64> {
    if chirp == 0.0 {
        return Err(Error::DegenerateInput(
            "phase factor needs a nonzero chirp parameter".into(),
        ));
    }
    Ok(0.5 * delta_k * length + delta_k * delta_k / (4.0 * chirp))
}

/// Uniform grid of signal angular frequencies.
///
/// Sample `j` sits at `center + (j − n/2)·span/n`, so index `n/2` is exactly
/// the center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    center: f64,
    span: f64,
    n_points: usize,
}

/// Relative intensity defining the support used to size automatic grids.
pub const SUPPORT_THRESHOLD: f64 = 1e-4;
/// Largest relative intensity allowed at the grid edges.
pub const EDGE_THRESHOLD: f64 = 1e-3;
/// Automatic grids never extend past this fraction of the center frequency.
pub const MAX_HALF_SPAN_FRACTION: f64 = 0.45;
/// Default grid size.
pub const DEFAULT_POINTS: usize = 65536;

impl FrequencyGrid {
    pub fn new(center: f64, span: f64, n_points: usize) -> Result<Self> {
        if !n_points.is_power_of_two() || n_points < 4 {
            return Err(Error::Config(format!("grid size {n_points} must be a power of two >= 4")));
        }
        if !(center > 0.0 && span > 0.0 && span < 2.0 * center) {
            return Err(Error::Config(format!(
                "grid span {span:e} rad/s around {center:e} rad/s leaves positive frequencies"
            )));
        }
        Ok(Self {
            center,
            span,
            n_points,
        })
    }

    /// Sizes a grid around the crystal's degenerate frequency so that it
    /// covers 1.5× the region where `|F|²` exceeds [`SUPPORT_THRESHOLD`] of
    /// its peak, found by a coarse closed-form pre-scan, and checks that
    /// the spectrum has decayed below [`EDGE_THRESHOLD`] at both edges.
    pub fn auto(crystal: &CrystalSpec, materials: &MaterialSet, n_points: usize) -> Result<Self> {
        let center = crystal.degenerate_frequency();
        let window = admissible_half_span(crystal, materials);
        const COARSE: usize = 4096;
        let coarse = Self::new(center, 2.0 * window, COARSE)?;
        let spectrum = tpsa_closed_form(crystal, materials, &coarse)?.intensity();
        let peak = spectrum.iter().cloned().fold(0.0, f64::max);
        let support = spectrum
            .iter()
            .enumerate()
            .filter(|(_, s)| **s >= SUPPORT_THRESHOLD * peak)
            .map(|(j, _)| (coarse.omega(j) - center).abs())
            .fold(0.0, f64::max);
        let half = (1.5 * support).clamp(4.0 * coarse.spacing(), window);
        let grid = Self::new(center, 2.0 * half, n_points)?;
        let tpsa = tpsa_closed_form(crystal, materials, &grid)?;
        let ratio = tpsa.edge_ratio();
        if ratio >= EDGE_THRESHOLD {
            return Err(Error::Numeric(format!(
                "spectrum at the grid edge is {ratio:.2e} of its peak; the admissible window is too narrow"
            )));
        }
        Ok(grid)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn spacing(&self) -> f64 {
        self.span / self.n_points as f64
    }

    pub fn omega(&self, j: usize) -> f64 {
        self.center + (j as f64 - (self.n_points / 2) as f64) * self.spacing()
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.omega(j))
    }

    /// Same span with a different number of points.
    pub fn resampled(&self, n_points: usize) -> Result<Self> {
        Self::new(self.center, self.span, n_points)
    }
}

/// Largest half-span keeping signal, idler and fiber inside every model's
/// validity range, capped at [`MAX_HALF_SPAN_FRACTION`] of the center.
fn admissible_half_span(crystal: &CrystalSpec, materials: &MaterialSet) -> f64 {
    let center = crystal.degenerate_frequency();
    let wp = crystal.pump_frequency();
    let models = [&materials.ktp_ordinary, &materials.ktp_extraordinary, &materials.fiber];
    let lo_um = models.iter().map(|m| m.range_um().0).fold(0.0, f64::max);
    let hi_um = models.iter().map(|m| m.range_um().1).fold(f64::INFINITY, f64::min);
    let w_max = omega_of(lo_um * 1e-6);
    let w_min = omega_of(hi_um * 1e-6);
    // signal in [center - h, center + h], idler in [wp - center - h, wp - center + h]
    let idler_center = wp - center;
    let h_signal = (w_max - center).min(center - w_min);
    let h_idler = (w_max - idler_center).min(idler_center - w_min);
    // 0.999 keeps the outermost samples strictly inside the ranges
    (0.999 * h_signal.min(h_idler)).min(MAX_HALF_SPAN_FRACTION * center)
}

/// Two-photon spectral amplitude sampled on a [`FrequencyGrid`]; the idler
/// frequency at each sample is `pump_frequency − ω_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tpsa {
    pub grid: FrequencyGrid,
    pub amplitudes: Vec<Complex64>,
    pub pump_frequency: f64,
}

impl Tpsa {
    /// `|F|²` per sample.
    pub fn intensity(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|F|²` scaled to unit peak.
    pub fn normalized_intensity(&self) -> Vec<f64> {
        let s = self.intensity();
        let peak = s.iter().cloned().fold(0.0, f64::max);
        if peak > 0.0 {
            s.into_iter().map(|v| v / peak).collect()
        } else {
            s
        }
    }

    /// Larger of the two edge intensities relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let s = self.intensity();
        let peak = s.iter().cloned().fold(0.0, f64::max);
        let edge = s[0].max(s[s.len() - 1]);
        if peak > 0.0 {
            edge / peak
        } else {
            f64::NAN
        }
    }

    /// Full width at half maximum of `|F(ω_s)|²`, reported as the
    /// wavelength difference between the two half-maximum frequencies (m).
    pub fn spectral_fwhm_wavelength(&self) -> Result<f64> {
        let s = self.intensity();
        let (lo, hi) = crate::propagation::half_max_crossings(&s, self.grid.omega(0), self.grid.spacing())?;
        Ok(wavelength_of(lo) - wavelength_of(hi))
    }

    /// Intensity-weighted mean signal wavelength (m).
    pub fn mean_wavelength(&self) -> f64 {
        let s = self.intensity();
        let total: f64 = s.iter().sum();
        self.grid
            .omegas()
            .zip(&s)
            .map(|(w, v)| wavelength_of(w) * v)
            .sum::<f64>()
            / total
    }
}

fn chirp_root(chirp: f64) -> Complex64 {
    // e^{iπ/4} √α, with √α = i√|α| for α < 0
    let root = if chirp >= 0.0 {
        Complex64::new(chirp.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-chirp).sqrt())
    };
    Complex64::from_polar(1.0, PI / 4.0) * root
}

/// Closed-form amplitude for one `Δk`. Same normalization as the quadrature.
pub fn closed_form_amplitude(length: f64, chirp: f64, delta_k: f64) -> Result<Complex64> {
    let phi = phase_phi(length, chirp, delta_k)?;
    let s = chirp_root(chirp);
    let a = s * ((length * chirp - delta_k) / (2.0 * chirp));
    let b = s * ((length * chirp + delta_k) / (2.0 * chirp));
    let sum = erf_sum(a, b);
    if !(sum.re.is_finite() && sum.im.is_finite()) {
        return Err(Error::Numeric(format!(
            "complex error function overflowed for arguments {a} and {b}"
        )));
    }
    Ok(Complex64::from_polar(1.0, phi) * sum * (PI.sqrt() / (2.0 * s)))
}

/// TPSA from the error-function closed form. Requires `α ≠ 0`.
pub fn tpsa_closed_form(crystal: &CrystalSpec, materials: &MaterialSet, grid: &FrequencyGrid) -> Result<Tpsa> {
    if crystal.chirp() == 0.0 {
        return Err(Error::DegenerateInput(
            "closed-form TPSA needs a chirped grating; use tpsa_numeric for alpha = 0".into(),
        ));
    }
    let amplitudes = grid
        .omegas()
        .map(|w| {
            let dk = crystal.delta_k(materials, w)?;
            closed_form_amplitude(crystal.length(), crystal.chirp(), dk)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Tpsa {
        grid: *grid,
        amplitudes,
        pump_frequency: crystal.pump_frequency(),
    })
}

/// Quadrature policy for the grating integral.
#[derive(Debug, Clone)]
pub struct QuadraturePolicy {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Panels per local oscillation period, at least.
    pub panels_per_period: f64,
    /// Relative agreement required between successive panel doublings.
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        Self {
            order: 8,
            panels_per_period: 8.0,
            rel_tol: 1e-9,
            max_doublings: 12,
        }
    }
}

/// Direct quadrature of `∫_{−L}^{0} exp(−iΔk z − iα(z + L/2)²) dz` for one
/// `Δk`. Works for any α, including zero. On non-convergence returns the
/// last estimate with `Err`.
pub fn numeric_amplitude(
    rule: &GaussLegendre,
    policy: &QuadraturePolicy,
    length: f64,
    chirp: f64,
    delta_k: f64,
) -> std::result::Result<Complex64, Complex64> {
    let integrand = |z: f64| {
        let u = z + 0.5 * length;
        Complex64::from_polar(1.0, -(delta_k * z + chirp * u * u))
    };
    // |d(phase)/dz| = |Δk + 2αu| ≤ |Δk| + |α|L over the crystal
    let max_rate = delta_k.abs() + chirp.abs() * length;
    let period = if max_rate > 0.0 { 2.0 * PI / max_rate } else { f64::INFINITY };
    let mut panels = ((length * policy.panels_per_period / period).ceil() as usize).max(4);
    let mut prev = rule.integrate(integrand, -length, 0.0, panels);
    // floor for points sitting on a spectral zero
    let floor = 1e-12 * length;
    for _ in 0..policy.max_doublings {
        panels *= 2;
        let next = rule.integrate(integrand, -length, 0.0, panels);
        if (next - prev).norm() <= policy.rel_tol * next.norm().max(floor) {
            return Ok(next);
        }
        prev = next;
    }
    Err(prev)
}

/// TPSA by direct quadrature of the grating integral. Grid points are
/// evaluated in parallel; each point's reduction order is fixed.
pub fn tpsa_numeric(crystal: &CrystalSpec, materials: &MaterialSet, grid: &FrequencyGrid) -> Result<Tpsa> {
    tpsa_numeric_with(crystal, materials, grid, &QuadraturePolicy::default())
}

pub fn tpsa_numeric_with(
    crystal: &CrystalSpec,
    materials: &MaterialSet,
    grid: &FrequencyGrid,
    policy: &QuadraturePolicy,
) -> Result<Tpsa> {
    let rule = GaussLegendre::new(policy.order);
    let delta_k = grid
        .omegas()
        .map(|w| crystal.delta_k(materials, w))
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<std::result::Result<Complex64, Complex64>> = delta_k
        .par_iter()
        .map(|&dk| numeric_amplitude(&rule, policy, crystal.length(), crystal.chirp(), dk))
        .collect();
    let mut amplitudes = Vec::with_capacity(results.len());
    let mut worst: Option<usize> = None;
    for (j, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => amplitudes.push(v),
            Err(v) => {
                worst.get_or_insert(j);
                amplitudes.push(v);
            }
        }
    }
    if let Some(j) = worst {
        return Err(Error::Numeric(format!(
            "grating quadrature did not converge at omega_s = {:e} rad/s (delta_k = {:e} rad/m)",
            grid.omega(j),
            delta_k[j]
        )));
    }
    Ok(Tpsa {
        grid: *grid,
        amplitudes,
        pump_frequency: crystal.pump_frequency(),
    })
}
