//! Detection filters, dispersive media, the time two-photon amplitude and the
//! measured Glauber correlation function `G²(τ) = |F(τ)|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::crystal::{FrequencyGrid, Tpsa};
use crate::dispersion::SellmeierModel;
use crate::error::{Error, Result};

/// Spectral response of one detection arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterSpec {
    /// Unit response at every frequency.
    Flat,
    /// `exp(−(ω − center)²/width²)`, both in rad/s.
    Gaussian { center: f64, width: f64 },
}

impl FilterSpec {
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && center.is_finite()) {
            return Err(Error::Config(format!("gaussian filter width {width:e} rad/s must be positive")));
        }
        Ok(Self::Gaussian { center, width })
    }

    pub fn response(&self, omega: f64) -> f64 {
        match *self {
            FilterSpec::Flat => 1.0,
            FilterSpec::Gaussian { center, width } => {
                let x = (omega - center) / width;
                (-x * x).exp()
            }
        }
    }
}

/// Multiplies the TPSA by `f_s(ω_s) f_i(ω_p − ω_s)`.
pub fn apply_filters(tpsa: &Tpsa, signal: &FilterSpec, idler: &FilterSpec) -> Tpsa {
    if matches!((signal, idler), (FilterSpec::Flat, FilterSpec::Flat)) {
        return tpsa.clone();
    }
    let wp = tpsa.pump_frequency;
    let amplitudes = tpsa
        .grid
        .omegas()
        .zip(&tpsa.amplitudes)
        .map(|(w, a)| a * (signal.response(w) * idler.response(wp - w)))
        .collect();
    Tpsa {
        grid: tpsa.grid,
        amplitudes,
        pump_frequency: wp,
    }
}

/// A dispersive medium of given length in each arm.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpec {
    pub material: SellmeierModel,
    /// Length in the signal arm, m.
    pub length_signal: f64,
    /// Length in the idler arm, m.
    pub length_idler: f64,
}

impl FiberSpec {
    pub fn new(material: SellmeierModel, length_signal: f64, length_idler: f64) -> Result<Self> {
        for (arm, l) in [("signal", length_signal), ("idler", length_idler)] {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::Config(format!("{arm} fiber length {l} m must be >= 0")));
            }
        }
        Ok(Self {
            material,
            length_signal,
            length_idler,
        })
    }

    /// Fiber in the signal arm only.
    pub fn signal_only(material: SellmeierModel, length: f64) -> Result<Self> {
        Self::new(material, length, 0.0)
    }

    pub fn is_identity(&self) -> bool {
        self.length_signal == 0.0 && self.length_idler == 0.0
    }

    /// Spectral phase `k(ω_s) l_s + k(ω_p − ω_s) l_i`.
    pub fn phase(&self, omega_s: f64, omega_p: f64) -> Result<f64> {
        let mut phase = 0.0;
        if self.length_signal > 0.0 {
            phase += self.material.wavevector(omega_s)? * self.length_signal;
        }
        if self.length_idler > 0.0 {
            phase += self.material.wavevector(omega_p - omega_s)? * self.length_idler;
        }
        Ok(phase)
    }
}

/// Multiplies the TPSA by the medium's spectral phase.
///
/// The constant and linear parts of the phase at the grid center only move
/// the wavepacket in time, and for meters of fiber they would push it far
/// outside the FFT window. They are removed, using the central-difference
/// slope at the center sample.
pub fn apply_medium(tpsa: &Tpsa, fiber: &FiberSpec) -> Result<Tpsa> {
    if fiber.is_identity() {
        return Ok(tpsa.clone());
    }
    let grid = &tpsa.grid;
    let wp = tpsa.pump_frequency;
    let phases = grid
        .omegas()
        .map(|w| fiber.phase(w, wp))
        .collect::<Result<Vec<_>>>()?;
    let c = grid.len() / 2;
    let slope = (phases[c + 1] - phases[c - 1]) / (2.0 * grid.spacing());
    let offset = phases[c];
    let amplitudes = tpsa
        .amplitudes
        .iter()
        .zip(&phases)
        .zip(grid.omegas())
        .map(|((a, p), w)| a * Complex64::from_polar(1.0, p - offset - slope * (w - grid.center())))
        .collect();
    Ok(Tpsa {
        grid: *grid,
        amplitudes,
        pump_frequency: wp,
    })
}

/// Time two-photon amplitude on a uniform, zero-centered τ grid.
#[derive(Debug, Clone)]
pub struct TemporalAmplitude {
    /// `τ_j = (j − n/2)·tau_step`.
    pub tau_step: f64,
    pub values: Vec<Complex64>,
    /// `|F(ω_s)|` of the source spectrum, kept for the Fourier-limit estimate.
    pub spectral_modulus: Vec<f64>,
    pub grid: FrequencyGrid,
}

impl TemporalAmplitude {
    pub fn tau(&self, j: usize) -> f64 {
        (j as f64 - (self.values.len() / 2) as f64) * self.tau_step
    }

    pub fn first_tau(&self) -> f64 {
        self.tau(0)
    }
}

/// `F(τ) = Δω Σ_j F(ω_j) exp(iω_j τ)`, a Riemann sum of `∫dω F e^{iωτ}` on
/// the grid, evaluated for `τ_m = (m − n/2)·2π/span` by one inverse FFT.
fn transform(grid: &FrequencyGrid, amplitudes: &[Complex64]) -> (f64, Vec<Complex64>) {
    let n = grid.len();
    let half = n / 2;
    // index j ↔ offset j − n/2; place offset k at position k mod n
    let mut buf: Vec<Complex64> = (0..n).map(|p| amplitudes[(p + half) % n]).collect();
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut buf);
    let tau_step = 2.0 * PI / grid.span();
    let dw = grid.spacing();
    let values = (0..n)
        .map(|m| {
            let tau = (m as f64 - half as f64) * tau_step;
            buf[(m + half) % n] * Complex64::from_polar(dw, grid.center() * tau)
        })
        .collect();
    (tau_step, values)
}

/// Fourier transform of the TPSA with the `e^{+iω_s τ}` convention.
pub fn ttpa(tpsa: &Tpsa) -> TemporalAmplitude {
    let (tau_step, values) = transform(&tpsa.grid, &tpsa.amplitudes);
    TemporalAmplitude {
        tau_step,
        values,
        spectral_modulus: tpsa.amplitudes.iter().map(|a| a.norm()).collect(),
        grid: tpsa.grid,
    }
}

/// Peak-normalized `G²(τ)` with its width metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalProfile {
    pub tau_step: f64,
    pub first_tau: f64,
    pub g2_values: Vec<f64>,
    /// Correlation time, s.
    pub fwhm: f64,
    /// FWHM for the same spectral modulus with flat phase, s.
    pub fourier_limit_fwhm: f64,
    pub peak_tau: f64,
}

impl TemporalProfile {
    pub fn tau(&self, j: usize) -> f64 {
        self.first_tau + j as f64 * self.tau_step
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.g2_values.len()).map(|j| self.tau(j))
    }
}

fn normalized_power(values: &[Complex64]) -> Result<Vec<f64>> {
    let p: Vec<f64> = values.iter().map(|v| v.norm_sqr()).collect();
    let peak = p.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::DegenerateInput("temporal amplitude is identically zero".into()));
    }
    Ok(p.into_iter().map(|v| v / peak).collect())
}

/// Correlation time (FWHM of `|F(τ)|²`) without the Fourier-limit pass.
pub fn correlation_time(amp: &TemporalAmplitude) -> Result<f64> {
    let g = normalized_power(&amp.values)?;
    fwhm(&g, amp.first_tau(), amp.tau_step)
}

/// Fourier-limited correlation time of a spectral modulus.
pub fn fourier_limit(grid: &FrequencyGrid, modulus: &[f64]) -> Result<f64> {
    let flat: Vec<Complex64> = modulus.iter().map(|&m| Complex64::new(m, 0.0)).collect();
    let (step, values) = transform(grid, &flat);
    let g = normalized_power(&values)?;
    fwhm(&g, -((values.len() / 2) as f64) * step, step)
}

/// `G²(τ) = |F(τ)|²`, peak-normalized, with FWHM and Fourier-limit FWHM.
pub fn g2(amp: &TemporalAmplitude) -> Result<TemporalProfile> {
    let g = normalized_power(&amp.values)?;
    let width = fwhm(&g, amp.first_tau(), amp.tau_step)?;
    let limit = fourier_limit(&amp.grid, &amp.spectral_modulus)?;
    let peak = g
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (j, &v)| if v > best.1 { (j, v) } else { best })
        .0;
    Ok(TemporalProfile {
        tau_step: amp.tau_step,
        first_tau: amp.first_tau(),
        peak_tau: amp.tau(peak),
        g2_values: g,
        fwhm: width,
        fourier_limit_fwhm: limit,
    })
}

/// Fraction of the coincidences falling inside a rectangular window of
/// width `window` centered on the `G²` peak. Trapezoidal rule on the
/// piecewise-linear interpolant, so partial cells are counted exactly.
pub fn coincidence_rate(profile: &TemporalProfile, window: f64) -> f64 {
    if !(window > 0.0) {
        return 0.0;
    }
    let g = &profile.g2_values;
    let dt = profile.tau_step;
    let t0 = profile.first_tau;
    let integrate = |a: f64, b: f64| -> f64 {
        let mut acc = 0.0;
        for j in 0..g.len() - 1 {
            let (x0, x1) = (t0 + j as f64 * dt, t0 + (j + 1) as f64 * dt);
            let lo = a.max(x0);
            let hi = b.min(x1);
            if hi <= lo {
                continue;
            }
            let at = |x: f64| g[j] + (g[j + 1] - g[j]) * (x - x0) / dt;
            acc += 0.5 * (at(lo) + at(hi)) * (hi - lo);
        }
        acc
    };
    let last = t0 + (g.len() - 1) as f64 * dt;
    let total = integrate(t0, last);
    let inside = integrate(profile.peak_tau - 0.5 * window, profile.peak_tau + 0.5 * window);
    (inside / total).clamp(0.0, 1.0)
}

/// Abscissae where the profile first rises to and finally falls from half
/// its maximum, linearly interpolated between samples.
pub fn half_max_crossings(samples: &[f64], x0: f64, dx: f64) -> Result<(f64, f64)> {
    let peak = samples.iter().cloned().fold(f64::MIN, f64::max);
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::DegenerateInput("profile has no positive sample".into()));
    }
    let half = 0.5 * peak;
    let first = samples.iter().position(|&v| v >= half).unwrap();
    let last = samples.iter().rposition(|&v| v >= half).unwrap();
    if first == 0 || last == samples.len() - 1 {
        return Err(Error::DegenerateInput(
            "profile does not fall below half maximum inside the window".into(),
        ));
    }
    let x = |j: usize| x0 + j as f64 * dx;
    let interp = |a: usize, b: usize| x(a) + (half - samples[a]) * (x(b) - x(a)) / (samples[b] - samples[a]);
    Ok((interp(first - 1, first), interp(last, last + 1)))
}

/// Full width at half maximum of uniformly sampled data: the distance between
/// the outermost half-maximum crossings.
pub fn fwhm(samples: &[f64], x0: f64, dx: f64) -> Result<f64> {
    let (lo, hi) = half_max_crossings(samples, x0, dx)?;
    Ok(hi - lo)
}
