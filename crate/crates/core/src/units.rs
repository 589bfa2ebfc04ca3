//! Physical constants and unit conversions used at the configuration boundary.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const NM: f64 = 1e-9;
pub const UM: f64 = 1e-6;
pub const CM: f64 = 1e-2;
pub const FS: f64 = 1e-15;
pub const PS: f64 = 1e-12;

/// cm⁻¹ → m⁻¹
pub const PER_CM: f64 = 1e2;
/// cm⁻² → m⁻²
pub const PER_CM2: f64 = 1e4;

/// Vacuum wavelength (m) of an angular frequency (rad/s).
#[inline]
pub fn wavelength_of(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

/// Angular frequency (rad/s) of a vacuum wavelength (m).
#[inline]
pub fn omega_of(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_round_trip() {
        let lambda = 916.0 * NM;
        let back = wavelength_of(omega_of(lambda));
        assert!((back - lambda).abs() < 1e-22);
    }
}
