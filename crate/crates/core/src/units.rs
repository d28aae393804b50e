//! Conversion between laboratory units and natural units.
//!
//! Natural units here mean ħ = c = k_B = 1 with the metre as the unit of
//! length, so energies, temperatures and angular frequencies all carry
//! units of 1/m and times are measured in metres (c·t).

use std::f64::consts::PI;

/// Reduced Planck constant, J·s (CODATA 2018, exact by SI definition).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s (exact).
pub const C_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthUnit {
    Metre,
    Centimetre,
}

impl LengthUnit {
    pub fn to_metres(self, value: f64) -> f64 {
        match self {
            LengthUnit::Metre => value,
            LengthUnit::Centimetre => value * 1e-2,
        }
    }
}

/// Temperature in kelvin to natural units (1/m).
pub fn kelvin(t: f64) -> f64 {
    K_B * t / (HBAR * C_LIGHT)
}

pub fn to_kelvin(t_natural: f64) -> f64 {
    t_natural * HBAR * C_LIGHT / K_B
}

/// Length in the given unit to natural units (m).
pub fn length(value: f64, unit: LengthUnit) -> f64 {
    unit.to_metres(value)
}

/// Ordinary frequency in GHz to angular frequency in natural units (1/m).
pub fn gigahertz(f: f64) -> f64 {
    2.0 * PI * f * 1e9 / C_LIGHT
}

pub fn to_gigahertz(omega_natural: f64) -> f64 {
    omega_natural * C_LIGHT / (2.0 * PI * 1e9)
}

/// Duration in seconds to natural units (m).
pub fn seconds(t: f64) -> f64 {
    t * C_LIGHT
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((to_kelvin(kelvin(290.0)) - 290.0).abs() < 1e-12);
        assert!((to_gigahertz(gigahertz(150.0)) - 150.0).abs() < 1e-12);
    }

    #[test]
    fn room_temperature_thermal_wavelength() {
        // Wien-like scale: 1/T at 290 K is a few tens of micrometres.
        let t = kelvin(290.0);
        let lambda = 2.0 * PI / t;
        assert!(lambda > 40e-6 && lambda < 60e-6, "{lambda}");
    }
}
