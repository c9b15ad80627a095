//! Physical constants (CODATA 2018) and frequency-unit helpers.
//!
//! Every frequency in this crate is stored as an *angular* frequency in rad/s.
//! Inputs quoted in plain Hz or as a wavelength go through the named helpers
//! below, so no call site ever multiplies by 2*pi inline.

use std::f64::consts::PI;

/// Reduced Planck constant (J*s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Speed of light in vacuum (m/s).
pub const C_LIGHT: f64 = 299_792_458.0;

pub const TWO_PI: f64 = 2.0 * PI;

/// Fixed CODATA values; not user-settable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
}

impl PhysicalConstants {
    pub const CODATA: Self = Self {
        hbar: HBAR,
        k_b: K_B,
        c: C_LIGHT,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Angular frequency (rad/s) of a plain frequency in Hz.
pub fn angular_from_hz(f_hz: f64) -> f64 {
    TWO_PI * f_hz
}

/// Plain frequency (Hz) of an angular frequency in rad/s.
pub fn hz_from_angular(omega_rad_per_s: f64) -> f64 {
    omega_rad_per_s / TWO_PI
}

/// Angular frequency (rad/s) of a vacuum wavelength in meters.
pub fn angular_from_wavelength(lambda_m: f64) -> f64 {
    TWO_PI * C_LIGHT / lambda_m
}

/// Vacuum wavelength (m) of an angular frequency in rad/s.
pub fn wavelength_from_angular(omega_rad_per_s: f64) -> f64 {
    TWO_PI * C_LIGHT / omega_rad_per_s
}
