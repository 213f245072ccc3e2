//! Physical constants (CODATA 2018 exact values) and unit helpers.
//!
//! All energies and couplings in this crate are stored as linear frequencies
//! (E/h, in Hz). Angular-frequency conventions like the J/π tables appear only
//! at the presentation layer.

/// Electron charge in coulombs (exact).
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

/// Planck constant in J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);

pub const GHZ: f64 = 1e9;
pub const MHZ: f64 = 1e6;
pub const FEMTOFARAD: f64 = 1e-15;
pub const NANOSECOND: f64 = 1e-9;
pub const PICOSECOND: f64 = 1e-12;

/// Present a pair coupling stored as a linear frequency (Hz) in the J/π MHz
/// convention used by spectroscopy tables: J/π = 2 · (J/2π).
pub fn j_over_pi_mhz(j_hz: f64) -> f64 {
    2.0 * j_hz / MHZ
}

/// Inverse of [`j_over_pi_mhz`].
pub fn j_hz_from_pi_mhz(j_pi_mhz: f64) -> f64 {
    j_pi_mhz * MHZ / 2.0
}
