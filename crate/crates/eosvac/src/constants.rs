//! Physical constants (CODATA 2018) and frequency-unit helpers.
//!
//! Every internal frequency in this crate is an angular frequency in rad/s.
//! File formats and the CLI speak THz (cycles), so the two conversion
//! helpers below are the only sanctioned crossing point between the two.

/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_8128e-12;

/// Vacuum permeability, N/A².
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Boltzmann constant, J/K (exact).
pub const KB: f64 = 1.380_649e-23;

/// Angular frequency (rad/s) of a frequency given in THz.
#[inline]
pub fn omega_from_thz(f_thz: f64) -> f64 {
    f_thz * 1e12 * std::f64::consts::TAU
}

/// Frequency in THz of an angular frequency given in rad/s.
#[inline]
pub fn thz_from_omega(omega: f64) -> f64 {
    omega / (1e12 * std::f64::consts::TAU)
}
