//! Physical constants and unit conversions.
//!
//! All internal frequencies and rates are angular (rad/ns). Configuration
//! and reporting use ordinary frequencies (GHz, MHz), converted by 2π at
//! the boundary. Lengths are SI metres, masses SI kilograms.

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum permittivity (F/m), CODATA 2018.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Unified atomic mass unit (kg), CODATA 2018.
pub const ATOMIC_MASS_KG: f64 = 1.660_539_066_60e-27;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Ordinary frequency in GHz to angular rad/ns.
#[inline]
pub fn ghz_to_angular(f_ghz: f64) -> f64 {
    TWO_PI * f_ghz
}

/// Ordinary frequency in MHz to angular rad/ns.
#[inline]
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TWO_PI * f_mhz * 1e-3
}

/// Angular rad/ns back to ordinary GHz (for reports and tables).
#[inline]
pub fn angular_to_ghz(omega: f64) -> f64 {
    omega / TWO_PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversions_round_trip() {
        assert_eq!(angular_to_ghz(ghz_to_angular(16.0)), 16.0);
        // 4.2 MHz as angular rad/ns
        assert!((mhz_to_angular(4.2) - 0.026389378290154263).abs() < 1e-15);
    }
}
