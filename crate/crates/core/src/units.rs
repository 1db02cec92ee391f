//! Physical constants, unit conversions and the focal-spot area estimate.
//!
//! Everything inside the engine is SI with angular frequencies in rad/s.
//! Conversions to THz, cm² and cm⁴·s happen only at output boundaries.

use core::f64::consts::PI;

use crate::error::{invalid, Result};

/// CODATA 2018 values of the constants the cross sections need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Vacuum permittivity, C²/(J·m).
    pub epsilon0: f64,
    /// Elementary charge, C.
    pub e_charge: f64,
    /// Bohr radius, m.
    pub a0: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    epsilon0: 8.854_187_812_8e-12,
    e_charge: 1.602_176_634e-19,
    a0: 5.291_772_109_03e-11,
};

impl PhysicalConstants {
    /// `e²a₀²`, the atomic unit of a squared dipole moment, in C²·m².
    pub fn atomic_dipole_squared(&self) -> f64 {
        let d = self.e_charge * self.a0;
        d * d
    }

    /// `(ħcε₀)²` in C⁴.
    pub fn hbar_c_eps0_squared(&self) -> f64 {
        let x = self.hbar * self.c * self.epsilon0;
        x * x
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA_2018
    }
}

pub const M2_TO_CM2: f64 = 1e4;
pub const M4_TO_CM4: f64 = 1e8;
pub const PS: f64 = 1e-12;

/// `2π·f·10¹²`: ordinary THz to angular frequency.
pub fn angular_frequency_from_thz(f_thz: f64) -> f64 {
    2.0 * PI * f_thz * 1e12
}

/// Inverse of [`angular_frequency_from_thz`].
pub fn thz_from_angular_frequency(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e12)
}

pub fn angular_frequency_from_mhz(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * 1e6
}

pub fn mhz_from_angular_frequency(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e6)
}

/// Diffraction-limited spot diameter `D = 2λ/(π·NA)`, in m.
pub fn focal_spot_diameter(lambda: f64, numerical_aperture: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", "must be positive and finite"));
    }
    if !(numerical_aperture > 0.0) || !numerical_aperture.is_finite() {
        return Err(invalid("numerical_aperture", "must be positive and finite"));
    }
    Ok(2.0 * lambda / (PI * numerical_aperture))
}

/// Entanglement area for single-mode beams: the focal spot area `πD²/4`, in m².
pub fn focal_spot_area(lambda: f64, numerical_aperture: f64) -> Result<f64> {
    let d = focal_spot_diameter(lambda, numerical_aperture)?;
    Ok(PI * d * d / 4.0)
}

/// Unit-area Lorentzian `(Γ/2π)/(Δ² + Γ²/4)` in s, with `Γ` the FWHM in rad/s.
///
/// This stands in for the energy-conserving delta function of both cross
/// sections, with `Γ = 1/τ_l` the decay rate of the final state.
pub fn lorentzian_lineshape(detuning: f64, fwhm: f64) -> Result<f64> {
    if !(fwhm > 0.0) || !fwhm.is_finite() {
        return Err(invalid("fwhm", "must be positive and finite"));
    }
    Ok((fwhm / (2.0 * PI)) / (detuning * detuning + fwhm * fwhm / 4.0))
}
