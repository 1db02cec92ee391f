//! Flux dependence of the total two-photon rate, `R = σ_e φ + δ_r φ²`.
//!
//! `φ` is the photon flux density exactly as in the rate law; the biphoton flux
//! density is `φ/2`, and no factor for it is applied here.

use crate::atom::AtomModel;
use crate::error::{invalid, Result};
use crate::rtpa::defects;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateBreakdown {
    /// photons/(cm²·s)
    pub flux: f64,
    /// 1/s
    pub entangled_rate: f64,
    /// 1/s
    pub random_rate: f64,
    /// 1/s
    pub total: f64,
    /// Flux where the two contributions are equal; `None` when `δ_r = 0`.
    pub crossover_flux: Option<f64>,
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, "must be finite and non-negative"))
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, "must be finite and positive"))
    }
}

/// `sigma_e` in cm², `delta_r` in cm⁴·s, `phi` in photons/(cm²·s).
pub fn total_rate(phi: f64, sigma_e: f64, delta_r: f64) -> Result<RateBreakdown> {
    non_negative("phi", phi)?;
    non_negative("sigma_e", sigma_e)?;
    non_negative("delta_r", delta_r)?;
    let entangled_rate = sigma_e * phi;
    let random_rate = delta_r * phi * phi;
    Ok(RateBreakdown {
        flux: phi,
        entangled_rate,
        random_rate,
        total: entangled_rate + random_rate,
        crossover_flux: (delta_r > 0.0).then(|| sigma_e / delta_r),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossSectionEstimate {
    /// `σ²τ_v/(2A_eT_e)`, cm²
    pub sigma_e: f64,
    /// `σ²τ_v`, cm⁴·s
    pub delta_r: f64,
}

/// Order-of-magnitude cross sections from a single-photon cross section
/// `sigma_single` (cm²), virtual-state lifetime `tau_v` (s), entanglement area
/// `a_e` (cm²) and entanglement time `te` (s).
pub fn estimate_sigma_e(sigma_single: f64, tau_v: f64, a_e: f64, te: f64) -> Result<CrossSectionEstimate> {
    positive("sigma_single", sigma_single)?;
    positive("tau_v", tau_v)?;
    positive("entanglement_area", a_e)?;
    positive("entanglement_time", te)?;
    let delta_r = sigma_single * sigma_single * tau_v;
    Ok(CrossSectionEstimate { sigma_e: delta_r / (2.0 * a_e * te), delta_r })
}

/// `1/|Δ|` for the smallest energy defect of any level at detuning `delta`, s.
pub fn virtual_lifetime(atom: &AtomModel, delta: f64) -> Result<f64> {
    let defect = atom
        .levels
        .iter()
        .flat_map(|l| {
            let (d1, d2) = defects(l.half_detuning, delta);
            [d1.abs(), d2.abs()]
        })
        .fold(f64::INFINITY, f64::min);
    positive("energy_defect", defect)?;
    Ok(1.0 / defect)
}
