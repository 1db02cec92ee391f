//! Atomic constants and the four candidate two-photon channels.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::angular::{double_dipole_products, HalfInteger, Polarization, Term};
use crate::error::{Error, Result};
use crate::reference;
use crate::units::{angular_frequency_from_mhz, angular_frequency_from_thz, CODATA_2018};

/// Candidate channels from `5S₁/₂(m_J = +½)` into a single `5D₃/₂` sublevel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ChannelName {
    Zz,
    ZSigmaPlus,
    ZSigmaMinus,
    SigmaMinusSigmaMinus,
}

impl ChannelName {
    pub const ALL: [ChannelName; 4] =
        [ChannelName::Zz, ChannelName::ZSigmaPlus, ChannelName::ZSigmaMinus, ChannelName::SigmaMinusSigmaMinus];

    pub const fn polarizations(self) -> (Polarization, Polarization) {
        use Polarization::*;
        match self {
            ChannelName::Zz => (Z, Z),
            ChannelName::ZSigmaPlus => (Z, SigmaPlus),
            ChannelName::ZSigmaMinus => (Z, SigmaMinus),
            ChannelName::SigmaMinusSigmaMinus => (SigmaMinus, SigmaMinus),
        }
    }

    /// Only the mixed z/σ channels see competing paths from `m_J = −½`.
    pub const fn requires_state_preparation(self) -> bool {
        matches!(self, ChannelName::ZSigmaPlus | ChannelName::ZSigmaMinus)
    }

    /// Short CLI name.
    pub const fn short(self) -> &'static str {
        match self {
            ChannelName::Zz => "zz",
            ChannelName::ZSigmaPlus => "zsp",
            ChannelName::ZSigmaMinus => "zsm",
            ChannelName::SigmaMinusSigmaMinus => "ss",
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            ChannelName::Zz => "zz",
            ChannelName::ZSigmaPlus => "z_sigma_plus",
            ChannelName::ZSigmaMinus => "z_sigma_minus",
            ChannelName::SigmaMinusSigmaMinus => "sigma_minus_sigma_minus",
        }
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            ChannelName::Zz => "z z",
            ChannelName::ZSigmaPlus => "z σ+",
            ChannelName::ZSigmaMinus => "z σ-",
            ChannelName::SigmaMinusSigmaMinus => "σ- σ-",
        }
    }
}

impl fmt::Display for ChannelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelName::ALL
            .into_iter()
            .find(|c| c.short() == s || c.as_str() == s)
            .ok_or_else(|| Error::InvalidInput {
                field: "channel",
                reason: format!("unknown polarization channel `{s}` (expected zz, zsp, zsm or ss)"),
            })
    }
}

/// Where the per-level double-dipole products come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DipoleSource {
    /// Wigner–Eckart derivation.
    #[default]
    Derived,
    /// The printed reference table.
    Published,
}

/// An intermediate fine-structure level sitting `half_detuning` below `ω_p/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntermediateLevel {
    pub label: String,
    pub term: Term,
    /// rad/s
    pub half_detuning: f64,
    /// Full decay rate, rad/s; enters denominators as `κ/2`.
    pub kappa: f64,
    /// Radial strength relative to the `J = ½` level.
    pub eta_scale: f64,
}

/// Products `(D₂₁, D₁₂)` for one level, in units of `R_J` with `η` folded in.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DipolePair {
    pub d21: f64,
    pub d12: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationChannel {
    pub name: ChannelName,
    pub pol1: Polarization,
    pub pol2: Polarization,
    pub requires_state_preparation: bool,
    /// One entry per [`AtomModel::levels`] entry, same order.
    pub dipole_products: Vec<DipolePair>,
}

impl PolarizationChannel {
    /// Relabels photons 1 ↔ 2.
    pub fn swapped(&self) -> Self {
        Self {
            pol1: self.pol2,
            pol2: self.pol1,
            dipole_products: self.dipole_products.iter().map(|p| DipolePair { d21: p.d12, d12: p.d21 }).collect(),
            ..self.clone()
        }
    }

    /// `D₂₁ = D₁₂` on every level, which makes the channel even in δ.
    pub fn is_symmetric(&self) -> bool {
        self.dipole_products.iter().all(|p| p.d21 == p.d12)
    }
}

/// One intermediate level as written in an atom file.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct LevelParams {
    pub label: String,
    #[cfg_attr(feature = "serde", serde(rename = "half_detuning_THz"))]
    pub half_detuning_thz: f64,
    #[cfg_attr(feature = "serde", serde(rename = "linewidth_MHz"))]
    pub linewidth_mhz: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ComplexParams {
    pub re: f64,
    pub im: f64,
}

/// Human-unit atom parameters: ordinary THz, MHz, ns, nm, and `e²a₀²`.
///
/// `m_other` is in units of `R_J/(2π·1 THz)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct AtomParams {
    pub species: String,
    pub wavelength_nm: f64,
    pub levels: Vec<LevelParams>,
    pub final_lifetime_ns: f64,
    pub r_scale_atomic_units: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub m_other: ComplexParams,
}

impl AtomParams {
    /// Rb 5S₁/₂ → 5P_J → 5D₃/₂.
    pub fn rb87() -> Self {
        Self {
            species: "Rb87".to_string(),
            wavelength_nm: 778.0,
            levels: alloc::vec![
                LevelParams { label: "5P1/2".to_string(), half_detuning_thz: 8.1342, linewidth_mhz: 6.0, eta: 1.0 },
                LevelParams {
                    label: "5P3/2".to_string(),
                    half_detuning_thz: 1.0110,
                    linewidth_mhz: 6.0,
                    eta: reference::ETA,
                },
            ],
            final_lifetime_ns: 246.4,
            r_scale_atomic_units: 6.0,
            m_other: ComplexParams::default(),
        }
    }
}

fn model_err(path: impl Into<String>, reason: &str) -> Error {
    Error::InvalidModel { path: path.into(), reason: reason.into() }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(model_err(path, "must be positive and finite"))
    }
}

/// Immutable, validated atom model in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomModel {
    pub species: String,
    /// Signal/idler center wavelength, m.
    pub wavelength: f64,
    /// `ω_p/2`, rad/s.
    pub signal_idler_center: f64,
    /// `ω_p`, rad/s.
    pub pump_frequency: f64,
    /// Sorted by descending half-detuning.
    pub levels: Vec<IntermediateLevel>,
    /// s
    pub final_lifetime: f64,
    /// `1/τ_l`, rad/s.
    pub final_linewidth: f64,
    /// `R_J` for the `J = ½` level, C²·m².
    pub r_scale: f64,
    /// Catch-all for all other intermediate levels, C²·m²·s.
    pub m_other: Complex64,
    pub dipole_source: DipoleSource,
    pub channels: Vec<PolarizationChannel>,
    params: AtomParams,
}

impl AtomModel {
    /// Validates, sorts levels and derives the channel products.
    pub fn from_params(params: &AtomParams, source: DipoleSource) -> Result<Self> {
        if params.species.trim().is_empty() {
            return Err(model_err("species", "must not be empty"));
        }
        positive("wavelength_nm", params.wavelength_nm)?;
        positive("final_lifetime_ns", params.final_lifetime_ns)?;
        positive("r_scale_atomic_units", params.r_scale_atomic_units)?;
        if !(params.m_other.re.is_finite() && params.m_other.im.is_finite()) {
            return Err(model_err("m_other", "must be finite"));
        }
        if params.levels.is_empty() {
            return Err(model_err("levels", "at least one intermediate level is required"));
        }
        for (i, level) in params.levels.iter().enumerate() {
            positive(&format!("levels[{i}].half_detuning_THz"), level.half_detuning_thz)?;
            if !(level.linewidth_mhz.is_finite() && level.linewidth_mhz >= 0.0) {
                return Err(model_err(format!("levels[{i}].linewidth_MHz"), "must be non-negative and finite"));
            }
            positive(&format!("levels[{i}].eta"), level.eta)?;
        }

        let mut sorted = params.clone();
        sorted.levels.sort_by(|a, b| b.half_detuning_thz.total_cmp(&a.half_detuning_thz));

        let mut levels = Vec::with_capacity(sorted.levels.len());
        for (i, lp) in sorted.levels.iter().enumerate() {
            let path = format!("levels[{i}].label");
            let term = Term::parse(&lp.label).map_err(|e| model_err(path.clone(), &e.to_string()))?;
            if term.l != 1 {
                return Err(model_err(path, "intermediate levels must be P terms"));
            }
            if levels.iter().any(|l: &IntermediateLevel| l.term.j == term.j) {
                return Err(model_err(path, "duplicate intermediate J"));
            }
            levels.push(IntermediateLevel {
                label: lp.label.clone(),
                term,
                half_detuning: angular_frequency_from_thz(lp.half_detuning_thz),
                kappa: angular_frequency_from_mhz(lp.linewidth_mhz),
                eta_scale: lp.eta,
            });
        }

        let wavelength = sorted.wavelength_nm * 1e-9;
        let signal_idler_center = 2.0 * core::f64::consts::PI * CODATA_2018.c / wavelength;
        let final_lifetime = sorted.final_lifetime_ns * 1e-9;
        let r_scale = sorted.r_scale_atomic_units * CODATA_2018.atomic_dipole_squared();
        let other_unit = r_scale / angular_frequency_from_thz(1.0);
        let m_other = Complex64::new(sorted.m_other.re, sorted.m_other.im) * other_unit;

        let channels = ChannelName::ALL
            .into_iter()
            .map(|name| build_channel(name, &levels, source))
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            species: sorted.species.clone(),
            wavelength,
            signal_idler_center,
            pump_frequency: 2.0 * signal_idler_center,
            levels,
            final_lifetime,
            final_linewidth: 1.0 / final_lifetime,
            r_scale,
            m_other,
            dipole_source: source,
            channels,
            params: sorted,
        })
    }

    /// The normalised parameters this model was built from.
    pub fn params(&self) -> &AtomParams {
        &self.params
    }

    pub fn channel(&self, name: ChannelName) -> &PolarizationChannel {
        self.channels.iter().find(|c| c.name == name).expect("all four channels are built")
    }

    /// Same model with `M_other = 0`.
    pub fn without_other(&self) -> Self {
        let mut m = self.clone();
        m.m_other = Complex64::new(0.0, 0.0);
        m.params.m_other = ComplexParams::default();
        m
    }

    /// Same model with every level's linewidth set to zero.
    pub fn without_widths(&self) -> Self {
        let mut m = self.clone();
        for l in &mut m.levels {
            l.kappa = 0.0;
        }
        for l in &mut m.params.levels {
            l.linewidth_mhz = 0.0;
        }
        m
    }

    /// Largest half-detuning, the outer edge of the fine-structure manifold.
    pub fn max_half_detuning(&self) -> f64 {
        self.levels.iter().map(|l| l.half_detuning).fold(0.0, f64::max)
    }

    /// `(ω₁⁰, ω₂⁰) = (ω_p/2 − δ, ω_p/2 + δ)`.
    pub fn photon_frequencies(&self, delta: f64) -> (f64, f64) {
        (self.signal_idler_center - delta, self.signal_idler_center + delta)
    }
}

fn build_channel(name: ChannelName, levels: &[IntermediateLevel], source: DipoleSource) -> Result<PolarizationChannel> {
    let (pol1, pol2) = name.polarizations();
    let derived = double_dipole_products(pol1, pol2)?;
    let row = reference::published_row(name);
    let dipole_products = levels
        .iter()
        .map(|level| {
            let (d21, d12) = match source {
                DipoleSource::Derived => {
                    let p = derived.iter().find(|p| p.intermediate_j == level.term.j).ok_or_else(|| {
                        Error::Unsupported { reason: format!("no dipole path through {}", level.label) }
                    })?;
                    (p.d21.to_f64(), p.d12.to_f64())
                }
                DipoleSource::Published => match level.term.j {
                    HalfInteger::HALF => (row.d21_half, row.d12_half),
                    HalfInteger::THREE_HALVES => (row.d21_three_halves, row.d12_three_halves),
                    _ => return Err(Error::Unsupported { reason: format!("no published entry for {}", level.label) }),
                },
            };
            Ok(DipolePair { d21: d21 * level.eta_scale, d12: d12 * level.eta_scale })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolarizationChannel {
        name,
        pol1,
        pol2,
        requires_state_preparation: name.requires_state_preparation(),
        dipole_products,
    })
}

/// The Rb model with derived dipole products and `M_other = 0`.
pub fn builtin_rb() -> AtomModel {
    AtomModel::from_params(&AtomParams::rb87(), DipoleSource::Derived).expect("builtin parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_constants() {
        let rb = builtin_rb();
        assert!((rb.levels[0].half_detuning / 5.1109e13 - 1.0).abs() < 1e-4);
        assert!((rb.levels[1].half_detuning / 6.3523e12 - 1.0).abs() < 1e-4);
        assert!((rb.final_linewidth / 4.058e6 - 1.0).abs() < 1e-3);
        assert!((rb.signal_idler_center / 2.421e15 - 1.0).abs() < 1e-3);
        assert_eq!(rb.levels[1].eta_scale, 1.067);
        assert!((rb.r_scale / 4.3127e-58 - 1.0).abs() < 1e-4, "{}", rb.r_scale);
    }

    #[test]
    fn state_preparation_flags() {
        let rb = builtin_rb();
        for c in &rb.channels {
            let expected = matches!(c.name, ChannelName::ZSigmaPlus | ChannelName::ZSigmaMinus);
            assert_eq!(c.requires_state_preparation, expected, "{}", c.name);
        }
    }

    #[test]
    fn levels_sorted_on_load() {
        let mut p = AtomParams::rb87();
        p.levels.reverse();
        let m = AtomModel::from_params(&p, DipoleSource::Derived).unwrap();
        assert_eq!(m.levels[0].label, "5P1/2");
        assert_eq!(m, builtin_rb());
    }

    #[test]
    fn validation_names_field() {
        let mut p = AtomParams::rb87();
        p.final_lifetime_ns = 0.0;
        match AtomModel::from_params(&p, DipoleSource::Derived) {
            Err(Error::InvalidModel { path, .. }) => assert!(path.contains("final_lifetime")),
            other => panic!("{other:?}"),
        }
        let mut p = AtomParams::rb87();
        p.levels[1].half_detuning_thz = -1.0;
        match AtomModel::from_params(&p, DipoleSource::Derived) {
            Err(Error::InvalidModel { path, .. }) => assert_eq!(path, "levels[1].half_detuning_THz"),
            other => panic!("{other:?}"),
        }
        let mut p = AtomParams::rb87();
        p.levels[0].label = "5D3/2".into();
        assert!(AtomModel::from_params(&p, DipoleSource::Derived).is_err());
    }

    #[test]
    fn eta_folded_into_products() {
        let rb = builtin_rb();
        let zz = rb.channel(ChannelName::Zz);
        let expected = 2f64.sqrt() / 45.0 * 1.067;
        assert!((zz.dipole_products[1].d21 - expected).abs() < 1e-15);
        assert!(zz.is_symmetric());
    }

    #[test]
    fn channel_names_parse() {
        for c in ChannelName::ALL {
            assert_eq!(c.short().parse::<ChannelName>().unwrap(), c);
            assert_eq!(c.as_str().parse::<ChannelName>().unwrap(), c);
        }
        assert!("sp".parse::<ChannelName>().is_err());
    }

    #[test]
    fn swapped_channel_exchanges_orderings() {
        let rb = builtin_rb();
        let c = rb.channel(ChannelName::ZSigmaMinus);
        let s = c.swapped();
        assert_eq!(s.pol1, c.pol2);
        assert_eq!(s.dipole_products[0].d21, c.dipole_products[0].d12);
        assert_eq!(s.swapped(), *c);
    }
}
