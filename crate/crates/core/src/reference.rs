//! Published double-dipole products and null detunings for the four Rb channels.
//!
//! These are reference data for comparison only; the engine derives its products
//! from angular algebra unless [`crate::atom::DipoleSource::Published`] is chosen.

use crate::atom::ChannelName;

/// One published row. J = 3/2 entries are divided by η, as printed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRow {
    pub channel: ChannelName,
    pub d21_half: f64,
    pub d12_half: f64,
    pub d21_three_halves: f64,
    pub d12_three_halves: f64,
    /// The same four entries in the printed surd notation.
    pub printed: [&'static str; 4],
    pub roots: PublishedRoots,
}

/// Published null detunings in ordinary THz with their quoted uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PublishedRoots {
    /// `±value` (channel even in δ).
    Symmetric { magnitude: f64, uncertainty: f64 },
    /// Signed roots.
    Signed(&'static [(f64, f64)]),
    None,
}

impl PublishedRoots {
    /// `(|δ|, uncertainty)` pairs.
    pub fn magnitudes(&self) -> alloc::vec::Vec<(f64, f64)> {
        match *self {
            PublishedRoots::Symmetric { magnitude, uncertainty } => alloc::vec![(magnitude, uncertainty)],
            PublishedRoots::Signed(r) => r.iter().map(|&(v, u)| (libm::fabs(v), u)).collect(),
            PublishedRoots::None => alloc::vec::Vec::new(),
        }
    }
}

const SQRT2: f64 = core::f64::consts::SQRT_2;

fn sqrt3() -> f64 {
    libm::sqrt(3.0)
}

fn ss() -> f64 {
    2.0 / 15.0 * libm::sqrt(5.0 / 6.0)
}

pub const ETA: f64 = 1.067;
pub const ETA_UNCERTAINTY: f64 = 0.007;

pub fn published_table() -> [PublishedRow; 4] {
    let s3 = sqrt3();
    [
        PublishedRow {
            channel: ChannelName::Zz,
            d21_half: SQRT2 / 9.0,
            d12_half: SQRT2 / 9.0,
            d21_three_halves: SQRT2 / 45.0,
            d12_three_halves: SQRT2 / 45.0,
            printed: ["√2/9", "√2/9", "√2/45", "√2/45"],
            roots: PublishedRoots::Symmetric { magnitude: 1.645, uncertainty: 0.004 },
        },
        PublishedRow {
            channel: ChannelName::ZSigmaPlus,
            d21_half: -1.0 / (3.0 * s3),
            d12_half: 0.0,
            d21_three_halves: 2.0 / (15.0 * s3),
            d12_three_halves: -1.0 / (5.0 * s3),
            printed: ["-1/(3√3)", "0", "2/(15√3)", "-1/(5√3)"],
            roots: PublishedRoots::Signed(&[(-0.3124, 0.0007)]),
        },
        PublishedRow {
            channel: ChannelName::ZSigmaMinus,
            d21_half: 1.0 / 9.0,
            d12_half: 2.0 / 9.0,
            d21_three_halves: 4.0 / 45.0,
            d12_three_halves: -1.0 / 45.0,
            printed: ["1/9", "2/9", "4/45", "-1/45"],
            roots: PublishedRoots::Signed(&[(-3.514, 0.014), (0.7642, 0.0006)]),
        },
        PublishedRow {
            channel: ChannelName::SigmaMinusSigmaMinus,
            d21_half: -ss(),
            d12_half: -ss(),
            d21_three_halves: ss(),
            d12_three_halves: ss(),
            printed: ["-(2/15)√(5/6)", "-(2/15)√(5/6)", "(2/15)√(5/6)", "(2/15)√(5/6)"],
            roots: PublishedRoots::None,
        },
    ]
}

pub fn published_row(channel: ChannelName) -> PublishedRow {
    published_table().into_iter().find(|r| r.channel == channel).expect("every channel has a row")
}
