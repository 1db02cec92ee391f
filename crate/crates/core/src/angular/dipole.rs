//! Dipole matrix elements between fine-structure states and the double-dipole
//! products of a two-photon path `S₁/₂ → P_J → D₃/₂`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::half::HalfInteger;
use super::surd::{Surd, SurdSum};
use super::wigner::{wigner3j_exact, wigner6j_exact};
use crate::error::{Error, Result};

/// `|n (L S) J m_J⟩` with `S = ½`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FineStructureState {
    pub n: u32,
    pub l: HalfInteger,
    pub s: HalfInteger,
    pub j: HalfInteger,
    pub mj: HalfInteger,
}

impl FineStructureState {
    pub fn new(n: u32, l: u32, j: HalfInteger, mj: HalfInteger) -> Result<Self> {
        let l = HalfInteger::integer(l as i32);
        let s = HalfInteger::HALF;
        if !super::wigner::triangle(l, s, j) {
            return Err(Error::MalformedQuantumNumber {
                reason: alloc::format!("J = {j} cannot couple from L = {l} and S = 1/2"),
            });
        }
        j.check_projection(mj)?;
        Ok(Self { n, l, s, j, mj })
    }

    pub fn with_mj(self, mj: HalfInteger) -> Result<Self> {
        self.j.check_projection(mj)?;
        Ok(Self { mj, ..self })
    }
}

/// Spectroscopic term `nLJ` parsed from labels such as `5P3/2` or `5d_{5/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub n: u32,
    pub l: u32,
    pub j: HalfInteger,
}

impl Term {
    pub fn parse(label: &str) -> Result<Self> {
        let bad = |why: &str| Error::MalformedQuantumNumber { reason: alloc::format!("term label `{label}`: {why}") };
        let cleaned: String = label.chars().filter(|c| !matches!(c, '_' | '{' | '}' | ' ')).collect();
        let digits = cleaned.chars().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            return Err(bad("missing principal quantum number"));
        }
        let n: u32 = cleaned[..digits].parse().map_err(|_| bad("principal quantum number"))?;
        let mut rest = cleaned[digits..].chars();
        let l = match rest.next().map(|c| c.to_ascii_uppercase()) {
            Some('S') => 0,
            Some('P') => 1,
            Some('D') => 2,
            Some('F') => 3,
            _ => return Err(bad("orbital letter must be one of S, P, D, F")),
        };
        let jtext: String = rest.collect();
        let j = match jtext.split_once('/') {
            Some((num, "2")) => HalfInteger::from_twice(num.parse().map_err(|_| bad("J numerator"))?),
            _ => return Err(bad("J must be written as k/2")),
        };
        FineStructureState::new(n, l, j, if j.is_integer() { HalfInteger::ZERO } else { HalfInteger::HALF })?;
        Ok(Self { n, l, j })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = ['S', 'P', 'D', 'F'][self.l as usize];
        write!(f, "{}{}{}", self.n, letter, self.j)
    }
}

/// Photon polarization.
///
/// `λ·d` is expressed through spherical components as `sign·d_q`, using the
/// Cartesian vectors `ẑ` and `(x̂ ± iŷ)/√2` for σ±. With the Condon–Shortley
/// `d₊₁ = −(d_x + i d_y)/√2` this gives `σ⁺ → −d₊₁` and `σ⁻ → d₋₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Polarization {
    Z,
    SigmaPlus,
    SigmaMinus,
}

impl Polarization {
    pub const fn spherical(self) -> (i32, i64) {
        match self {
            Polarization::Z => (0, 1),
            Polarization::SigmaPlus => (1, -1),
            Polarization::SigmaMinus => (-1, 1),
        }
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            Polarization::Z => "z",
            Polarization::SigmaPlus => "σ+",
            Polarization::SigmaMinus => "σ-",
        }
    }
}

fn parity(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Angular factor of `⟨to| r_q |from⟩` in units of the radial integral.
///
/// Wigner–Eckart in `J`, then the `L`–`S` recoupling 6j, then the reduced
/// element of the normalised spherical harmonic `C¹`.
pub fn dipole_component(from: &FineStructureState, to: &FineStructureState, q: i32) -> Result<Surd> {
    if from.s != to.s {
        return Err(Error::InvalidInput { field: "spin", reason: "states must share S".into() });
    }
    if !(-1..=1).contains(&q) {
        return Err(Error::InvalidInput { field: "q", reason: "spherical component must be -1, 0 or +1".into() });
    }
    let dl = to.l.twice() - from.l.twice();
    if dl.abs() != 2 || to.mj.twice() != from.mj.twice() + 2 * q {
        return Ok(Surd::zero());
    }
    let one = HalfInteger::ONE;
    let q = HalfInteger::integer(q);
    let (lp, jp, mp) = (to.l, to.j, to.mj);
    let (l, j, m) = (from.l, from.j, from.mj);
    let s = from.s;

    let projection = wigner3j_exact(jp, one, j, -mp, q, m)?;
    let recouple = wigner6j_exact(lp, jp, s, j, l, one)?;
    let orbital = wigner3j_exact(lp, one, l, HalfInteger::ZERO, HalfInteger::ZERO, HalfInteger::ZERO)?;

    let sign = parity((jp - mp).twice() / 2) * parity((lp + s + j + one).twice() / 2) * parity(lp.twice() / 2);
    let dims_j = Surd::sqrt_of_ratio(((j.twice() + 1) * (jp.twice() + 1)) as u64, 1);
    let dims_l = Surd::sqrt_of_ratio(((l.twice() + 1) * (lp.twice() + 1)) as u64, 1);
    let value = &(&(&projection * &recouple) * &(&orbital * &dims_j)) * &dims_l;
    Ok(value.scale(&int(sign)))
}

/// Sign of the product of reduced radial integrals `⟨D|r|P⟩⟨P|r|S⟩`.
///
/// Chosen so that the zz channel products come out positive; only relative signs
/// inside a channel are physical.
pub const RADIAL_PRODUCT_SIGN: i64 = -1;

/// Double-dipole products through one intermediate fine-structure level,
/// in units of that level's radial product `R_J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProducts {
    pub intermediate_j: HalfInteger,
    /// Photon 1 absorbed first: `Σ_m ⟨f|d₂|i m⟩⟨i m|d₁|g⟩`.
    pub d21: SurdSum,
    /// Photon 2 absorbed first.
    pub d12: SurdSum,
}

pub const GROUND_MJ: HalfInteger = HalfInteger::HALF;

/// Two-photon path products for `nS₁/₂(m_J = +½) → n'P_J → n''D₃/₂` with photon
/// polarizations `pol1`, `pol2`, for `J = ½` and `J = 3/2`.
///
/// Fixing the ground projection makes the final projection `½ + q₁ + q₂` unique;
/// pairs whose final projection lies outside `D₃/₂` are rejected.
pub fn double_dipole_products(pol1: Polarization, pol2: Polarization) -> Result<Vec<LevelProducts>> {
    let (q1, s1) = pol1.spherical();
    let (q2, s2) = pol2.spherical();
    let ground = FineStructureState::new(5, 0, HalfInteger::HALF, GROUND_MJ)?;
    let final_mj = GROUND_MJ + HalfInteger::integer(q1 + q2);
    let final_state = FineStructureState::new(4, 2, HalfInteger::THREE_HALVES, final_mj).map_err(|_| Error::Unsupported {
        reason: alloc::format!(
            "{}{} from m_J = 1/2 reaches m_J = {final_mj}, which has no D3/2 final state",
            pol1.symbol(),
            pol2.symbol()
        ),
    })?;
    let polarization_sign = int(s1 * s2 * RADIAL_PRODUCT_SIGN);

    let path = |first: i32, second: i32, j: HalfInteger| -> Result<SurdSum> {
        let mut sum = SurdSum::default();
        for mi in j.projections() {
            let mid = FineStructureState::new(5, 1, j, mi)?;
            let up = dipole_component(&ground, &mid, first)?;
            let down = dipole_component(&mid, &final_state, second)?;
            sum.add(&(&down * &up).scale(&polarization_sign));
        }
        Ok(sum)
    };

    [HalfInteger::HALF, HalfInteger::THREE_HALVES]
        .into_iter()
        .map(|j| Ok(LevelProducts { intermediate_j: j, d21: path(q1, q2, j)?, d12: path(q2, q1, j)? }))
        .collect()
}
