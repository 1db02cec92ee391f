use core::fmt;
use core::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// An exact multiple of ½, stored as twice its value.
///
/// Magnitudes (`j`) are non-negative; projections (`m`) may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HalfInteger {
    twice_value: i32,
}

impl HalfInteger {
    pub const ZERO: Self = Self::from_twice(0);
    pub const HALF: Self = Self::from_twice(1);
    pub const ONE: Self = Self::from_twice(2);
    pub const THREE_HALVES: Self = Self::from_twice(3);

    pub const fn from_twice(twice_value: i32) -> Self {
        Self { twice_value }
    }

    pub const fn integer(value: i32) -> Self {
        Self { twice_value: 2 * value }
    }

    pub const fn twice(self) -> i32 {
        self.twice_value
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice_value) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice_value % 2 == 0
    }

    pub const fn abs(self) -> Self {
        Self { twice_value: self.twice_value.abs() }
    }

    /// All projections `−j, −j+1, …, j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInteger> {
        let tj = self.twice_value;
        (0..=2 * tj).step_by(2).map(move |k| HalfInteger::from_twice(k - tj))
    }

    /// Checks that `m` is a valid projection of `self` taken as a magnitude.
    pub fn check_projection(self, m: HalfInteger) -> Result<()> {
        if self.twice_value < 0 {
            return Err(Error::MalformedQuantumNumber { reason: alloc::format!("negative j = {self}") });
        }
        if m.twice_value.abs() > self.twice_value {
            return Err(Error::MalformedQuantumNumber { reason: alloc::format!("|m| = {} exceeds j = {self}", m.abs()) });
        }
        if (self.twice_value - m.twice_value) % 2 != 0 {
            return Err(Error::MalformedQuantumNumber { reason: alloc::format!("j = {self} and m = {m} differ by a half-integer") });
        }
        Ok(())
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

impl Add for HalfInteger {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_twice(self.twice_value + rhs.twice_value)
    }
}

impl Sub for HalfInteger {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_twice(self.twice_value - rhs.twice_value)
    }
}

impl Neg for HalfInteger {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_twice(-self.twice_value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn projections_enumerate() {
        let m: Vec<i32> = HalfInteger::THREE_HALVES.projections().map(|m| m.twice()).collect();
        assert_eq!(m, [-3, -1, 1, 3]);
        assert_eq!(HalfInteger::ZERO.projections().count(), 1);
    }

    #[test]
    fn projection_checks() {
        let j = HalfInteger::HALF;
        assert!(j.check_projection(HalfInteger::HALF).is_ok());
        assert!(j.check_projection(HalfInteger::ZERO).is_err());
        assert!(j.check_projection(HalfInteger::THREE_HALVES).is_err());
        assert!(HalfInteger::from_twice(-2).check_projection(HalfInteger::ZERO).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", HalfInteger::THREE_HALVES), "3/2");
        assert_eq!(alloc::format!("{}", HalfInteger::integer(-2)), "-2");
    }
}
