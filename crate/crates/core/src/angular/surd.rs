//! Exact numbers of the form `q·√r` with `q` rational and `r` square-free.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    coeff: BigRational,
    radicand: BigUint,
}

impl Surd {
    pub fn zero() -> Self {
        Self { coeff: BigRational::zero(), radicand: BigUint::one() }
    }

    pub fn from_integer(n: i64) -> Self {
        Self { coeff: BigRational::from_integer(BigInt::from(n)), radicand: BigUint::one() }
    }

    pub fn rational(coeff: BigRational) -> Self {
        Self { coeff, radicand: BigUint::one() }
    }

    /// `√(n/d)` reduced to canonical form.
    pub fn sqrt_of_ratio(n: u64, d: u64) -> Self {
        let mut powers = PrimePowers::default();
        powers.add_integer(n, 1);
        powers.add_integer(d, -1);
        powers.sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::NAN);
        let r = self.radicand.to_f64().unwrap_or(f64::NAN);
        c * libm::sqrt(r)
    }

    /// Square of the value, which is always rational.
    pub fn squared(&self) -> BigRational {
        let r = BigRational::from_integer(BigInt::from(self.radicand.clone()));
        &self.coeff * &self.coeff * r
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self { coeff: &self.coeff * factor, radicand: self.radicand.clone() }
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        if self.is_zero() || rhs.is_zero() {
            return Surd::zero();
        }
        let g = self.radicand.gcd(&rhs.radicand);
        let radicand = (&self.radicand / &g) * (&rhs.radicand / &g);
        let coeff = &self.coeff * &rhs.coeff * BigRational::from_integer(BigInt::from(g));
        Surd { coeff, radicand }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        &self * &rhs
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            return write!(f, "0");
        }
        let numer = self.coeff.numer();
        let denom = self.coeff.denom();
        if numer.is_negative() {
            write!(f, "-")?;
        }
        let abs_numer = numer.abs();
        let has_root = !self.radicand.is_one();
        if !abs_numer.is_one() || !has_root {
            write!(f, "{abs_numer}")?;
        }
        if has_root {
            write!(f, "√{}", self.radicand)?;
        }
        if !denom.is_one() {
            write!(f, "/{denom}")?;
        }
        Ok(())
    }
}

/// A finite sum of surds, grouped by radicand so equal radicands combine exactly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SurdSum {
    terms: BTreeMap<BigUint, BigRational>,
}

impl SurdSum {
    pub fn add(&mut self, s: &Surd) {
        if s.is_zero() {
            return;
        }
        let entry = self.terms.entry(s.radicand.clone()).or_insert_with(BigRational::zero);
        *entry += &s.coeff;
        if entry.is_zero() {
            self.terms.remove(&s.radicand);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> Vec<Surd> {
        self.terms
            .iter()
            .map(|(r, c)| Surd { coeff: c.clone(), radicand: r.clone() })
            .collect()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms().iter().map(Surd::to_f64).sum()
    }

    pub fn negated(&self) -> Self {
        Self { terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect() }
    }
}

impl From<Surd> for SurdSum {
    fn from(s: Surd) -> Self {
        let mut sum = SurdSum::default();
        sum.add(&s);
        sum
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Prime factorisation with signed exponents, used for ratios of factorials.
#[derive(Debug, Clone, Default)]
pub(crate) struct PrimePowers {
    exponents: BTreeMap<u64, i64>,
}

impl PrimePowers {
    /// Multiplies by `(n!)^power` using Legendre's formula.
    pub(crate) fn add_factorial(&mut self, n: u64, power: i64) {
        for p in (2..=n).filter(|&p| is_prime(p)) {
            let mut e = 0u64;
            let mut pk = p;
            while pk <= n {
                e += n / pk;
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
            *self.exponents.entry(p).or_insert(0) += power * e as i64;
        }
    }

    pub(crate) fn add_integer(&mut self, mut n: u64, power: i64) {
        assert!(n > 0, "factorising zero");
        let mut p = 2;
        while p * p <= n {
            while n.is_multiple_of(p) {
                *self.exponents.entry(p).or_insert(0) += power;
                n /= p;
            }
            p += 1;
        }
        if n > 1 {
            *self.exponents.entry(n).or_insert(0) += power;
        }
    }

    pub(crate) fn sqrt(&self) -> Surd {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        let mut radicand = BigUint::one();
        for (&p, &e) in &self.exponents {
            let half = e.div_euclid(2);
            let odd = e.rem_euclid(2);
            let pb = BigUint::from(p);
            if half > 0 {
                num *= pb.pow(half as u32);
            } else if half < 0 {
                den *= pb.pow((-half) as u32);
            }
            if odd == 1 {
                radicand *= &pb;
            }
        }
        Surd { coeff: BigRational::new(BigInt::from(num), BigInt::from(den)), radicand }
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub(crate) fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
