//! Wigner 3j and 6j symbols by the Racah sums, in exact arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::half::HalfInteger;
use super::surd::{factorial, PrimePowers, Surd};
use crate::error::{Error, Result};

fn check_magnitude(j: HalfInteger) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::MalformedQuantumNumber { reason: alloc::format!("negative angular momentum {j}") });
    }
    Ok(())
}

/// Triangle rule on twice-values, including integrality of the perimeter.
pub fn triangle(a: HalfInteger, b: HalfInteger, c: HalfInteger) -> bool {
    let (a, b, c) = (a.twice(), b.twice(), c.twice());
    c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

// (x)/2 for an even twice-sum; callers guarantee non-negativity.
fn half(twice: i32) -> u64 {
    debug_assert!(twice >= 0 && twice % 2 == 0, "{twice}");
    (twice / 2) as u64
}

fn sign(k: i64) -> BigInt {
    if k.rem_euclid(2) == 0 {
        BigInt::from(1)
    } else {
        BigInt::from(-1)
    }
}

fn add_triangle_coefficient(p: &mut PrimePowers, a: i32, b: i32, c: i32) {
    p.add_factorial(half(a + b - c), 1);
    p.add_factorial(half(a - b + c), 1);
    p.add_factorial(half(-a + b + c), 1);
    p.add_factorial(half(a + b + c) + 1, -1);
}

/// Exact 3j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn wigner3j_exact(
    j1: HalfInteger,
    j2: HalfInteger,
    j3: HalfInteger,
    m1: HalfInteger,
    m2: HalfInteger,
    m3: HalfInteger,
) -> Result<Surd> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j3.check_projection(m3)?;
    if (m1 + m2 + m3).twice() != 0 || !triangle(j1, j2, j3) {
        return Ok(Surd::zero());
    }
    let (tj1, tj2, tj3) = (j1.twice(), j2.twice(), j3.twice());
    let (tm1, tm2, tm3) = (m1.twice(), m2.twice(), m3.twice());

    let mut root = PrimePowers::default();
    add_triangle_coefficient(&mut root, tj1, tj2, tj3);
    for (tj, tm) in [(tj1, tm1), (tj2, tm2), (tj3, tm3)] {
        root.add_factorial(half(tj + tm), 1);
        root.add_factorial(half(tj - tm), 1);
    }

    // Summation index k keeps every factorial argument non-negative.
    let lo = [0, (tj2 - tj3 - tm1) / 2, (tj1 - tj3 + tm2) / 2].into_iter().max().unwrap();
    let hi = [(tj1 + tj2 - tj3) / 2, (tj1 - tm1) / 2, (tj2 + tm2) / 2].into_iter().min().unwrap();
    let mut sum = BigRational::zero();
    for k in lo..=hi {
        let tk = 2 * k;
        let den = factorial(half(tk))
            * factorial(half(tj3 - tj2 + tk + tm1))
            * factorial(half(tj3 - tj1 + tk - tm2))
            * factorial(half(tj1 + tj2 - tj3 - tk))
            * factorial(half(tj1 - tk - tm1))
            * factorial(half(tj2 - tk + tm2));
        sum += BigRational::new(sign(k as i64), den);
    }
    let phase = sign(i64::from((tj1 - tj2 - tm3) / 2));
    Ok(root.sqrt().scale(&(sum * BigRational::from_integer(phase))))
}

/// Exact 6j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn wigner6j_exact(
    j1: HalfInteger,
    j2: HalfInteger,
    j3: HalfInteger,
    j4: HalfInteger,
    j5: HalfInteger,
    j6: HalfInteger,
) -> Result<Surd> {
    for j in [j1, j2, j3, j4, j5, j6] {
        check_magnitude(j)?;
    }
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| triangle(a, b, c)) {
        return Ok(Surd::zero());
    }
    let mut root = PrimePowers::default();
    for &(a, b, c) in &triads {
        add_triangle_coefficient(&mut root, a.twice(), b.twice(), c.twice());
    }
    let alphas = triads.map(|(a, b, c)| half(a.twice() + b.twice() + c.twice()));
    let betas = [
        half(j1.twice() + j2.twice() + j4.twice() + j5.twice()),
        half(j2.twice() + j3.twice() + j5.twice() + j6.twice()),
        half(j3.twice() + j1.twice() + j6.twice() + j4.twice()),
    ];
    let lo = *alphas.iter().max().unwrap();
    let hi = *betas.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for t in lo..=hi {
        let mut den = BigInt::from(1);
        for a in alphas {
            den *= factorial(t - a);
        }
        for b in betas {
            den *= factorial(b - t);
        }
        sum += BigRational::new(sign(t as i64) * factorial(t + 1), den);
    }
    Ok(root.sqrt().scale(&sum))
}

/// 3j symbol as a double.
pub fn wigner3j(
    j1: HalfInteger,
    j2: HalfInteger,
    j3: HalfInteger,
    m1: HalfInteger,
    m2: HalfInteger,
    m3: HalfInteger,
) -> Result<f64> {
    wigner3j_exact(j1, j2, j3, m1, m2, m3).map(|s| s.to_f64())
}

/// 6j symbol as a double.
pub fn wigner6j(
    j1: HalfInteger,
    j2: HalfInteger,
    j3: HalfInteger,
    j4: HalfInteger,
    j5: HalfInteger,
    j6: HalfInteger,
) -> Result<f64> {
    wigner6j_exact(j1, j2, j3, j4, j5, j6).map(|s| s.to_f64())
}
