//! Scalar types for measure values.
//!
//! Measures and Radon–Nikodym values are always of the form `p / q` with `q`
//! a product of `n` and `n + 1`, so every computation is generic over a
//! [`Scalar`] that can be built from counts. [`BigRational`] gives exact
//! answers; `f64`/`f32` give fast approximations for statistics.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn from_count(v: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// `base^exp` for a possibly negative exponent.
    fn powi(base: u64, exp: i64) -> Self {
        let mut acc = Self::one();
        let b = Self::from_count(base);
        for _ in 0..exp.unsigned_abs() {
            acc = acc * b.clone();
        }
        if exp < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }
}

impl Scalar for f64 {
    fn from_count(v: u64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn powi(base: u64, exp: i64) -> Self {
        (base as f64).powi(exp as i32)
    }
}

impl Scalar for f32 {
    fn from_count(v: u64) -> Self {
        v as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn powi(base: u64, exp: i64) -> Self {
        (base as f32).powi(exp as i32)
    }
}

impl Scalar for BigRational {
    fn from_count(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn powi(base: u64, exp: i64) -> Self {
        let p = num_traits::pow(BigInt::from(base), exp.unsigned_abs() as usize);
        if exp < 0 {
            BigRational::new(BigInt::one(), p)
        } else {
            BigRational::from_integer(p)
        }
    }
}

/// Formats an exact value as `p/q`, always with an explicit denominator.
pub fn fraction_string(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `p/q` or a bare integer.
pub fn parse_fraction(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (
            a.trim().parse::<BigInt>().ok()?,
            b.trim().parse::<BigInt>().ok()?,
        ),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// If `v == base^k` for some integer `k`, returns `k`.
pub fn exact_log(v: &BigRational, base: u64) -> Option<i64> {
    if !v.is_positive() || base < 2 {
        return None;
    }
    let b = BigInt::from(base);
    let strip = |x: &BigInt| -> Option<i64> {
        let mut x = x.clone();
        let mut k = 0i64;
        while x > BigInt::one() {
            let (q, r) = num_integer::Integer::div_rem(&x, &b);
            if !r.is_zero() {
                return None;
            }
            x = q;
            k += 1;
        }
        Some(k)
    };
    let up = strip(v.numer())?;
    let down = strip(v.denom())?;
    // reduced fraction: one side is 1
    Some(up - down)
}
