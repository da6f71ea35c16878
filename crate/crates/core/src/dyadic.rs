//! Exact dyadic rationals `n / 2^k`.
//!
//! Values are kept canonical: the numerator is odd, or the value is zero and
//! the exponent is zero. Equality is therefore structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest exponent accepted by the operator impls.
pub const DEFAULT_EXPONENT_BUDGET: u32 = 4096;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { numerator: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { numerator: BigInt::from(n), exponent: 0 }
    }

    /// `n / 2^k`, canonicalized.
    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Self {
        Self::canonical(numerator.into(), exponent as u64)
            .expect("canonicalization never raises the exponent")
    }

    pub fn checked_new(numerator: impl Into<BigInt>, exponent: u64, budget: u32) -> Result<Self> {
        if exponent > budget as u64 {
            // canonicalization may still bring it back under budget
            let d = Self::canonical(numerator.into(), exponent)?;
            return d.within(budget);
        }
        Self::canonical(numerator.into(), exponent)?.within(budget)
    }

    fn canonical(mut numerator: BigInt, mut exponent: u64) -> Result<Self> {
        if numerator.is_zero() {
            return Ok(Dyadic::zero());
        }
        if exponent > 0 {
            let tz = numerator.trailing_zeros().unwrap_or(0).min(exponent);
            numerator >>= tz as usize;
            exponent -= tz;
        }
        let exponent = u32::try_from(exponent).map_err(|_| Error::ExponentBudget {
            exponent,
            budget: u32::MAX,
        })?;
        Ok(Dyadic { numerator, exponent })
    }

    fn within(self, budget: u32) -> Result<Self> {
        if self.exponent > budget {
            Err(Error::ExponentBudget { exponent: self.exponent as u64, budget })
        } else {
            Ok(self)
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn signum(&self) -> i32 {
        if self.numerator.is_zero() {
            0
        } else if self.numerator.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { numerator: self.numerator.abs(), exponent: self.exponent }
    }

    /// `self * 2^shift` (negative shifts divide).
    pub fn scale_pow2(&self, shift: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        if shift >= 0 {
            let s = shift as u64;
            if s >= self.exponent as u64 {
                Dyadic { numerator: &self.numerator << (s - self.exponent as u64) as usize, exponent: 0 }
            } else {
                Dyadic { numerator: self.numerator.clone(), exponent: self.exponent - s as u32 }
            }
        } else {
            Dyadic::new(self.numerator.clone(), self.exponent + (-shift) as u32)
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u64) {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent) as usize;
        let b = &other.numerator << (e - other.exponent) as usize;
        (a, b, e as u64)
    }

    pub fn checked_add(&self, other: &Self, budget: u32) -> Result<Self> {
        let (a, b, e) = self.aligned(other);
        Self::canonical(a + b, e)?.within(budget)
    }

    pub fn checked_sub(&self, other: &Self, budget: u32) -> Result<Self> {
        let (a, b, e) = self.aligned(other);
        Self::canonical(a - b, e)?.within(budget)
    }

    pub fn checked_mul(&self, other: &Self, budget: u32) -> Result<Self> {
        let e = self.exponent as u64 + other.exponent as u64;
        if e > budget as u64 {
            return Err(Error::ExponentBudget { exponent: e, budget });
        }
        // product of odd numerators is odd: already canonical
        Self::canonical(&self.numerator * &other.numerator, e)
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.numerator.to_f64().unwrap_or(f64::NAN);
        if self.exponent <= 1000 {
            n / 2f64.powi(self.exponent as i32)
        } else {
            self.to_rational().to_f64().unwrap_or(0.0)
        }
    }

    /// Exact conversion from a finite binary64.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let r = BigRational::from_float(x)?;
        let den = r.denom();
        let exp = den.trailing_zeros()?;
        Some(Dyadic::new(r.numer().clone(), exp as u32))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), BigInt::one() << self.exponent as usize)
    }

    /// Exact `self / 2^k` as an integer when it divides, used by grid snapping.
    pub fn to_integer_at_scale(&self, scale_exp: u32) -> Option<BigInt> {
        if self.exponent > scale_exp {
            return None;
        }
        Some(&self.numerator << (scale_exp - self.exponent) as usize)
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    pub fn floor(&self) -> BigInt {
        self.numerator.div_floor(&(BigInt::one() << self.exponent as usize))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        self.checked_add(rhs, DEFAULT_EXPONENT_BUDGET).expect("dyadic exponent budget")
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self.checked_sub(rhs, DEFAULT_EXPONENT_BUDGET).expect("dyadic exponent budget")
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        self.checked_mul(rhs, DEFAULT_EXPONENT_BUDGET).expect("dyadic exponent budget")
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { numerator: -&self.numerator, exponent: self.exponent }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

/// Canonical text form `n/2^k`.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `n/2^k`, plain integers, and `n/d` with `d` a power of two.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        match s.split_once('/') {
            None => Ok(Dyadic::new(s.parse::<BigInt>().map_err(|_| bad())?, 0)),
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d = d.trim();
                if let Some(k) = d.strip_prefix("2^") {
                    let k: u32 = k.parse().map_err(|_| bad())?;
                    return Dyadic::checked_new(n, k as u64, DEFAULT_EXPONENT_BUDGET);
                }
                let d: BigInt = d.parse().map_err(|_| bad())?;
                if d <= BigInt::zero() {
                    return Err(bad());
                }
                let k = d.trailing_zeros().ok_or_else(bad)?;
                if d != BigInt::one() << k as usize {
                    return Err(bad());
                }
                Dyadic::checked_new(n, k, DEFAULT_EXPONENT_BUDGET)
            }
        }
    }
}
