use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact value `mantissa * 2^exponent` with an odd mantissa (or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::from(0),
            exponent: 0,
        }
    }

    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mut d = Dyadic {
            mantissa: mantissa.into(),
            exponent,
        };
        d.normalize();
        d
    }

    /// `sign * 2^exponent`.
    pub fn pow2(sign: i8, exponent: i64) -> Self {
        match sign.signum() {
            0 => Dyadic::zero(),
            s => Dyadic::new(i64::from(s), exponent),
        }
    }

    fn normalize(&mut self) {
        if self.mantissa == BigInt::from(0) {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exponent += tz as i64;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == BigInt::from(0)
    }

    pub fn signum(&self) -> i8 {
        match self.mantissa.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mantissa: if self.signum() < 0 { -self.mantissa.clone() } else { self.mantissa.clone() },
            exponent: self.exponent,
        }
    }

    /// `Some(e)` when the value is `+-2^e`.
    pub fn power_of_two(&self) -> Option<i64> {
        let one = BigInt::from(1);
        (self.mantissa == one || self.mantissa == -one).then_some(self.exponent)
    }

    /// Exact quotient, defined when the divisor is a signed power of two.
    pub fn div_pow2(&self, divisor: &Dyadic) -> Result<Dyadic> {
        let e = divisor.power_of_two().ok_or(Error::DyadicOverflow)?;
        let m = if divisor.signum() < 0 { -self.mantissa.clone() } else { self.mantissa.clone() };
        Ok(Dyadic::new(m, self.exponent - e))
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.mantissa.to_f64().unwrap_or(f64::NAN);
        let e = self.exponent.clamp(-2200, 2200) as i32;
        m * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
    }

    pub fn to_rational(&self) -> BigRational {
        let two = BigInt::from(2);
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa * two.pow(self.exponent as u32))
        } else {
            BigRational::new(self.mantissa.clone(), two.pow((-self.exponent) as u32))
        }
    }

    pub fn from_rational(q: &BigRational) -> Result<Dyadic> {
        let den = q.denom();
        if den.sign() != num_bigint::Sign::Plus || den.magnitude().count_ones() != 1 {
            return Err(Error::DyadicOverflow);
        }
        let e = den.trailing_zeros().unwrap_or(0) as i64;
        Ok(Dyadic::new(q.numer().clone(), -e))
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(other.exponent);
        (
            &self.mantissa << (self.exponent - e) as u64,
            &other.mantissa << (other.exponent - e) as u64,
            e,
        )
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, other: &Dyadic) -> Dyadic {
        self + &(-other)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa.clone(),
            exponent: self.exponent,
        }
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &other.mantissa, self.exponent + other.exponent)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else if let Some(e) = self.power_of_two() {
            write!(f, "{}2^{}", if self.signum() < 0 { "-" } else { "" }, e)
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

/// Serialized form: decimal mantissa string and exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicRecord {
    pub sign: i8,
    pub mantissa: String,
    pub exponent: i64,
}

impl From<&Dyadic> for DyadicRecord {
    fn from(d: &Dyadic) -> Self {
        DyadicRecord {
            sign: d.signum(),
            mantissa: d.mantissa.to_string(),
            exponent: d.exponent,
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DyadicRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DyadicRecord::deserialize(d)?;
        let m: BigInt = r.mantissa.parse().map_err(serde::de::Error::custom)?;
        Ok(Dyadic::new(m, r.exponent))
    }
}
