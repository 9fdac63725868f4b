use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sum::pairwise_reduce;

/// Signed real number stored as `sign * exp(log_mag)`.
///
/// Carleman weights reach `exp(alpha * 25)` with `alpha ~ R log R`, which is
/// far outside the f64 range, so every weighted magnitude in the crate goes
/// through this type. The zero value has `sign == 0` and `log_mag == -inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogScalar {
    log_mag: f64,
    sign: i8,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        log_mag: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: LogScalar = LogScalar {
        log_mag: 0.0,
        sign: 1,
    };

    /// Builds `sign * exp(log_mag)`; a zero sign or `-inf` magnitude gives zero.
    pub fn new(log_mag: f64, sign: i8) -> Self {
        if sign == 0 || log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogScalar {
            log_mag,
            sign: sign.signum(),
        }
    }

    /// Positive number `exp(log_mag)`.
    pub fn from_log(log_mag: f64) -> Self {
        Self::new(log_mag, 1)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogScalar {
                log_mag: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn log_mag(self) -> f64 {
        self.log_mag
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Converts back to f64; overflows to +-inf and underflows to 0.
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_mag.exp()
        }
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogScalar {
                log_mag: self.log_mag,
                sign: 1,
            }
        }
    }

    /// Square root of a nonnegative value. Negative input is a logic error.
    pub fn sqrt(self) -> Self {
        assert!(self.sign >= 0, "sqrt of negative LogScalar");
        if self.sign == 0 {
            self
        } else {
            Self::from_log(0.5 * self.log_mag)
        }
    }

    pub fn powf(self, p: f64) -> Self {
        assert!(self.sign >= 0, "powf of negative LogScalar");
        if self.sign == 0 {
            if p > 0.0 {
                Self::ZERO
            } else {
                Self::ONE
            }
        } else {
            Self::from_log(p * self.log_mag)
        }
    }

    /// Sum with the fixed pairwise reduction order.
    pub fn sum(items: &[LogScalar]) -> LogScalar {
        pairwise_reduce(items, LogScalar::ZERO, |a, b| a + b)
    }
}

/// `a + b` evaluated without leaving the log domain.
pub fn log_add(a: LogScalar, b: LogScalar) -> LogScalar {
    if a.sign == 0 {
        return b;
    }
    if b.sign == 0 {
        return a;
    }
    let (big, small) = if a.log_mag >= b.log_mag { (a, b) } else { (b, a) };
    let diff = small.log_mag - big.log_mag;
    if big.sign == small.sign {
        LogScalar {
            log_mag: big.log_mag + diff.exp().ln_1p(),
            sign: big.sign,
        }
    } else if diff == 0.0 {
        LogScalar::ZERO
    } else {
        LogScalar {
            log_mag: big.log_mag + (-diff.exp_m1()).ln(),
            sign: big.sign,
        }
    }
}

impl Add for LogScalar {
    type Output = LogScalar;
    fn add(self, rhs: LogScalar) -> LogScalar {
        log_add(self, rhs)
    }
}

impl Neg for LogScalar {
    type Output = LogScalar;
    fn neg(self) -> LogScalar {
        LogScalar {
            log_mag: self.log_mag,
            sign: -self.sign,
        }
    }
}

impl Sub for LogScalar {
    type Output = LogScalar;
    fn sub(self, rhs: LogScalar) -> LogScalar {
        log_add(self, -rhs)
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        if self.sign == 0 || rhs.sign == 0 {
            return LogScalar::ZERO;
        }
        LogScalar {
            log_mag: self.log_mag + rhs.log_mag,
            sign: self.sign * rhs.sign,
        }
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: LogScalar) -> LogScalar {
        assert!(rhs.sign != 0, "division of LogScalar by zero");
        if self.sign == 0 {
            return LogScalar::ZERO;
        }
        LogScalar {
            log_mag: self.log_mag - rhs.log_mag,
            sign: self.sign * rhs.sign,
        }
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log_mag.partial_cmp(&other.log_mag),
                _ => other.log_mag.partial_cmp(&self.log_mag),
            },
            ord => Some(ord),
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "exp({})", self.log_mag),
            _ => write!(f, "-exp({})", self.log_mag),
        }
    }
}

/// Complex number as a log-domain magnitude and a unit phase (radians).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex {
    pub magnitude: LogScalar,
    pub phase: f64,
}

impl LogComplex {
    pub fn from_complex(z: Complex64) -> Self {
        let r = z.norm();
        LogComplex {
            magnitude: LogScalar::from_f64(r),
            phase: if r == 0.0 { 0.0 } else { z.arg() },
        }
    }

    /// Multiplies the magnitude by a positive weight.
    pub fn scale(self, weight: LogScalar) -> Self {
        LogComplex {
            magnitude: self.magnitude * weight,
            phase: self.phase,
        }
    }

    pub fn norm_sqr(self) -> LogScalar {
        self.magnitude * self.magnitude
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.magnitude.to_f64(), self.phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_plus_one() {
        let two = LogScalar::from_log(0.0) + LogScalar::from_log(0.0);
        assert!((two.log_mag() - 2f64.ln()).abs() < 1e-16);
        assert_eq!(two.sign(), 1);
    }

    #[test]
    fn zero_is_additive_identity() {
        let x = LogScalar::new(3.5, -1);
        assert_eq!(x + LogScalar::ZERO, x);
        assert_eq!(LogScalar::ZERO + x, x);
    }

    #[test]
    fn huge_magnitudes() {
        // 1000 + log(1 + e^-1), from a 50-digit mpmath evaluation.
        let expected = 1000.313_261_687_518_2;
        let s = LogScalar::from_log(1000.0) + LogScalar::from_log(999.0);
        assert!(((s.log_mag() - expected) / expected).abs() < 1e-15);
    }

    #[test]
    fn cancellation_gives_exact_zero() {
        let x = LogScalar::from_log(12.0);
        let z = x - x;
        assert!(z.is_zero());
        assert_eq!(z.log_mag(), f64::NEG_INFINITY);
    }

    #[test]
    fn subtraction_sign() {
        let d = LogScalar::from_f64(2.0) - LogScalar::from_f64(5.0);
        assert_eq!(d.sign(), -1);
        assert!((d.to_f64() + 3.0).abs() < 1e-15);
    }

    #[test]
    fn round_trip_exact_in_range() {
        for &x in &[1.0, -2.5, 1e-300, 7.25e200, -3.0e-5] {
            let back = LogScalar::from_f64(x).to_f64();
            assert!(((back - x) / x).abs() < 4e-16 * (x.abs().ln().abs() + 1.0));
        }
    }

    #[test]
    fn ordering() {
        let a = LogScalar::from_f64(-3.0);
        let b = LogScalar::ZERO;
        let c = LogScalar::from_log(800.0);
        assert!(a < b && b < c);
        assert!(LogScalar::from_f64(-5.0) < LogScalar::from_f64(-1.0));
    }

    fn signed() -> impl Strategy<Value = LogScalar> {
        (-50.0f64..50.0, prop_oneof![Just(-1i8), Just(0i8), Just(1i8)])
            .prop_map(|(l, s)| LogScalar::new(l, s))
    }

    proptest! {
        #[test]
        fn add_commutes(a in signed(), b in signed()) {
            prop_assert_eq!(a + b, b + a);
        }

        #[test]
        fn add_associative(a in signed(), b in signed(), c in signed()) {
            let l = ((a + b) + c).to_f64();
            let r = (a + (b + c)).to_f64();
            let scale = a.to_f64().abs() + b.to_f64().abs() + c.to_f64().abs();
            prop_assert!((l - r).abs() <= 1e-14 * scale);
        }

        #[test]
        fn add_monotone_for_nonnegative(x in -40.0f64..40.0, y in -40.0f64..40.0) {
            let a = LogScalar::from_log(x);
            let b = LogScalar::from_log(y);
            let s = a + b;
            prop_assert!(s >= a && s >= b);
        }

        #[test]
        fn matches_f64_addition(x in -1e6f64..1e6, y in -1e6f64..1e6) {
            let s = (LogScalar::from_f64(x) + LogScalar::from_f64(y)).to_f64();
            prop_assert!((s - (x + y)).abs() <= 1e-12 * (x.abs() + y.abs()));
        }
    }
}
