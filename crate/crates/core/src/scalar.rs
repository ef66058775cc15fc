//! Exact scalars: arbitrary-precision rationals and rationals carrying a power of π.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Reduced fraction with positive denominator. Zero is `0/1`.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("cannot add values carrying pi^{left} and pi^{right}")]
    PiPowerMismatch { left: i32, right: i32 },
    #[error("malformed rational `{0}` (expected an integer or p/q)")]
    Malformed(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`; panics when `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q` or a bare integer. Decimal notation is rejected so that no
/// precision can be lost at an input boundary.
pub fn parse_rational(text: &str) -> Result<Rational, ScalarError> {
    let t = text.trim();
    let bad = || ScalarError::Malformed(text.to_string());
    let int = |s: &str| -> Result<BigInt, ScalarError> {
        let s = s.trim();
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        BigInt::from_str(s).map_err(|_| bad())
    };
    match t.split_once('/') {
        None => Ok(Rational::from_integer(int(t)?)),
        Some((p, q)) => {
            let q = int(q)?;
            if q.is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            Ok(Rational::new(int(p)?, q))
        }
    }
}

/// Canonical `p/q` text (integers print without a denominator).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A rational multiple of an integer power of π, e.g. `265/1008 · π⁻²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiScalar {
    mantissa: Rational,
    pi_power: i32,
}

impl PiScalar {
    pub fn new(mantissa: Rational, pi_power: i32) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        Self { mantissa, pi_power }
    }

    pub fn rational(r: Rational) -> Self {
        Self::new(r, 0)
    }

    pub fn zero() -> Self {
        Self {
            mantissa: Rational::zero(),
            pi_power: 0,
        }
    }

    pub fn mantissa(&self) -> &Rational {
        &self.mantissa
    }

    pub fn pi_power(&self) -> i32 {
        self.pi_power
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// Sum of two values with the same power of π. Zero is absorbed on either side.
    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.pi_power != other.pi_power {
            return Err(ScalarError::PiPowerMismatch {
                left: self.pi_power,
                right: other.pi_power,
            });
        }
        Ok(Self::new(&self.mantissa + &other.mantissa, self.pi_power))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.try_add(&-other.clone())
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::new(
            &self.mantissa / &other.mantissa,
            self.pi_power - other.pi_power,
        ))
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::rational(Rational::one());
        }
        Self::new(
            num_traits::pow(self.mantissa.clone(), e as usize),
            self.pi_power * e as i32,
        )
    }

    /// The mantissa, provided no π remains.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.pi_power == 0).then_some(&self.mantissa)
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }
}

impl Mul for &PiScalar {
    type Output = PiScalar;
    fn mul(self, rhs: &PiScalar) -> PiScalar {
        PiScalar::new(&self.mantissa * &rhs.mantissa, self.pi_power + rhs.pi_power)
    }
}

impl Neg for PiScalar {
    type Output = PiScalar;
    fn neg(self) -> PiScalar {
        PiScalar::new(-self.mantissa, self.pi_power)
    }
}

impl fmt::Display for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_power {
            0 => write!(f, "{}", format_rational(&self.mantissa)),
            1 => write!(f, "{}*pi", format_rational(&self.mantissa)),
            p => write!(f, "{}*pi^{}", format_rational(&self.mantissa), p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_integers_and_fractions() {
        assert_eq!(parse_rational("7").unwrap(), rat(7));
        assert_eq!(parse_rational("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(parse_rational(" 2919/409 ").unwrap(), frac(2919, 409));
    }

    #[test]
    fn parse_rejects_decimals_and_garbage() {
        for bad in ["1.2", "1e3", "", "/3", "3/", "a/b", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_rational("1/0"), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn pi_mismatch_is_rejected() {
        let a = PiScalar::new(frac(265, 1008), -2);
        let b = PiScalar::rational(rat(1));
        assert_eq!(
            a.try_add(&b),
            Err(ScalarError::PiPowerMismatch { left: -2, right: 0 })
        );
        // zero is canonical and has no π
        assert_eq!(a.try_add(&PiScalar::new(rat(0), 5)).unwrap(), a);
    }

    #[test]
    fn pi_products_track_exponents() {
        let s0 = PiScalar::new(rat(4), 1);
        let sq = s0.pow(2);
        assert_eq!(sq, PiScalar::new(rat(16), 2));
        let ratio = sq.try_div(&PiScalar::new(rat(32), 2)).unwrap();
        assert_eq!(ratio.as_rational(), Some(&frac(1, 2)));
        assert_eq!(format!("{}", PiScalar::new(frac(-1, 3), -2)), "-1/3*pi^-2");
    }
}
