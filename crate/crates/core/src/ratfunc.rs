//! Quotients of [`MultiPoly`] values.
//!
//! No multivariate gcd is ever taken. Canonical form only clears rational
//! coefficients, divides out the joint integer content and normalises the
//! sign of the denominator's leading coefficient. Equality is decided by
//! cross-multiplication.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{MultiPoly, PolyError, Vars};
use crate::scalar::Rational;

#[derive(Clone, Debug)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, PolyError> {
        if num.vars()[..] != den.vars()[..] {
            return Err(PolyError::VariableMismatch {
                left: num.vars().join(","),
                right: den.vars().join(","),
            });
        }
        if den.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        Ok(Self::canonical(num, den))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.vars());
        Self::canonical(p, den)
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(vars, c))
    }

    pub fn zero(vars: &Vars) -> Self {
        Self::from_poly(MultiPoly::zero(vars))
    }

    fn canonical(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return RatFunc {
                den: MultiPoly::one(num.vars()),
                num,
            };
        }
        let l = num.denominator_lcm().lcm(&den.denominator_lcm());
        let cleared = Rational::from_integer(l);
        let (n1, d1) = (num.scale(&cleared), den.scale(&cleared));
        let g = n1.numerator_gcd().gcd(&d1.numerator_gcd());
        let (mut n1, mut d1) = if g.is_one() {
            (n1, d1)
        } else {
            let inv = Rational::new(One::one(), g);
            (n1.scale(&inv), d1.scale(&inv))
        };
        if d1.leading_term().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            n1 = -&n1;
            d1 = -&d1;
        }
        RatFunc { num: n1, den: d1 }
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, PolyError> {
        if self.den == o.den {
            return Self::new(self.num.checked_add(&o.num)?, self.den.clone());
        }
        Self::new(
            self.num.checked_mul(&o.den)?.checked_add(&o.num.checked_mul(&self.den)?)?,
            self.den.checked_mul(&o.den)?,
        )
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, PolyError> {
        self.checked_add(&o.neg())
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, PolyError> {
        Self::new(self.num.checked_mul(&o.num)?, self.den.checked_mul(&o.den)?)
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, PolyError> {
        if o.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        Self::new(self.num.checked_mul(&o.den)?, self.den.checked_mul(&o.num)?)
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::canonical(self.num.scale(c), self.den.clone())
    }

    /// Integer power; `x^0 = 1` for every `x`, including zero.
    pub fn pow(&self, e: i32) -> Result<Self, PolyError> {
        if e == 0 {
            return Ok(Self::constant(self.vars(), Rational::one()));
        }
        let (n, d) = if e > 0 {
            (self.num.pow(e as u32), self.den.pow(e as u32))
        } else {
            (self.den.pow(e.unsigned_abs()), self.num.pow(e.unsigned_abs()))
        };
        Self::new(n, d)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(self.num.evaluate(point)? / d)
    }

    /// `a/b == c/d` iff `a·d == c·b`.
    pub fn equivalent(&self, o: &Self) -> Result<bool, PolyError> {
        Ok(self.num.checked_mul(&o.den)? == o.num.checked_mul(&self.den)?)
    }

    /// Divides numerator and denominator by `factor` as many times as both
    /// admit exact division.
    pub fn cancel_factor(&self, factor: &MultiPoly) -> Result<Self, PolyError> {
        if factor.is_constant() {
            return Ok(self.clone());
        }
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        loop {
            if num.is_zero() {
                break;
            }
            let (Some(n), Some(d)) = (num.exact_div(factor)?, den.exact_div(factor)?) else {
                break;
            };
            num = n;
            den = d;
        }
        Self::new(num, den)
    }

    pub fn partial_derivative(&self, var: &str) -> Result<Self, PolyError> {
        let i = crate::poly::index_of(self.vars(), var)?;
        let n1 = self.num.derivative_index(i);
        let d1 = self.den.derivative_index(i);
        Self::new(
            &(&n1 * &self.den) - &(&self.num * &d1),
            self.den.pow(2),
        )
    }

    /// Structural second directional derivative `D_v² (N/D)`, returned as
    /// `(numerator, D)` so that the value is exactly `numerator / D³`:
    ///
    /// `N_vv·D² − 2·N_v·D_v·D − N·D_vv·D + 2·N·D_v²`.
    pub fn directional_second_derivative_parts(
        &self,
        v: &[i64],
    ) -> Result<(MultiPoly, MultiPoly), PolyError> {
        let (n, d) = (&self.num, &self.den);
        let nv = n.directional_derivative(v)?;
        let dv = d.directional_derivative(v)?;
        let nvv = nv.directional_derivative(v)?;
        let dvv = dv.directional_derivative(v)?;
        let two = Rational::from_integer(2.into());
        // D·(N_vv·D − 2·N_v·D_v − N·D_vv) + 2·N·D_v²
        let inner = &(&(&nvv * d) - &(&nv * &dv).scale(&two)) - &(n * &dvv);
        let numer = &(&inner * d) + &(n * &dv.pow(2)).scale(&two);
        Ok((numer, d.clone()))
    }

    /// `D_v² f` with denominator `D³` (no simplification beyond canonical form).
    pub fn directional_second_derivative(&self, v: &[i64]) -> Result<Self, PolyError> {
        let (numer, d) = self.directional_second_derivative_parts(v)?;
        Self::new(numer, d.pow(3))
    }

    /// Substitutes a polynomial for each variable.
    pub fn substitute(&self, images: &[MultiPoly], target: &Vars) -> Result<Self, PolyError> {
        Self::new(
            self.num.substitute(images, target)?,
            self.den.substitute(images, target)?,
        )
    }

    pub fn embed(&self, target: &Vars) -> Result<Self, PolyError> {
        Self::new(self.num.embed(target)?, self.den.embed(target)?)
    }

    /// The constant value, if this is a constant quotient.
    pub fn constant_value(&self) -> Option<Rational> {
        match (self.num.constant_value(), self.den.constant_value()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.equivalent(other).unwrap_or(false)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.constant_value().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;
    use crate::scalar::{frac, rat};

    fn setup() -> (Vars, MultiPoly, MultiPoly) {
        let v = vars(&["beta", "gamma"]);
        let b = MultiPoly::var(&v, "beta").unwrap();
        let g = MultiPoly::var(&v, "gamma").unwrap();
        (v, b, g)
    }

    #[test]
    fn canonical_form_clears_content_and_sign() {
        let (v, b, _) = setup();
        let f = RatFunc::new(b.scale(&frac(1, 2)), (-&b).scale(&rat(3)) + MultiPoly::int(&v, 6)).unwrap();
        assert_eq!(f.numerator().to_string(), "-beta");
        assert_eq!(f.denominator().to_string(), "6*beta - 12");
    }

    #[test]
    fn reciprocal_product_is_one() {
        let (v, b, g) = setup();
        let a = &b + &MultiPoly::one(&v);
        let c = &g.pow(2) + &b;
        let x = RatFunc::new(a.clone(), c.clone()).unwrap();
        let y = RatFunc::new(c, a).unwrap();
        assert_eq!(x.checked_mul(&y).unwrap(), RatFunc::constant(&v, rat(1)));
    }

    #[test]
    fn zero_to_the_zero_is_one() {
        let (v, _, _) = setup();
        let z = RatFunc::zero(&v);
        assert_eq!(z.pow(0).unwrap(), RatFunc::constant(&v, rat(1)));
        assert!(matches!(z.pow(-1), Err(PolyError::ZeroDivisor)));
    }

    #[test]
    fn second_derivative_of_sum_of_squares() {
        let (_, b, g) = setup();
        let f = RatFunc::from_poly(&b.pow(2) + &g.pow(2));
        let d2 = f.directional_second_derivative(&[1, -1]).unwrap();
        assert_eq!(d2.constant_value(), Some(rat(4)));
    }

    #[test]
    fn second_derivative_vanishes_along_level_lines() {
        let (v, b, g) = setup();
        let f = RatFunc::new(MultiPoly::one(&v), &b + &g).unwrap();
        let (n, d) = f.directional_second_derivative_parts(&[1, -1]).unwrap();
        assert!(n.is_zero());
        assert_eq!(d, &b + &g);
    }

    #[test]
    fn quotient_rule_partial() {
        let (v, b, _) = setup();
        let f = RatFunc::new(b.clone(), &b + &MultiPoly::one(&v)).unwrap();
        let df = f.partial_derivative("beta").unwrap();
        let expect = RatFunc::new(MultiPoly::one(&v), (&b + &MultiPoly::one(&v)).pow(2)).unwrap();
        assert_eq!(df, expect);
    }

    #[test]
    fn cancel_known_factor() {
        let (v, b, g) = setup();
        let w = &(&b * &g) + &MultiPoly::one(&v);
        let f = RatFunc::new(&w * &b, &w.pow(2) * &g).unwrap();
        let c = f.cancel_factor(&w).unwrap();
        assert_eq!(c.numerator(), &b);
        assert_eq!(c.denominator(), &(&w * &g));
    }

    #[test]
    fn evaluation_rejects_poles() {
        let (v, b, _) = setup();
        let f = RatFunc::new(MultiPoly::one(&v), b).unwrap();
        assert_eq!(f.evaluate(&[rat(0), rat(3)]), Err(PolyError::ZeroDenominator));
        assert_eq!(f.evaluate(&[rat(2), rat(3)]).unwrap(), frac(1, 2));
    }
}
