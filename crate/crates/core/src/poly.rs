//! Sparse multivariate polynomials over the rationals.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is graded
//! reverse lexicographic with respect to the declared variable order, so
//! iteration (reversed) yields the canonical printing order directly.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use thiserror::Error;

use crate::scalar::{Rational, format_rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable lists differ: [{left}] vs [{right}]")]
    VariableMismatch { left: String, right: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expected {expected} coordinates, got {got}")]
    PointLength { expected: usize, got: usize },
    #[error("denominator vanishes at the evaluation point")]
    ZeroDenominator,
    #[error("zero denominator in rational function")]
    ZeroDivisor,
    #[error("direction has {got} components but there are {expected} variables")]
    DirectionLength { expected: usize, got: usize },
}

/// Ordered variable names shared between polynomials.
pub type Vars = Arc<[String]>;

pub fn vars(names: &[&str]) -> Vars {
    names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into()
}

fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

/// Exponent vector, one slot per declared variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(SmallVec::from_elem(0, n))
    }

    pub fn from_exponents(e: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(e))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn render(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(names)
            .filter(|(e, _)| **e > 0)
            .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    /// Graded reverse lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                // smaller exponent in the last differing variable wins
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Outcome of a coefficient-sign inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonnegCheck {
    pub all_nonneg: bool,
    /// Most negative coefficient and its monomial, when `all_nonneg` is false.
    pub witness: Option<(Rational, Monomial)>,
    pub min_coefficient: Option<Rational>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.vars.join(","), self)
    }
}

impl MultiPoly {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn int(vars: &Vars, c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(c.into()))
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self, PolyError> {
        let i = index_of(vars, name)?;
        Ok(Self::var_index(vars, i))
    }

    pub fn var_index(vars: &Vars, i: usize) -> Self {
        let mut e = Monomial::one(vars.len());
        e.0[i] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(e, Rational::one());
        p
    }

    /// Builds from `(exponents, coefficient)` pairs; duplicates are summed.
    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (descending grevlex) order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        self.is_constant().then(|| self.coefficient(&Monomial::one(self.nvars())))
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if same_vars(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(PolyError::VariableMismatch {
                left: self.vars.join(","),
                right: other.vars.join(","),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.vars));
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Ok(MultiPoly {
            vars: self.vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn partial_derivative(&self, var: &str) -> Result<Self, PolyError> {
        Ok(self.derivative_index(index_of(&self.vars, var)?))
    }

    pub fn derivative_index(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] = e - 1;
            out.add_term(dm, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// `Σ vᵢ ∂ᵢ p`.
    pub fn directional_derivative(&self, v: &[i64]) -> Result<Self, PolyError> {
        if v.len() != self.nvars() {
            return Err(PolyError::DirectionLength {
                expected: self.nvars(),
                got: v.len(),
            });
        }
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            for (i, &vi) in v.iter().enumerate() {
                let e = m.0[i];
                if vi == 0 || e == 0 {
                    continue;
                }
                let mut dm = m.clone();
                dm.0[i] = e - 1;
                out.add_term(dm, c * Rational::from_integer(BigInt::from(vi * e as i64)));
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::PointLength {
                expected: self.nvars(),
                got: point.len(),
            });
        }
        // x_i = p_i/q_i; accumulate Σ c·Π p_i^e q_i^(E_i−e) over integers and
        // divide once by L·Π q_i^E_i, L the coefficient denominator lcm
        let n = self.nvars();
        let top: Vec<usize> = (0..n).map(|i| self.degree_in(i) as usize).collect();
        let pow_table = |b: &BigInt, e: usize| {
            let mut v = Vec::with_capacity(e + 1);
            v.push(BigInt::one());
            for k in 0..e {
                let next = &v[k] * b;
                v.push(next);
            }
            v
        };
        let num_pows: Vec<Vec<BigInt>> = (0..n).map(|i| pow_table(point[i].numer(), top[i])).collect();
        let den_pows: Vec<Vec<BigInt>> = (0..n).map(|i| pow_table(point[i].denom(), top[i])).collect();
        let l = self.denominator_lcm();
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.numer() * (&l / c.denom());
            for (i, &e) in m.0.iter().enumerate() {
                let e = e as usize;
                if e > 0 {
                    t *= &num_pows[i][e];
                }
                if e < top[i] {
                    t *= &den_pows[i][top[i] - e];
                }
            }
            total += t;
        }
        let den = (0..n).fold(l, |acc, i| acc * &den_pows[i][top[i]]);
        Ok(Rational::new(total, den))
    }

    /// Replaces every variable by a polynomial over `target` (one image per
    /// declared variable, in order).
    pub fn substitute(&self, images: &[MultiPoly], target: &Vars) -> Result<Self, PolyError> {
        if images.len() != self.nvars() {
            return Err(PolyError::PointLength {
                expected: self.nvars(),
                got: images.len(),
            });
        }
        for im in images {
            if !same_vars(im.vars(), target) {
                return Err(PolyError::VariableMismatch {
                    left: im.vars.join(","),
                    right: target.join(","),
                });
            }
        }
        let mut cache: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::one(target), p.clone()])
            .collect();
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                let e = e as usize;
                while cache[i].len() <= e {
                    let next = cache[i].last().unwrap() * &images[i];
                    cache[i].push(next);
                }
                if e > 0 {
                    t = &t * &cache[i][e];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-expresses the polynomial over a variable list containing all of its
    /// variables (matched by name).
    pub fn embed(&self, target: &Vars) -> Result<Self, PolyError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|n| index_of(target, n))
            .collect::<Result<_, _>>()?;
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = Monomial::one(target.len());
            for (i, &j) in map.iter().enumerate() {
                e.0[j] = m.0[i];
            }
            out.add_term(e, c.clone());
        }
        Ok(out)
    }

    /// Quotient when `divisor` divides `self` exactly, else `None`.
    ///
    /// Uses the grevlex division algorithm by a single divisor, whose
    /// remainder is zero exactly when the divisor is a factor.
    pub fn exact_div(&self, divisor: &Self) -> Result<Option<Self>, PolyError> {
        self.check(divisor)?;
        let Some((lm, lc)) = divisor.leading_term() else {
            return Err(PolyError::ZeroDivisor);
        };
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return Ok(None);
            }
            let qm = m.div(&lm);
            let qc = c / &lc;
            for (dm, dc) in &divisor.terms {
                rem.add_term(dm.mul(&qm), -(dc * &qc));
            }
            quot.add_term(qm, qc);
        }
        Ok(Some(quot))
    }

    /// Least common multiple of all coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Gcd of all coefficient numerators (zero for the zero polynomial).
    pub fn numerator_gcd(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
    }

    /// Positive rational `c` with `self = c · primitive` where `primitive` has
    /// coprime integer coefficients.
    pub fn content(&self) -> Rational {
        if self.is_zero() {
            return Rational::one();
        }
        Rational::new(self.numerator_gcd(), self.denominator_lcm())
    }

    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        self.scale(&c.recip())
    }

    pub fn coefficients_all_nonneg(&self) -> NonnegCheck {
        let min = self
            .terms
            .iter()
            .min_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)));
        match min {
            None => NonnegCheck {
                all_nonneg: true,
                witness: None,
                min_coefficient: None,
            },
            Some((m, c)) => {
                let ok = !c.is_negative();
                NonnegCheck {
                    all_nonneg: ok,
                    witness: (!ok).then(|| (c.clone(), m.clone())),
                    min_coefficient: Some(c.clone()),
                }
            }
        }
    }

    /// Dense coefficient vector (index = exponent) for a one-variable polynomial.
    pub fn to_univariate(&self) -> Option<Vec<Rational>> {
        if self.nvars() != 1 {
            return None;
        }
        let mut out = vec![Rational::zero(); self.degree_in(0) as usize + 1];
        for (m, c) in &self.terms {
            out[m.0[0] as usize] = c.clone();
        }
        Some(out)
    }

    pub fn from_univariate(vars: &Vars, coeffs: &[Rational]) -> Self {
        assert_eq!(vars.len(), 1);
        Self::from_terms(
            vars,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::from_exponents(&[i as u32]), c.clone())),
        )
    }

    /// Canonical text with explicit `*` and `^`, descending grevlex.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Like [`render`](Self::render) but keeps only the first `max_terms` terms,
    /// followed by a `…(N more terms)` marker.
    pub fn render_truncated(&self, max_terms: usize) -> String {
        if self.num_terms() <= max_terms {
            return self.render();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms().take(max_terms).enumerate() {
            write_term(&mut s, i == 0, m, c, &self.vars);
        }
        s.push_str(&format!(" …({} more terms)", self.num_terms() - max_terms));
        s
    }
}

fn write_term(s: &mut String, first: bool, m: &Monomial, c: &Rational, names: &[String]) {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            s.push('-');
        }
    } else {
        s.push_str(if neg { " - " } else { " + " });
    }
    let mono = m.degree() > 0;
    if a.is_one() && mono {
        s.push_str(&m.render(names));
    } else {
        s.push_str(&format_rational(&a));
        if mono {
            s.push('*');
            s.push_str(&m.render(names));
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            write_term(&mut s, i == 0, m, c, &self.vars);
        }
        f.write_str(&s)
    }
}

pub(crate) fn index_of(vars: &[String], name: &str) -> Result<usize, PolyError> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
}

// Operator forms panic on mismatched variable lists; use the `checked_*`
// methods where inputs are not known to share an ambient ring.
impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}
