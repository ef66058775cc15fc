//! Sturm sequences and certified real-root isolation.

use num_traits::{One, Signed, Zero};
use serde_json::{Value, json};
use thiserror::Error;

use crate::scalar::{Rational, format_rational, frac, parse_rational};
use crate::univariate::UPoly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SturmError {
    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("empty interval ({lo}, {hi})")]
    EmptyInterval { lo: String, hi: String },
    #[error("isolation width must be positive")]
    NonPositiveWidth,
    #[error("malformed Sturm witness: {0}")]
    Malformed(String),
}

/// An endpoint of a search interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Finite(Rational),
    PosInf,
}

impl Bound {
    pub fn render(&self) -> String {
        match self {
            Bound::Finite(r) => format_rational(r),
            Bound::PosInf => "inf".into(),
        }
    }
}

/// Open isolating interval containing exactly one root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isolation {
    pub lo: Rational,
    pub hi: Rational,
}

impl Isolation {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// `p₀ = p`, `p₁ = p′`, `pᵢ₊₁ = −rem(pᵢ₋₁, pᵢ)`.
pub fn sturm_chain(p: &UPoly) -> Vec<UPoly> {
    let mut chain = vec![p.clone()];
    if p.is_zero() {
        return chain;
    }
    let d = p.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(d);
    loop {
        let n = chain.len();
        let r = chain[n - 2].div_rem(&chain[n - 1]).1;
        if r.is_zero() {
            return chain;
        }
        chain.push(r.scale(&-Rational::one()));
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|s| *s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

pub fn variations_at(chain: &[UPoly], x: &Bound) -> usize {
    match x {
        Bound::Finite(x) => variations(chain.iter().map(|p| sign(&p.eval(x)))),
        Bound::PosInf => variations(chain.iter().map(|p| p.leading().map(sign).unwrap_or(0))),
    }
}

/// Distinct roots in `(a, b)`, provided neither endpoint is a root.
pub fn count_roots(chain: &[UPoly], a: &Bound, b: &Bound) -> usize {
    variations_at(chain, a).saturating_sub(variations_at(chain, b))
}

/// Removes every factor `(x − c)` from `p`.
fn deflate(p: &UPoly, c: &Rational) -> UPoly {
    let lin = UPoly::new(vec![-c.clone(), Rational::one()]);
    let mut q = p.clone();
    while !q.is_zero() && q.eval(c).is_zero() {
        q = q.div_rem(&lin).0;
    }
    q
}

#[derive(Debug, Clone)]
pub struct SturmData {
    pub polynomial: UPoly,
    pub chain: Vec<UPoly>,
    /// `(lo, hi, roots in (lo, hi))`.
    pub queries: Vec<(Bound, Bound, usize)>,
    pub isolations: Vec<Isolation>,
}

impl SturmData {
    pub fn to_json(&self) -> Value {
        let poly = |p: &UPoly| Value::from(p.coeffs().iter().map(format_rational).collect::<Vec<_>>());
        json!({
            "polynomial": poly(&self.polynomial),
            "sturm_chain": self.chain.iter().map(poly).collect::<Vec<_>>(),
            "queries": self.queries.iter().map(|(a, b, n)| json!([a.render(), b.render(), n])).collect::<Vec<_>>(),
            "isolating_intervals": self.isolations.iter()
                .map(|i| json!([format_rational(&i.lo), format_rational(&i.hi)]))
                .collect::<Vec<_>>(),
        })
    }

    /// Re-derives every stored count and isolation from the stored chain.
    pub fn recheck_json(v: &Value) -> Result<bool, SturmError> {
        let bad = |m: &str| SturmError::Malformed(m.to_string());
        let poly = |v: &Value| -> Result<UPoly, SturmError> {
            let arr = v.as_array().ok_or_else(|| bad("polynomial"))?;
            let mut c = Vec::with_capacity(arr.len());
            for x in arr {
                let s = x.as_str().ok_or_else(|| bad("coefficient"))?;
                c.push(parse_rational(s).map_err(|_| bad("coefficient"))?);
            }
            Ok(UPoly::new(c))
        };
        let bound = |v: &Value| -> Result<Bound, SturmError> {
            match v.as_str().ok_or_else(|| bad("bound"))? {
                "inf" => Ok(Bound::PosInf),
                s => Ok(Bound::Finite(parse_rational(s).map_err(|_| bad("bound"))?)),
            }
        };
        let p = poly(&v["polynomial"])?;
        let chain: Vec<UPoly> = v["sturm_chain"]
            .as_array()
            .ok_or_else(|| bad("chain"))?
            .iter()
            .map(poly)
            .collect::<Result<_, _>>()?;
        if chain != sturm_chain(&p) {
            return Ok(false);
        }
        for q in v["queries"].as_array().ok_or_else(|| bad("queries"))? {
            let (a, b) = (bound(&q[0])?, bound(&q[1])?);
            let n = q[2].as_u64().ok_or_else(|| bad("count"))? as usize;
            let pa = deflate_bound(&p, &a);
            let pa = deflate_bound(&pa, &b);
            if count_roots(&sturm_chain(&pa), &a, &b) != n {
                return Ok(false);
            }
        }
        for i in v["isolating_intervals"].as_array().ok_or_else(|| bad("intervals"))? {
            let (a, b) = (bound(&i[0])?, bound(&i[1])?);
            let pa = deflate_bound(&deflate_bound(&p, &a), &b);
            if count_roots(&sturm_chain(&pa), &a, &b) != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn deflate_bound(p: &UPoly, b: &Bound) -> UPoly {
    match b {
        Bound::Finite(c) => deflate(p, c),
        Bound::PosInf => p.clone(),
    }
}

/// Roots of `p` in the open interval `(lo, hi)`. Endpoint roots are removed
/// exactly by deflation, so the count refers to the open interval.
pub fn count_in(p: &UPoly, lo: &Bound, hi: &Bound) -> Result<usize, SturmError> {
    if p.is_zero() {
        return Err(SturmError::ZeroPolynomial);
    }
    let q = deflate_bound(&deflate_bound(p, lo), hi);
    Ok(count_roots(&sturm_chain(&q), lo, hi))
}

/// Disjoint open intervals of width ≤ `width`, each with exactly one root of
/// `p` in `(lo, hi)`. An infinite upper bound is first replaced by a Cauchy
/// bound.
pub fn sturm_isolate(p: &UPoly, lo: &Rational, hi: &Bound, width: &Rational) -> Result<SturmData, SturmError> {
    if p.is_zero() {
        return Err(SturmError::ZeroPolynomial);
    }
    if !width.is_positive() {
        return Err(SturmError::NonPositiveWidth);
    }
    let hi_r = match hi {
        Bound::Finite(h) => h.clone(),
        Bound::PosInf => cauchy_bound(p).max(lo + Rational::one()),
    };
    if hi_r <= *lo {
        return Err(SturmError::EmptyInterval {
            lo: format_rational(lo),
            hi: format_rational(&hi_r),
        });
    }
    let q = deflate(&deflate(p, lo), &hi_r);
    let chain = sturm_chain(&q);
    let lo_b = Bound::Finite(lo.clone());
    let total = count_roots(&chain, &lo_b, hi);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi_r.clone(), count_roots(&chain, &lo_b, &Bound::Finite(hi_r.clone())))];
    while let Some((a, b, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 && &b - &a <= *width {
            out.push(Isolation { lo: a, hi: b });
            continue;
        }
        let m = split_point(&q, &a, &b);
        let mb = Bound::Finite(m.clone());
        let left = count_roots(&chain, &Bound::Finite(a.clone()), &mb);
        stack.push((m.clone(), b, n - left));
        stack.push((a, m, left));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(SturmData {
        polynomial: p.clone(),
        chain: sturm_chain(p),
        queries: vec![(lo_b, hi.clone(), total)],
        isolations: out,
    })
}

/// A point of `(a, b)` that is not a root, near the midpoint.
fn split_point(p: &UPoly, a: &Rational, b: &Rational) -> Rational {
    let w = b - a;
    for (n, d) in [(1, 2), (1, 3), (2, 3), (2, 5), (3, 5), (3, 7), (4, 7)] {
        let m = a + &w * frac(n, d);
        if !p.eval(&m).is_zero() {
            return m;
        }
    }
    // p has at most deg p roots, so one of a few more fractions works
    (8..)
        .map(|d| a + &w * frac(d / 2, d))
        .find(|m| !p.eval(m).is_zero())
        .expect("finitely many roots")
}

/// `1 + max |aᵢ/aₙ|`, an upper bound on every real root.
pub fn cauchy_bound(p: &UPoly) -> Rational {
    let lc = p.leading().cloned().unwrap_or_else(Rational::one);
    let n = p.coeffs().len().saturating_sub(1);
    p.coeffs()[..n]
        .iter()
        .map(|c| (c / &lc).abs())
        .fold(Rational::zero(), |m, x| if x > m { x } else { m })
        + Rational::one()
}
