//! Second cohomology of `CP2 # k(-CP2)`, `k ≤ 3`, with the Lorentzian
//! intersection form, curve-area presentations and the Cremona involution.
//!
//! A class is `h·H − Σ eᵢ·Eᵢ`. Coordinates are polynomials so that the same
//! code handles symbolic chart classes and numeric classes (empty variable
//! list).

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::poly::{MultiPoly, PolyError, Vars, vars};
use crate::scalar::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum DelPezzoError {
    #[error("classes live on different surfaces (k = {0} and k = {1})")]
    MismatchedK(u8, u8),
    #[error("operation needs k = 3, got k = {0}")]
    NeedsThreePoints(u8),
    #[error("unsupported number of blow-ups {0}")]
    UnsupportedK(u8),
    #[error("{0:?} is not a permutation of 1..={1}")]
    InvalidPermutation(Vec<usize>, u8),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohClass {
    pub k: u8,
    pub h: MultiPoly,
    /// `e₁, e₂, e₃`; slots above `k` are zero.
    pub e: [MultiPoly; 3],
}

impl CohClass {
    pub fn new(k: u8, h: MultiPoly, e: [MultiPoly; 3]) -> Result<Self, DelPezzoError> {
        if !(1..=3).contains(&k) {
            return Err(DelPezzoError::UnsupportedK(k));
        }
        for p in &e {
            if p.vars()[..] != h.vars()[..] {
                return Err(PolyError::VariableMismatch {
                    left: h.vars().join(","),
                    right: p.vars().join(","),
                }
                .into());
            }
        }
        if e[k as usize..].iter().any(|p| !p.is_zero()) {
            return Err(DelPezzoError::UnsupportedK(k));
        }
        Ok(CohClass { k, h, e })
    }

    pub fn numeric(k: u8, h: Rational, e: [Rational; 3]) -> Result<Self, DelPezzoError> {
        let v = vars(&[]);
        let c = |x: Rational| MultiPoly::constant(&v, x);
        let [e1, e2, e3] = e;
        Self::new(k, c(h), [c(e1), c(e2), c(e3)])
    }

    /// The anticanonical class `3H − ΣEᵢ` over the given variables.
    pub fn c1(k: u8, vars: &Vars) -> Self {
        let e = |i: u8| MultiPoly::int(vars, i64::from(i < k));
        CohClass {
            k,
            h: MultiPoly::int(vars, 3),
            e: [e(0), e(1), e(2)],
        }
    }

    pub fn vars(&self) -> &Vars {
        self.h.vars()
    }

    /// `h·h′ − Σ eᵢ·eᵢ′`.
    pub fn pair(&self, o: &Self) -> Result<MultiPoly, DelPezzoError> {
        if self.k != o.k {
            return Err(DelPezzoError::MismatchedK(self.k, o.k));
        }
        let mut s = self.h.checked_mul(&o.h)?;
        for i in 0..3 {
            s = s.checked_sub(&self.e[i].checked_mul(&o.e[i])?)?;
        }
        Ok(s)
    }

    pub fn square(&self) -> MultiPoly {
        self.pair(self).expect("same k")
    }

    pub fn scale(&self, c: &Rational) -> Self {
        CohClass {
            k: self.k,
            h: self.h.scale(c),
            e: self.e.clone().map(|p| p.scale(c)),
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, DelPezzoError> {
        if self.k != o.k {
            return Err(DelPezzoError::MismatchedK(self.k, o.k));
        }
        Ok(CohClass {
            k: self.k,
            h: self.h.checked_add(&o.h)?,
            e: [
                self.e[0].checked_add(&o.e[0])?,
                self.e[1].checked_add(&o.e[1])?,
                self.e[2].checked_add(&o.e[2])?,
            ],
        })
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<CohClass, DelPezzoError> {
        let ev = |p: &MultiPoly| -> Result<Rational, PolyError> { p.evaluate(point) };
        Self::numeric(
            self.k,
            ev(&self.h)?,
            [ev(&self.e[0])?, ev(&self.e[1])?, ev(&self.e[2])?],
        )
    }

    /// `H ↦ 2H − E₁ − E₂ − E₃`, `Eᵢ ↦ H − Eⱼ − Eₖ`.
    pub fn cremona(&self) -> Result<Self, DelPezzoError> {
        if self.k != 3 {
            return Err(DelPezzoError::NeedsThreePoints(self.k));
        }
        let [e1, e2, e3] = &self.e;
        let h = &self.h;
        let sum = &(e1 + e2) + e3;
        Ok(CohClass {
            k: 3,
            h: &h.scale(&Rational::from_integer(2.into())) - &sum,
            e: [&(h - e2) - e3, &(h - e1) - e3, &(h - e1) - e2],
        })
    }

    /// `perm[i] = j` sends `E_(i+1)` to `E_j` (one-based targets).
    pub fn permute_exceptional(&self, perm: &[usize]) -> Result<Self, DelPezzoError> {
        check_permutation(perm, self.k)?;
        let mut e = self.e.clone();
        for (i, &j) in perm.iter().enumerate() {
            e[j - 1] = self.e[i].clone();
        }
        Ok(CohClass { k: self.k, h: self.h.clone(), e })
    }

    pub fn to_areas(&self) -> AreaVector {
        let [e1, e2, e3] = &self.e;
        let h = &self.h;
        AreaVector([
            e3.clone(),
            &(h - e1) - e3,
            e1.clone(),
            &(h - e1) - e2,
            e2.clone(),
            &(h - e2) - e3,
        ])
    }

    pub fn subspace_membership(&self) -> Result<Membership, DelPezzoError> {
        if self.k != 3 {
            return Err(DelPezzoError::NeedsThreePoints(self.k));
        }
        self.to_areas().membership()
    }
}

impl fmt::Display for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})H", self.h)?;
        for i in 0..self.k as usize {
            write!(f, " - ({})E{}", self.e[i], i + 1)?;
        }
        Ok(())
    }
}

fn check_permutation(perm: &[usize], k: u8) -> Result<(), DelPezzoError> {
    let mut seen = [false; 3];
    let ok = perm.len() == k as usize
        && perm.iter().all(|&j| {
            (1..=k as usize).contains(&j) && !std::mem::replace(&mut seen[j - 1], true)
        });
    if ok {
        Ok(())
    } else {
        Err(DelPezzoError::InvalidPermutation(perm.to_vec(), k))
    }
}

/// Curve areas `(a_E3, a_L13, a_E1, a_L12, a_E2, a_L23)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaVector(pub [MultiPoly; 6]);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Membership {
    pub in_v: bool,
    pub in_w: bool,
}

impl AreaVector {
    pub fn numeric(a: [Rational; 6]) -> Self {
        let v = vars(&[]);
        AreaVector(a.map(|x| MultiPoly::constant(&v, x)))
    }

    /// `(α, β+δ, γ, α+δ, β, γ+δ)`.
    pub fn from_coords(alpha: &MultiPoly, beta: &MultiPoly, gamma: &MultiPoly, delta: &MultiPoly) -> Self {
        AreaVector([
            alpha.clone(),
            beta + delta,
            gamma.clone(),
            alpha + delta,
            beta.clone(),
            gamma + delta,
        ])
    }

    pub fn numeric_coords(c: [Rational; 4]) -> Self {
        let v = vars(&[]);
        let [a, b, g, d] = c.map(|x| MultiPoly::constant(&v, x));
        Self::from_coords(&a, &b, &g, &d)
    }

    /// `(α, β, γ, δ)` with `α = a_E3`, `β = a_E2`, `γ = a_E1`, `δ = a_L12 − a_E3`.
    pub fn coords(&self) -> [MultiPoly; 4] {
        let a = &self.0;
        [a[0].clone(), a[4].clone(), a[2].clone(), &a[3] - &a[0]]
    }

    pub fn vars(&self) -> &Vars {
        self.0[0].vars()
    }

    pub fn e3(&self) -> &MultiPoly {
        &self.0[0]
    }

    pub fn e1(&self) -> &MultiPoly {
        &self.0[2]
    }

    pub fn e2(&self) -> &MultiPoly {
        &self.0[4]
    }

    pub fn l12(&self) -> &MultiPoly {
        &self.0[3]
    }

    /// The class with these areas on the surface with `k` blow-ups.
    pub fn to_class(&self, k: u8) -> Result<CohClass, DelPezzoError> {
        let h = &(self.l12() + self.e1()) + self.e2();
        CohClass::new(k, h, [self.e1().clone(), self.e2().clone(), self.e3().clone()])
    }

    /// The two linear relations every moment hexagon satisfies, as residuals.
    pub fn closure_residuals(&self) -> (MultiPoly, MultiPoly) {
        let a = &self.0;
        (&(&a[1] + &a[0]) - &(&a[3] + &a[4]), &(&a[5] + &a[0]) - &(&a[3] + &a[2]))
    }

    /// On areas the involution swaps each `E_i` with the opposite line.
    pub fn cremona(&self) -> Self {
        let a = &self.0;
        AreaVector([
            a[3].clone(),
            a[4].clone(),
            a[5].clone(),
            a[0].clone(),
            a[1].clone(),
            a[2].clone(),
        ])
    }

    pub fn scale(&self, c: &Rational) -> Self {
        AreaVector(self.0.clone().map(|p| p.scale(c)))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<AreaVector, PolyError> {
        let v = vars(&[]);
        let mut out = Vec::with_capacity(6);
        for p in &self.0 {
            out.push(MultiPoly::constant(&v, p.evaluate(point)?));
        }
        Ok(AreaVector(out.try_into().expect("six areas")))
    }

    pub fn all_positive_at(&self, point: &[Rational]) -> Result<bool, PolyError> {
        for p in &self.0 {
            if p.evaluate(point)? <= Rational::zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn membership(&self) -> Result<Membership, DelPezzoError> {
        let delta = self.l12() - self.e3();
        Ok(Membership {
            in_v: delta.is_zero(),
            in_w: self.e1() == self.e2() && self.e2() == self.e3(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConeChart {
    /// Two blow-ups, coordinates `(β, γ)`.
    K2,
    /// Three blow-ups, region `δ > 0` normalised to `δ = 1`, coordinates `(α, β, γ)`.
    K3U,
}

impl ConeChart {
    pub fn k(self) -> u8 {
        match self {
            ConeChart::K2 => 2,
            ConeChart::K3U => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConeChart::K2 => "k2",
            ConeChart::K3U => "k3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "k2" | "K2" => Some(ConeChart::K2),
            "k3" | "K3" | "k3u" | "K3U" => Some(ConeChart::K3U),
            _ => None,
        }
    }

    pub fn vars(self) -> Vars {
        match self {
            ConeChart::K2 => vars(&["beta", "gamma"]),
            ConeChart::K3U => vars(&["alpha", "beta", "gamma"]),
        }
    }

    pub fn nvars(self) -> usize {
        self.vars().len()
    }

    /// A strictly positive point of the chart.
    pub fn sample_point(self) -> Vec<Rational> {
        vec![Rational::from_integer(1.into()); self.nvars()]
    }

    /// K2: `(0, β+1, γ, 1, β, γ+1)`; K3U: `(α, β+1, γ, α+1, β, γ+1)`.
    pub fn areas(self) -> AreaVector {
        let v = self.vars();
        let var = |n| MultiPoly::var(&v, n).expect("declared");
        let one = MultiPoly::one(&v);
        let alpha = match self {
            ConeChart::K2 => MultiPoly::zero(&v),
            ConeChart::K3U => var("alpha"),
        };
        AreaVector::from_coords(&alpha, &var("beta"), &var("gamma"), &one)
    }

    /// K2: `(1+β+γ)H − γE₁ − βE₂`; K3U: `(1+α+β+γ)H − γE₁ − βE₂ − αE₃`.
    pub fn class(self) -> CohClass {
        self.areas().to_class(self.k()).expect("chart areas are consistent")
    }

    /// Chart coordinates of an area vector with `δ > 0` (K3U) or `a_E3 = 0`,
    /// `a_L12 = 1` after rescaling (K2).
    pub fn coordinates_of(self, areas: &AreaVector) -> Option<Vec<Rational>> {
        let [a, b, g, d] = areas.coords().map(|p| p.constant_value());
        let (a, b, g, d) = (a?, b?, g?, d?);
        if d <= Rational::zero() {
            return None;
        }
        match self {
            ConeChart::K2 if a.is_zero() => Some(vec![b / &d, g / &d]),
            ConeChart::K3U => Some(vec![a / &d, b / &d, g / &d]),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, rat};

    fn num(k: u8, h: i64, e: [i64; 3]) -> CohClass {
        CohClass::numeric(k, rat(h), e.map(rat)).unwrap()
    }

    #[test]
    fn pairing_values() {
        let v = vars(&[]);
        let c1 = CohClass::c1(3, &v);
        assert_eq!(c1.square().constant_value(), Some(rat(6)));
        let k2 = ConeChart::K2.class();
        let c1k2 = CohClass::c1(2, k2.vars());
        assert_eq!(c1k2.pair(&k2).unwrap().to_string(), "2*beta + 2*gamma + 3");
        let k3 = ConeChart::K3U.class();
        assert_eq!(
            k3.square().to_string(),
            "2*alpha*beta + 2*alpha*gamma + 2*beta*gamma + 2*alpha + 2*beta + 2*gamma + 1"
        );
        assert!(matches!(num(2, 1, [0; 3]).pair(&c1), Err(DelPezzoError::MismatchedK(2, 3))));
    }

    #[test]
    fn signature_on_basis() {
        let basis = [num(3, 1, [0, 0, 0]), num(3, 0, [1, 0, 0]), num(3, 0, [0, 1, 0]), num(3, 0, [0, 0, 1])];
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let expect = if i != j { 0 } else if i == 0 { 1 } else { -1 };
                assert_eq!(x.pair(y).unwrap().constant_value().unwrap_or_default(), rat(expect));
            }
        }
    }

    #[test]
    fn cremona_facts() {
        let v = vars(&[]);
        let c1 = CohClass::c1(3, &v);
        assert_eq!(c1.cremona().unwrap(), c1);
        let x = AreaVector::numeric_coords([1, 1, 1, 1].map(rat));
        let y = x.cremona();
        assert_eq!(y.coords().map(|p| p.constant_value().unwrap_or_default()), [2, 2, 2, -1].map(rat));
        let (cx, cy) = (x.to_class(3).unwrap(), y.to_class(3).unwrap());
        assert_eq!(cx.cremona().unwrap(), cy);
        assert_eq!(cx.square().constant_value(), Some(rat(13)));
        assert_eq!(cy.square(), cx.square());
        assert!(matches!(num(2, 3, [1, 1, 0]).cremona(), Err(DelPezzoError::NeedsThreePoints(2))));
    }

    #[test]
    fn membership_flags() {
        let v = vars(&[]);
        let c1 = CohClass::c1(3, &v);
        assert_eq!(c1.subspace_membership().unwrap(), Membership { in_v: true, in_w: true });
        let m = |c: [i64; 4]| AreaVector::numeric_coords(c.map(rat)).membership().unwrap();
        assert_eq!(m([2, 1, 1, 0]), Membership { in_v: true, in_w: false });
        assert_eq!(m([1, 1, 1, 1]), Membership { in_v: false, in_w: true });
    }

    #[test]
    fn permutations() {
        let k2 = ConeChart::K2.class();
        let swapped = k2.permute_exceptional(&[2, 1]).unwrap();
        let a = swapped.to_areas();
        // (β, γ) ↦ (γ, β): E1 now carries β, E2 carries γ
        assert_eq!(a.e1().to_string(), "beta");
        assert_eq!(a.e2().to_string(), "gamma");
        let k3 = ConeChart::K3U.class().permute_exceptional(&[1, 3, 2]).unwrap();
        let c = k3.to_areas().coords();
        assert_eq!([c[0].to_string(), c[1].to_string(), c[2].to_string()], ["beta", "alpha", "gamma"]);
        let v = vars(&[]);
        let c1 = CohClass::c1(3, &v);
        assert_eq!(c1.permute_exceptional(&[2, 3, 1]).unwrap(), c1);
        assert!(c1.permute_exceptional(&[1, 1, 2]).is_err());
        assert!(c1.permute_exceptional(&[1, 2]).is_err());
    }

    #[test]
    fn area_round_trip_and_chart_coords() {
        let a = ConeChart::K3U.areas();
        let (r1, r2) = a.closure_residuals();
        assert!(r1.is_zero() && r2.is_zero());
        assert_eq!(a.to_class(3).unwrap().to_areas(), a);
        let x = AreaVector::numeric_coords([frac(1, 2), rat(2), rat(3), rat(2)]);
        assert_eq!(
            ConeChart::K3U.coordinates_of(&x),
            Some(vec![frac(1, 4), rat(1), frac(3, 2)])
        );
    }
}
