//! The scale-invariant functional
//! `𝒜(Ω) = (c₁·Ω)²/Ω² + ‖𝔉(Ω)‖²/(32π²)` and its ingredients.
//!
//! Everything is computed from the moment polygon of the class. π enters
//! only through [`PiRatFunc`] for the second moments `A, B, C` and for `s₀`;
//! the exported functional values are plain rational functions.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::delpezzo::{AreaVector, CohClass, ConeChart, DelPezzoError};
use crate::parser::parse_expression;
use crate::poly::{MultiPoly, PolyError, Vars};
use crate::polytope::{ParamPolygon, PolytopeError, build_polygon};
use crate::ratfunc::RatFunc;
use crate::scalar::{Rational, frac, rat};
use crate::univariate::UPoly;

#[derive(Debug, Error, PartialEq)]
pub enum FunctionalError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    DelPezzo(#[from] DelPezzoError),
    #[error("π powers differ: {0} and {1}")]
    PiPowerMismatch(i32, i32),
    #[error("value still carries π^{0} where a rational function was expected")]
    NotRational(i32),
    #[error("degenerate moment matrix (AB − C² = 0)")]
    DegenerateMoments,
    #[error("Ω² vanishes")]
    NullClass,
    #[error("perimeter {perimeter} disagrees with c₁·Ω = {pairing}")]
    PerimeterMismatch { perimeter: String, pairing: String },
}

/// `value · π^pi_power`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiRatFunc {
    pub value: RatFunc,
    pub pi_power: i32,
}

impl PiRatFunc {
    pub fn new(value: RatFunc, pi_power: i32) -> Self {
        let pi_power = if value.is_zero() { 0 } else { pi_power };
        PiRatFunc { value, pi_power }
    }

    pub fn into_rational(self) -> Result<RatFunc, FunctionalError> {
        if self.pi_power == 0 {
            Ok(self.value)
        } else {
            Err(FunctionalError::NotRational(self.pi_power))
        }
    }
}

/// Closed forms for `𝔉₁, 𝔉₂` with fractions cleared by 6:
/// `𝔉ᵢ = numᵢ / (6V)`.
pub fn futaki_closed_form(chart: ConeChart) -> Result<(RatFunc, RatFunc), FunctionalError> {
    let vars = chart.vars();
    let (f1, f2) = match chart {
        ConeChart::K2 => (
            "2 (beta - 2 gamma)(1 + 3 gamma + 3 gamma^2) + 6 gamma (gamma - beta)(2 + beta + 2 gamma)",
            "2 (gamma - 2 beta)(1 + 3 beta + 3 beta^2) + 6 beta (beta - gamma)(2 + gamma + 2 beta)",
        ),
        ConeChart::K3U => (
            "2 (alpha + beta - 2 gamma)(1 + 3 gamma + 3 gamma^2)
             + 6 (gamma - alpha)(gamma - beta)(2 + alpha + beta + 2 gamma)",
            "2 (alpha + gamma - 2 beta)(1 + 3 beta + 3 beta^2)
             + 6 (beta - alpha)(beta - gamma)(2 + alpha + gamma + 2 beta)",
        ),
    };
    let parse = |s| parse_expression(s, &vars).expect("closed form is well formed");
    let six_v = chart.class().square().scale(&rat(3));
    Ok((
        RatFunc::new(parse(f1), six_v.clone())?,
        RatFunc::new(parse(f2), six_v)?,
    ))
}

/// `𝔉ᵢ = 2[∮ wᵢ dσ − (c₁·Ω)/V · ∫ wᵢ]` with `w = (u, v)`.
pub fn futaki_boundary(polygon: &ParamPolygon) -> Result<(RatFunc, RatFunc), FunctionalError> {
    let area = polygon.area();
    let per = polygon.lattice_perimeter();
    let two = rat(2);
    let comp = |a: u32, b: u32| -> Result<RatFunc, FunctionalError> {
        let num = &(&polygon.boundary_integral(a, b) * &area) - &(&per * &polygon.integrate_monomial(a, b));
        Ok(RatFunc::new(num.scale(&two), area.clone())?)
    };
    Ok((comp(1, 0)?, comp(0, 1)?))
}

/// `A, B, C` as `π^-2` multiples of the central moments over `4`.
pub fn moment_coefficients(polygon: &ParamPolygon) -> Result<[PiRatFunc; 3], FunctionalError> {
    let m = polygon.central_second_moments()?;
    let q = frac(1, 4);
    Ok([m.i_uu, m.i_vv, m.i_uv].map(|r| PiRatFunc::new(r.scale(&q), -2)))
}

/// Rewrites quotients with proportional denominators over one denominator.
fn over_common_denominator(fs: &[&RatFunc]) -> Option<(Vec<MultiPoly>, MultiPoly)> {
    let d = fs[0].denominator().clone();
    let (lm, lc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
    let mut nums = Vec::with_capacity(fs.len());
    for f in fs {
        let (m, c) = f.denominator().leading_term()?;
        if *m != lm {
            return None;
        }
        let k = &lc / c;
        if f.denominator().scale(&k) != d {
            return None;
        }
        nums.push(f.numerator().scale(&k));
    }
    Some((nums, d))
}

/// `‖𝔉‖² = (B𝔉₁² − 2C𝔉₁𝔉₂ + A𝔉₂²)/(AB − C²)`.
pub fn futaki_norm_sq(
    f1: &RatFunc,
    f2: &RatFunc,
    a: &PiRatFunc,
    b: &PiRatFunc,
    c: &PiRatFunc,
) -> Result<PiRatFunc, FunctionalError> {
    for x in [b, c] {
        if x.pi_power != a.pi_power && !x.value.is_zero() {
            return Err(FunctionalError::PiPowerMismatch(a.pi_power, x.pi_power));
        }
    }
    let pi_power = -a.pi_power;
    let (Some((m, dm)), Some((f, df))) = (
        over_common_denominator(&[&a.value, &b.value, &c.value]),
        over_common_denominator(&[f1, f2]),
    ) else {
        // generic path
        let two = rat(2);
        let num = b
            .value
            .checked_mul(&f1.pow(2)?)?
            .checked_sub(&c.value.checked_mul(&f1.checked_mul(f2)?)?.scale(&two))?
            .checked_add(&a.value.checked_mul(&f2.pow(2)?)?)?;
        let den = a.value.checked_mul(&b.value)?.checked_sub(&c.value.pow(2)?)?;
        if den.is_zero() {
            return Err(FunctionalError::DegenerateMoments);
        }
        return Ok(PiRatFunc::new(num.checked_div(&den)?, pi_power));
    };
    let (ma, mb, mc) = (&m[0], &m[1], &m[2]);
    let (g1, g2) = (&f[0], &f[1]);
    let s = &(&(mb * &g1.pow(2)) - &(mc * &(g1 * g2)).scale(&rat(2))) + &(ma * &g2.pow(2));
    let delta = &(ma * mb) - &mc.pow(2);
    if delta.is_zero() {
        return Err(FunctionalError::DegenerateMoments);
    }
    // (S / (dm·df²)) / (Δ / dm²) = S·dm / (Δ·df²)
    let r = RatFunc::new(&s * &dm, &delta * &df.pow(2))?.cancel_factor(&df)?;
    Ok(PiRatFunc::new(r, pi_power))
}

/// Every ingredient of the functional for one family of classes.
#[derive(Debug, Clone)]
pub struct FunctionalBundle {
    pub k: u8,
    pub vars: Vars,
    pub areas: AreaVector,
    pub polygon: ParamPolygon,
    pub class: CohClass,
    /// Volume `V = Ω²/2`, the polygon area in `u, v` coordinates.
    pub volume: MultiPoly,
    pub omega_sq: MultiPoly,
    pub c1_dot_omega: MultiPoly,
    pub f1: RatFunc,
    pub f2: RatFunc,
    pub a: PiRatFunc,
    pub b: PiRatFunc,
    pub c: PiRatFunc,
    pub first_term: RatFunc,
    pub futaki_norm_sq_over_32pi2: RatFunc,
    pub cal_a: RatFunc,
}

impl FunctionalBundle {
    pub fn for_chart(chart: ConeChart) -> Result<Self, FunctionalError> {
        Self::from_areas(chart.k(), &chart.areas(), &chart.sample_point())
    }

    /// Numeric bundle for a concrete area vector.
    pub fn at_areas(k: u8, areas: &AreaVector) -> Result<Self, FunctionalError> {
        Self::from_areas(k, areas, &[])
    }

    pub fn from_areas(k: u8, areas: &AreaVector, sample: &[Rational]) -> Result<Self, FunctionalError> {
        let polygon = build_polygon(&areas.0, sample)?;
        let class = areas.to_class(k)?;
        let vars = areas.vars().clone();
        let omega_sq = class.square();
        if omega_sq.is_zero() {
            return Err(FunctionalError::NullClass);
        }
        let c1_dot_omega = CohClass::c1(k, &vars).pair(&class)?;
        let perimeter = polygon.lattice_perimeter();
        if perimeter != c1_dot_omega {
            return Err(FunctionalError::PerimeterMismatch {
                perimeter: perimeter.to_string(),
                pairing: c1_dot_omega.to_string(),
            });
        }
        let volume = polygon.area();
        let (f1, f2) = futaki_boundary(&polygon)?;
        let [a, b, c] = moment_coefficients(&polygon)?;
        let norm = futaki_norm_sq(&f1, &f2, &a, &b, &c)?;
        let thirty_two_pi_sq = PiRatFunc::new(RatFunc::constant(&vars, rat(32)), 2);
        let second = PiRatFunc::new(
            norm.value.scale(&(Rational::one() / rat(32))),
            norm.pi_power - thirty_two_pi_sq.pi_power,
        )
        .into_rational()?;
        let first_term = RatFunc::new(c1_dot_omega.pow(2), omega_sq.clone())?;
        let cal_a = assemble(&first_term, &second, &omega_sq)?;
        Ok(FunctionalBundle {
            k,
            vars,
            areas: areas.clone(),
            polygon,
            class,
            volume,
            omega_sq,
            c1_dot_omega,
            f1,
            f2,
            a,
            b,
            c,
            first_term,
            futaki_norm_sq_over_32pi2: second,
            cal_a,
        })
    }

    /// `s₀ = 4π(c₁·Ω)/V` as a `π¹` multiple.
    pub fn s0(&self) -> Result<PiRatFunc, FunctionalError> {
        Ok(PiRatFunc::new(
            RatFunc::new(self.c1_dot_omega.scale(&rat(4)), self.volume.clone())?,
            1,
        ))
    }
}

/// Sums the two terms and cancels the known factor `Ω²` that both carry.
fn assemble(first: &RatFunc, second: &RatFunc, omega_sq: &MultiPoly) -> Result<RatFunc, FunctionalError> {
    Ok(first.checked_add(second)?.cancel_factor(omega_sq)?)
}

pub fn assemble_cal_a(chart: ConeChart) -> Result<RatFunc, FunctionalError> {
    Ok(FunctionalBundle::for_chart(chart)?.cal_a)
}

/// `𝒜` of a concrete area vector, computed from its own polygon.
pub fn cal_a_at_areas(k: u8, areas: &AreaVector) -> Result<Rational, FunctionalError> {
    let b = FunctionalBundle::at_areas(k, areas)?;
    Ok(b.cal_a.constant_value().expect("numeric bundle"))
}

/// `F(β) = 𝒜(β, β)` in lowest terms with `den(0) = 1`, and the numerators
/// `P`, `Q` of `F′ = 12P/den²`, `F″ = 12Q/den³`.
#[derive(Debug, Clone)]
pub struct DiagonalRestriction {
    pub f: RatFunc,
    pub numerator: UPoly,
    pub denominator: UPoly,
    pub p: UPoly,
    pub q: UPoly,
    pub p_poly: MultiPoly,
    pub q_poly: MultiPoly,
}

pub fn restrict_diagonal(cal_a_k2: &RatFunc) -> Result<DiagonalRestriction, FunctionalError> {
    let v = crate::poly::vars(&["beta"]);
    let beta = MultiPoly::var(&v, "beta")?;
    let f = cal_a_k2.substitute(&[beta.clone(), beta], &v)?;
    let n = UPoly::new(f.numerator().to_univariate().expect("one variable"));
    let d = UPoly::new(f.denominator().to_univariate().expect("one variable"));
    let g = n.gcd(&d);
    let (mut n, mut d) = (n.div_rem(&g).0, d.div_rem(&g).0);
    let d0 = d.coeffs().first().cloned().unwrap_or_else(Rational::zero);
    if !d0.is_zero() {
        let inv = Rational::one() / d0;
        n = n.scale(&inv);
        d = d.scale(&inv);
    }
    let twelfth = frac(1, 12);
    let (n1, d1) = (n.derivative(), d.derivative());
    let p = n1.mul(&d).sub(&n.mul(&d1)).scale(&twelfth);
    // F″ = (P′·D − 2·P·D′)·12 / D³
    let q = p.derivative().mul(&d).sub(&p.mul(&d1).scale(&rat(2)));
    let up = |x: &UPoly| MultiPoly::from_univariate(&v, x.coeffs());
    Ok(DiagonalRestriction {
        f: RatFunc::new(up(&n), up(&d))?,
        p_poly: up(&p),
        q_poly: up(&q),
        numerator: n,
        denominator: d,
        p,
        q,
    })
}

/// `d/dt|₀ 𝒜(Ω + t·c₁)` using `𝒜 = (c₁·Ω)²/Ω²`, which holds where the Futaki
/// term vanishes: `2(c₁·Ω)/(Ω²)² · [Ω²·c₁² − (c₁·Ω)²]`.
pub fn first_variation_along_c1(omega: &CohClass) -> Result<Rational, FunctionalError> {
    let num = |p: MultiPoly| p.constant_value().unwrap_or_else(Rational::zero);
    let c1 = CohClass::c1(omega.k, omega.vars());
    let w = num(omega.square());
    if w.is_zero() {
        return Err(FunctionalError::NullClass);
    }
    let a = num(c1.pair(omega)?);
    let c = num(c1.square());
    Ok(rat(2) * &a / (&w * &w) * (&w * c - &a * &a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_spot_values() {
        let b = FunctionalBundle::for_chart(ConeChart::K2).unwrap();
        let p = [rat(1), rat(1)];
        assert_eq!(b.f1.evaluate(&p).unwrap(), frac(-2, 3));
        assert_eq!(b.f2.evaluate(&p).unwrap(), frac(-2, 3));
        assert_eq!(b.a.value.evaluate(&p).unwrap(), frac(265, 1008));
        assert_eq!(b.c.value.evaluate(&p).unwrap(), frac(-121, 2016));
        assert_eq!(b.futaki_norm_sq_over_32pi2.evaluate(&p).unwrap(), frac(56, 409));
        assert_eq!(b.cal_a.evaluate(&p).unwrap(), frac(2919, 409));
        let q = [rat(1), rat(2)];
        assert_eq!(b.f1.evaluate(&q).unwrap(), frac(-10, 11));
        assert_eq!(b.f2.evaluate(&q).unwrap(), frac(-12, 11));
    }

    #[test]
    fn closed_forms_agree_k2() {
        let b = FunctionalBundle::for_chart(ConeChart::K2).unwrap();
        let (c1, c2) = futaki_closed_form(ConeChart::K2).unwrap();
        assert_eq!(b.f1, c1);
        assert_eq!(b.f2, c2);
    }

    #[test]
    fn anticanonical_hexagon() {
        let areas = AreaVector::numeric([rat(1), rat(1), rat(1), rat(1), rat(1), rat(1)]);
        let b = FunctionalBundle::at_areas(3, &areas).unwrap();
        assert!(b.f1.is_zero() && b.f2.is_zero());
        assert_eq!(b.cal_a.constant_value(), Some(rat(6)));
    }

    #[test]
    fn diagonal_restriction() {
        let cal_a = assemble_cal_a(ConeChart::K2).unwrap();
        let d = restrict_diagonal(&cal_a).unwrap();
        assert_eq!(d.f.evaluate(&[rat(1)]).unwrap(), frac(2919, 409));
        assert_eq!(d.p.eval(&rat(0)), rat(-1));
        assert_eq!(d.p.eval(&rat(1)), rat(-288));
        assert_eq!(d.q.eval(&rat(0)), rat(9));
        assert_eq!(d.numerator, UPoly::from_i64(&[9, 96, 396, 840, 954, 528, 96]));
    }

    #[test]
    fn first_variation_values() {
        let v = crate::poly::vars(&[]);
        let c1 = CohClass::c1(3, &v);
        assert_eq!(first_variation_along_c1(&c1).unwrap(), rat(0));
        assert_eq!(first_variation_along_c1(&c1.scale(&rat(2))).unwrap(), rat(0));
        let x = AreaVector::numeric_coords([rat(2), rat(1), rat(1), rat(0)]).to_class(3).unwrap();
        assert_eq!(first_variation_along_c1(&x).unwrap(), frac(-16, 25));
    }
}
