//! Moment polygons of the toric del Pezzo surfaces, in `u = 2πx`, `v = 2πy`.
//!
//! Every polygon uses the six-edge fan below, listed in counter-clockwise
//! boundary order starting from the bottom edge. Edges whose lattice length is
//! identically zero are dropped, so the same builder yields hexagons,
//! pentagons, quadrilaterals and triangles.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{MultiPoly, PolyError, Vars};
use crate::ratfunc::RatFunc;
use crate::scalar::Rational;

/// Primitive edge directions: L13, E1, L12, E2, L23, E3.
pub const FAN: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
pub const EDGE_LABELS: [&str; 6] = ["L13", "E1", "L12", "E2", "L23", "E3"];

#[derive(Debug, Error, PartialEq)]
pub enum PolytopeError {
    #[error("closure violated in the {axis} direction: residual {residual}")]
    Closure { axis: char, residual: String },
    #[error("edge {edge} has negative lattice length {value} at the sample point")]
    NegativeLength { edge: &'static str, value: String },
    #[error("edge {edge} length is not affine in the parameters")]
    NotAffine { edge: &'static str },
    #[error("polygon has non-positive area {0} at the sample point")]
    Degenerate(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoint {
    pub u: MultiPoly,
    pub v: MultiPoly,
}

impl AffinePoint {
    pub fn evaluate(&self, point: &[Rational]) -> Result<(Rational, Rational), PolyError> {
        Ok((self.u.evaluate(point)?, self.v.evaluate(point)?))
    }
}

#[derive(Debug, Clone)]
pub struct ParamPolygon {
    vars: Vars,
    vertices: Vec<AffinePoint>,
    edge_directions: Vec<(i64, i64)>,
    edge_lattice_lengths: Vec<MultiPoly>,
    edge_labels: Vec<&'static str>,
}

/// Builds the polygon for areas `(a_E3, a_L13, a_E1, a_L12, a_E2, a_L23)`.
///
/// `sample` is a parameter point at which lengths must be nonnegative and
/// the area positive.
pub fn build_polygon(areas: &[MultiPoly; 6], sample: &[Rational]) -> Result<ParamPolygon, PolytopeError> {
    let vars = areas[0].vars().clone();
    for a in &areas[1..] {
        if a.vars()[..] != vars[..] {
            return Err(PolyError::VariableMismatch {
                left: vars.join(","),
                right: a.vars().join(","),
            }
            .into());
        }
    }
    // boundary order L13, E1, L12, E2, L23, E3
    let lengths: Vec<MultiPoly> = (0..6).map(|i| areas[(i + 1) % 6].clone()).collect();
    for (i, l) in lengths.iter().enumerate() {
        if l.total_degree() > 1 {
            return Err(PolytopeError::NotAffine { edge: EDGE_LABELS[i] });
        }
    }
    let mut su = MultiPoly::zero(&vars);
    let mut sv = MultiPoly::zero(&vars);
    for (l, &(du, dv)) in lengths.iter().zip(FAN.iter()) {
        su = &su + &l.scale(&Rational::from_integer(du.into()));
        sv = &sv + &l.scale(&Rational::from_integer(dv.into()));
    }
    if !su.is_zero() {
        return Err(PolytopeError::Closure { axis: 'u', residual: su.to_string() });
    }
    if !sv.is_zero() {
        return Err(PolytopeError::Closure { axis: 'v', residual: sv.to_string() });
    }
    for (i, l) in lengths.iter().enumerate() {
        let x = l.evaluate(sample)?;
        if x.is_negative() {
            return Err(PolytopeError::NegativeLength {
                edge: EDGE_LABELS[i],
                value: x.to_string(),
            });
        }
    }

    let mut cur = AffinePoint {
        u: areas[0].clone(),
        v: MultiPoly::zero(&vars),
    };
    let mut poly = ParamPolygon {
        vars: vars.clone(),
        vertices: Vec::new(),
        edge_directions: Vec::new(),
        edge_lattice_lengths: Vec::new(),
        edge_labels: Vec::new(),
    };
    for (i, l) in lengths.into_iter().enumerate() {
        if l.is_zero() {
            continue;
        }
        let (du, dv) = FAN[i];
        let next = AffinePoint {
            u: &cur.u + &l.scale(&Rational::from_integer(du.into())),
            v: &cur.v + &l.scale(&Rational::from_integer(dv.into())),
        };
        poly.vertices.push(cur);
        poly.edge_directions.push(FAN[i]);
        poly.edge_lattice_lengths.push(l);
        poly.edge_labels.push(EDGE_LABELS[i]);
        cur = next;
    }
    let area = poly.integrate_monomial(0, 0).evaluate(sample)?;
    if !area.is_positive() {
        return Err(PolytopeError::Degenerate(area.to_string()));
    }
    Ok(poly)
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

type STPoly = BTreeMap<(u32, u32), MultiPoly>;

/// `(c0 + c1·s + c2·t)^a` as a map `(deg_s, deg_t) → coefficient`.
fn linear_power(c: [&MultiPoly; 3], a: u32) -> STPoly {
    let mut out = STPoly::new();
    for j in 0..=a {
        for k in 0..=(a - j) {
            let i = a - j - k;
            let m = factorial(a) / (factorial(i) * factorial(j) * factorial(k));
            let coef = &(&c[0].pow(i) * &c[1].pow(j)) * &c[2].pow(k);
            let coef = coef.scale(&Rational::from_integer(m));
            if !coef.is_zero() {
                out.insert((j, k), coef);
            }
        }
    }
    out
}

fn st_mul(x: &STPoly, y: &STPoly, vars: &Vars) -> STPoly {
    let mut out = STPoly::new();
    for (&(a, b), p) in x {
        for (&(c, d), q) in y {
            let e = out.entry((a + c, b + d)).or_insert_with(|| MultiPoly::zero(vars));
            *e = &*e + &(p * q);
        }
    }
    out
}

impl ParamPolygon {
    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn vertices(&self) -> &[AffinePoint] {
        &self.vertices
    }

    pub fn edge_directions(&self) -> &[(i64, i64)] {
        &self.edge_directions
    }

    pub fn edge_lattice_lengths(&self) -> &[MultiPoly] {
        &self.edge_lattice_lengths
    }

    pub fn edge_labels(&self) -> &[&'static str] {
        &self.edge_labels
    }

    pub fn vertices_at(&self, point: &[Rational]) -> Result<Vec<(Rational, Rational)>, PolyError> {
        self.vertices.iter().map(|p| p.evaluate(point)).collect()
    }

    /// Whether every lattice length has only nonnegative coefficients.
    pub fn lengths_coefficientwise_nonneg(&self) -> bool {
        self.edge_lattice_lengths
            .iter()
            .all(|l| l.coefficients_all_nonneg().all_nonneg)
    }

    /// `Σ length·direction`, which is `(0, 0)` for every built polygon.
    pub fn closure_residual(&self) -> (MultiPoly, MultiPoly) {
        let mut su = MultiPoly::zero(&self.vars);
        let mut sv = MultiPoly::zero(&self.vars);
        for (l, &(du, dv)) in self.edge_lattice_lengths.iter().zip(&self.edge_directions) {
            su = &su + &l.scale(&Rational::from_integer(du.into()));
            sv = &sv + &l.scale(&Rational::from_integer(dv.into()));
        }
        (su, sv)
    }

    /// `∫∫ u^a v^b du dv` by fan triangulation from vertex 0.
    pub fn integrate_monomial(&self, a: u32, b: u32) -> MultiPoly {
        let vars = &self.vars;
        let mut total = MultiPoly::zero(vars);
        let p0 = &self.vertices[0];
        for w in self.vertices[1..].windows(2) {
            let e1u = &w[0].u - &p0.u;
            let e1v = &w[0].v - &p0.v;
            let e2u = &w[1].u - &p0.u;
            let e2v = &w[1].v - &p0.v;
            let jac = &(&e1u * &e2v) - &(&e1v * &e2u);
            if jac.is_zero() {
                continue;
            }
            let pu = linear_power([&p0.u, &e1u, &e2u], a);
            let pv = linear_power([&p0.v, &e1v, &e2v], b);
            let mut inner = MultiPoly::zero(vars);
            for ((i, j), c) in st_mul(&pu, &pv, vars) {
                // ∫_simplex s^i t^j = i! j! / (i + j + 2)!
                let w = Rational::new(factorial(i) * factorial(j), factorial(i + j + 2));
                inner = &inner + &c.scale(&w);
            }
            total = &total + &(&inner * &jac);
        }
        total
    }

    /// `∮ u^a v^b dσ` in the lattice measure.
    pub fn boundary_integral(&self, a: u32, b: u32) -> MultiPoly {
        let vars = &self.vars;
        let zero = MultiPoly::zero(vars);
        let mut total = MultiPoly::zero(vars);
        for (i, l) in self.edge_lattice_lengths.iter().enumerate() {
            let s = &self.vertices[i];
            let (du, dv) = self.edge_directions[i];
            let du = MultiPoly::int(vars, du);
            let dv = MultiPoly::int(vars, dv);
            let pu = linear_power([&s.u, &du, &zero], a);
            let pv = linear_power([&s.v, &dv, &zero], b);
            for ((n, _), c) in st_mul(&pu, &pv, vars) {
                let w = Rational::new(One::one(), BigInt::from(n + 1));
                total = &total + &(&c * &l.pow(n + 1)).scale(&w);
            }
        }
        total
    }

    pub fn area(&self) -> MultiPoly {
        self.integrate_monomial(0, 0)
    }

    pub fn lattice_perimeter(&self) -> MultiPoly {
        self.edge_lattice_lengths
            .iter()
            .fold(MultiPoly::zero(&self.vars), |acc, l| &acc + l)
    }

    pub fn central_second_moments(&self) -> Result<Moments, PolyError> {
        let area = self.area();
        if area.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        let m = |a, b| self.integrate_monomial(a, b);
        let (iu, iv) = (m(1, 0), m(0, 1));
        let (iuu, ivv, iuv) = (m(2, 0), m(0, 2), m(1, 1));
        let central = |second: &MultiPoly, x: &MultiPoly, y: &MultiPoly| {
            // ∫xy − (∫x)(∫y)/Area
            RatFunc::new(&(second * &area) - &(x * y), area.clone())
        };
        Ok(Moments {
            i_uu: central(&iuu, &iu, &iu)?,
            i_vv: central(&ivv, &iv, &iv)?,
            i_uv: central(&iuv, &iu, &iv)?,
            barycenter: (
                RatFunc::new(iu.clone(), area.clone())?,
                RatFunc::new(iv.clone(), area.clone())?,
            ),
            area,
            int_u: iu,
            int_v: iv,
        })
    }

    /// Vertex list as text, e.g. `(0, 0), (beta + 1, 0), ...`.
    pub fn render_vertices(&self) -> String {
        self.vertices
            .iter()
            .map(|p| format!("({}, {})", p.u, p.v))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

#[derive(Debug, Clone)]
pub struct Moments {
    pub area: MultiPoly,
    pub int_u: MultiPoly,
    pub int_v: MultiPoly,
    pub i_uu: RatFunc,
    pub i_vv: RatFunc,
    pub i_uv: RatFunc,
    pub barycenter: (RatFunc, RatFunc),
}

/// Exact polygon integral from numeric vertices via Green's theorem:
/// `∫∫ u^a v^b = ∮ u^(a+1) v^b / (a+1) dv`, each edge expanded binomially in
/// its parameter. Uses neither the fan nor a triangulation.
pub fn green_integral(vertices: &[(Rational, Rational)], a: u32, b: u32) -> Rational {
    let n = vertices.len();
    let mut total = Rational::zero();
    for i in 0..n {
        let (u0, v0) = &vertices[i];
        let (u1, v1) = &vertices[(i + 1) % n];
        let du = u1 - u0;
        let dv = v1 - v0;
        // ∫_0^1 (u0 + τ du)^(a+1) (v0 + τ dv)^b dv/dτ dτ
        let mut acc = Rational::zero();
        for j in 0..=(a + 1) {
            for k in 0..=b {
                let c = Rational::from_integer(binomial(a + 1, j) * binomial(b, k))
                    * num_traits::pow(u0.clone(), (a + 1 - j) as usize)
                    * num_traits::pow(du.clone(), j as usize)
                    * num_traits::pow(v0.clone(), (b - k) as usize)
                    * num_traits::pow(dv.clone(), k as usize);
                acc += c / Rational::from_integer(BigInt::from(j + k + 1));
            }
        }
        total += acc * dv / Rational::from_integer(BigInt::from(a + 1));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;
    use crate::scalar::{frac, rat};

    fn k2() -> ParamPolygon {
        let v = vars(&["beta", "gamma"]);
        let b = MultiPoly::var(&v, "beta").unwrap();
        let g = MultiPoly::var(&v, "gamma").unwrap();
        let one = MultiPoly::one(&v);
        let areas = [MultiPoly::zero(&v), &b + &one, g.clone(), one.clone(), b, &g + &one];
        build_polygon(&areas, &[rat(1), rat(1)]).unwrap()
    }

    fn constant_areas(a: [i64; 6]) -> [MultiPoly; 6] {
        let v = vars(&[]);
        a.map(|x| MultiPoly::int(&v, x))
    }

    #[test]
    fn pentagon_vertices() {
        let p = k2();
        assert_eq!(
            p.render_vertices(),
            "(0, 0), (beta + 1, 0), (beta + 1, gamma), (beta, gamma + 1), (0, gamma + 1)"
        );
        assert_eq!(p.edge_labels(), ["L13", "E1", "L12", "E2", "L23"]);
    }

    #[test]
    fn pentagon_spot_integrals() {
        let p = k2();
        let at = |q: MultiPoly| q.evaluate(&[rat(1), rat(1)]).unwrap();
        assert_eq!(at(p.integrate_monomial(0, 0)), frac(7, 2));
        assert_eq!(at(p.integrate_monomial(1, 0)), frac(19, 6));
        assert_eq!(at(p.integrate_monomial(2, 0)), frac(47, 12));
        assert_eq!(at(p.boundary_integral(0, 0)), rat(7));
        assert_eq!(at(p.boundary_integral(1, 0)), rat(6));
        let m = p.central_second_moments().unwrap();
        assert_eq!(m.i_uu.evaluate(&[rat(1), rat(1)]).unwrap(), frac(265, 252));
        assert_eq!(m.barycenter.0.evaluate(&[rat(1), rat(1)]).unwrap(), frac(19, 21));
    }

    #[test]
    fn regular_hexagon() {
        let p = build_polygon(&constant_areas([1; 6]), &[]).unwrap();
        assert_eq!(p.render_vertices(), "(1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1)");
        assert_eq!(p.boundary_integral(0, 0).constant_value(), Some(rat(6)));
        assert_eq!(p.area().constant_value(), Some(rat(3)));
    }

    #[test]
    fn unit_square_moments() {
        let p = build_polygon(&constant_areas([0, 1, 1, 0, 1, 1]), &[]).unwrap();
        let m = p.central_second_moments().unwrap();
        assert_eq!(m.i_uu.constant_value(), Some(frac(1, 12)));
        assert_eq!(m.i_uv.constant_value(), Some(rat(0)));
    }

    #[test]
    fn rejects_bad_input() {
        let err = build_polygon(&constant_areas([1, 1, 1, 1, 2, 1]), &[]).unwrap_err();
        assert!(matches!(err, PolytopeError::Closure { axis: 'u', .. }));
        let err = build_polygon(&constant_areas([2, -1, 2, 1, 0, 1]), &[]).unwrap_err();
        assert!(matches!(err, PolytopeError::NegativeLength { edge: "L13", .. }));
    }

    #[test]
    fn green_oracle_agrees_on_pentagon() {
        let p = k2();
        let pt = [frac(3, 7), frac(5, 2)];
        let verts = p.vertices_at(&pt).unwrap();
        for (a, b) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 2)] {
            assert_eq!(
                p.integrate_monomial(a, b).evaluate(&pt).unwrap(),
                green_integral(&verts, a, b),
                "u^{a} v^{b}"
            );
        }
    }
}
