//! Oracles shared by the property and acceptance suites.
#![allow(dead_code)]

use dpcert::sampling::SampleRng;
use dpcert::scalar::{Rational, frac};
use dpcert::univariate::UPoly;
use num_traits::{Signed, Zero};

/// Polygon integral by Green's theorem in floating point, with Gauss–Legendre
/// quadrature on each edge (exact for the polynomial degrees used here).
pub fn green_f64(vertices: &[(f64, f64)], a: i32, b: i32) -> f64 {
    let nodes = [
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.0, 0.568_888_888_888_888_9),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let n = vertices.len();
    let mut total = 0.0;
    for i in 0..n {
        let (u0, v0) = vertices[i];
        let (u1, v1) = vertices[(i + 1) % n];
        for (x, w) in nodes {
            let s = 0.5 * (x + 1.0);
            let u = u0 + s * (u1 - u0);
            let v = v0 + s * (v1 - v0);
            total += 0.5 * w * u.powi(a + 1) * v.powi(b) / f64::from(a + 1) * (v1 - v0);
        }
    }
    total
}

/// Roots at `k/10` for distinct `k`, times optional `x² + c` factors with no
/// real roots; integer coefficients, degree ≤ 10.
pub fn constructed(rng: &mut SampleRng) -> (UPoly, Vec<Rational>) {
    let nroots = 1 + rng.below(6) as usize;
    let mut roots: Vec<i64> = Vec::new();
    while roots.len() < nroots {
        let k = rng.below(81) as i64 - 40;
        if !roots.contains(&k) {
            roots.push(k);
        }
    }
    let mut p = UPoly::from_i64(&[1]);
    for &k in &roots {
        p = p.mul(&UPoly::from_i64(&[-k, 10]));
    }
    let quads = rng.below(3) as usize;
    for _ in 0..quads.min((10 - nroots) / 2) {
        let c = 1 + rng.below(9) as i64;
        p = p.mul(&UPoly::from_i64(&[c, 0, 1]));
    }
    (p, roots.into_iter().map(|k| frac(k, 10)).collect())
}

/// Sign changes on a grid of step 1/80 offset so no grid point is a root.
pub fn bisection_count(p: &UPoly, lo: &Rational, hi: &Rational) -> usize {
    let step = frac(1, 80);
    let mut x = lo + frac(1, 160);
    let mut prev = p.eval(lo).signum();
    let mut count = 0;
    while x < *hi {
        let s = p.eval(&x).signum();
        if !s.is_zero() && !prev.is_zero() && s != prev {
            count += 1;
        }
        if !s.is_zero() {
            prev = s;
        }
        x += &step;
    }
    let s = p.eval(hi).signum();
    if !s.is_zero() && s != prev {
        count += 1;
    }
    count
}
