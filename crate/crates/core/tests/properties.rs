//! Randomised invariants of the symbolic layer, the polygon integrator and
//! the root isolator, each against an independent oracle.

use dpcert::certify::sturm::{Bound, count_in, sturm_isolate};
use dpcert::delpezzo::ConeChart;
use dpcert::parser::parse_expression;
use dpcert::poly::{Monomial, MultiPoly, vars};
use dpcert::polytope::green_integral;
use dpcert::scalar::{Rational, frac, rat};
use dpcert::univariate::UPoly;
use dpcert::RatFunc;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

mod common;
use common::{bisection_count, constructed, green_f64};

fn poly_strategy(nvars: usize, max_terms: usize, max_deg: u32) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_deg, nvars), -50i64..=50),
        0..=max_terms,
    )
}

fn build(v: &dpcert::Vars, terms: &[(Vec<u32>, i64)]) -> MultiPoly {
    MultiPoly::from_terms(v, terms.iter().map(|(e, c)| (Monomial::from_exponents(e), rat(*c))))
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=1000, 1i64..=1000).prop_map(|(p, q)| frac(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn parser_round_trips_rendered_polynomials(terms in poly_strategy(3, 8, 5)) {
        let v = vars(&["alpha", "beta", "gamma"]);
        let p = build(&v, &terms);
        let text = p.to_string();
        let back = parse_expression(&text, &v).unwrap();
        prop_assert_eq!(back, p, "text was {}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn canonical_form_is_idempotent_and_scale_free(
        n in poly_strategy(2, 4, 3),
        d in poly_strategy(2, 4, 3),
        k in (1i64..=30, 1i64..=30),
    ) {
        let v = vars(&["beta", "gamma"]);
        let (n, d) = (build(&v, &n), build(&v, &d));
        prop_assume!(!d.is_zero());
        let f = RatFunc::new(n.clone(), d.clone()).unwrap();
        let again = RatFunc::new(f.numerator().clone(), f.denominator().clone()).unwrap();
        prop_assert_eq!(again.numerator(), f.numerator());
        prop_assert_eq!(again.denominator(), f.denominator());
        let s = frac(k.0, k.1);
        let scaled = RatFunc::new(n.scale(&s), d.scale(&s)).unwrap();
        prop_assert_eq!(scaled.numerator(), f.numerator());
        prop_assert_eq!(scaled.denominator(), f.denominator());
    }

    #[test]
    fn equality_is_cross_multiplication(
        n in poly_strategy(2, 3, 2),
        d in poly_strategy(2, 3, 2),
        m in poly_strategy(2, 2, 2),
    ) {
        let v = vars(&["beta", "gamma"]);
        let (n, d, m) = (build(&v, &n), build(&v, &d), build(&v, &m));
        prop_assume!(!d.is_zero() && !m.is_zero());
        // a common polynomial factor is invisible to equality even though
        // canonical forms differ (no gcd is taken)
        let f = RatFunc::new(n.clone(), d.clone()).unwrap();
        let g = RatFunc::new(&n * &m, &d * &m).unwrap();
        prop_assert!(f == g);
        prop_assert!(f.equivalent(&g).unwrap());
        let h = f.checked_add(&RatFunc::constant(&v, rat(1))).unwrap();
        prop_assert!(f != h);
    }

    #[test]
    fn directional_second_derivative_matches_line_restriction(
        n in poly_strategy(2, 4, 3),
        d in poly_strategy(2, 3, 2),
        dir in (-2i64..=2, -2i64..=2),
        p in (positive_rational(), positive_rational()),
    ) {
        let v = vars(&["beta", "gamma"]);
        let (n, d) = (build(&v, &n), build(&v, &d).checked_add(&MultiPoly::int(&v, 1)).unwrap());
        let f = RatFunc::new(n, d).unwrap();
        let point = [p.0.clone(), p.1.clone()];
        prop_assume!(!f.denominator().evaluate(&point).unwrap().is_zero());
        let got = f.directional_second_derivative(&[dir.0, dir.1]).unwrap().evaluate(&point).unwrap();
        // restrict to the line point + t·dir and differentiate twice in t
        let tv = vars(&["t"]);
        let t = MultiPoly::var(&tv, "t").unwrap();
        let line = [
            &MultiPoly::constant(&tv, p.0) + &t.scale(&rat(dir.0)),
            &MultiPoly::constant(&tv, p.1) + &t.scale(&rat(dir.1)),
        ];
        let g = f.substitute(&line, &tv).unwrap();
        let want = g.partial_derivative("t").unwrap().partial_derivative("t").unwrap()
            .evaluate(&[Rational::zero()]).unwrap();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn nonnegative_coefficients_imply_positive_values(
        terms in prop::collection::vec((prop::collection::vec(0u32..=4, 3), 0i64..=20), 1..=10),
        p in (positive_rational(), positive_rational(), positive_rational()),
    ) {
        let v = vars(&["alpha", "beta", "gamma"]);
        let poly = build(&v, &terms);
        prop_assume!(!poly.is_zero());
        prop_assert!(poly.coefficients_all_nonneg().all_nonneg);
        prop_assert!(poly.evaluate(&[p.0, p.1, p.2]).unwrap().is_positive());
    }
}

#[test]
fn polygon_integrals_match_green_oracle() {
    let mut rng = dpcert::sampling::SampleRng::new(0x6EE4);
    for chart in [ConeChart::K2, ConeChart::K3U] {
        let polygon = dpcert::polytope::build_polygon(&chart.areas().0, &chart.sample_point()).unwrap();
        let integrals: Vec<_> = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
            .into_iter()
            .map(|(a, b)| ((a, b), polygon.integrate_monomial(a, b)))
            .collect();
        for _ in 0..20 {
            let p: Vec<Rational> = (0..chart.nvars()).map(|_| rng.positive_rational(50)).collect();
            let verts = polygon.vertices_at(&p).unwrap();
            let fverts: Vec<(f64, f64)> = verts.iter().map(|(u, v)| (u.to_f64().unwrap(), v.to_f64().unwrap())).collect();
            for ((a, b), sym) in &integrals {
                let exact = sym.evaluate(&p).unwrap();
                assert_eq!(exact, green_integral(&verts, *a, *b));
                let approx = green_f64(&fverts, *a as i32, *b as i32);
                let e = exact.to_f64().unwrap();
                assert!((approx - e).abs() <= 1e-9 * e.abs().max(1.0), "{a},{b}: {approx} vs {e}");
            }
        }
    }
}

#[test]
fn sturm_counts_match_bisection_oracle() {
    let mut rng = dpcert::sampling::SampleRng::new(0x57E4);
    for _ in 0..20 {
        let (p, roots) = constructed(&mut rng);
        assert!(p.degree().unwrap() <= 10);
        // endpoints at odd multiples of 1/20 are never roots
        let a = rng.below(40) as i64 * 2 - 41;
        let b = a + 2 * (1 + rng.below(40) as i64);
        let (lo, hi) = (frac(a, 20), frac(b, 20));
        let inside = roots.iter().filter(|r| **r > lo && **r < hi).count();
        let sturm = count_in(&p, &Bound::Finite(lo.clone()), &Bound::Finite(hi.clone())).unwrap();
        assert_eq!(sturm, inside, "{p:?} on ({lo}, {hi})");
        assert_eq!(bisection_count(&p, &lo, &hi), inside);

        let data = sturm_isolate(&p, &lo, &Bound::Finite(hi.clone()), &frac(1, 1000)).unwrap();
        assert_eq!(data.isolations.len(), inside);
        for iso in &data.isolations {
            assert!(iso.width() <= frac(1, 1000));
            assert_eq!(roots.iter().filter(|r| **r > iso.lo && **r < iso.hi).count(), 1);
        }
    }
}

#[test]
fn roots_on_the_endpoint_are_excluded() {
    let p = UPoly::from_i64(&[-1, 0, 1]);
    let n = count_in(&p, &Bound::Finite(rat(1)), &Bound::Finite(rat(3))).unwrap();
    assert_eq!(n, 0);
    let n = count_in(&p, &Bound::Finite(rat(-1)), &Bound::PosInf).unwrap();
    assert_eq!(n, 1);
}
