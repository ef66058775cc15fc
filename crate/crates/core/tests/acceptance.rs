//! Acceptance suite: one line per criterion on stderr, exit status nonzero
//! when any criterion's outcome differs from what is expected.
//!
//! A criterion listed in `KNOWN_UNATTAINABLE` is still computed in full and
//! printed as FAIL; the suite then requires that it keeps failing, so a
//! change in either direction is noticed.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use dpcert::certify::chains::{ChainKind, verify_inequality_chain};
use dpcert::certify::lemmas::{critical_interval, run_lemma};
use dpcert::certify::sturm::{Bound, count_in, sturm_isolate};
use dpcert::certify::{CertifyConfig, Engine, LemmaReport, PositivityCertificate, Status};
use dpcert::delpezzo::{AreaVector, CohClass, ConeChart};
use dpcert::fixture::{ComparisonVerdict, compare_against_fixture};
use dpcert::functional::{FunctionalBundle, cal_a_at_areas, first_variation_along_c1, futaki_closed_form};
use dpcert::parser::parse_expression;
use dpcert::poly::{MultiPoly, vars};
use dpcert::polytope::{build_polygon, green_integral};
use dpcert::sampling::SampleRng;
use dpcert::scalar::{Rational, format_rational, frac, rat};
use dpcert::univariate::UPoly;
use dpcert::{Monomial, RatFunc};
use num_traits::{ToPrimitive, Zero};

mod common;
use common::{bisection_count, constructed, green_f64};

/// Criteria that cannot hold as stated, with the reason.
const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(
    4,
    "the k=2 second-derivative display is 24 x (d^2/dbeta^2 + d^2/dgamma^2) of the functional, \
     not 24 x its (1,-1) directional derivative; the comparison is MISMATCH",
)];

/// Sub-check outcomes of one criterion.
struct Outcome {
    checks: Vec<(String, bool)>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.checks.push((name.into(), ok));
        ok
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    fn summary(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
        if failed.is_empty() {
            format!("{} checks", self.checks.len())
        } else {
            format!("{}/{} checks failed: {}", failed.len(), self.checks.len(), failed.join("; "))
        }
    }
}

fn engine() -> Engine {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    Engine::new(CertifyConfig {
        fixtures_dir: Some(fixtures),
        ..CertifyConfig::default()
    })
}

fn fixture(e: &Engine, chart: ConeChart, file: &str) -> RatFunc {
    e.load_fixture(chart, file).expect("fixture loads").1
}

fn exact(computed: &RatFunc, fx: &RatFunc) -> bool {
    matches!(compare_against_fixture(computed, fx), Ok(ComparisonVerdict::Exact))
}

fn lemma(e: &Engine, id: &str) -> LemmaReport {
    run_lemma(e, id).unwrap_or_else(|err| panic!("{id}: {err}"))
}

fn witness_ok(r: &LemmaReport, key: &str) -> bool {
    let failed = r.witness("failed_checks").and_then(|v| v.as_array()).cloned().unwrap_or_default();
    r.witness(key).is_some() && !failed.iter().any(|f| f == key)
}

fn moments(e: &Engine) -> Outcome {
    let mut o = Outcome::new();
    let printed = [
        (ConeChart::K2, "2*beta*gamma + 2*beta + 2*gamma + 1"),
        (ConeChart::K3U, "2*(alpha*beta + alpha*gamma + beta*gamma + alpha + beta + gamma) + 1"),
    ];
    for (chart, text) in printed {
        let b = e.bundle(chart);
        // the grammar is integral, so compare against twice the volume
        let v = parse_expression(text, &chart.vars()).unwrap();
        o.check(format!("V {} equals printed polynomial", chart.name()), b.volume.scale(&rat(2)) == v);
        o.check(
            format!("V {} fixture", chart.name()),
            exact(&RatFunc::from_poly(b.volume.clone()), &fixture(e, chart, "V")),
        );
        for (name, m) in [("A", &b.a), ("B", &b.b), ("C", &b.c)] {
            // fixtures hold pi^2 times the moment coefficient
            o.check(
                format!("{name} {} fixture", chart.name()),
                m.pi_power == -2 && exact(&m.value, &fixture(e, chart, name)),
            );
        }
    }
    let a = &e.bundle(ConeChart::K2).a;
    let spot = dpcert::PiScalar::new(a.value.evaluate(&[rat(1), rat(1)]).unwrap(), a.pi_power);
    o.check("A(1,1) = 265/(1008 pi^2)", spot == dpcert::PiScalar::new(frac(265, 1008), -2));
    o
}

fn futaki(e: &Engine) -> Outcome {
    let mut o = Outcome::new();
    for chart in [ConeChart::K2, ConeChart::K3U] {
        let b = e.bundle(chart);
        let (f1, f2) = futaki_closed_form(chart).unwrap();
        o.check(format!("F1 {} boundary = closed form", chart.name()), b.f1 == f1);
        o.check(format!("F2 {} boundary = closed form", chart.name()), b.f2 == f2);
    }
    let b = e.bundle(ConeChart::K2);
    let at = |p: [i64; 2]| {
        let p = p.map(rat);
        (b.f1.evaluate(&p).unwrap(), b.f2.evaluate(&p).unwrap())
    };
    o.check("F(1,1) = (-2/3, -2/3)", at([1, 1]) == (frac(-2, 3), frac(-2, 3)));
    o.check("F(1,2) = (-10/11, -12/11)", at([1, 2]) == (frac(-10, 11), frac(-12, 11)));
    o
}

fn functional(e: &Engine) -> Outcome {
    let mut o = Outcome::new();
    for chart in [ConeChart::K2, ConeChart::K3U] {
        let v = compare_against_fixture(&e.bundle(chart).cal_a, &fixture(e, chart, "calA")).unwrap();
        o.check(format!("calA {} fixture {}", chart.name(), v.label()), v.is_match());
    }
    let a11 = e.bundle(ConeChart::K2).cal_a.evaluate(&[rat(1), rat(1)]).unwrap();
    o.check("A(1,1) = 2919/409", a11 == frac(2919, 409));
    o.check("F(1) = A(1,1)", e.diagonal().f.evaluate(&[rat(1)]).unwrap() == a11);
    let a111 = e.bundle(ConeChart::K3U).cal_a.evaluate(&[rat(1), rat(1), rat(1)]).unwrap();
    o.check("A(1,1,1) = 81/13", a111 == frac(81, 13));
    let c1 = cal_a_at_areas(3, &CohClass::c1(3, &vars(&[])).to_areas()).unwrap();
    o.check("A(c1) = 6", c1 == rat(6));
    o
}

fn convexity(e: &Engine) -> Outcome {
    let mut o = Outcome::new();
    for (chart, file, constant) in [(ConeChart::K2, "d2_antidiag", 24), (ConeChart::K3U, "d2_alphabeta", 12)] {
        let (n, d) = e.second_derivative(chart);
        let cert = PositivityCertificate::from_parts(&Engine::convexity_direction(chart), n, d);
        o.check(format!("{} certificate PASS", chart.name()), cert.verdict == Status::Pass);
        o.check(
            format!("{} certificate rechecks from JSON", chart.name()),
            PositivityCertificate::recheck_json(&cert.to_json()),
        );
        let d2 = RatFunc::new(n.clone(), d.pow(3)).unwrap();
        let v = compare_against_fixture(&d2, &fixture(e, chart, file)).unwrap();
        let shown = match &v {
            ComparisonVerdict::Scaled(c) => format!("SCALED {}", format_rational(c)),
            other => other.label().to_string(),
        };
        o.check(
            format!("{} display SCALED {constant} (got {shown})", chart.name()),
            matches!(&v, ComparisonVerdict::Scaled(c) if *c == rat(constant)),
        );
    }
    o
}

fn roots(e: &Engine) -> Outcome {
    let mut o = Outcome::new();
    let diag = e.diagonal();
    let (p, q) = (&diag.p, &diag.q);
    let zero = Bound::Finite(Rational::zero());
    o.check("P has one root in (0,inf)", count_in(p, &zero, &Bound::PosInf).unwrap() == 1);
    o.check("P(1) = -288", p.eval(&rat(1)) == rat(-288));
    let width = Rational::new(1.into(), num_bigint::BigInt::from(1u64 << 30));
    let data = critical_interval(e, &width).unwrap();
    let iso_ok = data.isolations.len() == 1 && {
        let i = &data.isolations[0];
        i.lo >= rat(1) && i.hi <= frac(6, 5) && i.width() <= width
    };
    o.check("critical interval inside (1,6/5) of width <= 2^-30", iso_ok);
    o.check(
        "Sturm witness rechecks from JSON",
        dpcert::certify::sturm::SturmData::recheck_json(&data.to_json()).unwrap_or(false),
    );
    let cut = frac(6, 5);
    o.check(
        "Q has no root in (0, 6/5]",
        count_in(q, &zero, &Bound::Finite(cut.clone())).unwrap() == 0 && !q.eval(&cut).is_zero(),
    );
    let c1 = verify_inequality_chain(ChainKind::FirstDerivativeBound, p.coeffs(), &cut);
    o.check(
        "chain 6/5 > 1968/1680",
        c1.pass && c1.negative_total == rat(1968) && c1.positive_total == rat(1680),
    );
    for kind in [ChainKind::SecondDerivativeLow, ChainKind::SecondDerivativeHigh] {
        let c = verify_inequality_chain(kind, q.coeffs(), &cut);
        o.check(
            format!("chain {} with 3002509/131832", kind.id()),
            c.pass && c.positive_total == rat(3002509) && c.negative_total == rat(131832),
        );
    }
    o.check("(6/5)^15 < 16", num_traits::pow(frac(6, 5), 15) < rat(16));
    // F'(0+) from the printed diagonal restriction: N'(0) D(0) - N(0) D'(0) over D(0)^2
    let fb = fixture(e, ConeChart::K2, "F_beta");
    let up = |m: &MultiPoly| UPoly::new(m.to_univariate().unwrap());
    let (n, d) = (up(fb.numerator()), up(fb.denominator()));
    let z = Rational::zero();
    let limit = (n.derivative().eval(&z) * d.eval(&z) - n.eval(&z) * d.derivative().eval(&z)) / (d.eval(&z) * d.eval(&z));
    o.check(format!("F'(0+) = -12 (got {})", format_rational(&limit)), limit == rat(-12));
    o
}

fn symmetry(e: &Engine) -> Outcome {
    let mut o = Outcome::new();
    for id in ["symmetry-k2", "symmetry-k3", "scale-invariance", "cremona-k3"] {
        o.check(format!("{id} PASS"), lemma(e, id).status == Status::Pass);
    }
    let r = lemma(e, "scale-invariance");
    o.check("20 rescalings per chart", r.witness("k2_rescaling").and_then(|w| w["samples"].as_u64()) == Some(20));
    let r = lemma(e, "cremona-k3");
    for k in ["involution", "preserves_square", "fixes_c1", "delta_sign_flip"] {
        o.check(format!("cremona {k}"), witness_ok(&r, k));
    }
    o.check(
        "functional invariant at 50 area vectors",
        r.witness("functional_invariant_sampled").and_then(|w| w["samples"].as_u64()) == Some(50),
    );
    // direct spot: swapping beta and gamma at a rational point
    let cal = &e.bundle(ConeChart::K2).cal_a;
    let (x, y) = (frac(3, 7), frac(11, 5));
    o.check(
        "A(3/7, 11/5) = A(11/5, 3/7)",
        cal.evaluate(&[x.clone(), y.clone()]).unwrap() == cal.evaluate(&[y, x]).unwrap(),
    );
    o
}

fn critical_point(e: &Engine) -> Outcome {
    let mut o = Outcome::new();
    let r = lemma(e, "futaki-vanishing-k3");
    o.check("Futaki vanishes on W symbolically", witness_ok(&r, "vanishes_on_W"));
    o.check(
        "Futaki vanishes at 50 samples of V",
        witness_ok(&r, "vanishes_at_V_samples")
            && r.witness("vanishes_at_V_samples").and_then(|w| w["samples"].as_u64()) == Some(50),
    );
    let r = lemma(e, "first-variation-k3");
    o.check("first variation zero at c1", witness_ok(&r, "zero_at_c1"));
    o.check(
        "first variation negative at 50 samples",
        witness_ok(&r, "negative_off_c1") && r.witness("negative_off_c1").and_then(|w| w["samples"].as_u64()) == Some(50),
    );
    let x = AreaVector::numeric_coords([rat(2), rat(1), rat(1), rat(0)]).to_class(3).unwrap();
    o.check("first variation at (2,1,1,0) = -16/25", first_variation_along_c1(&x).unwrap() == frac(-16, 25));
    let r = lemma(e, "reverse-cauchy-schwarz");
    o.check(
        "strict reverse Cauchy-Schwarz at 100 pairs",
        witness_ok(&r, "strict_for_non_proportional")
            && r.witness("strict_for_non_proportional").and_then(|w| w["pairs"].as_u64()) == Some(100),
    );
    o.check("equality on proportional pairs", witness_ok(&r, "equality_for_proportional"));
    o
}

fn minimality(e: &Engine) -> Outcome {
    let mut o = Outcome::new();
    let r = lemma(e, "uniqueness-k2");
    o.check("uniqueness-k2 PASS", r.status == Status::Pass);
    o.check(
        "k2: A >= lower end of F(beta*) at 100 points",
        witness_ok(&r, "sampled_minimality") && r.witness("sampled_minimality").and_then(|w| w["samples"].as_u64()) == Some(100),
    );
    o.check("k2: F(beta*) interval inside (7, 2919/409)", witness_ok(&r, "critical_value_interval"));
    let r = lemma(e, "uniqueness-k3");
    o.check("uniqueness-k3 PASS", r.status == Status::Pass);
    o.check(
        "k3: A >= 6 at 100 classes",
        witness_ok(&r, "sampled_minimality") && r.witness("sampled_minimality").and_then(|w| w["samples"].as_u64()) == Some(100),
    );
    o
}

fn property_suites() -> Outcome {
    let mut o = Outcome::new();
    // parser round trip
    let mut rng = SampleRng::new(0x9A55);
    let v = vars(&["alpha", "beta", "gamma"]);
    let mut round = true;
    for _ in 0..200 {
        let terms: Vec<(Monomial, Rational)> = (0..rng.below(9))
            .map(|_| {
                let e: Vec<u32> = (0..3).map(|_| rng.below(6) as u32).collect();
                (Monomial::from_exponents(&e), rat(rng.below(101) as i64 - 50))
            })
            .collect();
        let p = MultiPoly::from_terms(&v, terms);
        round &= parse_expression(&p.to_string(), &v).ok() == Some(p);
    }
    o.check("parser round trip on 200 polynomials", round);

    // polygon integrals against Green's theorem at 20 points
    let polygon = build_polygon(&ConeChart::K3U.areas().0, &ConeChart::K3U.sample_point()).unwrap();
    let mut green = true;
    for _ in 0..20 {
        let p: Vec<Rational> = (0..3).map(|_| rng.positive_rational(50)).collect();
        let verts = polygon.vertices_at(&p).unwrap();
        let fv: Vec<(f64, f64)> = verts.iter().map(|(a, b)| (a.to_f64().unwrap(), b.to_f64().unwrap())).collect();
        for (a, b) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
            let x = polygon.integrate_monomial(a, b).evaluate(&p).unwrap();
            let f = x.to_f64().unwrap();
            green &= x == green_integral(&verts, a, b)
                && (green_f64(&fv, a as i32, b as i32) - f).abs() <= 1e-9 * f.abs().max(1.0);
        }
    }
    o.check("integrals match Green oracle at 20 points", green);

    // Sturm against bisection
    let mut sturm = true;
    for _ in 0..20 {
        let (p, roots) = constructed(&mut rng);
        let a = rng.below(40) as i64 * 2 - 41;
        let b = a + 2 * (1 + rng.below(40) as i64);
        let (lo, hi) = (frac(a, 20), frac(b, 20));
        let want = roots.iter().filter(|r| **r > lo && **r < hi).count();
        let got = count_in(&p, &Bound::Finite(lo.clone()), &Bound::Finite(hi.clone())).unwrap();
        let iso = sturm_isolate(&p, &lo, &Bound::Finite(hi.clone()), &frac(1, 100)).unwrap();
        sturm &= got == want && bisection_count(&p, &lo, &hi) == want && iso.isolations.len() == want;
    }
    o.check("Sturm counts match bisection on 20 polynomials", sturm);

    // closure and perimeter for every polygon built here
    let mut closure = true;
    let mut built = 0;
    for chart in [ConeChart::K2, ConeChart::K3U] {
        let b = FunctionalBundle::for_chart(chart).unwrap();
        let (rx, ry) = b.polygon.closure_residual();
        closure &= rx.is_zero() && ry.is_zero() && b.polygon.lattice_perimeter() == b.c1_dot_omega;
        built += 1;
    }
    for _ in 0..20 {
        let c = [0; 4].map(|_| rng.positive_rational(1000));
        let areas = AreaVector::numeric_coords(c);
        let poly = build_polygon(&areas.0, &[]).unwrap();
        let (rx, ry) = poly.closure_residual();
        let c1 = CohClass::c1(3, areas.vars()).pair(&areas.to_class(3).unwrap()).unwrap();
        closure &= rx.is_zero() && ry.is_zero() && poly.lattice_perimeter() == c1;
        built += 1;
    }
    o.check(format!("closure and perimeter = c1.Omega on {built} polygons"), closure);
    o
}

fn main() {
    let start = Instant::now();
    let e = engine();
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "moment pipeline identities", Box::new(|| moments(&e))),
        (2, "Futaki cross-validation", Box::new(|| futaki(&e))),
        (3, "functional golden values", Box::new(|| functional(&e))),
        (4, "convexity certificates and displays", Box::new(|| convexity(&e))),
        (5, "root certification", Box::new(|| roots(&e))),
        (6, "symmetry and invariance", Box::new(|| symmetry(&e))),
        (7, "k=3 critical point", Box::new(|| critical_point(&e))),
        (8, "sampled global minimality", Box::new(|| minimality(&e))),
        (9, "property suites", Box::new(property_suites)),
    ];
    let mut err = std::io::stderr().lock();
    let mut unexpected = Vec::new();
    for (n, title, f) in &criteria {
        let t = Instant::now();
        let out = f();
        let pass = out.passed();
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| k == n);
        let _ = writeln!(
            err,
            "criterion {n} {:<4} {title} ({}, {:.2}s)",
            if pass { "PASS" } else { "FAIL" },
            out.summary(),
            t.elapsed().as_secs_f64()
        );
        if let Some((_, why)) = known {
            let _ = writeln!(err, "    known unattainable: {why}");
        }
        if pass == known.is_some() {
            unexpected.push(*n);
        }
    }
    let _ = writeln!(err, "acceptance finished in {:.2}s", start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        let _ = writeln!(err, "unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
