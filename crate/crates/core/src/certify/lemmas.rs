//! The individual verification items. Each returns a report whose witnesses
//! are enough to see why it passed or failed.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_traits::{Signed, Zero};
use serde_json::{Value, json};

use super::chains::{ChainKind, verify_inequality_chain};
use super::sturm::{Bound, count_in, sturm_isolate};
use super::{
    CertifyError, Checks, Engine, LemmaReport, PositivityCertificate, Status, fixture_record, point_json, rat_json,
};
use crate::delpezzo::{AreaVector, CohClass, ConeChart};
use crate::functional::{FunctionalBundle, PiRatFunc, cal_a_at_areas, first_variation_along_c1, futaki_closed_form};
use crate::poly::{MultiPoly, vars};
use crate::ratfunc::RatFunc;
use crate::sampling::{MAX_PART, SampleRng};
use crate::scalar::{Rational, format_rational, frac, rat};

type LemmaFn = fn(&Engine) -> Result<LemmaReport, CertifyError>;

pub struct LemmaSpec {
    pub id: &'static str,
    pub aliases: &'static [&'static str],
    pub summary: &'static str,
    run: LemmaFn,
}

/// Every verification item, sorted by id.
pub static LEMMAS: &[LemmaSpec] = &[
    LemmaSpec {
        id: "cone-decomposition",
        aliases: &[],
        summary: "k=3 cone splits into delta>0, delta<0, delta=0 (assumed; Cremona exchanges the first two)",
        run: cone_decomposition,
    },
    LemmaSpec {
        id: "convexity-k2",
        aliases: &["convex2"],
        summary: "functional is strictly convex along (1,-1) for k=2",
        run: |e| convexity(e, ConeChart::K2),
    },
    LemmaSpec {
        id: "convexity-k3",
        aliases: &["convex3"],
        summary: "functional is strictly convex along (1,-1,0) for k=3",
        run: |e| convexity(e, ConeChart::K3U),
    },
    LemmaSpec {
        id: "cremona-k3",
        aliases: &[],
        summary: "Cremona involution preserves the pairing, c1 and the functional",
        run: cremona_k3,
    },
    LemmaSpec {
        id: "diagonal-first-derivative",
        aliases: &["prime2"],
        summary: "F'(beta) > 0 for beta >= 6/5 on the k=2 diagonal",
        run: diagonal_first_derivative,
    },
    LemmaSpec {
        id: "diagonal-second-derivative",
        aliases: &["doubleprime2"],
        summary: "F''(beta) > 0 for beta in (0, 6/5] on the k=2 diagonal",
        run: diagonal_second_derivative,
    },
    LemmaSpec {
        id: "first-variation-k3",
        aliases: &[],
        summary: "functional decreases along c1 away from the anticanonical ray (sampled)",
        run: first_variation_k3,
    },
    LemmaSpec {
        id: "functional-values",
        aliases: &[],
        summary: "assembled functional against the closed forms and spot values",
        run: functional_values,
    },
    LemmaSpec {
        id: "futaki-k2",
        aliases: &[],
        summary: "boundary Futaki invariant equals the closed form for k=2",
        run: |e| futaki(e, ConeChart::K2),
    },
    LemmaSpec {
        id: "futaki-k3",
        aliases: &[],
        summary: "boundary Futaki invariant equals the closed form for k=3",
        run: |e| futaki(e, ConeChart::K3U),
    },
    LemmaSpec {
        id: "futaki-vanishing-k3",
        aliases: &["veritas"],
        summary: "Futaki invariant vanishes on the symmetric subspaces for k=3",
        run: futaki_vanishing_k3,
    },
    LemmaSpec {
        id: "moments-k2",
        aliases: &[],
        summary: "volume and second moments of the k=2 pentagon",
        run: |e| moments(e, ConeChart::K2),
    },
    LemmaSpec {
        id: "moments-k3",
        aliases: &[],
        summary: "volume and second moments of the k=3 hexagon",
        run: |e| moments(e, ConeChart::K3U),
    },
    LemmaSpec {
        id: "reverse-cauchy-schwarz",
        aliases: &[],
        summary: "(x.y)^2 >= x^2 y^2 for Kähler classes, equality only when proportional (sampled)",
        run: reverse_cauchy_schwarz,
    },
    LemmaSpec {
        id: "scale-invariance",
        aliases: &[],
        summary: "functional is invariant under rescaling the class (sampled)",
        run: scale_invariance,
    },
    LemmaSpec {
        id: "symmetry-k2",
        aliases: &["symmetry2"],
        summary: "functional is symmetric under beta <-> gamma",
        run: symmetry_k2,
    },
    LemmaSpec {
        id: "symmetry-k3",
        aliases: &["symmetry3a", "symmetry3b"],
        summary: "functional is symmetric under permutations of (alpha, beta, gamma)",
        run: symmetry_k3,
    },
    LemmaSpec {
        id: "uniqueness-k2",
        aliases: &["laudate"],
        summary: "unique critical point on the k=2 cone, with sampled global minimality",
        run: uniqueness_k2,
    },
    LemmaSpec {
        id: "uniqueness-k3",
        aliases: &["gaudete"],
        summary: "c1 is the unique critical point on the k=3 cone, with sampled global minimality",
        run: uniqueness_k3,
    },
];

pub fn resolve(id: &str) -> Option<&'static LemmaSpec> {
    LEMMAS.iter().find(|l| l.id == id || l.aliases.contains(&id))
}

/// Runs one lemma by id or alias, memoised per engine.
pub fn run_lemma(engine: &Engine, id: &str) -> Result<LemmaReport, CertifyError> {
    let spec = resolve(id).ok_or_else(|| CertifyError::UnknownLemma(id.to_string()))?;
    if let Some(r) = memo(engine).lock().expect("memo lock").get(spec.id) {
        return Ok(r.clone());
    }
    let r = super::timed(|| (spec.run)(engine))?;
    memo(engine)
        .lock()
        .expect("memo lock")
        .insert(spec.id.to_string(), r.clone());
    Ok(r)
}

fn memo(engine: &Engine) -> &Mutex<BTreeMap<String, LemmaReport>> {
    engine.memo.get_or_init(Default::default)
}

/// Independent stream per lemma so results do not depend on run order.
fn rng_for(engine: &Engine, id: &str) -> SampleRng {
    let h = id
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    SampleRng::new(engine.config.seed ^ h)
}

fn counts(engine: &Engine) -> (usize, usize, usize) {
    let n = engine.config.sample_count.max(1);
    (n, n.div_ceil(2), n.div_ceil(5))
}

fn cv(p: &MultiPoly) -> Rational {
    p.constant_value().unwrap_or_else(Rational::zero)
}

fn positive_areas(a: &AreaVector) -> bool {
    a.0.iter().all(|p| cv(p).is_positive())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    /// `δ > 0`
    U,
    /// `δ < 0`
    UPrime,
    /// `δ = 0`
    P,
}

/// Coordinates `(α, β, γ, δ)` of a random k=3 Kähler class in `region`.
fn k3_sample(rng: &mut SampleRng, region: Region) -> [Rational; 4] {
    loop {
        let [a, b, g] = [0; 3].map(|_| rng.positive_rational(MAX_PART));
        let d = match region {
            Region::U => rng.positive_rational(MAX_PART),
            Region::UPrime => -rng.positive_rational(MAX_PART),
            Region::P => Rational::zero(),
        };
        let c = [a, b, g, d];
        if positive_areas(&AreaVector::numeric_coords(c.clone())) {
            return c;
        }
    }
}

fn region_cycle(i: usize) -> Region {
    [Region::U, Region::UPrime, Region::P][i % 3]
}

fn class_of(c: &[Rational; 4]) -> Result<CohClass, CertifyError> {
    Ok(AreaVector::numeric_coords(c.clone())
        .to_class(3)
        .map_err(crate::functional::FunctionalError::from)?)
}

/// Compares against a printed display when fixtures are configured. Returns
/// whether it matched (true when skipped).
fn display_check(
    engine: &Engine,
    checks: &mut Checks,
    chart: ConeChart,
    file: &str,
    computed: &RatFunc,
) -> Result<bool, CertifyError> {
    let key = format!("display_{file}");
    if engine.config.fixtures_dir.is_none() {
        checks.record(&key, json!("skipped: no fixtures directory"));
        return Ok(true);
    }
    let (ff, fx) = engine.load_fixture(chart, file)?;
    let (verdict, rec) = fixture_record(&ff.name, computed, &fx, None)?;
    Ok(checks.check(&key, verdict.is_match(), serde_json::to_value(rec).expect("record serializes")))
}

fn pi_json(p: &PiRatFunc, at: &[Rational]) -> Result<Value, CertifyError> {
    let m = p.value.evaluate(at)?;
    Ok(json!(crate::scalar::PiScalar::new(m, p.pi_power).to_string()))
}

fn moments(engine: &Engine, chart: ConeChart) -> Result<LemmaReport, CertifyError> {
    let b = engine.bundle(chart);
    let mut c = Checks::new();
    let half_sq = b.omega_sq.scale(&frac(1, 2));
    c.check(
        "volume_is_half_self_intersection",
        b.volume == half_sq,
        json!(b.volume.to_string()),
    );
    c.check(
        "perimeter_is_c1_pairing",
        b.polygon.lattice_perimeter() == b.c1_dot_omega,
        json!(b.c1_dot_omega.to_string()),
    );
    let (rx, ry) = b.polygon.closure_residual();
    c.check(
        "polygon_closes",
        rx.is_zero() && ry.is_zero(),
        json!([rx.to_string(), ry.to_string()]),
    );
    c.check(
        "moment_pi_power",
        [&b.a, &b.b, &b.c].iter().all(|m| m.pi_power == -2),
        json!([b.a.pi_power, b.b.pi_power, b.c.pi_power]),
    );
    display_check(engine, &mut c, chart, "V", &RatFunc::from_poly(b.volume.clone()))?;
    for (name, m) in [("A", &b.a), ("B", &b.b), ("C", &b.c)] {
        display_check(engine, &mut c, chart, name, &m.value)?;
    }
    let one = chart.sample_point();
    c.record(
        "values_at_ones",
        json!({"A": pi_json(&b.a, &one)?, "B": pi_json(&b.b, &one)?, "C": pi_json(&b.c, &one)?}),
    );
    match chart {
        ConeChart::K2 => {
            let a11 = b.a.value.evaluate(&one)?;
            c.check("spot_A_at_1_1", a11 == frac(265, 1008), json!(format!("{}/pi^2", format_rational(&a11))));
        }
        ConeChart::K3U => {
            // α = 0 collapses the hexagon onto the pentagon
            let k2 = engine.bundle(ConeChart::K2);
            let v2 = ConeChart::K2.vars();
            let images = [
                MultiPoly::zero(&v2),
                MultiPoly::var(&v2, "beta")?,
                MultiPoly::var(&v2, "gamma")?,
            ];
            let mut ok = true;
            for (x, y) in [(&b.a, &k2.a), (&b.b, &k2.b), (&b.c, &k2.c)] {
                ok &= x.value.substitute(&images, &v2)? == y.value;
            }
            ok &= b.volume.substitute(&images, &v2)? == k2.volume;
            c.check("alpha_zero_reproduces_k2", ok, json!(ok));
        }
    }
    Ok(c.finish(&format!("moments-{}", chart.name())))
}

fn futaki(engine: &Engine, chart: ConeChart) -> Result<LemmaReport, CertifyError> {
    let b = engine.bundle(chart);
    let (f1, f2) = futaki_closed_form(chart)?;
    let mut c = Checks::new();
    c.check("F1_boundary_equals_closed_form", b.f1 == f1, json!(b.f1.to_string()));
    c.check("F2_boundary_equals_closed_form", b.f2 == f2, json!(b.f2.to_string()));
    display_check(engine, &mut c, chart, "F1", &b.f1)?;
    display_check(engine, &mut c, chart, "F2", &b.f2)?;
    let spots: Vec<(Vec<Rational>, Rational, Rational)> = match chart {
        ConeChart::K2 => vec![
            (vec![rat(1), rat(1)], frac(-2, 3), frac(-2, 3)),
            (vec![rat(1), rat(2)], frac(-10, 11), frac(-12, 11)),
        ],
        ConeChart::K3U => vec![(vec![rat(1), rat(1), rat(1)], rat(0), rat(0))],
    };
    for (p, e1, e2) in spots {
        let (g1, g2) = (b.f1.evaluate(&p)?, b.f2.evaluate(&p)?);
        let key = format!(
            "spot_{}",
            p.iter().map(format_rational).collect::<Vec<_>>().join("_")
        );
        c.check(
            &key,
            g1 == e1 && g2 == e2,
            json!([format_rational(&g1), format_rational(&g2)]),
        );
    }
    Ok(c.finish(&format!("futaki-{}", chart.name())))
}

fn functional_values(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let mut c = Checks::new();
    let k2 = engine.bundle(ConeChart::K2);
    let k3 = engine.bundle(ConeChart::K3U);
    let a11 = k2.cal_a.evaluate(&[rat(1), rat(1)])?;
    c.check("k2_at_1_1", a11 == frac(2919, 409), rat_json(&a11));
    let f1 = engine.diagonal().f.evaluate(&[rat(1)])?;
    c.check("diagonal_at_1", f1 == a11, rat_json(&f1));
    let t = k2.futaki_norm_sq_over_32pi2.evaluate(&[rat(1), rat(1)])?;
    c.check("k2_futaki_term_at_1_1", t == frac(56, 409), rat_json(&t));
    let a111 = k3.cal_a.evaluate(&[rat(1), rat(1), rat(1)])?;
    c.check("k3_at_1_1_1", a111 == frac(81, 13), rat_json(&a111));
    let c1 = cal_a_at_areas(3, &CohClass::c1(3, &vars(&[])).to_areas())?;
    c.check("k3_at_c1", c1 == rat(6), rat_json(&c1));
    for (chart, b) in [(ConeChart::K2, k2), (ConeChart::K3U, k3)] {
        display_check(engine, &mut c, chart, "calA", &b.cal_a)?;
        // s₀²·V = 32π²(c₁·Ω)²/Ω² with V = Ω²/2
        let s0 = b.s0()?;
        let lhs = s0.value.pow(2)?.checked_mul(&RatFunc::from_poly(b.volume.clone()))?;
        let rhs = RatFunc::new(b.c1_dot_omega.pow(2).scale(&rat(32)), b.omega_sq.clone())?;
        c.check(
            &format!("scalar_curvature_identity_{}", chart.name()),
            lhs == rhs && 2 * s0.pi_power == 2,
            json!(rhs.to_string()),
        );
    }
    Ok(c.finish("functional-values"))
}

fn convexity(engine: &Engine, chart: ConeChart) -> Result<LemmaReport, CertifyError> {
    let dir = Engine::convexity_direction(chart);
    let (n, d) = engine.second_derivative(chart);
    let cert = PositivityCertificate::from_parts(&dir, n, d);
    let mut c = Checks::new();
    c.check("certificate", cert.verdict == Status::Pass, cert.to_json());
    // a PASS must show up as strict positivity at sampled interior points
    let mut rng = rng_for(engine, &format!("convexity-{}", chart.name()));
    let (_, _, n20) = counts(engine);
    let d3 = d.pow(3);
    let mut worst: Option<(Vec<Rational>, Rational)> = None;
    for _ in 0..n20 {
        let p = rng.positive_point(chart.nvars());
        let val = n.evaluate(&p)? / d3.evaluate(&p)?;
        if worst.as_ref().is_none_or(|(_, w)| val < *w) {
            worst = Some((p, val));
        }
    }
    let sampled_ok = worst.as_ref().is_none_or(|(_, w)| w.is_positive());
    c.check(
        "sampled_positivity",
        sampled_ok,
        json!({"samples": n20, "smallest_at": worst.as_ref().map(|(p, _)| point_json(p))}),
    );
    if engine.config.fixtures_dir.is_some() {
        let file = match chart {
            ConeChart::K2 => "d2_antidiag",
            ConeChart::K3U => "d2_alphabeta",
        };
        let (ff, fx) = engine.load_fixture(chart, file)?;
        let d2 = RatFunc::new(n.clone(), d3)?;
        let (_, rec) = fixture_record(&ff.name, &d2, &fx, Some(&engine.bundle(chart).cal_a))?;
        // the display comparison is reported in the fixture list; the
        // convexity claim itself rests on the certificate above
        c.record("display", serde_json::to_value(rec).expect("record serializes"));
    }
    Ok(c.finish(&format!("convexity-{}", chart.name())))
}

fn symmetry_k2(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let b = engine.bundle(ConeChart::K2);
    let v = b.vars.clone();
    let (x, y) = (MultiPoly::var(&v, "beta")?, MultiPoly::var(&v, "gamma")?);
    let swapped = b.cal_a.substitute(&[y, x], &v)?;
    let mut c = Checks::new();
    c.check("swap_beta_gamma", swapped == b.cal_a, json!("A(beta,gamma) = A(gamma,beta)"));
    Ok(c.finish("symmetry-k2"))
}

fn symmetry_k3(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let chart = ConeChart::K3U;
    let b = engine.bundle(chart);
    let v = b.vars.clone();
    let [al, be, ga] = ["alpha", "beta", "gamma"].map(|n| MultiPoly::var(&v, n).expect("declared"));
    let one = MultiPoly::one(&v);
    let mut c = Checks::new();
    // (perm of exceptional curves, induced images of (α, β, γ))
    let cases = [
        ("swap_alpha_beta", [1, 3, 2], [be.clone(), al.clone(), ga.clone()]),
        ("swap_beta_gamma", [2, 1, 3], [al.clone(), ga.clone(), be.clone()]),
    ];
    for (name, perm, images) in cases {
        let swapped = b.cal_a.substitute(&images, &v)?;
        c.check(name, swapped == b.cal_a, json!(format!("images {:?}", images.iter().map(|p| p.to_string()).collect::<Vec<_>>())));
        let moved = b
            .class
            .permute_exceptional(&perm)
            .map_err(crate::functional::FunctionalError::from)?
            .to_areas();
        let [ia, ib, ig] = &images;
        let expect = AreaVector::from_coords(ia, ib, ig, &one);
        c.check(
            &format!("{name}_is_exceptional_permutation"),
            moved == expect,
            json!(perm),
        );
    }
    Ok(c.finish("symmetry-k3"))
}

fn diagonal_first_derivative(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let diag = engine.diagonal();
    let p = &diag.p;
    let mut c = Checks::new();
    let chain = verify_inequality_chain(ChainKind::FirstDerivativeBound, p.coeffs(), &frac(6, 5));
    c.check("chain_first_derivative", chain.pass, chain.to_json(p.coeffs()));
    let cut = Bound::Finite(frac(6, 5));
    let beyond = count_in(p, &cut, &Bound::PosInf)?;
    let p_cut = p.eval(&frac(6, 5));
    c.check(
        "roots_beyond_cut",
        beyond == 0 && p_cut.is_positive(),
        json!({"roots_in_(6/5,inf)": beyond, "P(6/5)": format_rational(&p_cut)}),
    );
    c.record("P", json!(diag.p_poly.to_string()));
    Ok(c.finish("diagonal-first-derivative"))
}

fn diagonal_second_derivative(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let diag = engine.diagonal();
    let q = &diag.q;
    let mut c = Checks::new();
    for kind in [ChainKind::SecondDerivativeLow, ChainKind::SecondDerivativeHigh] {
        let r = verify_inequality_chain(kind, q.coeffs(), &frac(6, 5));
        c.check(&format!("chain_{}", kind.id()), r.pass, r.to_json(q.coeffs()));
    }
    let zero = Bound::Finite(Rational::zero());
    let cut = frac(6, 5);
    let inside = count_in(q, &zero, &Bound::Finite(cut.clone()))?;
    let q_cut = q.eval(&cut);
    c.check(
        "roots_up_to_cut",
        inside == 0 && q_cut.is_positive(),
        json!({"roots_in_(0,6/5)": inside, "Q(6/5)": format_rational(&q_cut)}),
    );
    c.record("Q", json!(diag.q_poly.to_string()));
    Ok(c.finish("diagonal-second-derivative"))
}

/// Critical interval of `P` inside `(1, 6/5)` at the given width.
pub fn critical_interval(engine: &Engine, width: &Rational) -> Result<super::sturm::SturmData, CertifyError> {
    let p = &engine.diagonal().p;
    let mut data = sturm_isolate(p, &rat(1), &Bound::Finite(frac(6, 5)), width)?;
    let total = count_in(p, &Bound::Finite(Rational::zero()), &Bound::PosInf)?;
    data.queries.insert(0, (Bound::Finite(Rational::zero()), Bound::PosInf, total));
    Ok(data)
}

fn uniqueness_k2(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let mut c = Checks::new();
    let mut ingredients = serde_json::Map::new();
    let mut all = true;
    for id in ["symmetry-k2", "convexity-k2", "diagonal-first-derivative", "diagonal-second-derivative"] {
        let r = run_lemma(engine, id)?;
        all &= r.status == Status::Pass;
        ingredients.insert(id.into(), json!(r.status.label()));
    }
    c.check("ingredients", all, Value::Object(ingredients));

    let diag = engine.diagonal();
    let width = engine.config.isolation_width.clone();
    let data = critical_interval(engine, &width)?;
    let total = data.queries[0].2;
    let iso = data.isolations.first().cloned();
    let single = total == 1 && data.isolations.len() == 1;
    c.check("sturm_P", single, data.to_json());
    let Some(iso) = iso.filter(|_| single) else {
        return Ok(c.finish("uniqueness-k2"));
    };
    let (lo, hi) = (iso.lo.clone(), iso.hi.clone());
    c.check(
        "critical_interval",
        lo >= rat(1) && hi <= frac(6, 5) && iso.width() <= width,
        json!([format_rational(&lo), format_rational(&hi)]),
    );
    let fine = sturm_isolate(&diag.p, &lo, &Bound::Finite(hi.clone()), &(&width / rat(16)))?;
    let nested = fine.isolations.len() == 1 && fine.isolations[0].lo >= lo && fine.isolations[0].hi <= hi;
    c.check(
        "refined_interval_nested",
        nested,
        json!(fine.isolations.iter().map(|i| [format_rational(&i.lo), format_rational(&i.hi)]).collect::<Vec<_>>()),
    );

    // F′ = 12P/D²
    let d = &diag.denominator;
    let fprime = |x: &Rational| rat(12) * diag.p.eval(x) / (d.eval(x) * d.eval(x));
    let at0 = fprime(&Rational::zero());
    c.check("derivative_at_zero", at0 == rat(-12), rat_json(&at0));
    let at_cut = fprime(&frac(6, 5));
    c.check("derivative_at_cut_positive", at_cut.is_positive(), rat_json(&at_cut));

    let f = |x: &Rational| diag.numerator.eval(x) / d.eval(x);
    let (flo, fhi) = (f(&lo), f(&hi));
    let lower = &flo + fprime(&lo) * (&hi - &lo);
    let upper = if flo < fhi { flo.clone() } else { fhi };
    let inside = lower > rat(7) && upper < frac(2919, 409) && lower <= upper;
    c.check(
        "critical_value_interval",
        inside,
        json!([format_rational(&lower), format_rational(&upper)]),
    );

    let (n100, _, _) = counts(engine);
    let cal_a = &engine.bundle(ConeChart::K2).cal_a;
    let mut rng = rng_for(engine, "uniqueness-k2");
    let mut bad_avg = None;
    let mut bad_min = None;
    let mut smallest: Option<Rational> = None;
    for _ in 0..n100 {
        let p = rng.positive_point(2);
        let val = cal_a.evaluate(&p)?;
        let mid = (&p[0] + &p[1]) / rat(2);
        if bad_avg.is_none() && val < f(&mid) {
            bad_avg = Some(p.clone());
        }
        if bad_min.is_none() && val < lower {
            bad_min = Some(p.clone());
        }
        if smallest.as_ref().is_none_or(|s| val < *s) {
            smallest = Some(val);
        }
    }
    c.check(
        "sampled_averaging_inequality",
        bad_avg.is_none(),
        json!({"samples": n100, "counterexample": bad_avg.as_deref().map(point_json)}),
    );
    c.check(
        "sampled_minimality",
        bad_min.is_none(),
        json!({
            "samples": n100,
            "smallest_value": smallest.as_ref().map(format_rational),
            "counterexample": bad_min.as_deref().map(point_json),
        }),
    );
    Ok(c.finish("uniqueness-k2"))
}

fn scale_invariance(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let mut c = Checks::new();
    let mut rng = rng_for(engine, "scale-invariance");
    let (_, _, n20) = counts(engine);
    for (k, name) in [(2u8, "k2"), (3u8, "k3")] {
        let mut failure = None;
        for i in 0..n20 {
            let areas = if k == 2 {
                let p = rng.positive_point(2);
                ConeChart::K2.areas().evaluate(&p)?
            } else {
                AreaVector::numeric_coords(k3_sample(&mut rng, region_cycle(i)))
            };
            let lambda = rng.positive_rational(MAX_PART);
            let (x, y) = (cal_a_at_areas(k, &areas)?, cal_a_at_areas(k, &areas.scale(&lambda))?);
            if x != y && failure.is_none() {
                failure = Some(json!({"lambda": rat_json(&lambda), "values": [rat_json(&x), rat_json(&y)]}));
            }
        }
        c.check(
            &format!("{name}_rescaling"),
            failure.is_none(),
            failure.unwrap_or_else(|| json!({"samples": n20})),
        );
    }
    Ok(c.finish("scale-invariance"))
}

fn cremona_k3(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let mut c = Checks::new();
    let err = crate::functional::FunctionalError::from;
    // generic class with symbolic coefficients
    let v = vars(&["h", "e1", "e2", "e3"]);
    let [h, e1, e2, e3] = ["h", "e1", "e2", "e3"].map(|n| MultiPoly::var(&v, n).expect("declared"));
    let x = CohClass::new(3, h, [e1, e2, e3]).map_err(err)?;
    let phi = x.cremona().map_err(err)?;
    c.check("involution", phi.cremona().map_err(err)? == x, json!(phi.to_string()));
    c.check("preserves_square", phi.square() == x.square(), json!(x.square().to_string()));
    let c1 = CohClass::c1(3, &v);
    c.check("fixes_c1", c1.cremona().map_err(err)? == c1, json!(c1.to_string()));
    c.check(
        "preserves_c1_pairing",
        c1.pair(&phi).map_err(err)? == c1.pair(&x).map_err(err)?,
        json!(c1.pair(&x).map_err(err)?.to_string()),
    );
    // on area coordinates Φ* sends (α, β, γ, δ) to (α+δ, β+δ, γ+δ, −δ)
    let w = vars(&["alpha", "beta", "gamma", "delta"]);
    let [a, b, g, d] = ["alpha", "beta", "gamma", "delta"].map(|n| MultiPoly::var(&w, n).expect("declared"));
    let av = AreaVector::from_coords(&a, &b, &g, &d);
    let image = av.cremona().coords();
    let expect = [&a + &d, &b + &d, &g + &d, -&d];
    c.check(
        "delta_sign_flip",
        image == expect,
        json!(image.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
    );
    let class_side = av.to_class(3).map_err(err)?.cremona().map_err(err)?.to_areas();
    c.check("area_and_class_actions_agree", class_side == av.cremona(), json!(true));

    let (_, n50, _) = counts(engine);
    let mut rng = rng_for(engine, "cremona-k3");
    let mut failure = None;
    for i in 0..n50 {
        let region = if i % 2 == 0 { Region::U } else { Region::UPrime };
        let s = AreaVector::numeric_coords(k3_sample(&mut rng, region));
        let t = s.cremona();
        let flip = cv(&s.coords()[3]) == -cv(&t.coords()[3]);
        let (x, y) = (cal_a_at_areas(3, &s)?, cal_a_at_areas(3, &t)?);
        if (x != y || !flip) && failure.is_none() {
            failure = Some(json!({
                "areas": s.0.iter().map(|p| format_rational(&cv(p))).collect::<Vec<_>>(),
                "values": [rat_json(&x), rat_json(&y)],
            }));
        }
    }
    c.check(
        "functional_invariant_sampled",
        failure.is_none(),
        failure.unwrap_or_else(|| json!({"samples": n50})),
    );
    Ok(c.finish("cremona-k3"))
}

fn futaki_vanishing_k3(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let mut c = Checks::new();
    // 𝕎: all exceptional areas equal, coordinates (t, t, t, s)
    let w = vars(&["t", "s"]);
    let (t, s) = (MultiPoly::var(&w, "t")?, MultiPoly::var(&w, "s")?);
    let bw = FunctionalBundle::from_areas(3, &AreaVector::from_coords(&t, &t, &t, &s), &[rat(1), rat(1)])?;
    c.check(
        "vanishes_on_W",
        bw.f1.is_zero() && bw.f2.is_zero(),
        json!([bw.f1.to_string(), bw.f2.to_string()]),
    );
    // 𝕍: δ = 0
    let v = vars(&["alpha", "beta", "gamma"]);
    let [a, b, g] = ["alpha", "beta", "gamma"].map(|n| MultiPoly::var(&v, n).expect("declared"));
    let bv = FunctionalBundle::from_areas(3, &AreaVector::from_coords(&a, &b, &g, &MultiPoly::zero(&v)), &[rat(1), rat(1), rat(1)])?;
    c.check(
        "vanishes_on_V",
        bv.f1.is_zero() && bv.f2.is_zero(),
        json!([bv.f1.to_string(), bv.f2.to_string()]),
    );
    let (_, n50, _) = counts(engine);
    let mut rng = rng_for(engine, "futaki-vanishing-k3");
    let mut failure = None;
    for _ in 0..n50 {
        let p = k3_sample(&mut rng, Region::P);
        let nb = FunctionalBundle::at_areas(3, &AreaVector::numeric_coords(p.clone()))?;
        let ok = nb.f1.is_zero() && nb.f2.is_zero() && nb.cal_a == nb.first_term;
        if !ok && failure.is_none() {
            failure = Some(json!({"point": point_json(&p), "F": [nb.f1.to_string(), nb.f2.to_string()]}));
        }
    }
    c.check(
        "vanishes_at_V_samples",
        failure.is_none(),
        failure.unwrap_or_else(|| json!({"samples": n50})),
    );
    Ok(c.finish("futaki-vanishing-k3"))
}

/// `d/dt 𝒜(Ω + t c₁)` at `t = 0` computed symbolically from the pipeline.
fn pipeline_first_variation(coords: &[Rational; 4]) -> Result<Rational, CertifyError> {
    let tv = vars(&["t"]);
    let t = MultiPoly::var(&tv, "t")?;
    let base = AreaVector::numeric_coords(coords.clone());
    // c₁ has all six areas equal to 1
    let areas = AreaVector(base.0.clone().map(|p| &MultiPoly::constant(&tv, cv(&p)) + &t));
    let b = FunctionalBundle::from_areas(3, &areas, &[Rational::zero()])?;
    Ok(b.cal_a.partial_derivative("t")?.evaluate(&[Rational::zero()])?)
}

fn first_variation_k3(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let mut c = Checks::new();
    let e = vars(&[]);
    let c1 = CohClass::c1(3, &e);
    let at_c1 = first_variation_along_c1(&c1)?;
    c.check("zero_at_c1", at_c1.is_zero(), rat_json(&at_c1));
    let at_2c1 = first_variation_along_c1(&c1.scale(&rat(2)))?;
    c.check("zero_at_2c1", at_2c1.is_zero(), rat_json(&at_2c1));
    let spot = [rat(2), rat(1), rat(1), rat(0)];
    let v = first_variation_along_c1(&class_of(&spot)?)?;
    c.check("spot_2_1_1_0", v == frac(-16, 25), rat_json(&v));

    let (_, n50, _) = counts(engine);
    let mut rng = rng_for(engine, "first-variation-k3");
    let mut failure = None;
    let mut cross = Vec::new();
    let mut drawn = 0;
    while drawn < n50 {
        let p = if drawn % 2 == 0 {
            k3_sample(&mut rng, Region::P)
        } else {
            // 𝕎: (t, t, t, s) with t + s > 0
            let t = rng.positive_rational(MAX_PART);
            let s = rng.signed_rational(MAX_PART);
            if !(&t + &s).is_positive() {
                continue;
            }
            [t.clone(), t.clone(), t, s]
        };
        let areas = AreaVector::numeric_coords(p.clone());
        if areas.0.iter().all(|a| *a == areas.0[0]) {
            continue;
        }
        drawn += 1;
        let x = class_of(&p)?;
        let val = first_variation_along_c1(&x)?;
        if !val.is_negative() && failure.is_none() {
            failure = Some(json!({"point": point_json(&p), "value": rat_json(&val)}));
        }
        if cross.len() < 4 {
            let direct = pipeline_first_variation(&p)?;
            cross.push((p, val, direct));
        }
    }
    c.check(
        "negative_off_c1",
        failure.is_none(),
        failure.unwrap_or_else(|| json!({"samples": n50})),
    );
    let agree = cross.iter().all(|(_, a, b)| a == b);
    c.check(
        "formula_matches_pipeline_derivative",
        agree,
        json!(cross.iter().map(|(p, a, b)| json!({"point": point_json(p), "formula": rat_json(a), "pipeline": rat_json(b)})).collect::<Vec<_>>()),
    );
    Ok(c.finish("first-variation-k3"))
}

fn reverse_cauchy_schwarz(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let mut c = Checks::new();
    let err = crate::functional::FunctionalError::from;
    let (n100, _, _) = counts(engine);
    let mut rng = rng_for(engine, "reverse-cauchy-schwarz");
    let mut failure = None;
    for i in 0..n100 {
        let x = class_of(&k3_sample(&mut rng, region_cycle(i)))?;
        let y = class_of(&k3_sample(&mut rng, region_cycle(i + 1)))?;
        let (xy, xx, yy) = (cv(&x.pair(&y).map_err(err)?), cv(&x.square()), cv(&y.square()));
        let timelike = xx.is_positive() && yy.is_positive() && xy.is_positive();
        if !(timelike && &xy * &xy > &xx * &yy) && failure.is_none() {
            failure = Some(json!({"x": x.to_string(), "y": y.to_string()}));
        }
    }
    c.check(
        "strict_for_non_proportional",
        failure.is_none(),
        failure.unwrap_or_else(|| json!({"pairs": n100})),
    );
    let mut eq_fail = None;
    let n_prop = n100.div_ceil(10);
    for i in 0..n_prop {
        let x = class_of(&k3_sample(&mut rng, region_cycle(i)))?;
        let y = x.scale(&rng.positive_rational(MAX_PART));
        let (xy, xx, yy) = (cv(&x.pair(&y).map_err(err)?), cv(&x.square()), cv(&y.square()));
        if &xy * &xy != &xx * &yy && eq_fail.is_none() {
            eq_fail = Some(json!({"x": x.to_string(), "y": y.to_string()}));
        }
    }
    c.check(
        "equality_for_proportional",
        eq_fail.is_none(),
        eq_fail.unwrap_or_else(|| json!({"pairs": n_prop})),
    );
    let x = class_of(&[rat(2), rat(1), rat(1), rat(0)])?;
    let c1 = CohClass::c1(3, x.vars());
    let (lhs, rhs) = (cv(&c1.pair(&x).map_err(err)?).pow(2), cv(&c1.square()) * cv(&x.square()));
    c.check(
        "example_2_1_1_0_with_c1",
        lhs > rhs,
        json!({"(c1.x)^2": rat_json(&lhs), "c1^2 x^2": rat_json(&rhs)}),
    );
    Ok(c.finish("reverse-cauchy-schwarz"))
}

fn uniqueness_k3(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let mut c = Checks::new();
    let mut ingredients = serde_json::Map::new();
    let mut all = true;
    for id in [
        "symmetry-k3",
        "convexity-k3",
        "futaki-vanishing-k3",
        "cremona-k3",
        "first-variation-k3",
        "reverse-cauchy-schwarz",
    ] {
        let r = run_lemma(engine, id)?;
        all &= r.status == Status::Pass;
        ingredients.insert(id.into(), json!(r.status.label()));
    }
    c.check("ingredients", all, Value::Object(ingredients));
    let c1 = cal_a_at_areas(3, &CohClass::c1(3, &vars(&[])).to_areas())?;
    c.check("value_at_c1", c1 == rat(6), rat_json(&c1));

    let (n100, _, _) = counts(engine);
    let mut rng = rng_for(engine, "uniqueness-k3");
    let cal_a = &engine.bundle(ConeChart::K3U).cal_a;
    let mut failure = None;
    let mut chart_mismatch = None;
    let mut smallest: Option<(Rational, [Rational; 4])> = None;
    for i in 0..n100 {
        let p = k3_sample(&mut rng, region_cycle(i));
        let areas = AreaVector::numeric_coords(p.clone());
        let val = cal_a_at_areas(3, &areas)?;
        let on_c1 = areas.0.iter().all(|a| *a == areas.0[0]);
        let ok = if on_c1 { val == rat(6) } else { val > rat(6) };
        if !ok && failure.is_none() {
            failure = Some(json!({"point": point_json(&p), "value": rat_json(&val)}));
        }
        if let Some(x) = ConeChart::K3U.coordinates_of(&areas) {
            let via_chart = cal_a.evaluate(&x)?;
            if via_chart != val && chart_mismatch.is_none() {
                chart_mismatch = Some(json!({"point": point_json(&p)}));
            }
        }
        if smallest.as_ref().is_none_or(|(s, _)| val < *s) {
            smallest = Some((val, p));
        }
    }
    c.check(
        "sampled_minimality",
        failure.is_none(),
        json!({
            "samples": n100,
            "regions": ["delta>0", "delta<0", "delta=0"],
            "smallest": smallest.as_ref().map(|(v, p)| json!({"value": rat_json(v), "point": point_json(p)})),
            "counterexample": failure,
        }),
    );
    c.check(
        "chart_agrees_with_polygon",
        chart_mismatch.is_none(),
        chart_mismatch.unwrap_or_else(|| json!(true)),
    );
    c.record(
        "assumption",
        json!("the critical-point deduction uses the splitting of the cone into delta>0, delta<0 and delta=0"),
    );
    Ok(c.finish("uniqueness-k3"))
}

fn cone_decomposition(engine: &Engine) -> Result<LemmaReport, CertifyError> {
    let mut c = Checks::new();
    let (_, _, n20) = counts(engine);
    let mut rng = rng_for(engine, "cone-decomposition");
    let mut ok = true;
    for _ in 0..n20 {
        let s = AreaVector::numeric_coords(k3_sample(&mut rng, Region::U));
        let t = s.cremona();
        ok &= positive_areas(&t) && cv(&t.coords()[3]).is_negative();
    }
    c.check("cremona_maps_delta_positive_to_negative", ok, json!({"samples": n20}));
    c.record(
        "statement",
        json!("every k=3 class has delta>0, delta<0 or delta=0; not certified beyond the Cremona exchange"),
    );
    Ok(c.finish_note("cone-decomposition"))
}
