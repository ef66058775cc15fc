//! Machine-checkable certificates and lemma-level verdicts.

pub mod chains;
pub mod lemmas;
pub mod sturm;

use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{Map, Value, json};
use thiserror::Error;

use crate::delpezzo::ConeChart;
use crate::fixture::{
    ComparisonVerdict, FixtureError, FixtureFile, FixtureRecord, compare_against_fixture, load_fixture,
};
use crate::functional::{DiagonalRestriction, FunctionalBundle, FunctionalError, restrict_diagonal};
use crate::poly::{Monomial, MultiPoly, PolyError};
use crate::ratfunc::RatFunc;
use crate::sampling::DEFAULT_SEED;
use crate::scalar::{Rational, format_rational, parse_rational};

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("unknown lemma id `{0}`")]
    UnknownLemma(String),
    #[error("fixture {0} not found (no fixtures directory configured or file missing)")]
    MissingFixture(String),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Sturm(#[from] sturm::SturmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Note,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Note => "NOTE",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub id: String,
    pub status: Status,
    pub witnesses: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl LemmaReport {
    pub fn witness(&self, key: &str) -> Option<&Value> {
        self.witnesses.get(key)
    }

    /// Re-validates every certificate carried in the witnesses without
    /// recomputing the functional. `None` when there is nothing to recheck.
    pub fn recheck(&self) -> Option<bool> {
        let mut any = false;
        let mut ok = true;
        for (k, v) in &self.witnesses {
            let r = if k.starts_with("sturm") {
                sturm::SturmData::recheck_json(v).unwrap_or(false)
            } else if k.starts_with("chain") {
                chains::recheck_chain(v)
            } else if k == "certificate" {
                PositivityCertificate::recheck_json(v)
            } else {
                continue;
            };
            any = true;
            ok &= r;
        }
        any.then_some(ok)
    }
}

/// Accumulates named checks into a report; any false check makes it FAIL and
/// is listed under `failed_checks` alongside its own witness.
#[derive(Debug, Default)]
pub struct Checks {
    witnesses: Map<String, Value>,
    failures: Vec<String>,
}

impl Checks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, name: &str, ok: bool, witness: Value) -> bool {
        self.witnesses.insert(name.to_string(), witness);
        if !ok {
            self.failures.push(name.to_string());
        }
        ok
    }

    pub fn record(&mut self, name: &str, witness: Value) {
        self.witnesses.insert(name.to_string(), witness);
    }

    pub fn finish(mut self, id: &str) -> LemmaReport {
        let status = if self.failures.is_empty() {
            Status::Pass
        } else {
            self.witnesses
                .insert("failed_checks".into(), json!(self.failures));
            Status::Fail
        };
        LemmaReport {
            id: id.to_string(),
            status,
            witnesses: self.witnesses,
            seconds: None,
        }
    }

    pub fn finish_note(mut self, id: &str) -> LemmaReport {
        let mut r = std::mem::take(&mut self).finish(id);
        if r.status == Status::Pass {
            r.status = Status::Note;
        }
        r
    }
}

#[derive(Debug, Clone)]
pub struct CertifyConfig {
    pub sample_count: usize,
    pub isolation_width: Rational,
    pub seed: u64,
    pub fixtures_dir: Option<PathBuf>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            sample_count: 100,
            isolation_width: Rational::new(One::one(), num_bigint::BigInt::from(1u64 << 30)),
            seed: DEFAULT_SEED,
            fixtures_dir: None,
        }
    }
}

/// Shared, lazily built symbolic objects. Safe to use from many threads.
#[derive(Debug, Default)]
pub struct Engine {
    pub config: CertifyConfig,
    k2: OnceLock<FunctionalBundle>,
    k3: OnceLock<FunctionalBundle>,
    d2_k2: OnceLock<(MultiPoly, MultiPoly)>,
    d2_k3: OnceLock<(MultiPoly, MultiPoly)>,
    diag: OnceLock<DiagonalRestriction>,
    pub(crate) memo: OnceLock<std::sync::Mutex<std::collections::BTreeMap<String, LemmaReport>>>,
}

impl Engine {
    pub fn new(config: CertifyConfig) -> Self {
        Engine {
            config,
            ..Default::default()
        }
    }

    pub fn bundle(&self, chart: ConeChart) -> &FunctionalBundle {
        let cell = match chart {
            ConeChart::K2 => &self.k2,
            ConeChart::K3U => &self.k3,
        };
        cell.get_or_init(|| FunctionalBundle::for_chart(chart).expect("chart bundles always build"))
    }

    pub fn convexity_direction(chart: ConeChart) -> Vec<i64> {
        match chart {
            ConeChart::K2 => vec![1, -1],
            ConeChart::K3U => vec![1, -1, 0],
        }
    }

    /// `(numerator, D)` of the second derivative along the convexity direction.
    pub fn second_derivative(&self, chart: ConeChart) -> &(MultiPoly, MultiPoly) {
        let cell = match chart {
            ConeChart::K2 => &self.d2_k2,
            ConeChart::K3U => &self.d2_k3,
        };
        cell.get_or_init(|| {
            self.bundle(chart)
                .cal_a
                .directional_second_derivative_parts(&Self::convexity_direction(chart))
                .expect("direction matches chart")
        })
    }

    pub fn diagonal(&self) -> &DiagonalRestriction {
        self.diag
            .get_or_init(|| restrict_diagonal(&self.bundle(ConeChart::K2).cal_a).expect("k2 functional restricts"))
    }

    pub fn fixture_path(&self, chart: ConeChart, file: &str) -> Option<PathBuf> {
        self.config
            .fixtures_dir
            .as_ref()
            .map(|d| d.join(chart.name()).join(format!("{file}.fix")))
    }

    pub fn load_fixture(&self, chart: ConeChart, file: &str) -> Result<(FixtureFile, RatFunc), CertifyError> {
        let path = self
            .fixture_path(chart, file)
            .ok_or_else(|| CertifyError::MissingFixture(format!("{}/{file}.fix", chart.name())))?;
        if !path.exists() {
            return Err(CertifyError::MissingFixture(path.display().to_string()));
        }
        Ok(load_fixture(&path)?)
    }

    pub fn has_fixtures(&self) -> bool {
        self.config.fixtures_dir.as_deref().is_some_and(Path::is_dir)
    }
}

/// Evidence that a second directional derivative is positive on the open
/// positive orthant: nonnegative nonzero numerator over `D³`, `D` with
/// positive coefficients.
#[derive(Debug, Clone)]
pub struct PositivityCertificate {
    pub direction: Vec<i64>,
    pub numerator: MultiPoly,
    pub denominator_base: MultiPoly,
    pub numerator_min_coeff: Option<Rational>,
    pub witness: Option<(Rational, Monomial)>,
    pub denominator_form: String,
    pub verdict: Status,
}

impl PositivityCertificate {
    pub fn from_parts(direction: &[i64], numerator: &MultiPoly, d: &MultiPoly) -> Self {
        let n = numerator.coefficients_all_nonneg();
        let d_pos = !d.is_zero() && d.terms().all(|(_, c)| c.is_positive());
        let pass = n.all_nonneg && !numerator.is_zero() && d_pos;
        PositivityCertificate {
            direction: direction.to_vec(),
            numerator: numerator.clone(),
            denominator_base: d.clone(),
            numerator_min_coeff: n.min_coefficient,
            witness: n.witness,
            denominator_form: if d_pos {
                "D^3 with D all-positive".into()
            } else {
                "D^3 with D not all-positive".into()
            },
            verdict: if pass { Status::Pass } else { Status::Fail },
        }
    }

    pub fn for_target(target: &RatFunc, direction: &[i64]) -> Result<Self, PolyError> {
        let (n, d) = target.directional_second_derivative_parts(direction)?;
        Ok(Self::from_parts(direction, &n, &d))
    }

    pub fn to_json(&self) -> Value {
        let terms = |p: &MultiPoly| {
            p.terms()
                .map(|(m, c)| json!([m.exponents(), format_rational(c)]))
                .collect::<Vec<_>>()
        };
        let mut v = json!({
            "direction": self.direction,
            "variables": self.numerator.vars().to_vec(),
            "verdict": self.verdict.label(),
            "numerator_term_count": self.numerator.num_terms(),
            "numerator_min_coeff": self.numerator_min_coeff.as_ref().map(format_rational),
            "denominator_form": self.denominator_form,
            "denominator_power": 3,
            "numerator_terms": terms(&self.numerator),
            "denominator_base_terms": terms(&self.denominator_base),
        });
        if let Some((c, m)) = &self.witness {
            v["most_negative"] = json!({
                "coefficient": format_rational(c),
                "monomial": m.render(self.numerator.vars()),
            });
        }
        v
    }

    /// Checks the coefficient signs straight from serialized terms.
    pub fn recheck_json(v: &Value) -> bool {
        let coeffs = |key: &str| -> Option<Vec<Rational>> {
            v[key]
                .as_array()?
                .iter()
                .map(|t| t[1].as_str().and_then(|s| parse_rational(s).ok()))
                .collect()
        };
        let (Some(n), Some(d)) = (coeffs("numerator_terms"), coeffs("denominator_base_terms")) else {
            return false;
        };
        let claims_pass = v["verdict"].as_str() == Some("PASS");
        let holds = !n.is_empty()
            && n.iter().all(|c| !c.is_negative())
            && n.iter().any(|c| !c.is_zero())
            && !d.is_empty()
            && d.iter().all(|c| c.is_positive())
            && v["denominator_power"].as_u64() == Some(3);
        claims_pass == holds
    }
}

/// Compares `computed` with a fixture and, for second-derivative displays
/// that do not match, also tries the unmixed Laplacian in the first two
/// variables so the report can say what the display does equal.
pub fn fixture_record(
    name: &str,
    computed: &RatFunc,
    fixture: &RatFunc,
    laplacian_of: Option<&RatFunc>,
) -> Result<(ComparisonVerdict, FixtureRecord), PolyError> {
    let verdict = compare_against_fixture(computed, fixture)?;
    let mut rec = FixtureRecord::new(name, &verdict);
    if let (ComparisonVerdict::Mismatch { .. }, Some(f)) = (&verdict, laplacian_of) {
        let lap = unmixed_laplacian(f, 2)?;
        let lv = compare_against_fixture(&lap, fixture)?;
        if matches!(lv, ComparisonVerdict::Exact | ComparisonVerdict::Scaled(_)) {
            let c = lv.constant().cloned().unwrap_or_else(Rational::one);
            let v = f.vars();
            rec.note = Some(format!(
                "display equals (d^2/d{0}^2 + d^2/d{1}^2) of the functional divided by {2}, not the requested directional derivative",
                v[0],
                v[1],
                format_rational(&c)
            ));
        }
    }
    Ok((verdict, rec))
}

/// `Σ ∂²f/∂xᵢ²` over the first `n` variables.
pub fn unmixed_laplacian(f: &RatFunc, n: usize) -> Result<RatFunc, PolyError> {
    let nv = f.vars().len();
    let mut acc: Option<RatFunc> = None;
    for i in 0..n.min(nv) {
        let mut e = vec![0i64; nv];
        e[i] = 1;
        let d = f.directional_second_derivative(&e)?;
        acc = Some(match acc {
            None => d,
            Some(a) => a.checked_add(&d)?,
        });
    }
    Ok(acc.unwrap_or_else(|| RatFunc::zero(f.vars())))
}

/// Runs `f` and stamps the elapsed time on the report.
pub fn timed(f: impl FnOnce() -> Result<LemmaReport, CertifyError>) -> Result<LemmaReport, CertifyError> {
    let t = Instant::now();
    let mut r = f()?;
    r.seconds = Some(t.elapsed().as_secs_f64());
    Ok(r)
}

pub(crate) fn rat_json(r: &Rational) -> Value {
    Value::from(format_rational(r))
}

pub(crate) fn point_json(p: &[Rational]) -> Value {
    Value::from(p.iter().map(format_rational).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;

    #[test]
    fn negative_control_fails_with_witness() {
        let v = vars(&["beta", "gamma"]);
        let b = MultiPoly::var(&v, "beta").unwrap();
        let f = RatFunc::from_poly(-&b.pow(2));
        let c = PositivityCertificate::for_target(&f, &[1, 0]).unwrap();
        assert_eq!(c.verdict, Status::Fail);
        assert_eq!(c.witness.as_ref().unwrap().0, crate::scalar::rat(-2));
        // a FAIL certificate rechecks as a faithful FAIL
        assert!(PositivityCertificate::recheck_json(&c.to_json()));
        let mut j = c.to_json();
        j["verdict"] = Value::from("PASS");
        assert!(!PositivityCertificate::recheck_json(&j));
    }

    #[test]
    fn checks_collect_failures() {
        let mut c = Checks::new();
        c.check("a", true, json!(1));
        c.check("b", false, json!("witness"));
        let r = c.finish("demo");
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.witness("failed_checks"), Some(&json!(["b"])));
    }
}
