//! Run assembly and rendering of verification reports.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::certify::lemmas::{LEMMAS, resolve, run_lemma};
use crate::certify::{CertifyError, Engine, LemmaReport, Status, fixture_record};
use crate::delpezzo::ConeChart;
use crate::fixture::FixtureRecord;
use crate::ratfunc::RatFunc;
use crate::scalar::format_rational;

/// Markdown excerpts keep at most this many terms per polynomial.
pub const MARKDOWN_TERMS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Markdown,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Format::Json),
            "markdown" | "md" => Some(Format::Markdown),
            _ => None,
        }
    }
}

/// The fixture files the tool knows how to reproduce, per chart directory.
pub const FIXTURES: &[(ConeChart, &str)] = &[
    (ConeChart::K2, "A"),
    (ConeChart::K2, "B"),
    (ConeChart::K2, "C"),
    (ConeChart::K2, "F1"),
    (ConeChart::K2, "F2"),
    (ConeChart::K2, "F_beta"),
    (ConeChart::K2, "P"),
    (ConeChart::K2, "Q"),
    (ConeChart::K2, "V"),
    (ConeChart::K2, "calA"),
    (ConeChart::K2, "d2_antidiag"),
    (ConeChart::K3U, "A"),
    (ConeChart::K3U, "B"),
    (ConeChart::K3U, "C"),
    (ConeChart::K3U, "F1"),
    (ConeChart::K3U, "F2"),
    (ConeChart::K3U, "V"),
    (ConeChart::K3U, "calA"),
    (ConeChart::K3U, "d2_alphabeta"),
];

/// The computed object a fixture file is compared with.
fn computed_for(engine: &Engine, chart: ConeChart, file: &str) -> Result<RatFunc, CertifyError> {
    let b = engine.bundle(chart);
    Ok(match file {
        "A" => b.a.value.clone(),
        "B" => b.b.value.clone(),
        "C" => b.c.value.clone(),
        "F1" => b.f1.clone(),
        "F2" => b.f2.clone(),
        "V" => RatFunc::from_poly(b.volume.clone()),
        "calA" => b.cal_a.clone(),
        "F_beta" => engine.diagonal().f.clone(),
        "P" => RatFunc::from_poly(engine.diagonal().p_poly.clone()),
        "Q" => RatFunc::from_poly(engine.diagonal().q_poly.clone()),
        _ => {
            let (n, d) = engine.second_derivative(chart);
            RatFunc::new(n.clone(), d.pow(3))?
        }
    })
}

pub fn check_fixture(engine: &Engine, chart: ConeChart, file: &str) -> Result<FixtureRecord, CertifyError> {
    let (ff, fx) = engine.load_fixture(chart, file)?;
    let computed = computed_for(engine, chart, file)?;
    let lap = file.starts_with("d2").then(|| engine.bundle(chart).cal_a.clone());
    Ok(fixture_record(&ff.name, &computed, &fx, lap.as_ref())?.1)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub tasks: Vec<String>,
    pub sample_count: usize,
    pub isolation_width: String,
    pub jobs: usize,
    pub format: Format,
    pub fixtures_dir: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: String,
    pub config: ConfigEcho,
    pub lemmas: Vec<LemmaReport>,
    pub fixtures: Vec<FixtureRecord>,
    pub aggregate: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_seconds: Option<f64>,
}

fn fixture_fails(r: &FixtureRecord) -> bool {
    r.verdict == "MISMATCH"
}

impl Report {
    pub fn passed(&self) -> bool {
        self.aggregate == Status::Pass
    }
}

/// PASS iff every non-NOTE lemma passed and no fixture mismatched.
pub fn aggregate(lemmas: &[LemmaReport], fixtures: &[FixtureRecord]) -> Status {
    let bad = lemmas.iter().any(|l| l.status == Status::Fail) || fixtures.iter().any(fixture_fails);
    if bad { Status::Fail } else { Status::Pass }
}

/// What a run should cover.
#[derive(Debug, Clone, Default)]
pub struct Tasks {
    pub lemmas: Vec<String>,
    pub fixtures: bool,
}

impl Tasks {
    pub fn all() -> Self {
        Tasks {
            lemmas: LEMMAS.iter().map(|l| l.id.to_string()).collect(),
            fixtures: true,
        }
    }

    /// `all`, lemma ids/aliases, or `fixtures`.
    pub fn from_names(names: &[String]) -> Result<Self, CertifyError> {
        let mut t = Tasks::default();
        for n in names {
            match n.as_str() {
                "all" => return Ok(Self::all()),
                "fixtures" => t.fixtures = true,
                id => {
                    let spec = resolve(id).ok_or_else(|| CertifyError::UnknownLemma(id.to_string()))?;
                    if !t.lemmas.iter().any(|x| x == spec.id) {
                        t.lemmas.push(spec.id.to_string());
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn names(&self) -> Vec<String> {
        let mut v = self.lemmas.clone();
        if self.fixtures {
            v.push("fixtures".into());
        }
        v
    }
}

/// Runs every task on a pool of `jobs` threads and merges in id order.
pub fn build_report(
    engine: &Engine,
    tasks: &Tasks,
    jobs: usize,
    format: Format,
    timing: bool,
) -> Result<Report, CertifyError> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let mut ids = tasks.lemmas.clone();
    ids.sort();
    let (lemmas, fixtures) = pool.install(|| {
        let lemmas: Result<Vec<LemmaReport>, CertifyError> = ids.par_iter().map(|id| run_lemma(engine, id)).collect();
        let fixtures: Result<Vec<FixtureRecord>, CertifyError> = if tasks.fixtures {
            FIXTURES
                .par_iter()
                .map(|(c, f)| check_fixture(engine, *c, f))
                .collect()
        } else {
            Ok(Vec::new())
        };
        (lemmas, fixtures)
    });
    let mut lemmas = lemmas?;
    let mut fixtures = fixtures?;
    fixtures.sort_by(|a, b| a.name.cmp(&b.name));
    if !timing {
        for l in &mut lemmas {
            l.seconds = None;
        }
    }
    let agg = aggregate(&lemmas, &fixtures);
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigEcho {
            tasks: tasks.names(),
            sample_count: engine.config.sample_count,
            isolation_width: format_rational(&engine.config.isolation_width),
            jobs,
            format,
            fixtures_dir: engine.config.fixtures_dir.clone(),
            seed: engine.config.seed,
        },
        lemmas,
        fixtures,
        aggregate: agg,
        total_seconds: timing.then(|| start.elapsed().as_secs_f64()),
    })
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Markdown => render_markdown(report),
    }
}

/// Cuts a rendered polynomial after `max` top-level terms.
pub fn truncate_terms(text: &str, max: usize) -> String {
    let bytes = text.as_bytes();
    let mut depth = 0i32;
    let mut cuts = Vec::new();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > 0 && bytes[i - 1] == b' ' && bytes.get(i + 1) == Some(&b' ') => {
                cuts.push(i - 1)
            }
            _ => {}
        }
    }
    if cuts.len() < max {
        return text.to_string();
    }
    let more = cuts.len() + 1 - max;
    format!("{} …({more} more terms)", &text[..cuts[max - 1]])
}

fn excerpt(v: &Value) -> Value {
    match v {
        Value::String(s) => Value::String(truncate_terms(s, MARKDOWN_TERMS)),
        Value::Array(a) if a.len() > MARKDOWN_TERMS => {
            let mut out: Vec<Value> = a[..MARKDOWN_TERMS].iter().map(excerpt).collect();
            out.push(Value::String(format!("…({} more terms)", a.len() - MARKDOWN_TERMS)));
            Value::Array(out)
        }
        Value::Array(a) => Value::Array(a.iter().map(excerpt).collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, v)| (k.clone(), excerpt(v))).collect()),
        other => other.clone(),
    }
}

fn render_markdown(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Verification report\n");
    let _ = writeln!(s, "- version: {}", r.version);
    let _ = writeln!(s, "- aggregate: **{}**", r.aggregate.label());
    let _ = writeln!(
        s,
        "- samples: {}, isolation width: {}, seed: {:#x}, jobs: {}",
        r.config.sample_count, r.config.isolation_width, r.config.seed, r.config.jobs
    );
    if let Some(t) = r.total_seconds {
        let _ = writeln!(s, "- total runtime: {t:.3} s");
    }
    if !r.lemmas.is_empty() {
        let _ = writeln!(s, "\n## Lemmas\n\n| id | status | seconds |\n|---|---|---|");
        for l in &r.lemmas {
            let secs = l.seconds.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(s, "| {} | {} | {} |", l.id, l.status.label(), secs);
        }
        for l in &r.lemmas {
            let _ = writeln!(s, "\n### {} ({})\n", l.id, l.status.label());
            for (k, v) in &l.witnesses {
                let text = match excerpt(v) {
                    Value::String(x) => x,
                    other => serde_json::to_string(&other).expect("json"),
                };
                let _ = writeln!(s, "- `{k}`: {text}");
            }
        }
    }
    if !r.fixtures.is_empty() {
        let _ = writeln!(s, "\n## Fixtures\n\n| name | verdict | constant | note |\n|---|---|---|---|");
        for f in &r.fixtures {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} |",
                f.name,
                f.verdict,
                f.constant.as_deref().unwrap_or(""),
                f.note.as_deref().unwrap_or("")
            );
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_marks_dropped_terms() {
        let p = (0..45).map(|i| format!("x^{i}")).collect::<Vec<_>>().join(" + ");
        let t = truncate_terms(&p, 40);
        assert!(t.ends_with("…(5 more terms)"), "{t}");
        assert!(t.contains("x^39") && !t.contains("x^40"));
        assert_eq!(truncate_terms("a - (b + c)", 1), "a …(1 more terms)");
        assert_eq!(truncate_terms("a + b", 40), "a + b");
    }

    #[test]
    fn empty_run_passes() {
        let e = Engine::default();
        let r = build_report(&e, &Tasks::default(), 1, Format::Json, false).unwrap();
        assert_eq!(r.aggregate, Status::Pass);
        assert!(r.lemmas.is_empty() && r.fixtures.is_empty());
    }
}
