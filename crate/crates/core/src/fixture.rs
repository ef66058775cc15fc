//! Golden fixtures: hand-transcribed displays stored as small INI-like files.
//!
//! ```text
//! [meta]
//! name = calA_k2
//! vars = beta, gamma
//! provenance = free text
//!
//! [numerator]
//! 3 (3 + 28 gamma + ...)
//!
//! [denominator]
//! 1 + 10 gamma + ...
//! ```
//!
//! An empty `[denominator]` section means `1`.

use std::fs;
use std::path::{Path, PathBuf};

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::parser::{ParseError, parse_expression};
use crate::poly::{MultiPoly, PolyError, Vars};
use crate::ratfunc::RatFunc;
use crate::sampling::SampleRng;
use crate::scalar::{Rational, format_rational};

pub const COMPARISON_SAMPLES: usize = 100;
const COMPARISON_SEED: u64 = 0xF1C5_7E57;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("fixture {name}: missing section [{section}]")]
    MissingSection { name: String, section: &'static str },
    #[error("fixture {name}: missing meta key `{key}`")]
    MissingKey { name: String, key: &'static str },
    #[error("fixture {name}: [{section}] {source}")]
    Parse {
        name: String,
        section: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("fixture {name}: {source}")]
    Poly {
        name: String,
        #[source]
        source: PolyError,
    },
    #[error("fixture {name}: {message}")]
    Malformed { name: String, message: String },
}

#[derive(Debug, Clone)]
pub struct FixtureFile {
    pub name: String,
    pub variables: Vec<String>,
    pub numerator_text: String,
    pub denominator_text: String,
    pub provenance: String,
    pub path: Option<PathBuf>,
}

impl FixtureFile {
    pub fn parse_str(text: &str, origin: &str) -> Result<Self, FixtureError> {
        let mut section: Option<String> = None;
        let mut meta: Vec<(String, String)> = Vec::new();
        let mut num: Option<String> = None;
        let mut den: Option<String> = None;
        for raw in text.lines() {
            let line = raw.trim();
            if line.starts_with('[') && line.ends_with(']') {
                let s = line[1..line.len() - 1].trim().to_string();
                match s.as_str() {
                    "numerator" => num = Some(String::new()),
                    "denominator" => den = Some(String::new()),
                    "meta" => {}
                    other => {
                        return Err(FixtureError::Malformed {
                            name: origin.to_string(),
                            message: format!("unknown section [{other}]"),
                        });
                    }
                }
                section = Some(s);
                continue;
            }
            match section.as_deref() {
                Some("meta") => {
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let (k, v) = line.split_once('=').ok_or_else(|| FixtureError::Malformed {
                        name: origin.to_string(),
                        message: format!("expected `key = value` in [meta], got `{line}`"),
                    })?;
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                Some("numerator") => push_line(num.as_mut().unwrap(), raw),
                Some("denominator") => push_line(den.as_mut().unwrap(), raw),
                _ => {
                    if !line.is_empty() && !line.starts_with('#') {
                        return Err(FixtureError::Malformed {
                            name: origin.to_string(),
                            message: "content before the first section".into(),
                        });
                    }
                }
            }
        }
        let get = |key: &'static str| {
            meta.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.clone())
                .ok_or(key)
        };
        if section.is_none() || !text.contains("[meta]") {
            return Err(FixtureError::MissingSection {
                name: origin.to_string(),
                section: "meta",
            });
        }
        let name = get("name").map_err(|key| FixtureError::MissingKey {
            name: origin.to_string(),
            key,
        })?;
        let vars = get("vars").map_err(|key| FixtureError::MissingKey {
            name: name.clone(),
            key,
        })?;
        let provenance = get("provenance").map_err(|key| FixtureError::MissingKey {
            name: name.clone(),
            key,
        })?;
        let numerator_text = num.ok_or_else(|| FixtureError::MissingSection {
            name: name.clone(),
            section: "numerator",
        })?;
        let denominator_text = den.ok_or_else(|| FixtureError::MissingSection {
            name: name.clone(),
            section: "denominator",
        })?;
        Ok(FixtureFile {
            variables: vars
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
            name,
            numerator_text,
            denominator_text,
            provenance,
            path: None,
        })
    }

    pub fn vars(&self) -> Vars {
        self.variables.clone().into()
    }

    /// Parses both sections into a canonical rational function.
    pub fn to_ratfunc(&self) -> Result<RatFunc, FixtureError> {
        let vars = self.vars();
        let parse = |text: &str, section: &'static str| {
            parse_expression(text, &vars).map_err(|source| FixtureError::Parse {
                name: self.name.clone(),
                section,
                source,
            })
        };
        let num = parse(&self.numerator_text, "numerator")?;
        let den = if self.denominator_text.trim().is_empty() {
            MultiPoly::one(&vars)
        } else {
            parse(&self.denominator_text, "denominator")?
        };
        RatFunc::new(num, den).map_err(|source| FixtureError::Poly {
            name: self.name.clone(),
            source,
        })
    }
}

fn push_line(buf: &mut String, raw: &str) {
    if raw.trim_start().starts_with('#') {
        return;
    }
    buf.push_str(raw);
    buf.push('\n');
}

pub fn load_fixture(path: &Path) -> Result<(FixtureFile, RatFunc), FixtureError> {
    let text = fs::read_to_string(path).map_err(|source| FixtureError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut f = FixtureFile::parse_str(&text, &path.display().to_string())?;
    f.path = Some(path.to_path_buf());
    let r = f.to_ratfunc()?;
    Ok((f, r))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComparisonVerdict {
    Exact,
    /// `computed = constant · fixture` with a positive rational constant.
    Scaled(Rational),
    /// Equal at every sample point but not symbolically.
    SampledOnly,
    /// A point where the two sides differ.
    Mismatch {
        point: Vec<Rational>,
        computed: Option<Rational>,
        fixture: Option<Rational>,
    },
}

impl ComparisonVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Exact => "EXACT",
            Self::Scaled(_) => "SCALED",
            Self::SampledOnly => "SAMPLED_ONLY",
            Self::Mismatch { .. } => "MISMATCH",
        }
    }

    pub fn constant(&self) -> Option<&Rational> {
        match self {
            Self::Scaled(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_match(&self) -> bool {
        matches!(self, Self::Exact | Self::Scaled(_))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureRecord {
    pub name: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FixtureRecord {
    pub fn new(name: &str, verdict: &ComparisonVerdict) -> Self {
        FixtureRecord {
            name: name.to_string(),
            verdict: verdict.label().to_string(),
            constant: verdict.constant().map(format_rational),
            witness: match verdict {
                ComparisonVerdict::Mismatch { point, .. } => {
                    Some(point.iter().map(format_rational).collect())
                }
                _ => None,
            },
            note: None,
        }
    }
}

/// `a·q == c·b·p` for `a/p` and `b/q`, short-cutting when the denominators
/// are proportional so the large cross products are never formed.
fn scaled_equal(x: &RatFunc, y: &RatFunc, c: &Rational) -> Result<bool, PolyError> {
    let (xn, xd) = (x.numerator(), x.denominator());
    let (yn, yd) = (y.numerator(), y.denominator());
    if let (Some((xm, xc)), Some((ym, yc))) = (xd.leading_term(), yd.leading_term()) {
        if xm == ym && xd.num_terms() == yd.num_terms() {
            let k = xc / yc;
            if *xd == yd.scale(&k) {
                // x = xn / (k·yd), so x = c·y  ⇔  xn = c·k·yn
                return Ok(*xn == yn.scale(&(c * &k)));
            }
        }
    }
    Ok(xn.checked_mul(yd)? == yn.checked_mul(xd)?.scale(c))
}

/// Classifies `computed` against `fixture` (same variable list required).
pub fn compare_against_fixture(
    computed: &RatFunc,
    fixture: &RatFunc,
) -> Result<ComparisonVerdict, PolyError> {
    if computed.vars()[..] != fixture.vars()[..] {
        return Err(PolyError::VariableMismatch {
            left: computed.vars().join(","),
            right: fixture.vars().join(","),
        });
    }
    let one = Rational::from_integer(1.into());
    if scaled_equal(computed, fixture, &one)? {
        return Ok(ComparisonVerdict::Exact);
    }
    let mut rng = SampleRng::new(COMPARISON_SEED);
    let n = computed.vars().len();
    let points: Vec<Vec<Rational>> = (0..COMPARISON_SAMPLES)
        .map(|_| (0..n).map(|_| rng.positive_rational(50)).collect())
        .collect();
    let eval = |f: &RatFunc, p: &[Rational]| f.evaluate(p).ok();

    // candidate scale from the first point where both sides are finite and nonzero
    let ratio = points.iter().find_map(|p| {
        let (a, b) = (eval(computed, p)?, eval(fixture, p)?);
        (!a.is_zero() && !b.is_zero()).then(|| a / b)
    });
    if let Some(c) = &ratio {
        if c.is_positive() && scaled_equal(computed, fixture, c)? {
            return Ok(ComparisonVerdict::Scaled(c.clone()));
        }
    }
    for p in &points {
        let (a, b) = (eval(computed, p), eval(fixture, p));
        if a != b {
            return Ok(ComparisonVerdict::Mismatch {
                point: p.clone(),
                computed: a,
                fixture: b,
            });
        }
    }
    Ok(ComparisonVerdict::SampledOnly)
}
