//! Command-line front end. `run` returns the process exit code:
//! 0 when everything passed, 1 on any FAIL or MISMATCH, 2 on usage or I/O
//! errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use thiserror::Error;

use crate::certify::lemmas::{LEMMAS, critical_interval};
use crate::certify::{CertifyConfig, CertifyError, Engine};
use crate::delpezzo::{AreaVector, ConeChart};
use crate::functional::{FunctionalBundle, FunctionalError};
use crate::report::{Format, Tasks, build_report, emit_report};
use crate::scalar::{PiScalar, Rational, ScalarError, format_rational, parse_rational};

/// Environment variable naming the config file when `--config` is absent.
pub const CONFIG_ENV: &str = "DPCERT_CONFIG";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed rational `{0}` (expected p/q or an integer)")]
    Rational(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}

#[derive(Debug, Parser)]
#[command(name = "dpcert", version, about = "Exact verification of the Calabi lower-bound functional on toric del Pezzo surfaces")]
pub struct Cli {
    /// TOML run configuration (falls back to $DPCERT_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Samples for the sampled checks.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Sampling seed (decimal or 0x-prefixed hex).
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Directory holding `k2/*.fix` and `k3/*.fix`.
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// json or markdown.
    #[arg(long)]
    pub format: Option<String>,
    /// Omit timing fields so output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run lemma certifications.
    Verify {
        /// Lemma id or alias; repeatable.
        #[arg(long = "lemma")]
        lemmas: Vec<String>,
        /// Run every lemma.
        #[arg(long)]
        all: bool,
        /// List the known lemma ids and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print exact values of the functional's ingredients at a point.
    Eval {
        #[arg(long)]
        chart: String,
        /// Comma-separated rationals: chart coordinates, or (alpha,beta,gamma,delta) for k3.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// V, F1, F2, A, B, C or calA.
        #[arg(long)]
        what: String,
    },
    /// Print the isolating interval of the k=2 critical point.
    Isolate {
        #[arg(long, default_value = "k2")]
        chart: String,
        #[arg(long)]
        width: Option<String>,
    },
    /// Fixture maintenance.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
    /// Run every lemma and fixture comparison (or the configured tasks).
    Report {
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixturesAction {
    /// Compare every known fixture with the computed object.
    Check {
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// On-disk run configuration; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tasks: Option<Vec<String>>,
    pub sample_count: Option<usize>,
    pub isolation_width: Option<String>,
    pub jobs: Option<usize>,
    pub format: Option<String>,
    pub fixtures_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        // relative fixture paths are taken relative to the config file
        Ok(RunConfig {
            fixtures_dir: cfg.fixtures_dir.map(|d| match path.parent() {
                Some(p) if d.is_relative() => p.join(d),
                _ => d,
            }),
            ..cfg
        })
    }
}

/// Effective settings after merging defaults, config file and flags.
#[derive(Debug)]
struct Settings {
    engine: CertifyConfig,
    jobs: usize,
    format: Format,
    tasks: Option<Vec<String>>,
}

fn rational_arg(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| match e {
        ScalarError::DivisionByZero => CliError::Rational(format!("{s} (zero denominator)")),
        _ => CliError::Rational(s.to_string()),
    })
}

fn seed_arg(s: &str) -> Result<u64, CliError> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => s.parse(),
    };
    r.map_err(|_| CliError::Usage(format!("invalid seed `{s}`")))
}

fn format_arg(s: &str) -> Result<Format, CliError> {
    Format::parse(s).ok_or_else(|| CliError::Usage(format!("unknown format `{s}` (json or markdown)")))
}

fn settings(cli: &Cli, out: Option<&OutputArgs>) -> Result<Settings, CliError> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let file = match &path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut engine = CertifyConfig::default();
    if let Some(n) = cli.samples.or(file.sample_count) {
        if n == 0 {
            return Err(CliError::Usage("sample_count must be at least 1".into()));
        }
        engine.sample_count = n;
    }
    if let Some(w) = &file.isolation_width {
        engine.isolation_width = positive_width(w)?;
    }
    engine.seed = match &cli.seed {
        Some(s) => seed_arg(s)?,
        None => file.seed.unwrap_or(engine.seed),
    };
    engine.fixtures_dir = cli
        .fixtures
        .clone()
        .or(file.fixtures_dir)
        .or_else(|| Some(PathBuf::from("fixtures")));
    let format = match out.and_then(|o| o.format.as_deref()).or(file.format.as_deref()) {
        Some(f) => format_arg(f)?,
        None => Format::Json,
    };
    let jobs = cli
        .jobs
        .or(file.jobs)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    Ok(Settings {
        engine,
        jobs,
        format,
        tasks: file.tasks,
    })
}

fn positive_width(s: &str) -> Result<Rational, CliError> {
    let w = rational_arg(s)?;
    if w <= Rational::from_integer(0.into()) {
        return Err(CliError::Usage("isolation width must be positive".into()));
    }
    Ok(w)
}

fn chart_arg(s: &str) -> Result<ConeChart, CliError> {
    ConeChart::parse(s).ok_or_else(|| CliError::Usage(format!("unknown chart `{s}` (k2 or k3)")))
}

fn write_out(out: &OutputArgs, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &out.output {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// Exact value of one ingredient at a point.
pub fn eval_at(chart: ConeChart, point: &[Rational], what: &str) -> Result<String, CliError> {
    let k = chart.k();
    let bundle = match (chart, point.len()) {
        (ConeChart::K2, 2) | (ConeChart::K3U, 3) => {
            let areas = chart.areas().evaluate(point).map_err(FunctionalError::from)?;
            FunctionalBundle::at_areas(k, &areas)?
        }
        (ConeChart::K3U, 4) => {
            FunctionalBundle::at_areas(k, &AreaVector::numeric_coords(point.to_vec().try_into().expect("four")))?
        }
        _ => {
            return Err(CliError::Usage(format!(
                "chart {} expects {} coordinates{}",
                chart.name(),
                chart.nvars(),
                if chart == ConeChart::K3U { " (or 4 with delta)" } else { "" }
            )));
        }
    };
    // the k=2 pentagon has no E3 edge
    let skip = usize::from(chart == ConeChart::K2);
    let outside = |a: &&crate::poly::MultiPoly| a.constant_value().is_none_or(|x| x <= Rational::from_integer(0.into()));
    if let Some(a) = bundle.areas.0.iter().skip(skip).find(outside) {
        return Err(CliError::Usage(format!("point is outside the Kähler cone (area {a})")));
    }
    let val = |r: &crate::ratfunc::RatFunc| r.constant_value().expect("numeric bundle");
    let pi = |p: &crate::functional::PiRatFunc| PiScalar::new(val(&p.value), p.pi_power).to_string();
    Ok(match what {
        "V" => format_rational(&bundle.volume.constant_value().expect("numeric")),
        "F1" => format_rational(&val(&bundle.f1)),
        "F2" => format_rational(&val(&bundle.f2)),
        "A" => pi(&bundle.a),
        "B" => pi(&bundle.b),
        "C" => pi(&bundle.c),
        "calA" => format_rational(&val(&bundle.cal_a)),
        other => return Err(CliError::Usage(format!("unknown quantity `{other}` (V, F1, F2, A, B, C, calA)"))),
    })
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    match &cli.command {
        Command::Verify { lemmas, all, list, out } => {
            if *list {
                for l in LEMMAS {
                    let alias = if l.aliases.is_empty() {
                        String::new()
                    } else {
                        format!(" [{}]", l.aliases.join(", "))
                    };
                    writeln!(stdout, "{}{alias}: {}", l.id, l.summary).map_err(io)?;
                }
                return Ok(true);
            }
            let s = settings(cli, Some(out))?;
            let tasks = if *all {
                Tasks {
                    fixtures: false,
                    ..Tasks::all()
                }
            } else if !lemmas.is_empty() {
                Tasks::from_names(lemmas)?
            } else {
                return Err(CliError::Usage("verify needs --lemma <id> or --all".into()));
            };
            let engine = Engine::new(s.engine);
            let report = build_report(&engine, &tasks, s.jobs, s.format, !out.no_timing)?;
            write_out(out, &emit_report(&report, s.format), stdout)?;
            Ok(report.passed())
        }
        Command::Eval { chart, point, what } => {
            let chart = chart_arg(chart)?;
            let p = point.split(',').map(|x| rational_arg(x.trim())).collect::<Result<Vec<_>, _>>()?;
            writeln!(stdout, "{}", eval_at(chart, &p, what)?).map_err(io)?;
            Ok(true)
        }
        Command::Isolate { chart, width } => {
            if chart_arg(chart)? != ConeChart::K2 {
                return Err(CliError::Usage("isolate supports --chart k2 only".into()));
            }
            let s = settings(cli, None)?;
            let w = match width {
                Some(w) => positive_width(w)?,
                None => s.engine.isolation_width.clone(),
            };
            let engine = Engine::new(s.engine);
            let data = critical_interval(&engine, &w)?;
            let ok = data.queries[0].2 == 1 && data.isolations.len() == 1;
            for i in &data.isolations {
                writeln!(stdout, "({}, {})", format_rational(&i.lo), format_rational(&i.hi)).map_err(io)?;
            }
            Ok(ok)
        }
        Command::Fixtures {
            action: FixturesAction::Check { out },
        } => {
            let s = settings(cli, Some(out))?;
            let engine = Engine::new(s.engine);
            let tasks = Tasks {
                lemmas: vec![],
                fixtures: true,
            };
            let report = build_report(&engine, &tasks, s.jobs, s.format, !out.no_timing)?;
            write_out(out, &emit_report(&report, s.format), stdout)?;
            Ok(report.passed())
        }
        Command::Report { out } => {
            let s = settings(cli, Some(out))?;
            let tasks = match &s.tasks {
                Some(t) => Tasks::from_names(t)?,
                None => Tasks::all(),
            };
            let engine = Engine::new(s.engine);
            let report = build_report(&engine, &tasks, s.jobs, s.format, !out.no_timing)?;
            write_out(out, &emit_report(&report, s.format), stdout)?;
            Ok(report.passed())
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
