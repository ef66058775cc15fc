//! C ABI over the verification engine.
//!
//! Every entry point returns a [`DpcertError`] code; on anything other than
//! `DPCERT_ERROR_OK` a message is available from [`dpcert_last_error`] on the
//! same thread. Strings handed out by the library must be released with
//! [`dpcert_string_free`]; engines with [`dpcert_engine_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};
use std::path::PathBuf;
use std::ptr;

use dpcert::certify::lemmas::{critical_interval, run_lemma};
use dpcert::certify::{CertifyConfig, CertifyError, Engine, Status};
use dpcert::cli::{CliError, eval_at};
use dpcert::delpezzo::ConeChart;
use dpcert::scalar::{format_rational, parse_rational};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpcertError {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    UnknownLemma = 4,
    MissingFixture = 5,
    Computation = 6,
    Panic = 7,
}

/// Verdict of one lemma.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpcertStatus {
    Pass = 0,
    Fail = 1,
    Note = 2,
}

/// Opaque engine handle. Caches the symbolic objects between calls.
pub struct DpcertEngine {
    inner: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(code: DpcertError, msg: impl Into<String>) -> DpcertError {
    set_error(msg);
    code
}

fn certify_code(e: &CertifyError) -> DpcertError {
    match e {
        CertifyError::UnknownLemma(_) => DpcertError::UnknownLemma,
        CertifyError::MissingFixture(_) | CertifyError::Fixture(_) => DpcertError::MissingFixture,
        _ => DpcertError::Computation,
    }
}

fn guard(f: impl FnOnce() -> DpcertError) -> DpcertError {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(DpcertError::Panic, "internal panic"))
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, DpcertError> {
    if p.is_null() {
        return Err(fail(DpcertError::NullPointer, format!("{what} is null")));
    }
    // SAFETY: caller guarantees a valid C string
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| fail(DpcertError::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn hand_out(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Library version, static storage.
#[unsafe(no_mangle)]
pub extern "C" fn dpcert_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failing call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[unsafe(no_mangle)]
pub extern "C" fn dpcert_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates an engine. `fixtures_dir` may be null to skip printed-display
/// comparisons; `sample_count` 0 selects the default of 100.
///
/// # Safety
/// `fixtures_dir` must be null or a valid C string; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn dpcert_engine_new(
    sample_count: u32,
    seed: u64,
    fixtures_dir: *const c_char,
    out: *mut *mut DpcertEngine,
) -> DpcertError {
    guard(|| {
        if out.is_null() {
            return fail(DpcertError::NullPointer, "out is null");
        }
        let mut cfg = CertifyConfig {
            seed,
            ..CertifyConfig::default()
        };
        if sample_count > 0 {
            cfg.sample_count = sample_count as usize;
        }
        if !fixtures_dir.is_null() {
            // SAFETY: non-null and caller-provided
            match unsafe { read_str(fixtures_dir, "fixtures_dir") } {
                Ok(d) => cfg.fixtures_dir = Some(PathBuf::from(d)),
                Err(code) => return code,
            }
        }
        let engine = Box::new(DpcertEngine {
            inner: Engine::new(cfg),
        });
        // SAFETY: checked non-null above
        unsafe { *out = Box::into_raw(engine) };
        DpcertError::Ok
    })
}

/// # Safety
/// `engine` must be null or a pointer from [`dpcert_engine_new`] not yet freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn dpcert_engine_free(engine: *mut DpcertEngine) {
    if !engine.is_null() {
        // SAFETY: ownership returns from the caller
        drop(unsafe { Box::from_raw(engine) });
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn dpcert_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by CString::into_raw in this library
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Runs one lemma (id or alias). Writes its verdict to `status` and, when
/// `report_json` is non-null, the JSON report (free with
/// [`dpcert_string_free`]).
///
/// # Safety
/// `engine` must be live, `lemma_id` a valid C string, `status` writable and
/// `report_json` null or writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn dpcert_verify_lemma(
    engine: *const DpcertEngine,
    lemma_id: *const c_char,
    status: *mut DpcertStatus,
    report_json: *mut *mut c_char,
) -> DpcertError {
    guard(|| {
        if engine.is_null() || status.is_null() {
            return fail(DpcertError::NullPointer, "engine or status is null");
        }
        // SAFETY: caller contract
        let id = match unsafe { read_str(lemma_id, "lemma_id") } {
            Ok(s) => s,
            Err(c) => return c,
        };
        // SAFETY: live engine per caller contract
        let e = unsafe { &(*engine).inner };
        match run_lemma(e, id) {
            Ok(r) => {
                let st = match r.status {
                    Status::Pass => DpcertStatus::Pass,
                    Status::Fail => DpcertStatus::Fail,
                    Status::Note => DpcertStatus::Note,
                };
                // SAFETY: checked non-null / caller contract
                unsafe {
                    *status = st;
                    if !report_json.is_null() {
                        *report_json = hand_out(serde_json::to_string(&r).expect("report serializes"));
                    }
                }
                DpcertError::Ok
            }
            Err(err) => fail(certify_code(&err), err.to_string()),
        }
    })
}

/// Exact value of `what` (V, F1, F2, A, B, C, calA) at a comma-separated
/// rational point of chart `k2` or `k3`, as text.
///
/// # Safety
/// All string arguments must be valid C strings; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn dpcert_eval(
    chart: *const c_char,
    point: *const c_char,
    what: *const c_char,
    out: *mut *mut c_char,
) -> DpcertError {
    guard(|| {
        if out.is_null() {
            return fail(DpcertError::NullPointer, "out is null");
        }
        // SAFETY: caller contract
        let args = unsafe { (read_str(chart, "chart"), read_str(point, "point"), read_str(what, "what")) };
        let (chart, point, what) = match args {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return e,
        };
        let Some(chart) = ConeChart::parse(chart) else {
            return fail(DpcertError::InvalidArgument, format!("unknown chart `{chart}`"));
        };
        let mut coords = Vec::new();
        for x in point.split(',') {
            match parse_rational(x.trim()) {
                Ok(r) => coords.push(r),
                Err(e) => return fail(DpcertError::InvalidArgument, e.to_string()),
            }
        }
        match eval_at(chart, &coords, what) {
            Ok(s) => {
                // SAFETY: checked non-null
                unsafe { *out = hand_out(s) };
                DpcertError::Ok
            }
            Err(e @ CliError::Usage(_)) => fail(DpcertError::InvalidArgument, e.to_string()),
            Err(e) => fail(DpcertError::Computation, e.to_string()),
        }
    })
}

/// Isolating interval of the k=2 critical point at width `width` (`p/q`).
/// Endpoints are returned as `p/q` strings.
///
/// # Safety
/// `engine` must be live, `width` a valid C string, `lo`/`hi` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn dpcert_isolate_k2(
    engine: *const DpcertEngine,
    width: *const c_char,
    lo: *mut *mut c_char,
    hi: *mut *mut c_char,
) -> DpcertError {
    guard(|| {
        if engine.is_null() || lo.is_null() || hi.is_null() {
            return fail(DpcertError::NullPointer, "engine, lo or hi is null");
        }
        // SAFETY: caller contract
        let w = match unsafe { read_str(width, "width") }.map(parse_rational) {
            Ok(Ok(w)) if w > num_zero() => w,
            Ok(Ok(_)) => return fail(DpcertError::InvalidArgument, "width must be positive"),
            Ok(Err(e)) => return fail(DpcertError::InvalidArgument, e.to_string()),
            Err(c) => return c,
        };
        // SAFETY: live engine
        let e = unsafe { &(*engine).inner };
        match critical_interval(e, &w) {
            Ok(data) if data.isolations.len() == 1 => {
                let i = &data.isolations[0];
                // SAFETY: checked non-null
                unsafe {
                    *lo = hand_out(format_rational(&i.lo));
                    *hi = hand_out(format_rational(&i.hi));
                }
                DpcertError::Ok
            }
            Ok(data) => fail(
                DpcertError::Computation,
                format!("expected one critical point, found {}", data.isolations.len()),
            ),
            Err(err) => fail(DpcertError::Computation, err.to_string()),
        }
    })
}

fn num_zero() -> dpcert::Rational {
    dpcert::Rational::from_integer(0.into())
}
