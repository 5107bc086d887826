//! C ABI for `gext`.
//!
//! Documents and reports are opaque handles owned by the caller and released
//! with their `_free` functions. Every function returns a [`GextStatus`];
//! on failure, [`gext_last_error`] describes the error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use gext::algebra::TwistedAlgebra;
use gext::cli::{self, Options, Settings};
use gext::cyclic::{cyclic_decompose, cyclic_extension};
use gext::doc::{parse_document, Document};
use gext::error::Error;
use gext::fixtures;
use gext::report::Report;
use num_complex::Complex64;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GextStatus {
    Ok = 0,
    /// The call succeeded but a check in the report failed.
    CheckFailed = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    Parse = 4,
    InvalidGroupoid = 5,
    InvalidArgument = 6,
    Precondition = 7,
    IsotropyObstruction = 8,
    NotRootOfUnity = 9,
    WindowTooSmall = 10,
    HypothesesNotMet = 11,
    BufferTooSmall = 12,
    Internal = 13,
    Panic = 14,
}

/// A parsed document.
pub struct GextDocument {
    doc: Document,
    name: String,
}

/// The outcome of a command.
pub struct GextReport {
    report: Report,
}

/// Run parameters. Fields flagged off by their `has_` member, and `k == 0`,
/// fall back to the document's parameters.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GextOptions {
    pub seed: u64,
    pub samples: u64,
    pub k: u32,
    pub has_power: bool,
    pub power: i64,
    pub has_modes: bool,
    pub modes_start: i64,
    pub modes_end: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> GextStatus {
    match e {
        Error::Parse { .. } => GextStatus::Parse,
        Error::InvalidGroupoid(_) => GextStatus::InvalidGroupoid,
        Error::InvalidArgument(_) | Error::UnknownUnit(_) | Error::TagMismatch(_) => GextStatus::InvalidArgument,
        Error::Precondition(_) | Error::ExactAnglesRequired | Error::MissingCechValue { .. } => {
            GextStatus::Precondition
        }
        Error::IsotropyObstruction { .. } => GextStatus::IsotropyObstruction,
        Error::NotRootOfUnity { .. } => GextStatus::NotRootOfUnity,
        Error::WindowTooSmall { .. } => GextStatus::WindowTooSmall,
        Error::HypothesesNotMet(_) => GextStatus::HypothesesNotMet,
        Error::Internal(_) => GextStatus::Internal,
    }
}

struct Failure(GextStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<GextStatus, Failure>) -> GextStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GextStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(GextStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GextStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(GextStatus::NullPointer, "null handle".into()))
}

fn null_out() -> Failure {
    Failure(GextStatus::NullPointer, "null output pointer".into())
}

/// The message for the last failure on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn gext_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Default options: seed 0, 100 samples, everything else from the document.
#[no_mangle]
pub extern "C" fn gext_options_default() -> GextOptions {
    GextOptions {
        seed: cli::DEFAULT_SEED,
        samples: cli::DEFAULT_SAMPLES as u64,
        k: 0,
        has_power: false,
        power: 0,
        has_modes: false,
        modes_start: 0,
        modes_end: 0,
    }
}

/// Parses a JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gext_document_parse(json: *const c_char, out: *mut *mut GextDocument) -> GextStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null_out)?;
        let doc = parse_document(text(json)?)?;
        *out = Box::into_raw(Box::new(GextDocument { doc, name: "document".into() }));
        Ok(GextStatus::Ok)
    })
}

/// Loads a bundled fixture by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gext_document_fixture(name: *const c_char, out: *mut *mut GextDocument) -> GextStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null_out)?;
        let name = text(name)?;
        let doc = fixtures::load_from(None, name)?;
        *out = Box::into_raw(Box::new(GextDocument { doc, name: name.to_string() }));
        Ok(GextStatus::Ok)
    })
}

/// # Safety
/// `doc` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gext_document_free(doc: *mut GextDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Unit and arrow counts of the document's groupoid.
///
/// # Safety
/// `doc` must be a live handle; `units` and `arrows` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn gext_document_size(doc: *const GextDocument, units: *mut usize, arrows: *mut usize) -> GextStatus {
    guard(|| {
        let d = handle(doc)?;
        *units.as_mut().ok_or_else(null_out)? = d.doc.groupoid.num_units();
        *arrows.as_mut().ok_or_else(null_out)? = d.doc.groupoid.num_arrows();
        Ok(GextStatus::Ok)
    })
}

fn cli_options(o: &GextOptions) -> Options {
    Options {
        seed: Some(o.seed),
        samples: Some(o.samples as usize),
        modes: o.has_modes.then(|| format!("{}..{}", o.modes_start, o.modes_end)),
        k: (o.k != 0).then_some(o.k),
        ..Options::default()
    }
}

/// Runs a command by its command-line name (`validate`, `normalize`,
/// `trivialize`, `algebra`, `decompose`, `cyclic-oracle`, `morita`,
/// `verify-all`). Returns `Ok` or `CheckFailed` with `*out` set, or an
/// error status with `*out` untouched.
///
/// # Safety
/// `doc` must be a live handle, `command` a NUL-terminated string, `options`
/// null or readable, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gext_run(
    doc: *const GextDocument,
    command: *const c_char,
    options: *const GextOptions,
    out: *mut *mut GextReport,
) -> GextStatus {
    guard(|| {
        let d = handle(doc)?;
        let command = text(command)?;
        let out = out.as_mut().ok_or_else(null_out)?;
        let o = options.as_ref().copied().unwrap_or_else(|| gext_options_default());
        let opts = cli_options(&o);
        let settings = || Settings::resolve(&opts, &d.doc, o.has_power.then_some(o.power));
        let (doc, name) = (&d.doc, d.name.as_str());
        let report = match command {
            "validate" => cli::cmd_validate(doc, name),
            "normalize" => cli::cmd_normalize(doc, name)?,
            "trivialize" => cli::cmd_trivialize(doc, name)?,
            "algebra" => cli::cmd_algebra(doc, name, &settings()?)?,
            "decompose" => cli::cmd_decompose(doc, name, &settings()?)?,
            "cyclic-oracle" => cli::cmd_cyclic_oracle(doc, name, &settings()?)?,
            "morita" => cli::cmd_morita(doc, name, &settings()?)?,
            "verify-all" => cli::cmd_verify_all(&[(name.to_string(), doc.clone())], name, &opts)?,
            other => return Err(Failure(GextStatus::InvalidArgument, format!("unknown command {other:?}"))),
        };
        let status = if report.passed { GextStatus::Ok } else { GextStatus::CheckFailed };
        *out = Box::into_raw(Box::new(GextReport { report }));
        Ok(status)
    })
}

/// Runs every check on all bundled fixtures and on random instances.
///
/// # Safety
/// `options` must be null or readable, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gext_verify_fixtures(options: *const GextOptions, out: *mut *mut GextReport) -> GextStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null_out)?;
        let o = options.as_ref().copied().unwrap_or_else(|| gext_options_default());
        let docs = fixtures::NAMES
            .iter()
            .map(|n| Ok((n.to_string(), fixtures::load_from(None, n)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let report = cli::cmd_verify_all(&docs, "fixtures", &cli_options(&o))?;
        let status = if report.passed { GextStatus::Ok } else { GextStatus::CheckFailed };
        *out = Box::into_raw(Box::new(GextReport { report }));
        Ok(status)
    })
}

/// # Safety
/// `report` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gext_report_free(report: *mut GextReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Whether every check passed, and how many checks there are.
///
/// # Safety
/// `report` must be a live handle; `passed` and `checks` writable.
#[no_mangle]
pub unsafe extern "C" fn gext_report_summary(report: *const GextReport, passed: *mut bool, checks: *mut usize) -> GextStatus {
    guard(|| {
        let r = &handle(report)?.report;
        *passed.as_mut().ok_or_else(null_out)? = r.passed;
        *checks.as_mut().ok_or_else(null_out)? = r.checks.len();
        Ok(GextStatus::Ok)
    })
}

/// The machine-readable report as a new string; free it with
/// [`gext_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gext_report_json(report: *const GextReport, out: *mut *mut c_char) -> GextStatus {
    guard(|| {
        let r = &handle(report)?.report;
        let out = out.as_mut().ok_or_else(null_out)?;
        *out = CString::new(r.to_machine())
            .map_err(|_| Failure(GextStatus::Internal, "report contains NUL".into()))?
            .into_raw();
        Ok(GextStatus::Ok)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gext_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reduced norm of an element of `C(G, w^power)`, given as `2 * arrows`
/// interleaved real and imaginary parts in arrow order.
///
/// # Safety
/// `doc` must be a live handle, `coeffs` readable for `len` doubles, and
/// `norm` writable.
#[no_mangle]
pub unsafe extern "C" fn gext_reduced_norm(
    doc: *const GextDocument,
    power: i64,
    coeffs: *const f64,
    len: usize,
    norm: *mut f64,
) -> GextStatus {
    guard(|| {
        let d = handle(doc)?;
        let norm = norm.as_mut().ok_or_else(null_out)?;
        if coeffs.is_null() {
            return Err(Failure(GextStatus::NullPointer, "null coefficients".into()));
        }
        let n = d.doc.groupoid.num_arrows();
        if len != 2 * n {
            return Err(Failure(GextStatus::InvalidArgument, format!("expected {} doubles, got {len}", 2 * n)));
        }
        let raw = std::slice::from_raw_parts(coeffs, len);
        let values = raw.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let w = match &d.doc.cocycle {
            Some(w) => w.clone(),
            None => Arc::new(gext::cocycle::TwoCocycle::trivial(d.doc.groupoid.clone())),
        };
        let alg = TwistedAlgebra::new(w, power)?;
        *norm = alg.reduced_norm(&alg.element(values)?)?.reduced_norm;
        Ok(GextStatus::Ok)
    })
}

/// Summand and center dimensions of the finite cyclic extension of order
/// `k`, one pair per mode `0..k`. Writes `k` to `*count`; returns
/// `BufferTooSmall` if `capacity < k`.
///
/// # Safety
/// `doc` must be a live handle, `dims` and `centers` writable for
/// `capacity` entries, and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn gext_cyclic_summands(
    doc: *const GextDocument,
    k: u32,
    dims: *mut usize,
    centers: *mut usize,
    capacity: usize,
    count: *mut usize,
) -> GextStatus {
    guard(|| {
        let d = handle(doc)?;
        let count = count.as_mut().ok_or_else(null_out)?;
        let w = d
            .doc
            .cocycle
            .clone()
            .ok_or_else(|| Failure(GextStatus::InvalidArgument, "document has no cocycle".into()))?;
        let cert = cyclic_decompose(&cyclic_extension(&w, k)?)?;
        *count = cert.summands.len();
        if capacity < cert.summands.len() {
            return Err(Failure(GextStatus::BufferTooSmall, format!("need room for {} summands", cert.summands.len())));
        }
        if dims.is_null() || centers.is_null() {
            return Err(null_out());
        }
        for (i, s) in cert.summands.iter().enumerate() {
            ptr::write(dims.add(i), s.dimension);
            ptr::write(centers.add(i), s.center_dimension);
        }
        Ok(if cert.passed() { GextStatus::Ok } else { GextStatus::CheckFailed })
    })
}
