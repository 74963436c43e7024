//! C ABI over `riccati2d`.
//!
//! Fields are opaque heap handles released with the matching `*_free`.
//! Every call returns an [`R2dStatus`]; on failure the message is available
//! from [`r2d_last_error_message`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use riccati2d::cli::{verify_text, RunOptions};
use riccati2d::riccati::RiccatiProblem;
use riccati2d::{ComplexField, DomainSpec, Error, Point, ScalarField};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum R2dStatus {
    Ok = 0,
    /// Null pointer, bad length or non-UTF-8 string.
    InvalidArgument = 1,
    Parse = 2,
    Domain = 3,
    Vanishing = 4,
    Compatibility = 5,
    NotASolution = 6,
    Config = 7,
    Io = 8,
    /// `r2d_verify` ran but at least one identity failed.
    IdentityFailed = 9,
    Panic = 10,
    Other = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct R2dDomain {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct R2dComplex {
    pub re: f64,
    pub im: f64,
}

pub struct R2dScalarField(ScalarField);

pub struct R2dComplexField(ComplexField);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> R2dStatus {
    match e {
        Error::Parse { .. } => R2dStatus::Parse,
        Error::OutsideDomain(_)
        | Error::Resolution { .. }
        | Error::InvalidDomain(_)
        | Error::DomainMismatch
        | Error::GridFormat { .. } => R2dStatus::Domain,
        Error::Vanishing { .. } | Error::Singularity(_) => R2dStatus::Vanishing,
        Error::Compatibility { .. } => R2dStatus::Compatibility,
        Error::NotASolution { .. } | Error::Unbounded { .. } => R2dStatus::NotASolution,
        Error::ConfigSyntax { .. } | Error::ConfigField { .. } => R2dStatus::Config,
        Error::Io { .. } => R2dStatus::Io,
        _ => R2dStatus::Other,
    }
}

struct Fail(R2dStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn invalid(msg: &str) -> Fail {
    Fail(R2dStatus::InvalidArgument, msg.to_string())
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<R2dStatus, Fail>) -> R2dStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            R2dStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| invalid(&format!("{what} is null")))
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<R2dStatus, Fail> {
    if out.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    out.write(value);
    Ok(R2dStatus::Ok)
}

fn domain(d: &R2dDomain) -> Result<DomainSpec, Fail> {
    Ok(DomainSpec::new(
        d.x_min, d.x_max, d.y_min, d.y_max, d.nx, d.ny,
    )?)
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn r2d_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a real expression in `x`, `y`.
///
/// # Safety
/// `expr` must be a NUL-terminated string, `dom` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn r2d_scalar_parse(
    expr: *const c_char,
    dom: *const R2dDomain,
    out: *mut *mut R2dScalarField,
) -> R2dStatus {
    guard(|| {
        let d = domain(as_ref(dom, "domain")?)?;
        let f = ScalarField::parse(as_str(expr, "expr")?, &d)?;
        put(out, boxed(R2dScalarField(f)), "out")
    })
}

/// Builds a grid field from `len == nx*ny` row-major values (x fastest).
///
/// # Safety
/// `values` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn r2d_scalar_from_grid(
    dom: *const R2dDomain,
    values: *const f64,
    len: usize,
    out: *mut *mut R2dScalarField,
) -> R2dStatus {
    guard(|| {
        let d = domain(as_ref(dom, "domain")?)?;
        if values.is_null() || len != d.nx() * d.ny() {
            return Err(invalid("values must hold nx*ny doubles"));
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        put(
            out,
            boxed(R2dScalarField(ScalarField::from_grid(&d, v)?)),
            "out",
        )
    })
}

/// # Safety
/// `f` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn r2d_scalar_eval(
    f: *const R2dScalarField,
    x: f64,
    y: f64,
    out: *mut f64,
) -> R2dStatus {
    guard(|| {
        let v = as_ref(f, "field")?.0.evaluate(Point { x, y })?;
        put(out, v, "out")
    })
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn r2d_scalar_free(f: *mut R2dScalarField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Parses a complex expression in `x`, `y`, `z`, `i`.
///
/// # Safety
/// As for [`r2d_scalar_parse`].
#[no_mangle]
pub unsafe extern "C" fn r2d_complex_parse(
    expr: *const c_char,
    dom: *const R2dDomain,
    out: *mut *mut R2dComplexField,
) -> R2dStatus {
    guard(|| {
        let d = domain(as_ref(dom, "domain")?)?;
        let f = ComplexField::parse(as_str(expr, "expr")?, &d)?;
        put(out, boxed(R2dComplexField(f)), "out")
    })
}

/// # Safety
/// `f` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn r2d_complex_eval(
    f: *const R2dComplexField,
    x: f64,
    y: f64,
    out: *mut R2dComplex,
) -> R2dStatus {
    guard(|| {
        let v = as_ref(f, "field")?.0.evaluate(Point { x, y })?;
        put(out, R2dComplex { re: v.re, im: v.im }, "out")
    })
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn r2d_complex_free(f: *mut R2dComplexField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

fn problem(nu: *const R2dScalarField) -> Result<RiccatiProblem, Fail> {
    let nu = unsafe { as_ref(nu, "nu")? };
    Ok(RiccatiProblem::new(nu.0.clone())?)
}

/// `Q = ∂_z u / u` for a nonvanishing `u`.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn r2d_log_derivative(
    nu: *const R2dScalarField,
    u: *const R2dScalarField,
    out: *mut *mut R2dComplexField,
) -> R2dStatus {
    guard(|| {
        let q = problem(nu)?.log_derivative(&as_ref(u, "u")?.0)?;
        put(out, boxed(R2dComplexField(q)), "out")
    })
}

/// `u = exp(A[Q])`, normalized to 1 at the domain's base point.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn r2d_exp_reconstruct(
    nu: *const R2dScalarField,
    q: *const R2dComplexField,
    out: *mut *mut R2dScalarField,
) -> R2dStatus {
    guard(|| {
        let u = problem(nu)?.exp_reconstruct(&as_ref(q, "Q")?.0)?;
        put(out, boxed(R2dScalarField(u)), "out")
    })
}

/// Max modulus of `∂_z̄Q + |Q|² − ν/4` over the lattice.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn r2d_riccati_residual_max(
    nu: *const R2dScalarField,
    q: *const R2dComplexField,
    out: *mut f64,
) -> R2dStatus {
    guard(|| {
        let r = problem(nu)?.riccati_residual_max(&as_ref(q, "Q")?.0)?;
        put(out, r, "out")
    })
}

/// Max of `|(−Δ + ν)u|` over the lattice.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn r2d_schrodinger_residual_max(
    nu: *const R2dScalarField,
    u: *const R2dScalarField,
    out: *mut f64,
) -> R2dStatus {
    guard(|| {
        let r = problem(nu)?.schrodinger_residual_max(&as_ref(u, "u")?.0)?;
        put(out, r, "out")
    })
}

/// Darboux partner `v` of `u` generated by the particular solution `f`.
///
/// # Safety
/// Handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn r2d_darboux_v_from_u(
    nu: *const R2dScalarField,
    u: *const R2dScalarField,
    f: *const R2dScalarField,
    out: *mut *mut R2dScalarField,
) -> R2dStatus {
    guard(|| {
        let v = problem(nu)?.darboux_v_from_u(&as_ref(u, "u")?.0, &as_ref(f, "f")?.0)?;
        put(out, boxed(R2dScalarField(v)), "out")
    })
}

/// Runs a verification config given as text. On `OK` or
/// `IDENTITY_FAILED`, `*report_json` receives the JSON report, to be
/// released with [`r2d_string_free`]; otherwise it is set to null.
/// Relative CSV paths resolve against the current directory.
///
/// # Safety
/// `config` must be a NUL-terminated string and `report_json` valid.
#[no_mangle]
pub unsafe extern "C" fn r2d_verify(
    config: *const c_char,
    report_json: *mut *mut c_char,
) -> R2dStatus {
    guard(|| {
        if report_json.is_null() {
            return Err(invalid("report_json is null"));
        }
        report_json.write(ptr::null_mut());
        let report = verify_text(as_str(config, "config")?, None, &RunOptions::default())?;
        let json = CString::new(report.to_json()).map_err(|_| invalid("report contains NUL"))?;
        report_json.write(json.into_raw());
        Ok(if report.pass {
            R2dStatus::Ok
        } else {
            R2dStatus::IdentityFailed
        })
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn r2d_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
