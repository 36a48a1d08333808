//! C ABI for the `gcx` kernel.
//!
//! Forms cross the boundary as opaque `GcxMultiform` handles. Basis
//! elements are addressed by bitmask: bit `i` set means `dx^(i+1)` is a
//! factor, in increasing index order. Generalized vectors are flat arrays
//! of `2 * dim` complex numbers, vector part first.
//!
//! Every fallible call returns a `GcxStatus`. On failure the message is
//! available from `gcx_last_error` on the same thread. Strings returned
//! through `char **` are owned by the caller and released with
//! `gcx_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gcx::multilinear::{GcVector, Multiform};
use gcx::spinor::{self, DEFAULT_TOL};
use gcx::verify::{self, CheckConfig, Group};
use gcx::GcxError;
use num_complex::Complex64 as C64;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotPure = 4,
    Degenerate = 5,
    Parse = 6,
    Internal = 7,
    Panic = 8,
}

/// A complex number.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcxComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for GcxComplex {
    fn from(c: C64) -> Self {
        GcxComplex { re: c.re, im: c.im }
    }
}

impl From<GcxComplex> for C64 {
    fn from(c: GcxComplex) -> Self {
        C64::new(c.re, c.im)
    }
}

/// Opaque mixed-degree complex form.
pub struct GcxMultiform {
    inner: Multiform,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(GcxStatus, String);

impl From<GcxError> for Failure {
    fn from(e: GcxError) -> Self {
        let status = match e {
            GcxError::DimensionMismatch { .. } | GcxError::UnsupportedDimension(_) => GcxStatus::DimensionMismatch,
            GcxError::InvalidArgument(_) | GcxError::OutOfDomain(_) | GcxError::ZeroSpinor(_) => GcxStatus::InvalidArgument,
            GcxError::NotPure { .. } => GcxStatus::NotPure,
            GcxError::Degenerate(_) => GcxStatus::Degenerate,
            GcxError::Parse(_) => GcxStatus::Parse,
            GcxError::MissingJet(_) | GcxError::Internal(_) => GcxStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GcxStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GcxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            GcxStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {msg}"));
            GcxStatus::Panic
        }
    }
}

unsafe fn form_ref<'a>(p: *const GcxMultiform, what: &str) -> Result<&'a Multiform, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(GcxStatus::Parse, format!("{what} is not UTF-8: {e}")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed(inner: Multiform) -> *mut GcxMultiform {
    Box::into_raw(Box::new(GcxMultiform { inner }))
}

fn to_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|e| Failure(GcxStatus::Internal, e.to_string()))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<*mut c_char, Failure> {
    to_c_string(serde_json::to_string(v).map_err(|e| Failure(GcxStatus::Internal, e.to_string()))?)
}

unsafe fn read_vector(p: *const GcxComplex, len: usize, dim: usize) -> Result<GcVector, Failure> {
    if p.is_null() {
        return Err(null("vector"));
    }
    if len != 2 * dim {
        return Err(GcxError::DimensionMismatch { expected: 2 * dim, got: len }.into());
    }
    let coords: Vec<C64> = std::slice::from_raw_parts(p, len).iter().map(|&c| c.into()).collect();
    Ok(GcVector::from_coords(dim, &coords)?)
}

fn check_mask(f: &Multiform, mask: u32) -> Result<(), Failure> {
    if (mask as u64) < (1u64 << f.dim()) {
        Ok(())
    } else {
        Err(Failure(GcxStatus::InvalidArgument, format!("mask {mask:#b} outside dimension {}", f.dim())))
    }
}

/// Creates the zero form in dimension `dim` (2 to 4).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gcx_multiform_new(dim: usize, out: *mut *mut GcxMultiform) -> GcxStatus {
    guard(|| {
        let f = Multiform::zero(dim)?;
        write_out(out, boxed(f), "out")
    })
}

/// Parses a form from JSON: `{"dim": 4, "terms": [{"indices": [1, 2], "re": 1, "im": 0}]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gcx_multiform_from_json(json: *const c_char, out: *mut *mut GcxMultiform) -> GcxStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let f: Multiform = serde_json::from_str(text).map_err(|e| Failure(GcxStatus::Parse, e.to_string()))?;
        write_out(out, boxed(f), "out")
    })
}

/// Serializes a form to JSON.
///
/// # Safety
/// `form` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gcx_multiform_to_json(form: *const GcxMultiform, out: *mut *mut c_char) -> GcxStatus {
    guard(|| {
        let f = form_ref(form, "form")?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_out(out, to_json(f)?, "out")
    })
}

/// Sets the coefficient of the basis element `mask`.
///
/// # Safety
/// `form` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcx_multiform_set(form: *mut GcxMultiform, mask: u32, value: GcxComplex) -> GcxStatus {
    guard(|| {
        let f = form.as_mut().map(|h| &mut h.inner).ok_or_else(|| null("form"))?;
        check_mask(f, mask)?;
        f.set(mask, value.into());
        Ok(())
    })
}

/// Reads the coefficient of the basis element `mask`.
///
/// # Safety
/// `form` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gcx_multiform_get(form: *const GcxMultiform, mask: u32, out: *mut GcxComplex) -> GcxStatus {
    guard(|| {
        let f = form_ref(form, "form")?;
        check_mask(f, mask)?;
        write_out(out, f.coeff(mask).into(), "out")
    })
}

/// Dimension of the underlying space, 0 for a null handle.
///
/// # Safety
/// `form` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcx_multiform_dim(form: *const GcxMultiform) -> usize {
    form.as_ref().map_or(0, |h| h.inner.dim())
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `form` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcx_multiform_free(form: *mut GcxMultiform) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Clifford action `v · rho = ι_X rho + ξ ∧ rho`, written to a new handle.
///
/// # Safety
/// `v` must point to `len` values, `rho` must be a live handle and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gcx_clifford(
    v: *const GcxComplex,
    len: usize,
    rho: *const GcxMultiform,
    out: *mut *mut GcxMultiform,
) -> GcxStatus {
    guard(|| {
        let rho = form_ref(rho, "rho")?;
        let v = read_vector(v, len, rho.dim())?;
        let res = gcx::clifford(&v, rho)?;
        write_out(out, boxed(res), "out")
    })
}

/// Pairing `⟨u, v⟩ = ½(ξ(Y) + η(X))` of two generalized vectors of length `len`.
///
/// # Safety
/// `u` and `v` must point to `len` values and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gcx_pairing(
    u: *const GcxComplex,
    v: *const GcxComplex,
    len: usize,
    out: *mut GcxComplex,
) -> GcxStatus {
    guard(|| {
        if !len.is_multiple_of(2) {
            return Err(Failure(GcxStatus::DimensionMismatch, format!("length {len} is odd")));
        }
        let dim = len / 2;
        let (u, v) = (read_vector(u, len, dim)?, read_vector(v, len, dim)?);
        write_out(out, gcx::pairing(&u, &v)?.into(), "out")
    })
}

/// Purity test: the annihilator of `rho` is maximal isotropic.
///
/// # Safety
/// `rho` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gcx_is_pure(rho: *const GcxMultiform, tol: f64, out: *mut bool) -> GcxStatus {
    guard(|| {
        let rho = form_ref(rho, "rho")?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure(GcxStatus::InvalidArgument, format!("tol must be positive, got {tol}")));
        }
        write_out(out, spinor::is_pure(rho, tol)?, "out")
    })
}

/// Normal form `c e^(B + iω) Ω` of a pure spinor, as JSON.
///
/// # Safety
/// `rho` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gcx_normal_form_json(rho: *const GcxMultiform, out: *mut *mut c_char) -> GcxStatus {
    guard(|| {
        let rho = form_ref(rho, "rho")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let nf = spinor::normal_form(rho, DEFAULT_TOL)?;
        write_out(out, to_json(&nf)?, "out")
    })
}

/// Runs a check group (`algebra`, `local-model`, `surgery`, `quotient`,
/// `locus`, `bfield` or `all`) and returns the reports as a JSON array.
/// A failing check is not an error: inspect `all_pass`.
///
/// # Safety
/// `group` must be a NUL-terminated string, `out_json` and `all_pass`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gcx_run_check(
    group: *const c_char,
    seed: u64,
    samples: usize,
    out_json: *mut *mut c_char,
    all_pass: *mut bool,
) -> GcxStatus {
    guard(|| {
        let name = read_str(group, "group")?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        if all_pass.is_null() {
            return Err(null("all_pass"));
        }
        let groups = Group::parse(name)?;
        let cfg = CheckConfig { seed, samples, ..CheckConfig::default() };
        cfg.validate()?;
        let mut reports = Vec::new();
        for g in groups {
            match verify::run_group(&cfg, g) {
                Ok(r) => reports.extend(r),
                Err((_, e)) => return Err(e.into()),
            }
        }
        let pass = reports.iter().all(|r| r.pass);
        write_out(out_json, to_json(&reports)?, "out_json")?;
        write_out(all_pass, pass, "all_pass")
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gcx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn gcx_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}
