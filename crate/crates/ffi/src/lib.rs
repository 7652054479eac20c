//! C ABI for soficonv.
//!
//! Every fallible function returns a [`SoficonvStatus`]; on failure the
//! thread-local last error holds a machine-readable code and a message.
//! Strings returned through `char **out` are owned by the caller and must be
//! released with [`soficonv_string_free`]. Handles are released with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use soficonv::algebra::FieldDescriptor;
use soficonv::bernoulli::{count_representations, BernoulliSpec};
use soficonv::pisot::{carry_states, quasi_expansion, PisotBase, RedundancyCounter, Window};
use soficonv::rational::parse_rational;
use soficonv::sofic::{LinearRepresentation, LinearRepresentationJson};
use soficonv::spectrum::{alpha0_estimate, stern};
use soficonv::words::format_word;
use soficonv::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoficonvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed input: unparsable numbers, JSON or words.
    InvalidInput = 3,
    /// Well-formed input outside the domain of the operation.
    DomainError = 4,
    /// A resource cap such as the carry-state cap was exceeded.
    CapExceeded = 5,
    Panic = 6,
}

/// Base `β` with its digit count; created by [`soficonv_pisot_base_new`].
pub struct SoficonvPisotBase {
    inner: PisotBase,
}

/// Validated linear representation; created by [`soficonv_linrep_from_json`].
pub struct SoficonvLinearRepresentation {
    inner: LinearRepresentation,
}

struct LastError {
    code: CString,
    message: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

enum Failure {
    Status(SoficonvStatus, &'static str, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn set_last_error(code: &str, message: String) {
    let clean = |s: String| CString::new(s.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(LastError {
            code: clean(code.to_owned()),
            message: clean(message),
        });
    });
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SoficonvStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SoficonvStatus::Ok,
        Ok(Err(Failure::Status(status, code, message))) => {
            set_last_error(code, message);
            status
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.code(), e.to_string());
            match e.exit_code() {
                2 => SoficonvStatus::InvalidInput,
                4 => SoficonvStatus::CapExceeded,
                _ => SoficonvStatus::DomainError,
            }
        }
        Err(_) => {
            set_last_error("PANIC", "internal panic".into());
            SoficonvStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(
        SoficonvStatus::NullPointer,
        "NULL_POINTER",
        format!("{what} is null"),
    )
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure::Status(
            SoficonvStatus::InvalidUtf8,
            "INVALID_UTF8",
            format!("{what} is not UTF-8"),
        )
    })
}

unsafe fn read_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s)
        .map_err(|_| Failure::Status(SoficonvStatus::Panic, "PANIC", "interior NUL".into()))?;
    write_out(out, c.into_raw())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn soficonv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Code of the last error on this thread (e.g. `"NOT_FINITE_RENYI"`), or null.
/// Valid until the next soficonv call on the same thread.
#[no_mangle]
pub extern "C" fn soficonv_last_error_code() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |e| e.code.as_ptr())
    })
}

/// Message of the last error on this thread, or null.
#[no_mangle]
pub extern "C" fn soficonv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |e| e.message.as_ptr())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from a soficonv function and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn soficonv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of base-2 representations of `n` with digits `{0, 1, 2}`.
#[no_mangle]
pub extern "C" fn soficonv_stern(n: u64) -> u64 {
    stern(n)
}

/// Number of base-`b` representations of `n` with digits `{0..d−1}`, as a decimal string.
///
/// # Safety
/// `out` must be a valid pointer to a `char *`.
#[no_mangle]
pub unsafe extern "C" fn soficonv_bernoulli_count(
    b: usize,
    d: usize,
    n: u64,
    out: *mut *mut c_char,
) -> SoficonvStatus {
    guard(|| {
        let spec = BernoulliSpec::uniform(b, d)?;
        write_string(out, count_representations(&spec, n).to_string())
    })
}

/// Mean of `log f(n) / log 2^{K−1}` over `[2^{K−1}, 2^K)`.
///
/// # Safety
/// `out` must be a valid pointer to a `double`.
#[no_mangle]
pub unsafe extern "C" fn soficonv_alpha0(k: u32, out: *mut f64) -> SoficonvStatus {
    guard(|| write_out(out, alpha0_estimate(k)?))
}

/// Creates a base from the minimal polynomial (`len` integer coefficients,
/// constant term first), an isolating interval given as decimal or `p/q`
/// strings, and the digit count `d`.
///
/// # Safety
/// `minpoly` must point to `len` integers; `lo` and `hi` must be
/// NUL-terminated strings; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soficonv_pisot_base_new(
    minpoly: *const i64,
    len: usize,
    lo: *const c_char,
    hi: *const c_char,
    d: usize,
    state_cap: usize,
    out: *mut *mut SoficonvPisotBase,
) -> SoficonvStatus {
    guard(|| {
        let coeffs: Vec<BigInt> = read_slice(minpoly, len, "minpoly")?
            .iter()
            .map(|&c| BigInt::from(c))
            .collect();
        let lo = parse_rational(read_str(lo, "lo")?)?;
        let hi = parse_rational(read_str(hi, "hi")?)?;
        let field = FieldDescriptor::new(coeffs, lo, hi)?;
        let inner = PisotBase::new(&field, d)?.with_state_cap(state_cap);
        write_out(out, Box::into_raw(Box::new(SoficonvPisotBase { inner })))
    })
}

/// # Safety
/// `base` must come from [`soficonv_pisot_base_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn soficonv_pisot_base_free(base: *mut SoficonvPisotBase) {
    if !base.is_null() {
        drop(Box::from_raw(base));
    }
}

unsafe fn base_ref<'a>(base: *const SoficonvPisotBase) -> Result<&'a PisotBase, Failure> {
    base.as_ref().map(|b| &b.inner).ok_or_else(|| null("base"))
}

/// Quasi-expansion of 1 as JSON `{"digits":"10","T":2}`.
///
/// # Safety
/// `base` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soficonv_pisot_quasi_expansion(
    base: *const SoficonvPisotBase,
    out: *mut *mut c_char,
) -> SoficonvStatus {
    guard(|| {
        let q = quasi_expansion(base_ref(base)?)?;
        let json = serde_json::json!({"digits": format_word(&q.digits), "T": q.period});
        write_string(out, json.to_string())
    })
}

/// Carry states of `window` (`"open"`, `"half-open"` or `"symmetric"`) as a
/// JSON array of coordinate vectors in the power basis.
///
/// # Safety
/// `base` must be a live handle, `window` a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soficonv_pisot_carry_states(
    base: *const SoficonvPisotBase,
    window: *const c_char,
    out: *mut *mut c_char,
) -> SoficonvStatus {
    guard(|| {
        let window: Window = read_str(window, "window")?.parse()?;
        let states = carry_states(base_ref(base)?, window)?;
        let coords: Vec<Vec<String>> = states
            .iter()
            .map(|s| s.coeffs().iter().map(ToString::to_string).collect())
            .collect();
        write_string(
            out,
            serde_json::to_string(&coords).expect("strings serialize"),
        )
    })
}

/// Number of digit words of length `len` over `{0..d−1}` with the same value
/// as `word`, as a decimal string.
///
/// # Safety
/// `base` must be a live handle, `word` must point to `len` letters and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn soficonv_pisot_count_redundant(
    base: *const SoficonvPisotBase,
    word: *const usize,
    len: usize,
    out: *mut *mut c_char,
) -> SoficonvStatus {
    guard(|| {
        let word = read_slice(word, len, "word")?;
        let count = RedundancyCounter::new(base_ref(base)?)?.count(word)?;
        write_string(out, count.to_string())
    })
}

/// Parses `{"R":…,"M":…,"C":…}` with rational entries as strings.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soficonv_linrep_from_json(
    json: *const c_char,
    out: *mut *mut SoficonvLinearRepresentation,
) -> SoficonvStatus {
    guard(|| {
        let parsed: LinearRepresentationJson =
            serde_json::from_str(read_str(json, "json")?).map_err(Error::from)?;
        let inner = LinearRepresentation::from_json(parsed)?;
        write_out(
            out,
            Box::into_raw(Box::new(SoficonvLinearRepresentation { inner })),
        )
    })
}

/// # Safety
/// `rep` must come from [`soficonv_linrep_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn soficonv_linrep_free(rep: *mut SoficonvLinearRepresentation) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Cylinder value `R_{w₁} M_{w₂} … M_{w_n} C` as an exact `"p/q"` string.
///
/// # Safety
/// `rep` must be a live handle, `word` must point to `len` letters and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn soficonv_linrep_cylinder(
    rep: *const SoficonvLinearRepresentation,
    word: *const usize,
    len: usize,
    out: *mut *mut c_char,
) -> SoficonvStatus {
    guard(|| {
        let rep = rep.as_ref().map(|r| &r.inner).ok_or_else(|| null("rep"))?;
        let value = rep.cylinder(read_slice(word, len, "word")?)?;
        write_string(out, value.to_string())
    })
}
