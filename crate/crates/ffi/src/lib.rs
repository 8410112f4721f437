//! C ABI for `modorb`.
//!
//! Handles are opaque pointers created by `modorb_datum_*` constructors and released
//! with [`modorb_datum_free`]. Every fallible call returns a [`ModorbStatus`]; on
//! failure [`modorb_last_error_message`] describes the error on the calling thread.
//! Strings returned through `char **` are owned by the caller and released with
//! [`modorb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use modorb::modular_data::{self, ModularDatum, Tolerances};
use modorb::perm_orbifold::{self, Convention};
use modorb::sl2z::{self, Sl2Matrix};
use modorb::{fixtures, io, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModorbStatus {
    Ok = 0,
    NullPointer = -1,
    InvalidUtf8 = -2,
    Parse = -3,
    InvalidDatum = -4,
    NotPrime = -5,
    OutOfRange = -6,
    NotUnimodular = -7,
    Numerical = -8,
    Panic = -99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModorbConvention {
    Minus = 0,
    Plus = 1,
}

/// Opaque modular datum.
pub struct ModorbDatum {
    inner: ModularDatum,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> ModorbStatus {
    match e {
        Error::Parse(_) | Error::BadRational(_) | Error::Io { .. } => ModorbStatus::Parse,
        Error::NotPrime(_) => ModorbStatus::NotPrime,
        Error::OutOfRange { .. } => ModorbStatus::OutOfRange,
        Error::NotUnimodular { .. } => ModorbStatus::NotUnimodular,
        Error::Overflow | Error::SingularVacuumRow { .. } => ModorbStatus::Numerical,
        _ => ModorbStatus::InvalidDatum,
    }
}

/// Runs `f`, converting errors and panics to a status and the thread's error message.
fn guard<F>(f: F) -> ModorbStatus
where
    F: FnOnce() -> Result<(), (ModorbStatus, String)>,
{
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ModorbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            ModorbStatus::Panic
        }
    }
}

fn lib(e: Error) -> (ModorbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (ModorbStatus, String) {
    (ModorbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (ModorbStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        (
            ModorbStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn datum<'a>(p: *const ModorbDatum) -> Result<&'a ModularDatum, (ModorbStatus, String)> {
    p.as_ref().map(|d| &d.inner).ok_or_else(|| null("datum"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (ModorbStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

fn index(i: usize, rank: usize) -> Result<usize, (ModorbStatus, String)> {
    if i < rank {
        Ok(i)
    } else {
        Err((
            ModorbStatus::OutOfRange,
            format!("index {i} out of range for rank {rank}"),
        ))
    }
}

fn boxed(d: ModularDatum) -> *mut ModorbDatum {
    Box::into_raw(Box::new(ModorbDatum { inner: d }))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn modorb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a datum document (`central_charge`, `modules`, `S`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_datum` must be writable.
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_from_json(
    json: *const c_char,
    out_datum: *mut *mut ModorbDatum,
) -> ModorbStatus {
    guard(|| {
        let slot = out(out_datum, "out")?;
        let text = str_arg(json, "json")?;
        let d = io::parse_modular_datum(text).map_err(lib)?;
        *slot = boxed(d);
        Ok(())
    })
}

/// Loads a shipped fixture: `ising`, `fibonacci` or `e8`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out_datum` must be writable.
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_fixture(
    name: *const c_char,
    out_datum: *mut *mut ModorbDatum,
) -> ModorbStatus {
    guard(|| {
        let slot = out(out_datum, "out")?;
        let name = str_arg(name, "name")?;
        let d = fixtures::by_name(name).map_err(lib)?;
        *slot = boxed(d);
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `d` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_free(d: *mut ModorbDatum) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle; `rank` must be writable.
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_rank(
    d: *const ModorbDatum,
    rank: *mut usize,
) -> ModorbStatus {
    guard(|| {
        let slot = out(rank, "rank")?;
        *slot = datum(d)?.rank();
        Ok(())
    })
}

/// # Safety
/// `d` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_s_entry(
    d: *const ModorbDatum,
    i: usize,
    j: usize,
    re: *mut f64,
    im: *mut f64,
) -> ModorbStatus {
    guard(|| {
        let d = datum(d)?;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let z = d.s(index(i, d.rank())?, index(j, d.rank())?);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// `T_ii = e^{2πi·num/den}` with `0 <= num/den < 1` in lowest terms.
///
/// # Safety
/// `d` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_t_angle(
    d: *const ModorbDatum,
    i: usize,
    num: *mut i64,
    den: *mut i64,
) -> ModorbStatus {
    guard(|| {
        let d = datum(d)?;
        let (num, den) = (out(num, "num")?, out(den, "den")?);
        let angle = d.t_matrix()[index(i, d.rank())?].angle();
        *num = *angle.numer();
        *den = *angle.denom();
        Ok(())
    })
}

/// Runs the full validation suite. Non-positive tolerances select the defaults.
/// `passed` is 1 if every check passes, else 0. See [`modorb_datum_validation_report`]
/// for the individual checks.
///
/// # Safety
/// `d` must be a live handle; `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_validate(
    d: *const ModorbDatum,
    eps: f64,
    eps_int: f64,
    passed: *mut i32,
) -> ModorbStatus {
    guard(|| {
        let d = datum(d)?;
        let slot = out(passed, "passed")?;
        *slot = modular_data::validate_modular_datum(d, tolerances(eps, eps_int)).passed() as i32;
        Ok(())
    })
}

/// Validation report as text, one line per check.
///
/// # Safety
/// `d` must be a live handle; `report` must be writable. Free the string with
/// [`modorb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_validation_report(
    d: *const ModorbDatum,
    eps: f64,
    eps_int: f64,
    report: *mut *mut c_char,
) -> ModorbStatus {
    guard(|| {
        let d = datum(d)?;
        let slot = out(report, "report")?;
        *slot =
            c_string(modular_data::validate_modular_datum(d, tolerances(eps, eps_int)).to_string());
        Ok(())
    })
}

fn tolerances(eps: f64, eps_int: f64) -> Tolerances {
    let def = Tolerances::default();
    Tolerances {
        eps: if eps > 0.0 { eps } else { def.eps },
        eps_int: if eps_int > 0.0 { eps_int } else { def.eps_int },
    }
}

/// Verlinde fusion coefficient `N_{ij}^m`.
///
/// # Safety
/// `d` must be a live handle; `n` must be writable.
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_fusion(
    d: *const ModorbDatum,
    i: usize,
    j: usize,
    m: usize,
    n: *mut u32,
) -> ModorbStatus {
    guard(|| {
        let d = datum(d)?;
        let slot = out(n, "n")?;
        let r = d.rank();
        let (i, j, m) = (index(i, r)?, index(j, r)?, index(m, r)?);
        *slot = modular_data::verlinde_fusion(d)
            .map_err(lib)?
            .tensor
            .get(i, j, m);
        Ok(())
    })
}

/// Modular datum of the cyclic permutation orbifold `(V^{⊗k})^{Z_k}`, `k` prime.
///
/// # Safety
/// `d` must be a live handle; `out_datum` must be writable.
#[no_mangle]
pub unsafe extern "C" fn modorb_perm_orbifold(
    d: *const ModorbDatum,
    k: usize,
    convention: ModorbConvention,
    out_datum: *mut *mut ModorbDatum,
) -> ModorbStatus {
    guard(|| {
        let d = datum(d)?;
        let slot = out(out_datum, "out")?;
        let conv = match convention {
            ModorbConvention::Minus => Convention::Minus,
            ModorbConvention::Plus => Convention::Plus,
        };
        let o =
            perm_orbifold::build_orbifold_datum(d, k, conv, Tolerances::default()).map_err(lib)?;
        *slot = boxed(o.datum);
        Ok(())
    })
}

/// Serializes a datum to its JSON document.
///
/// # Safety
/// `d` must be a live handle; `json` must be writable. Free the string with
/// [`modorb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn modorb_datum_to_json(
    d: *const ModorbDatum,
    json: *mut *mut c_char,
) -> ModorbStatus {
    guard(|| {
        let d = datum(d)?;
        let slot = out(json, "json")?;
        *slot = c_string(io::datum_to_json(d));
        Ok(())
    })
}

/// Writes the S/T word for `(a, b; c, d)`, e.g. `"S T^-1 S"`.
///
/// # Safety
/// `word` must be writable. Free the string with [`modorb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn modorb_sl2z_decompose(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    word: *mut *mut c_char,
) -> ModorbStatus {
    guard(|| {
        let slot = out(word, "word")?;
        let m = Sl2Matrix::new(a, b, c, d).map_err(lib)?;
        *slot = c_string(sl2z::decompose_to_generators(&m).to_string());
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn modorb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
