//! C interface to `skforms`.
//!
//! Objects are handed out as opaque pointers and released with the matching
//! `*_free` function. Every fallible call returns an [`SkStatus`]; on failure
//! `sk_last_error()` describes the problem. Rationals cross the boundary as
//! `"num/den"` strings owned by the caller and released with
//! `sk_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use skforms::arith::cohen_h;
use skforms::cache::{read_siegel, write_siegel};
use skforms::heckeop::eigenvalue;
use skforms::jacobi::cusp_form_10_12;
use skforms::maass::{siegel_eisenstein2, sk_lift, SiegelExpansion};
use skforms::qseries::{newform_onedim, EllipticEigenform};
use skforms::quad::{decompose, HalfIntMatrix};
use skforms::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkStatus {
    Ok = 0,
    NotEigenform = 2,
    Precision = 3,
    InvalidArgument = 4,
    Internal = 5,
    NullPointer = 6,
    Io = 7,
    Panic = 8,
}

/// Opaque degree-2 expansion.
pub struct SkExpansion(SiegelExpansion);

/// Opaque elliptic eigenform.
pub struct SkNewform(EllipticEigenform);

/// Content L, conductor M, fundamental discriminant d and the reduced
/// representative (n, r, m) of the attached primitive class.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SkDecomposition {
    pub content: i64,
    pub conductor: i64,
    pub disc: i64,
    pub rep_n: i64,
    pub rep_r: i64,
    pub rep_m: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> SkStatus {
    match err {
        Error::Precision(_) => SkStatus::Precision,
        Error::InvalidArgument(_) | Error::RamifiedPrime { .. } | Error::Format(_) | Error::Json(_) => {
            SkStatus::InvalidArgument
        }
        Error::NotEigenform(_) => SkStatus::NotEigenform,
        Error::Io(_) => SkStatus::Io,
        _ => SkStatus::Internal,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (SkStatus, String)>) -> SkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SkStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SkStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (SkStatus, String)>;
}

impl<T> IntoFfi<T> for skforms::Result<T> {
    fn ffi(self) -> Result<T, (SkStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (SkStatus, String) {
    (SkStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (SkStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| (SkStatus::InvalidArgument, "path is not UTF-8".into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (SkStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s).map_err(|_| (SkStatus::Internal, "interior NUL".into()))?.into_raw();
    Ok(())
}

unsafe fn write_box<T>(out: *mut *mut T, v: T) -> Result<(), (SkStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn sk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the Saito–Kurokawa lift (weight 10 or 12) or the Siegel
/// Eisenstein series (weight 4 or 6) on det4 ≤ `detmax4`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_expansion_new(weight: u32, detmax4: u64, out: *mut *mut SkExpansion) -> SkStatus {
    guard(|| {
        let f = match weight {
            10 | 12 => cusp_form_10_12(weight, detmax4).and_then(|phi| sk_lift(&phi, detmax4)),
            4 | 6 => siegel_eisenstein2(weight, detmax4).map(|e| e.expansion),
            _ => Err(Error::InvalidArgument(format!("unsupported weight {weight}"))),
        }
        .ffi()?;
        write_box(out, SkExpansion(f))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_expansion_load(path: *const c_char, out: *mut *mut SkExpansion) -> SkStatus {
    guard(|| {
        let f = read_siegel(path_arg(path)?).ffi()?;
        write_box(out, SkExpansion(f))
    })
}

/// # Safety
/// `f` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sk_expansion_save(f: *const SkExpansion, path: *const c_char) -> SkStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("expansion"))?;
        write_siegel(path_arg(path)?, &f.0).ffi()
    })
}

/// # Safety
/// `f` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn sk_expansion_free(f: *mut SkExpansion) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Weight of the expansion, or 0 for a null handle.
///
/// # Safety
/// `f` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sk_expansion_weight(f: *const SkExpansion) -> u32 {
    f.as_ref().map_or(0, |f| f.0.weight())
}

/// # Safety
/// `f` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sk_expansion_detmax4(f: *const SkExpansion) -> u64 {
    f.as_ref().map_or(0, |f| f.0.detmax4())
}

/// a(T) for T = (n, r, m) as a rational string.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_expansion_coeff(
    f: *const SkExpansion,
    n: i64,
    r: i64,
    m: i64,
    out: *mut *mut c_char,
) -> SkStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("expansion"))?;
        let a = f.0.coeff(&HalfIntMatrix::new(n, r, m)).ffi()?;
        write_string(out, a.to_string())
    })
}

/// The T(p) eigenvalue, checked on the whole output region.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_hecke_eigenvalue(f: *const SkExpansion, p: u64, out: *mut *mut c_char) -> SkStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("expansion"))?;
        let eta = eigenvalue(&f.0, p).ffi()?;
        write_string(out, eta.to_string())
    })
}

/// The level one newform of weight 12, 16, 18, 20, 22 or 26.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_newform_new(weight: u32, precision: usize, out: *mut *mut SkNewform) -> SkStatus {
    guard(|| {
        let f = newform_onedim(weight, precision).ffi()?;
        write_box(out, SkNewform(f))
    })
}

/// # Safety
/// `f` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn sk_newform_free(f: *mut SkNewform) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// a_f(n) as a decimal string.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_newform_coeff(f: *const SkNewform, n: u64, out: *mut *mut c_char) -> SkStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("newform"))?;
        write_string(out, f.0.a(n).ffi()?.to_string())
    })
}

/// Cohen's number H(r, n) as a rational string.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_cohen_h(r: u32, n: u64, out: *mut *mut c_char) -> SkStatus {
    guard(|| {
        if r == 0 {
            return Err((SkStatus::InvalidArgument, "r must be positive".into()));
        }
        write_string(out, cohen_h(r, n).to_string())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sk_decompose(n: i64, r: i64, m: i64, out: *mut SkDecomposition) -> SkStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        let d = decompose(&HalfIntMatrix::new(n, r, m)).ffi()?;
        *out = SkDecomposition {
            content: d.content,
            conductor: d.conductor,
            disc: d.d,
            rep_n: d.class_rep.n,
            rep_r: d.class_rep.r,
            rep_m: d.class_rep.m,
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn take(s: *mut c_char) -> String {
        let v = CStr::from_ptr(s).to_str().unwrap().to_owned();
        sk_string_free(s);
        v
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(sk_last_error()).to_str().unwrap().to_owned() }
    }

    #[test]
    fn lift_roundtrip() {
        unsafe {
            let mut f = ptr::null_mut();
            assert_eq!(sk_expansion_new(10, 100, &mut f), SkStatus::Ok);
            assert_eq!(sk_expansion_weight(f), 10);
            let mut s = ptr::null_mut();
            assert_eq!(sk_expansion_coeff(f, 1, 1, 1, &mut s), SkStatus::Ok);
            assert_eq!(take(s), "1");
            assert_eq!(sk_hecke_eigenvalue(f, 2, &mut s), SkStatus::Ok);
            assert_eq!(take(s), "240");
            assert_eq!(sk_expansion_coeff(f, 10, 0, 10, &mut s), SkStatus::Precision);
            assert!(last_error().contains("det4"));

            let dir = tempfile::tempdir().unwrap();
            let path = CString::new(dir.path().join("f.siegel").to_str().unwrap()).unwrap();
            assert_eq!(sk_expansion_save(f, path.as_ptr()), SkStatus::Ok);
            let mut g = ptr::null_mut();
            assert_eq!(sk_expansion_load(path.as_ptr(), &mut g), SkStatus::Ok);
            assert_eq!((*g).0, (*f).0);
            sk_expansion_free(f);
            sk_expansion_free(g);
        }
    }

    #[test]
    fn errors_and_nulls() {
        unsafe {
            let mut f = ptr::null_mut();
            assert_eq!(sk_expansion_new(8, 100, &mut f), SkStatus::InvalidArgument);
            assert!(f.is_null());
            assert_eq!(sk_expansion_new(10, 100, ptr::null_mut()), SkStatus::NullPointer);
            let mut s = ptr::null_mut();
            assert_eq!(sk_expansion_coeff(ptr::null(), 1, 1, 1, &mut s), SkStatus::NullPointer);
            assert_eq!(sk_expansion_load(ptr::null(), &mut f), SkStatus::NullPointer);
            let missing = CString::new("/nonexistent/x.siegel").unwrap();
            assert_eq!(sk_expansion_load(missing.as_ptr(), &mut f), SkStatus::Io);
            assert_eq!(sk_expansion_weight(ptr::null()), 0);
            sk_expansion_free(ptr::null_mut());
            sk_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn small_functions() {
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(sk_cohen_h(1, 3, &mut s), SkStatus::Ok);
            assert_eq!(take(s), "1/3");
            let mut d = SkDecomposition::default();
            assert_eq!(sk_decompose(4, 4, 4, &mut d), SkStatus::Ok);
            assert_eq!((d.content, d.conductor, d.disc), (4, 1, -3));
            assert_eq!(sk_decompose(1, 3, 1, &mut d), SkStatus::InvalidArgument);
            let mut f = ptr::null_mut();
            assert_eq!(sk_newform_new(12, 10, &mut f), SkStatus::Ok);
            assert_eq!(sk_newform_coeff(f, 2, &mut s), SkStatus::Ok);
            assert_eq!(take(s), "-24");
            assert_eq!(sk_newform_coeff(f, 11, &mut s), SkStatus::Precision);
            sk_newform_free(f);
        }
    }
}
