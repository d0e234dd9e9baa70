//! C ABI for the cubical workbench.
//!
//! All objects cross the boundary as opaque handles; every constructor
//! has a matching `_free`. Functions that can fail return a status code
//! (`CCX_OK` on success) or a null handle, and the message for the most
//! recent failure on the calling thread is available via
//! `ccx_last_error`. Strings returned by the library are NUL-terminated
//! UTF-8 and must be released with `ccx_string_free`.

use cubical::cert::Certificate;
use cubical::cmap::check_local_isometry;
use cubical::complex::CubeComplex;
use cubical::develop::{superconvexity_check, systole, SystoleResult};
use cubical::hyperplane::{hyperplane_certificate, pseudograph_certificate};
use cubical::smallcancel::{check_cprime, CubicalPresentation};
use cubical::CubicalMap;
use num_rational::Rational64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

/// Status codes. Certificate-producing calls use the process exit-code
/// convention for verdicts; `CCX_ERROR` means the inputs were unusable.
pub const CCX_OK: i32 = 0;
pub const CCX_FAIL: i32 = 1;
pub const CCX_INCONCLUSIVE: i32 = 2;
pub const CCX_ERROR: i32 = 3;

/// Opaque cube complex handle.
pub struct CcxComplex(CubeComplex);
/// Opaque cubical map handle.
pub struct CcxMap(CubicalMap);
/// Opaque certificate handle.
pub struct CcxCert(Certificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// The message for the most recent failure on this thread, or null.
/// The pointer is owned by the library and valid until the next failing
/// call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn ccx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}

fn str_arg<'a>(p: *const c_char) -> Result<&'a str, String> {
    if p.is_null() {
        return Err("null string argument".into());
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| "string argument is not UTF-8".into())
}

fn export_string(s: String) -> *mut c_char {
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => {
            set_error("output contained an interior NUL".into());
            ptr::null_mut()
        }
    }
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not
/// yet freed (null is ignored).
#[no_mangle]
pub unsafe extern "C" fn ccx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

// ---------------------------------------------------------------- complexes

/// Parses a complex from its canonical text serialization.
/// Returns null on error.
#[no_mangle]
pub extern "C" fn ccx_complex_parse(text: *const c_char) -> *mut CcxComplex {
    clear_error();
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(e) => {
            set_error(e);
            return ptr::null_mut();
        }
    };
    match cubical::io::parse_complex(text) {
        Ok(x) => Box::into_raw(Box::new(CcxComplex(x))),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// A wedge of `rank` loops at one vertex.
#[no_mangle]
pub extern "C" fn ccx_complex_bouquet(rank: usize) -> *mut CcxComplex {
    clear_error();
    Box::into_raw(Box::new(CcxComplex(CubeComplex::bouquet(rank))))
}

/// A cycle of length `n` (returns null for n < 1).
#[no_mangle]
pub extern "C" fn ccx_complex_cycle(n: u32) -> *mut CcxComplex {
    clear_error();
    if n == 0 {
        set_error("cycle length must be positive".into());
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(CcxComplex(CubeComplex::cycle(n))))
}

/// Canonical text serialization; free with `ccx_string_free`.
///
/// # Safety
/// `x` must be a live complex handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ccx_complex_serialize(x: *const CcxComplex) -> *mut c_char {
    clear_error();
    if x.is_null() {
        set_error("null complex handle".into());
        return ptr::null_mut();
    }
    export_string(cubical::io::serialize_complex(&unsafe { &*x }.0))
}

/// Number of cells in each dimension; writes up to `len` entries and
/// returns the dimension + 1 (the number of entries available).
///
/// # Safety
/// `x` must be a live complex handle; `out` must point to `len` writable
/// entries (or be null when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn ccx_complex_cell_counts(
    x: *const CcxComplex,
    out: *mut usize,
    len: usize,
) -> usize {
    clear_error();
    if x.is_null() {
        set_error("null complex handle".into());
        return 0;
    }
    let x = &unsafe { &*x }.0;
    let dims = x.dim() + 1;
    for d in 0..dims.min(len) {
        unsafe { *out.add(d) = x.cubes(d).len() };
    }
    dims
}

/// # Safety
/// `x` must be a handle from this library, freed at most once (null is
/// ignored).
#[no_mangle]
pub unsafe extern "C" fn ccx_complex_free(x: *mut CcxComplex) {
    if !x.is_null() {
        drop(unsafe { Box::from_raw(x) });
    }
}

// --------------------------------------------------------------------- maps

/// Parses a map (with embedded source and target) from its canonical
/// text serialization. Returns null on error.
#[no_mangle]
pub extern "C" fn ccx_map_parse(text: *const c_char) -> *mut CcxMap {
    clear_error();
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(e) => {
            set_error(e);
            return ptr::null_mut();
        }
    };
    match cubical::io::parse_map(text) {
        Ok(f) => Box::into_raw(Box::new(CcxMap(f))),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// Canonical text serialization; free with `ccx_string_free`.
///
/// # Safety
/// `f` must be a live map handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ccx_map_serialize(f: *const CcxMap) -> *mut c_char {
    clear_error();
    if f.is_null() {
        set_error("null map handle".into());
        return ptr::null_mut();
    }
    export_string(cubical::io::serialize_map(&unsafe { &*f }.0))
}

/// # Safety
/// `f` must be a handle from this library, freed at most once (null is
/// ignored).
#[no_mangle]
pub unsafe extern "C" fn ccx_map_free(f: *mut CcxMap) {
    if !f.is_null() {
        drop(unsafe { Box::from_raw(f) });
    }
}

// ------------------------------------------------------------- certificates

/// Verdict of a certificate: CCX_OK pass, CCX_FAIL fail,
/// CCX_INCONCLUSIVE inconclusive.
///
/// # Safety
/// `c` must be a live certificate handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ccx_cert_status(c: *const CcxCert) -> i32 {
    if c.is_null() {
        return CCX_ERROR;
    }
    unsafe { &*c }.0.exit_code()
}

/// The rendered certificate report; free with `ccx_string_free`.
///
/// # Safety
/// `c` must be a live certificate handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ccx_cert_render(c: *const CcxCert) -> *mut c_char {
    clear_error();
    if c.is_null() {
        set_error("null certificate handle".into());
        return ptr::null_mut();
    }
    export_string(format!("{}", unsafe { &*c }.0))
}

/// # Safety
/// `c` must be a handle from this library, freed at most once (null is
/// ignored).
#[no_mangle]
pub unsafe extern "C" fn ccx_cert_free(c: *mut CcxCert) {
    if !c.is_null() {
        drop(unsafe { Box::from_raw(c) });
    }
}

fn export_cert(r: cubical::Result<Certificate>) -> *mut CcxCert {
    match r {
        Ok(c) => Box::into_raw(Box::new(CcxCert(c))),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

// ----------------------------------------------------------------- checkers

/// Structural and curvature validation. Returns null on unusable input.
///
/// # Safety
/// `x` must be a live complex handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ccx_validate(x: *const CcxComplex) -> *mut CcxCert {
    clear_error();
    if x.is_null() {
        set_error("null complex handle".into());
        return ptr::null_mut();
    }
    export_cert(unsafe { &*x }.0.validate())
}

/// Hyperplane census certificate.
///
/// # Safety
/// `x` must be a live complex handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ccx_hyperplanes(x: *const CcxComplex) -> *mut CcxCert {
    clear_error();
    if x.is_null() {
        set_error("null complex handle".into());
        return ptr::null_mut();
    }
    let x = &unsafe { &*x }.0;
    if let Err(e) = x.check_structure() {
        set_error(e.to_string());
        return ptr::null_mut();
    }
    export_cert(Ok(hyperplane_certificate(x)))
}

/// Pseudograph certificate: every hyperplane is a contractible tree.
///
/// # Safety
/// `x` must be a live complex handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ccx_pseudograph(x: *const CcxComplex) -> *mut CcxCert {
    clear_error();
    if x.is_null() {
        set_error("null complex handle".into());
        return ptr::null_mut();
    }
    export_cert(pseudograph_certificate(&unsafe { &*x }.0))
}

/// Local isometry certificate for a map.
///
/// # Safety
/// `f` must be a live map handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ccx_local_isometry(f: *const CcxMap) -> *mut CcxCert {
    clear_error();
    if f.is_null() {
        set_error("null map handle".into());
        return ptr::null_mut();
    }
    export_cert(check_local_isometry(&unsafe { &*f }.0))
}

/// Superconvexity certificate at the given strip cutoff.
///
/// # Safety
/// `f` must be a live map handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ccx_superconvex(f: *const CcxMap, cutoff: u32) -> *mut CcxCert {
    clear_error();
    if f.is_null() {
        set_error("null map handle".into());
        return ptr::null_mut();
    }
    export_cert(superconvexity_check(&unsafe { &*f }.0, cutoff))
}

/// Shortest essential loop length. Returns CCX_OK and writes the length
/// when decided, CCX_INCONCLUSIVE and writes the proven lower bound when
/// the guard ran out, CCX_ERROR on unusable input.
///
/// # Safety
/// `x` must be a live complex handle; `out_length` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccx_systole(
    x: *const CcxComplex,
    guard: u32,
    out_length: *mut u32,
) -> i32 {
    clear_error();
    if x.is_null() || out_length.is_null() {
        set_error("null argument".into());
        return CCX_ERROR;
    }
    match systole(&unsafe { &*x }.0, guard) {
        Ok(SystoleResult::Exact { length, .. }) => {
            unsafe { *out_length = length };
            CCX_OK
        }
        Ok(SystoleResult::AtLeast(b)) => {
            unsafe { *out_length = b };
            CCX_INCONCLUSIVE
        }
        Err(e) => {
            set_error(e.to_string());
            CCX_ERROR
        }
    }
}

/// C'(alpha) certificate for the presentation whose base is the target
/// of the given relator maps (all relators must share one target).
/// `alpha = alpha_num / alpha_den`. Returns null on unusable input.
///
/// # Safety
/// `relators` must point to `n` live map handles; each handle must be
/// live for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn ccx_cprime(
    relators: *const *const CcxMap,
    n: usize,
    alpha_num: i64,
    alpha_den: i64,
    guard: u32,
) -> *mut CcxCert {
    clear_error();
    if relators.is_null() || n == 0 {
        set_error("need at least one relator".into());
        return ptr::null_mut();
    }
    if alpha_den == 0 {
        set_error("zero denominator".into());
        return ptr::null_mut();
    }
    let handles = unsafe { std::slice::from_raw_parts(relators, n) };
    let mut rels = Vec::with_capacity(n);
    for &h in handles {
        if h.is_null() {
            set_error("null map handle in relator list".into());
            return ptr::null_mut();
        }
        rels.push(unsafe { &*h }.0.clone());
    }
    let pres = CubicalPresentation {
        x: rels[0].target.clone(),
        relators: rels,
    };
    export_cert(check_cprime(
        &pres,
        Rational64::new(alpha_num, alpha_den),
        Some(guard),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn complex_round_trip_and_validate() {
        let x = ccx_complex_bouquet(2);
        assert!(!x.is_null());
        unsafe {
            let text = ccx_complex_serialize(x);
            assert!(!text.is_null());
            let x2 = ccx_complex_parse(text);
            assert!(!x2.is_null());
            let cert = ccx_validate(x2);
            assert_eq!(ccx_cert_status(cert), CCX_OK);
            let report = ccx_cert_render(cert);
            let s = CStr::from_ptr(report).to_str().unwrap();
            assert!(s.contains("status: pass"));
            ccx_string_free(report);
            ccx_cert_free(cert);
            ccx_string_free(text);
            ccx_complex_free(x2);
            ccx_complex_free(x);
        }
    }

    #[test]
    fn parse_failure_sets_the_error_message() {
        let bad = c("not a complex");
        let x = ccx_complex_parse(bad.as_ptr());
        assert!(x.is_null());
        let msg = ccx_last_error();
        assert!(!msg.is_null());
        let s = unsafe { CStr::from_ptr(msg) }.to_str().unwrap();
        assert!(!s.is_empty());
    }

    #[test]
    fn systole_of_a_cycle() {
        let x = ccx_complex_cycle(7);
        let mut len = 0u32;
        let code = unsafe { ccx_systole(x, 16, &mut len) };
        assert_eq!(code, CCX_OK);
        assert_eq!(len, 7);
        unsafe { ccx_complex_free(x) };
    }

    #[test]
    fn cprime_over_the_bouquet() {
        use cubical::fixtures::cycle_word_map;
        use cubical::freegroup::parse_word;
        let w = parse_word("aabb", 2).unwrap();
        let letters: Vec<(u8, bool)> = w;
        let m = cycle_word_map(&letters, 2);
        let text = c(&cubical::io::serialize_map(&m));
        let h = ccx_map_parse(text.as_ptr());
        assert!(!h.is_null());
        let rels = [h as *const CcxMap];
        let cert = unsafe { ccx_cprime(rels.as_ptr(), 1, 1, 6, 16) };
        assert!(!cert.is_null());
        assert_eq!(unsafe { ccx_cert_status(cert) }, CCX_FAIL);
        unsafe {
            ccx_cert_free(cert);
            ccx_map_free(h);
        }
    }

    #[test]
    fn cell_counts_of_a_bouquet() {
        let x = ccx_complex_bouquet(3);
        let mut counts = [0usize; 4];
        let dims = unsafe { ccx_complex_cell_counts(x, counts.as_mut_ptr(), 4) };
        assert_eq!(dims, 2);
        assert_eq!(&counts[..2], &[1, 3]);
        unsafe { ccx_complex_free(x) };
    }
}
