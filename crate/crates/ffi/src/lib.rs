//! C bindings for the linkpack library: opaque handles over links,
//! certificates, and packings, with status codes and a thread-local
//! error message. Strings returned through out-parameters are owned by
//! the caller and must be released with [`lp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use linkpack::certify::{certificate, linking_integer, Certificate, CertifyError};
use linkpack::diagrams::{mu_bar, PDCode};
use linkpack::geometry::{canonical_hopf, split_pair, PLLink};
use linkpack::packing::{multigeneration, verify_packing, Packing, PackingError};

/// Result of every fallible call. Anything other than `Ok` leaves a
/// description in [`lp_last_error_message`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidString = 2,
    /// Arguments were structurally valid but rejected.
    BadInput = 3,
    /// A declared separation constraint is violated.
    ConstraintViolation = 4,
    /// The request exceeds a size cap.
    TooLarge = 5,
    /// An unexpected internal failure; file a bug.
    Internal = 6,
}

/// A piecewise-linear link in the unit cube.
pub struct LpLink(PLLink);

/// A separation certificate for a two-component link.
pub struct LpCertificate(Certificate);

/// A multi-generation packing of separated pairs.
pub struct LpPacking(Packing);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl std::fmt::Display) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message.to_string());
}

fn guarded(body: impl FnOnce() -> LpStatus) -> LpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            LpStatus::Internal
        }
    }
}

fn certify_status(err: &CertifyError) -> LpStatus {
    match err {
        CertifyError::TooClose { .. } | CertifyError::ConstraintViolation { .. } => {
            LpStatus::ConstraintViolation
        }
        CertifyError::DegenerateProjection { .. } | CertifyError::Stage { .. } => {
            LpStatus::Internal
        }
        _ => LpStatus::BadInput,
    }
}

fn packing_status(err: &PackingError) -> LpStatus {
    match err {
        PackingError::PairTooClose { .. } => LpStatus::ConstraintViolation,
        _ => LpStatus::BadInput,
    }
}

fn own_string(text: String) -> *mut c_char {
    match CString::new(text) {
        Ok(s) => s.into_raw(),
        Err(_) => ptr::null_mut(),
    }
}

unsafe fn utf8_arg<'a>(text: *const c_char) -> Result<&'a str, LpStatus> {
    if text.is_null() {
        set_error("null string argument");
        return Err(LpStatus::NullPointer);
    }
    CStr::from_ptr(text).to_str().map_err(|e| {
        set_error(e);
        LpStatus::InvalidString
    })
}

/// Returns a copy of the message left by the most recent failing call on
/// this thread, or an empty string. Free it with [`lp_string_free`].
#[no_mangle]
pub extern "C" fn lp_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| own_string(slot.borrow().clone()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
///
/// `text` must be a pointer previously returned by a linkpack function
/// and not freed since.
#[no_mangle]
pub unsafe extern "C" fn lp_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Parses a link from its JSON form.
///
/// # Safety
///
/// `text` must be a valid NUL-terminated string and `out` a valid
/// pointer; on success `*out` owns the link until [`lp_link_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_link_from_json(
    text: *const c_char,
    out: *mut *mut LpLink,
) -> LpStatus {
    if out.is_null() {
        set_error("null output pointer");
        return LpStatus::NullPointer;
    }
    let text = match utf8_arg(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| match PLLink::from_json_str(text) {
        Ok(link) => {
            *out = Box::into_raw(Box::new(LpLink(link)));
            LpStatus::Ok
        }
        Err(e) => {
            set_error(e);
            LpStatus::BadInput
        }
    })
}

/// Builds the standard separated Hopf pair for a separation bound.
///
/// # Safety
///
/// `out` must be a valid pointer; on success `*out` owns the link until
/// [`lp_link_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_link_canonical_hopf(epsilon: f64, out: *mut *mut LpLink) -> LpStatus {
    if out.is_null() {
        set_error("null output pointer");
        return LpStatus::NullPointer;
    }
    guarded(|| match canonical_hopf(epsilon) {
        Ok(link) => {
            *out = Box::into_raw(Box::new(LpLink(link)));
            LpStatus::Ok
        }
        Err(e) => {
            set_error(e);
            LpStatus::BadInput
        }
    })
}

/// Builds the split pair: two far-apart circles with the same labels.
///
/// # Safety
///
/// `out` must be a valid pointer; on success `*out` owns the link until
/// [`lp_link_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_link_split_pair(epsilon: f64, out: *mut *mut LpLink) -> LpStatus {
    if out.is_null() {
        set_error("null output pointer");
        return LpStatus::NullPointer;
    }
    guarded(|| match split_pair(epsilon) {
        Ok(link) => {
            *out = Box::into_raw(Box::new(LpLink(link)));
            LpStatus::Ok
        }
        Err(e) => {
            set_error(e);
            LpStatus::BadInput
        }
    })
}

/// Serializes a link to JSON.
///
/// # Safety
///
/// `link` must be a live handle and `out` a valid pointer; on success
/// `*out` owns the string until [`lp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_link_to_json(
    link: *const LpLink,
    out: *mut *mut c_char,
) -> LpStatus {
    if link.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    guarded(|| {
        *out = own_string((*link).0.to_json_string());
        LpStatus::Ok
    })
}

/// Signed linking number of two labeled components of a link.
///
/// # Safety
///
/// `link` must be a live handle, the labels valid NUL-terminated
/// strings, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_linking_number(
    link: *const LpLink,
    label_a: *const c_char,
    label_b: *const c_char,
    out: *mut i64,
) -> LpStatus {
    if link.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    let label_a = match utf8_arg(label_a) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let label_b = match utf8_arg(label_b) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| {
        let link = &(*link).0;
        let (a, b) = match (link.component(label_a), link.component(label_b)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                set_error("no component with the requested label");
                return LpStatus::BadInput;
            }
        };
        match linking_integer(a, b) {
            Ok(lk) => {
                *out = lk;
                LpStatus::Ok
            }
            Err(e) => {
                let status = certify_status(&e);
                set_error(e);
                status
            }
        }
    })
}

/// Releases a link handle. Null is ignored.
///
/// # Safety
///
/// `link` must be a handle from this library, not freed since.
#[no_mangle]
pub unsafe extern "C" fn lp_link_free(link: *mut LpLink) {
    if !link.is_null() {
        drop(Box::from_raw(link));
    }
}

/// Builds the separation certificate for two labeled components.
///
/// # Safety
///
/// `link` must be a live handle, the labels valid NUL-terminated
/// strings, and `out` a valid pointer; on success `*out` owns the
/// certificate until [`lp_certificate_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_certify(
    link: *const LpLink,
    red: *const c_char,
    blue: *const c_char,
    epsilon: f64,
    out: *mut *mut LpCertificate,
) -> LpStatus {
    if link.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    let red = match utf8_arg(red) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let blue = match utf8_arg(blue) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| match certificate(&(*link).0, red, blue, epsilon) {
        Ok(cert) => {
            *out = Box::into_raw(Box::new(LpCertificate(cert)));
            LpStatus::Ok
        }
        Err(e) => {
            let status = certify_status(&e);
            set_error(e);
            status
        }
    })
}

/// Reads the headline bit of a certificate: true exactly when the pair
/// is certified inseparable.
///
/// # Safety
///
/// `cert` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_certificate_eq1(
    cert: *const LpCertificate,
    out: *mut bool,
) -> LpStatus {
    if cert.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    *out = (*cert).0.eq1();
    LpStatus::Ok
}

/// Copies the coloring fingerprint of a certificate.
///
/// # Safety
///
/// `cert` must be a live handle and `out` a valid pointer; on success
/// `*out` owns the string until [`lp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_certificate_fingerprint(
    cert: *const LpCertificate,
    out: *mut *mut c_char,
) -> LpStatus {
    if cert.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    *out = own_string((*cert).0.fingerprint().to_string());
    LpStatus::Ok
}

/// Serializes a certificate to JSON.
///
/// # Safety
///
/// `cert` must be a live handle and `out` a valid pointer; on success
/// `*out` owns the string until [`lp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_certificate_to_json(
    cert: *const LpCertificate,
    out: *mut *mut c_char,
) -> LpStatus {
    if cert.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    guarded(|| {
        *out = own_string((*cert).0.to_json_string());
        LpStatus::Ok
    })
}

/// Releases a certificate handle. Null is ignored.
///
/// # Safety
///
/// `cert` must be a handle from this library, not freed since.
#[no_mangle]
pub unsafe extern "C" fn lp_certificate_free(cert: *mut LpCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Builds a packing of separated pairs, up to a generation limit.
///
/// # Safety
///
/// `out` must be a valid pointer; on success `*out` owns the packing
/// until [`lp_packing_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_pack(
    epsilon: f64,
    generations: u32,
    out: *mut *mut LpPacking,
) -> LpStatus {
    if out.is_null() {
        set_error("null output pointer");
        return LpStatus::NullPointer;
    }
    guarded(|| match multigeneration(epsilon, generations) {
        Ok(packing) => {
            *out = Box::into_raw(Box::new(LpPacking(packing)));
            LpStatus::Ok
        }
        Err(e) => {
            let status = packing_status(&e);
            set_error(e);
            status
        }
    })
}

/// Parses a packing from its JSON form.
///
/// # Safety
///
/// `text` must be a valid NUL-terminated string and `out` a valid
/// pointer; on success `*out` owns the packing until
/// [`lp_packing_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_packing_from_json(
    text: *const c_char,
    out: *mut *mut LpPacking,
) -> LpStatus {
    if out.is_null() {
        set_error("null output pointer");
        return LpStatus::NullPointer;
    }
    let text = match utf8_arg(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| match Packing::from_json_str(text) {
        Ok(packing) => {
            *out = Box::into_raw(Box::new(LpPacking(packing)));
            LpStatus::Ok
        }
        Err(e) => {
            set_error(e);
            LpStatus::BadInput
        }
    })
}

/// Serializes a packing to JSON.
///
/// # Safety
///
/// `packing` must be a live handle and `out` a valid pointer; on
/// success `*out` owns the string until [`lp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_packing_to_json(
    packing: *const LpPacking,
    out: *mut *mut c_char,
) -> LpStatus {
    if packing.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    guarded(|| {
        *out = own_string((*packing).0.to_json_string());
        LpStatus::Ok
    })
}

/// Total number of pairs across all generations of a packing.
///
/// # Safety
///
/// `packing` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_packing_pair_count(
    packing: *const LpPacking,
    out: *mut u64,
) -> LpStatus {
    if packing.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    *out = (*packing).0.total_count() as u64;
    LpStatus::Ok
}

/// Re-checks every pair of a packing against a separation bound.
/// `*out_pass` reports the verdict; the call itself only fails on bad
/// arguments.
///
/// # Safety
///
/// `packing` must be a live handle and `out_pass` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lp_packing_verify(
    packing: *const LpPacking,
    epsilon: f64,
    out_pass: *mut bool,
) -> LpStatus {
    if packing.is_null() || out_pass.is_null() {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    guarded(|| {
        let report = verify_packing(&(*packing).0, epsilon);
        *out_pass = report.pass;
        LpStatus::Ok
    })
}

/// Releases a packing handle. Null is ignored.
///
/// # Safety
///
/// `packing` must be a handle from this library, not freed since.
#[no_mangle]
pub unsafe extern "C" fn lp_packing_free(packing: *mut LpPacking) {
    if !packing.is_null() {
        drop(Box::from_raw(packing));
    }
}

/// Computes a Milnor invariant from planar-diagram text. `indices`
/// names the component sequence; `modulus` of 0 keeps the exact
/// integer, a positive prime also reduces it. The coefficient is
/// written as a decimal string, the residue only when a modulus was
/// given, and `out_indeterminate` flags a value that is only defined
/// modulo shorter invariants.
///
/// # Safety
///
/// `pd_text` must be a valid NUL-terminated string, `indices` must
/// point to `indices_len` readable entries, and the three output
/// pointers must be valid; on success `*out_coefficient` owns the
/// string until [`lp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_mu_bar(
    pd_text: *const c_char,
    indices: *const u32,
    indices_len: usize,
    modulus: u64,
    out_coefficient: *mut *mut c_char,
    out_residue: *mut u64,
    out_indeterminate: *mut bool,
) -> LpStatus {
    if indices.is_null()
        || out_coefficient.is_null()
        || out_residue.is_null()
        || out_indeterminate.is_null()
    {
        set_error("null pointer argument");
        return LpStatus::NullPointer;
    }
    let text = match utf8_arg(pd_text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let sequence = std::slice::from_raw_parts(indices, indices_len).to_vec();
    guarded(|| {
        let pd = match PDCode::parse(text) {
            Ok(pd) => pd,
            Err(e) => {
                set_error(e);
                return LpStatus::BadInput;
            }
        };
        let modulus = if modulus == 0 { None } else { Some(modulus) };
        match mu_bar(&pd, &sequence, modulus) {
            Ok(result) => {
                *out_coefficient = own_string(result.coefficient.to_string());
                *out_residue = result.residue.unwrap_or(0);
                *out_indeterminate = result.indeterminate;
                LpStatus::Ok
            }
            Err(e) => {
                set_error(e);
                LpStatus::BadInput
            }
        }
    })
}

/// Order of the rank-m free exponent-3 group, as a decimal string.
///
/// # Safety
///
/// `out` must be a valid pointer; on success `*out` owns the string
/// until [`lp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lp_burnside_order(m: u64, out: *mut *mut c_char) -> LpStatus {
    if out.is_null() {
        set_error("null output pointer");
        return LpStatus::NullPointer;
    }
    guarded(|| match linkpack::burnside::burnside_order(m) {
        Ok(order) => {
            *out = own_string(order.to_string());
            LpStatus::Ok
        }
        Err(e) => {
            let status = match e {
                linkpack::burnside::BurnsideError::RankTooLarge { .. } => LpStatus::TooLarge,
                _ => LpStatus::BadInput,
            };
            set_error(e);
            status
        }
    })
}
