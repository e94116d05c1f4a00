//! C ABI over `germforge`.
//!
//! Families are opaque `GfFamily` handles. Every fallible call returns a
//! `GfStatus`; on failure `gf_last_error` holds a message for the calling
//! thread until its next call. Strings returned through `char **` are owned
//! by the caller and released with `gf_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};

use germforge::catalog::SingularityClass;
use germforge::classify::{classify_prenormal, ENVELOPE_TERMS};
use germforge::envelope::envelope_branches;
use germforge::expr::prenormal_from_text;
use germforge::germ::PrenormalForm;
use germforge::series::Truncation;
use germforge::tanspace::{stable_codimension, tangential_codimension, MAX_DEGREE};
use germforge::Error;

/// Status codes; the nonzero values match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullArgument = 1,
    Parse = 2,
    Validation = 3,
    Inconclusive = 4,
    Internal = 5,
}

/// Opaque validated family in prenormal presentation.
pub struct GfFamily {
    pf: PrenormalForm,
    class: Option<SingularityClass>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: Error) -> GfStatus {
    set_error(&e.to_string());
    match e.exit_code() {
        2 => GfStatus::Parse,
        3 => GfStatus::Validation,
        4 => GfStatus::Inconclusive,
        _ => GfStatus::Internal,
    }
}

fn null_arg(name: &str) -> GfStatus {
    set_error(&format!("null argument `{name}`"));
    GfStatus::NullArgument
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, GfStatus> {
    if p.is_null() {
        return Err(null_arg(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("`{name}` is not valid UTF-8"));
        GfStatus::Parse
    })
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> GfStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            GfStatus::Ok
        }
        Err(_) => fail(Error::Internal("interior NUL in output".into())),
    }
}

fn truncation(n: u32) -> Truncation {
    Truncation::TotalDegree(n.max(3))
}

/// Last error message on this thread, or an empty string.
#[no_mangle]
pub extern "C" fn gf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn gf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `<x-expr> ; <y-expr>` at total degree `trunc`; `xi_form != 0`
/// reads `xi ; psi` instead.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_family_parse(text: *const c_char, xi_form: c_int, trunc: u32, out: *mut *mut GfFamily) -> GfStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let text = match read_str(text, "text") {
        Ok(t) => t,
        Err(s) => return s,
    };
    match prenormal_from_text(text, xi_form != 0, truncation(trunc)) {
        Ok(pf) => {
            *out = Box::into_raw(Box::new(GfFamily { pf, class: None }));
            GfStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Normal form of a named class at total degree `trunc`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_family_from_class(name: *const c_char, trunc: u32, out: *mut *mut GfFamily) -> GfStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let name = match read_str(name, "name") {
        Ok(t) => t,
        Err(s) => return s,
    };
    let class: SingularityClass = match name.parse() {
        Ok(c) => c,
        Err(e) => return fail(Error::from(e)),
    };
    let Some(phi) = class.normal_form(truncation(trunc)) else {
        return fail(Error::Usage(format!("class {class} has no normal form")));
    };
    match PrenormalForm::from_phi(phi) {
        Ok(pf) => {
            *out = Box::into_raw(Box::new(GfFamily { pf, class: Some(class) }));
            GfStatus::Ok
        }
        Err(e) => fail(e.into()),
    }
}

/// # Safety
/// `family` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gf_family_free(family: *mut GfFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `phi` of the presentation `(xi + t, phi)`.
///
/// # Safety
/// `family` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_prenormal(family: *const GfFamily, out: *mut *mut c_char) -> GfStatus {
    if family.is_null() || out.is_null() {
        return null_arg("family/out");
    }
    put_string(out, (*family).pf.phi().to_string())
}

/// Classification report as JSON.
///
/// # Safety
/// `family` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_classify_json(family: *const GfFamily, max_jet: u32, out: *mut *mut c_char) -> GfStatus {
    if family.is_null() || out.is_null() {
        return null_arg("family/out");
    }
    match classify_prenormal(&(*family).pf, max_jet) {
        Ok(r) => match serde_json::to_string(&r) {
            Ok(s) => put_string(out, s),
            Err(e) => fail(Error::Internal(e.to_string())),
        },
        Err(e) => fail(e.into()),
    }
}

/// Class name only, e.g. `S1,2`.
///
/// # Safety
/// `family` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_classify_name(family: *const GfFamily, max_jet: u32, out: *mut *mut c_char) -> GfStatus {
    if family.is_null() || out.is_null() {
        return null_arg("family/out");
    }
    match classify_prenormal(&(*family).pf, max_jet) {
        Ok(r) => put_string(out, r.class.name()),
        Err(e) => fail(e.into()),
    }
}

/// Exact envelope branches as JSON.
///
/// # Safety
/// `family` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_envelope_json(family: *const GfFamily, out: *mut *mut c_char) -> GfStatus {
    if family.is_null() || out.is_null() {
        return null_arg("family/out");
    }
    match envelope_branches(&(*family).pf, ENVELOPE_TERMS) {
        Ok(r) => match serde_json::to_string(&r) {
            Ok(s) => put_string(out, s),
            Err(e) => fail(Error::Internal(e.to_string())),
        },
        Err(e) => fail(e.into()),
    }
}

/// Stable codimension and tangential codimension. The handle's
/// truncation must reach a stable degree (class handles are rebuilt).
///
/// # Safety
/// `family` must be a live handle; `codim` and `tang_codim` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gf_codim(family: *const GfFamily, codim: *mut u32, tang_codim: *mut u32) -> GfStatus {
    if family.is_null() || codim.is_null() || tang_codim.is_null() {
        return null_arg("family/codim/tang_codim");
    }
    let fam = &*family;
    let pf = match fam.class.and_then(|c| c.normal_form(truncation(MAX_DEGREE + 3))) {
        Some(phi) => match PrenormalForm::from_phi(phi) {
            Ok(p) => p,
            Err(e) => return fail(e.into()),
        },
        None => fam.pf.clone(),
    };
    let f = pf.map_germ();
    let result = stable_codimension(&f).and_then(|(c, n)| tangential_codimension(&f, n).map(|(t, _)| (c, t)));
    match result {
        Ok((c, t)) => {
            *codim = c;
            *tang_codim = t;
            GfStatus::Ok
        }
        Err(e) => fail(e.into()),
    }
}

/// `*out = 1` when `from` is adjacent to `to` (transitively), else 0.
///
/// # Safety
/// `from`, `to` must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_adjacent(from: *const c_char, to: *const c_char, out: *mut c_int) -> GfStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let parse = |p, n| -> Result<SingularityClass, GfStatus> {
        read_str(p, n)?.parse().map_err(|e| fail(Error::from(e)))
    };
    let (a, b) = match (parse(from, "from"), parse(to, "to")) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    *out = germforge::catalog::adjacency(a, b) as c_int;
    GfStatus::Ok
}
