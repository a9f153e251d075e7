//! C interface to the satisfiability checker.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Every fallible function returns an
//! [`XsStatus`]; on failure a message is available from
//! [`xs_last_error`] on the same thread. Strings returned through `char **`
//! parameters are released with [`xs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use xpathsat::dtd::{self, Dtd, DtdFormat};
use xpathsat::oracle::{Bounds, Oracle};
use xpathsat::regex::ContentModel;
use xpathsat::sat::{Checker, SatError};
use xpathsat::xpath::XPath;

/// Choose XML if the text starts with `<`, native otherwise.
pub const XS_FORMAT_AUTO: u32 = 0;
pub const XS_FORMAT_NATIVE: u32 = 1;
pub const XS_FORMAT_XML: u32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    /// The DTD has a rule outside the supported class.
    NotMrw = 4,
    /// The expression uses features neither procedure decides.
    UnsupportedFragment = 5,
    InvalidArgument = 6,
    /// An internal error; the library state is unaffected.
    Panic = 7,
}

/// A parsed DTD prepared for checking.
pub struct XsDtd {
    dtd: Dtd,
    checker: Result<Checker, SatError>,
}

/// A parsed XPath expression.
pub struct XsQuery {
    xpath: XPath,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(XsStatus, String);

type Outcome = Result<(), Fail>;

fn sat_error(e: &SatError) -> Fail {
    let status = match e {
        SatError::NotMrw(_) => XsStatus::NotMrw,
        SatError::UnsupportedFragment(_) => XsStatus::UnsupportedFragment,
        _ => XsStatus::InvalidArgument,
    };
    Fail(status, e.to_string())
}

/// Runs `f`, recording failures and turning panics into [`XsStatus::Panic`].
fn guard(f: impl FnOnce() -> Outcome + UnwindSafe) -> XsStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => {
            set_error("");
            XsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            XsStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(XsStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(XsStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

/// # Safety
/// `p` is null or valid for writes.
unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(XsStatus::NullArgument, format!("`{name}` is null")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NUL bytes were replaced").into_raw()
}

/// The message for the last failure on this thread, or an empty string.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn xs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a DTD. `root` may be null to use the root named in the text.
///
/// # Safety
/// `text` and `root` are null or NUL-terminated; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn xs_dtd_parse(
    text: *const c_char,
    format: u32,
    root: *const c_char,
    out: *mut *mut XsDtd,
) -> XsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let root = if root.is_null() { None } else { Some(str_arg(root, "root")?) };
        let format = match format {
            XS_FORMAT_AUTO if text.trim_start().starts_with('<') => DtdFormat::Xml,
            XS_FORMAT_AUTO | XS_FORMAT_NATIVE => DtdFormat::Native,
            XS_FORMAT_XML => DtdFormat::Xml,
            other => return Err(Fail(XsStatus::InvalidArgument, format!("unknown format {other}"))),
        };
        let dtd = Dtd::parse(text, format, root).map_err(|e| Fail(XsStatus::ParseError, e.to_string()))?;
        let checker = Checker::new(&dtd);
        *out = Box::into_raw(Box::new(XsDtd { dtd, checker }));
        Ok(())
    })
}

/// # Safety
/// `d` is null or a handle from [`xs_dtd_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xs_dtd_free(d: *mut XsDtd) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Parses an expression in arrow or named-axis syntax.
///
/// # Safety
/// `text` is null or NUL-terminated; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn xs_query_parse(text: *const c_char, out: *mut *mut XsQuery) -> XsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let xpath = XPath::parse(text).map_err(|e| Fail(XsStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(XsQuery { xpath }));
        Ok(())
    })
}

/// # Safety
/// `q` is null or a handle from [`xs_query_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xs_query_free(q: *mut XsQuery) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// # Safety
/// `d` and `q` are null or live handles.
unsafe fn handles<'a>(d: *const XsDtd, q: *const XsQuery) -> Result<(&'a XsDtd, &'a XsQuery), Fail> {
    let d = d.as_ref().ok_or_else(|| Fail(XsStatus::NullArgument, "`dtd` is null".into()))?;
    let q = q.as_ref().ok_or_else(|| Fail(XsStatus::NullArgument, "`query` is null".into()))?;
    Ok((d, q))
}

fn checker(d: &XsDtd) -> Result<&Checker, Fail> {
    d.checker.as_ref().map_err(sat_error)
}

/// Decides whether some document valid for `dtd` has a node selected by
/// `query`.
///
/// # Safety
/// `dtd` and `query` are null or live handles; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn xs_satisfiable(dtd: *const XsDtd, query: *const XsQuery, out: *mut bool) -> XsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (d, q) = handles(dtd, query)?;
        *out = checker(d)?.check(&q.xpath).map_err(|e| sat_error(&e))?.satisfiable;
        Ok(())
    })
}

/// The full verdict as a JSON object, with intermediate states when
/// `trace` is set.
///
/// # Safety
/// `dtd` and `query` are null or live handles; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn xs_check_json(
    dtd: *const XsDtd,
    query: *const XsQuery,
    trace: bool,
    out: *mut *mut c_char,
) -> XsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let (d, q) = handles(dtd, query)?;
        let v = checker(d)?.check_with(&q.xpath, trace).map_err(|e| sat_error(&e))?;
        *out = into_c_string(v.to_json().to_string());
        Ok(())
    })
}

/// Searches for a witness document. `rep` 0 selects the default for the
/// query. On success `*out` is the witness term, or null if none was found
/// within the bounds.
///
/// # Safety
/// `dtd` and `query` are null or live handles; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn xs_oracle(
    dtd: *const XsDtd,
    query: *const XsQuery,
    depth: usize,
    rep: usize,
    out: *mut *mut c_char,
) -> XsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let (d, q) = handles(dtd, query)?;
        if depth == 0 {
            return Err(Fail(XsStatus::InvalidArgument, "depth must be at least 1".into()));
        }
        let rep = if rep == 0 { Bounds::for_query(&q.xpath).rep } else { rep };
        if let Some(w) = Oracle::new(&d.dtd).satisfiable(&q.xpath, Bounds { depth, rep }).witness() {
            *out = into_c_string(w.to_string());
        }
        Ok(())
    })
}

/// Whether two single-character-symbol content models denote the same
/// language.
///
/// # Safety
/// `left` and `right` are null or NUL-terminated; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn xs_equivalent(left: *const c_char, right: *const c_char, out: *mut bool) -> XsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let parse = |s| ContentModel::parse_compact(s).map_err(|e| Fail(XsStatus::ParseError, e.to_string()));
        let a = parse(str_arg(left, "left")?)?;
        let b = parse(str_arg(right, "right")?)?;
        *out = a.equivalent(&b);
        Ok(())
    })
}

/// The simplified form of an MRW content model with single-character
/// symbols.
///
/// # Safety
/// `model` is null or NUL-terminated; `out` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn xs_delta(model: *const c_char, out: *mut *mut c_char) -> XsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let e = ContentModel::parse_compact(str_arg(model, "model")?)
            .map_err(|e| Fail(XsStatus::ParseError, e.to_string()))?;
        if !dtd::is_mrw(&e) {
            return Err(Fail(XsStatus::NotMrw, format!("`{e}` is not MRW")));
        }
        *out = into_c_string(dtd::delta(&e).to_string());
        Ok(())
    })
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
