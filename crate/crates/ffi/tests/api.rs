use std::ffi::{c_char, CStr, CString};
use std::ptr;

use xpathsat_ffi::*;

const RUNNING: &str = "root r\nr := r*(a*b|c)r*\na := eps\nb := a\nc := eps\n";

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(xs_last_error()) }.to_str().unwrap().to_owned()
}

/// Takes ownership of a returned string.
fn take(s: *mut c_char) -> Option<String> {
    if s.is_null() {
        return None;
    }
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { xs_string_free(s) };
    Some(out)
}

fn dtd(text: &str) -> *mut XsDtd {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { xs_dtd_parse(c(text).as_ptr(), XS_FORMAT_AUTO, ptr::null(), &mut d) }, XsStatus::Ok);
    d
}

fn query(text: &str) -> *mut XsQuery {
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { xs_query_parse(c(text).as_ptr(), &mut q) }, XsStatus::Ok);
    q
}

fn satisfiable(d: *const XsDtd, text: &str) -> Result<bool, XsStatus> {
    let q = query(text);
    let mut out = false;
    let status = unsafe { xs_satisfiable(d, q, &mut out) };
    unsafe { xs_query_free(q) };
    if status == XsStatus::Ok {
        Ok(out)
    } else {
        Err(status)
    }
}

#[test]
fn decides_running_example() {
    let d = dtd(RUNNING);
    assert_eq!(satisfiable(d, "(↓::r/→⁺::b)/(↓::a/↑::b)"), Ok(true));
    assert_eq!(satisfiable(d, "(↓::r/→⁺::b)/(↓::a/↑::b)/→⁺::c"), Ok(false));
    assert_eq!(satisfiable(d, "child::r/fsib::b[child::a]"), Ok(true));
    assert_eq!(satisfiable(d, "↓::a | ↓::b"), Err(XsStatus::UnsupportedFragment));
    assert!(last_error().contains("neither procedure"));
    unsafe { xs_dtd_free(d) };
}

#[test]
fn json_verdict_and_trace() {
    let d = dtd(RUNNING);
    let q = query("↓::r/→⁺::b");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { xs_check_json(d, q, true, &mut out) }, XsStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "SAT");
    assert_eq!(v["trace"][1], "↓::r: ({u0}{u1,u5}, {r↦∅})");
    unsafe { (xs_query_free(q), xs_dtd_free(d)) };
}

#[test]
fn oracle_witness() {
    let d = dtd(RUNNING);
    let q = query("↓::r/→⁺::b[↓::a]");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { xs_oracle(d, q, 3, 2, &mut out) }, XsStatus::Ok);
    assert_eq!(take(out).as_deref(), Some("r(r(c),b(a))"));
    assert_eq!(unsafe { xs_oracle(d, q, 0, 2, &mut out) }, XsStatus::InvalidArgument);
    assert!(out.is_null());
    let none = query("↓::c/→⁺::b");
    assert_eq!(unsafe { xs_oracle(d, none, 3, 0, &mut out) }, XsStatus::Ok);
    assert!(out.is_null());
    unsafe { (xs_query_free(q), xs_query_free(none), xs_dtd_free(d)) };
}

#[test]
fn models() {
    let mut eq = false;
    assert_eq!(unsafe { xs_equivalent(c("ab?|b").as_ptr(), c("a#b").as_ptr(), &mut eq) }, XsStatus::Ok);
    assert!(eq);
    assert_eq!(unsafe { xs_equivalent(c("ab").as_ptr(), c("ba").as_ptr(), &mut eq) }, XsStatus::Ok);
    assert!(!eq);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { xs_delta(c("a*((b#(c#d))a*)?").as_ptr(), &mut out) }, XsStatus::Ok);
    assert_eq!(take(out).as_deref(), Some("a*bcda*"));
    assert_eq!(unsafe { xs_delta(c("a|aa").as_ptr(), &mut out) }, XsStatus::NotMrw);
    assert_eq!(unsafe { xs_delta(c("a(").as_ptr(), &mut out) }, XsStatus::ParseError);
    assert!(!last_error().is_empty());
}

#[test]
fn errors() {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { xs_dtd_parse(ptr::null(), XS_FORMAT_NATIVE, ptr::null(), &mut d) }, XsStatus::NullArgument);
    assert_eq!(unsafe { xs_dtd_parse(c(RUNNING).as_ptr(), 9, ptr::null(), &mut d) }, XsStatus::InvalidArgument);
    assert_eq!(unsafe { xs_dtd_parse(c("").as_ptr(), XS_FORMAT_NATIVE, ptr::null(), &mut d) }, XsStatus::ParseError);
    assert!(d.is_null());
    let bad = [0xffu8, 0];
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { xs_query_parse(bad.as_ptr().cast(), &mut q) }, XsStatus::InvalidUtf8);
    assert_eq!(unsafe { xs_query_parse(c("↓::").as_ptr(), &mut q) }, XsStatus::ParseError);
    let mut out = false;
    assert_eq!(unsafe { xs_satisfiable(ptr::null(), ptr::null(), &mut out) }, XsStatus::NullArgument);
    let not_mrw = dtd("root r\nr := a|aa\na := eps\n");
    assert_eq!(satisfiable(not_mrw, "↓::a"), Err(XsStatus::NotMrw));
    unsafe { (xs_dtd_free(not_mrw), xs_dtd_free(ptr::null_mut()), xs_string_free(ptr::null_mut())) };
}

#[test]
fn xml_dtd_with_root_override() {
    let text = "<!ELEMENT doc (title, para+)><!ELEMENT title EMPTY><!ELEMENT para EMPTY>";
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { xs_dtd_parse(c(text).as_ptr(), XS_FORMAT_XML, c("doc").as_ptr(), &mut d) }, XsStatus::Ok);
    assert_eq!(satisfiable(d, "↓::para/←⁺::title"), Ok(true));
    assert_eq!(satisfiable(d, "↓::para/→⁺::title"), Ok(false));
    unsafe { xs_dtd_free(d) };
}

#[test]
fn header_declares_every_function() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/xpathsat.h")).unwrap();
    for f in [
        "xs_last_error",
        "xs_dtd_parse",
        "xs_dtd_free",
        "xs_query_parse",
        "xs_query_free",
        "xs_satisfiable",
        "xs_check_json",
        "xs_oracle",
        "xs_equivalent",
        "xs_delta",
        "xs_string_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
}
