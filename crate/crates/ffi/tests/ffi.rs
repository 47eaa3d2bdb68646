use std::ffi::{CStr, CString};
use std::ptr;

use ncample_ffi::*;

const PAIR: &str = r#"{
  "name": "P1xP1", "dim": 2, "rho": 2,
  "euler": [
    {"coeff": "1", "exponents": [1, 1]}, {"coeff": "1", "exponents": [1, 0]},
    {"coeff": "1", "exponents": [0, 1]}, {"coeff": "1", "exponents": [0, 0]}
  ],
  "ample_cone": [[1, 0], [0, 1]],
  "bimodules": [
    {"divisor": [1, 0], "matrix": [[1, 0], [0, 1]]},
    {"divisor": [0, 1], "matrix": [[1, 0], [0, 1]]}
  ]
}"#;

const LINE_AND_INVERSE: &str = r#"{
  "name": "P1", "dim": 1, "rho": 1,
  "euler": [{"coeff": "1", "exponents": [1]}, {"coeff": "1", "exponents": [0]}],
  "ample_cone": [[1]],
  "bimodules": [{"divisor": [1], "matrix": [[1]]}, {"divisor": [-1], "matrix": [[1]]}]
}"#;

const P1_LINE: &str = r#"{
  "name": "P1", "dim": 1, "rho": 1,
  "euler": [{"coeff": "1", "exponents": [1]}, {"coeff": "1", "exponents": [0]}],
  "ample_cone": [[1]],
  "bimodules": [{"divisor": [1], "matrix": [[1]]}]
}"#;

struct Handle(*mut NcSystem);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { nc_system_free(self.0) }
    }
}

fn load(json: &str) -> Handle {
    let c = CString::new(json).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nc_system_from_json(c.as_ptr(), &mut h) }, NcStatus::Ok);
    Handle(h)
}

fn last_error() -> String {
    let p = nc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { nc_string_free(p) };
    s
}

#[test]
fn verdict_and_json() {
    let pair = load(PAIR);
    let mut kind = NcVerdictKind::Undetermined;
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { nc_verdict(pair.0, 16, &mut kind, &mut json) }, NcStatus::Ok);
    assert_eq!(kind, NcVerdictKind::NcAmple);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["m0"], serde_json::json!([1, 1]));

    let bad = load(LINE_AND_INVERSE);
    assert_eq!(unsafe { nc_verdict(bad.0, 16, &mut kind, ptr::null_mut()) }, NcStatus::Ok);
    assert_eq!(kind, NcVerdictKind::EventualAmplenessFail);
}

#[test]
fn gk_and_constructions() {
    let line = load(P1_LINE);
    let (mut gk, mut lo, mut hi) = (0u32, 0u64, 0u64);
    assert_eq!(unsafe { nc_gk(line.0, 16, &mut gk, &mut lo, &mut hi) }, NcStatus::Ok);
    assert_eq!((gk, lo, hi), (2, 2, 2));

    let mut rees = ptr::null_mut();
    assert_eq!(unsafe { nc_rees(line.0, &mut rees) }, NcStatus::Ok);
    let rees = Handle(rees);
    assert_eq!(unsafe { nc_gk(rees.0, 16, &mut gk, &mut lo, &mut hi) }, NcStatus::Ok);
    assert_eq!(gk, 3);

    let pair = load(PAIR);
    let mut prod = ptr::null_mut();
    assert_eq!(unsafe { nc_product(pair.0, line.0, &mut prod) }, NcStatus::Ok);
    let prod = Handle(prod);
    let mut s = 0usize;
    let mut rho = 0usize;
    unsafe {
        nc_system_arity(prod.0, &mut s);
        nc_system_rank(prod.0, &mut rho);
    }
    assert_eq!((s, rho), (3, 3));
    assert_eq!(unsafe { nc_gk(prod.0, 16, &mut gk, &mut lo, &mut hi) }, NcStatus::Ok);
    assert_eq!(gk, 6);

    let bad = load(LINE_AND_INVERSE);
    assert_eq!(unsafe { nc_gk(bad.0, 16, &mut gk, &mut lo, &mut hi) }, NcStatus::NotNcAmple);
    assert!(last_error().contains("not NC-ample"));
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { nc_rees(pair.0, &mut none) }, NcStatus::InvalidArgument);
    assert!(none.is_null());
}

#[test]
fn classes_duals_and_veronese() {
    let pair = load(PAIR);
    let mut out = [0i64; 2];
    assert_eq!(unsafe { nc_class_at(pair.0, [2u64, 3].as_ptr(), 2, out.as_mut_ptr(), 2) }, NcStatus::Ok);
    assert_eq!(out, [2, 3]);
    assert_eq!(unsafe { nc_class_at(pair.0, [2u64].as_ptr(), 1, out.as_mut_ptr(), 2) }, NcStatus::InvalidArgument);
    assert_eq!(unsafe { nc_class_at(pair.0, [2u64, 3].as_ptr(), 2, out.as_mut_ptr(), 1) }, NcStatus::InvalidArgument);

    let mut ver = ptr::null_mut();
    assert_eq!(unsafe { nc_veronese(pair.0, [2u64, 5].as_ptr(), 2, &mut ver) }, NcStatus::Ok);
    let ver = Handle(ver);
    assert_eq!(unsafe { nc_class_at(ver.0, [1u64, 1].as_ptr(), 2, out.as_mut_ptr(), 2) }, NcStatus::Ok);
    assert_eq!(out, [2, 5]);

    let mut dual = ptr::null_mut();
    assert_eq!(unsafe { nc_dual(pair.0, &mut dual) }, NcStatus::Ok);
    let dual = Handle(dual);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { nc_system_to_json(dual.0, &mut json) }, NcStatus::Ok);
    let text = take_string(json);
    assert!(text.contains("\"bimodules\""));
    drop(load(&text));
}

#[test]
fn class_overflow_is_reported() {
    let line = load(P1_LINE);
    let mut out = [0i64; 1];
    let edge = [i64::MAX as u64];
    assert_eq!(unsafe { nc_class_at(line.0, edge.as_ptr(), 1, out.as_mut_ptr(), 1) }, NcStatus::Ok);
    assert_eq!(out[0], i64::MAX);
    let past = [i64::MAX as u64 + 1];
    assert_eq!(unsafe { nc_class_at(line.0, past.as_ptr(), 1, out.as_mut_ptr(), 1) }, NcStatus::Overflow);
    assert!(last_error().contains("64 bits"));
}

#[test]
fn quasi_unipotence() {
    let (mut yes, mut order) = (-1i32, 0u64);
    let swap = [0i64, 1, 1, 0];
    assert_eq!(unsafe { nc_is_quasi_unipotent(swap.as_ptr(), 2, &mut yes, &mut order) }, NcStatus::Ok);
    assert_eq!((yes, order), (1, 2));
    let fib = [2i64, 1, 1, 1];
    assert_eq!(unsafe { nc_is_quasi_unipotent(fib.as_ptr(), 2, &mut yes, ptr::null_mut()) }, NcStatus::Ok);
    assert_eq!(yes, 0);
    let singular = [1i64, 1, 1, 1];
    assert_eq!(unsafe { nc_is_quasi_unipotent(singular.as_ptr(), 2, &mut yes, &mut order) }, NcStatus::InvalidArgument);
}

#[test]
fn bad_inputs() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nc_system_from_json(ptr::null(), &mut h) }, NcStatus::NullPointer);
    let junk = CString::new("{\"name\": 1}").unwrap();
    assert_eq!(unsafe { nc_system_from_json(junk.as_ptr(), &mut h) }, NcStatus::InvalidInput);
    assert!(h.is_null());
    assert!(!last_error().is_empty());
    let bytes = [0xffu8, 0];
    assert_eq!(unsafe { nc_system_from_json(bytes.as_ptr().cast(), &mut h) }, NcStatus::InvalidUtf8);
    let mut kind = NcVerdictKind::NcAmple;
    assert_eq!(unsafe { nc_verdict(ptr::null(), 16, &mut kind, ptr::null_mut()) }, NcStatus::NullPointer);
    let pair = load(PAIR);
    assert_eq!(unsafe { nc_verdict(pair.0, 0, &mut kind, ptr::null_mut()) }, NcStatus::InvalidArgument);
    unsafe {
        nc_system_free(ptr::null_mut());
        nc_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(nc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/ncample.h");
    for name in [
        "nc_last_error",
        "nc_version",
        "nc_string_free",
        "nc_system_from_json",
        "nc_system_free",
        "nc_system_to_json",
        "nc_system_arity",
        "nc_system_rank",
        "nc_class_at",
        "nc_verdict",
        "nc_gk",
        "nc_dual",
        "nc_veronese",
        "nc_rees",
        "nc_product",
        "nc_is_quasi_unipotent",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct NcSystem NcSystem;"));
}
