use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use fujita_lab_ffi::*;

const FORCED_3D: &str = r#"{"dim":3,"p":2.0,"q":2.0,"alpha":0.0,"rho":0.0,
  "u0":{"kind":"zero"},
  "w":{"kind":"gaussian_sum","terms":[[0.5,1.0,[0.0,0.0,0.0]]]}}"#;

const SMALL_1D: &str = r#"{"dim":1,"p":3.0,"q":2.0,"alpha":0.0,"rho":0.0,
  "u0":{"kind":"gaussian_sum","terms":[[0.1,1.0,[0.0]]]},
  "w":{"kind":"zero"}}"#;

fn last_error() -> String {
    let p = fl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn problem(json: &str) -> *mut FlProblem {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fl_problem_from_json(c.as_ptr(), &mut out) }, FlStatus::Ok);
    assert!(!out.is_null());
    out
}

#[test]
fn exponents_at_the_worked_point() {
    let mut e = std::mem::MaybeUninit::<FlExponents>::uninit();
    assert_eq!(unsafe { fl_exponents(2, 3.0, 3.0, 0.0, -0.5, e.as_mut_ptr()) }, FlStatus::Ok);
    let e = unsafe { e.assume_init() };
    assert_eq!((e.threshold, e.p_c, e.ell), (3.0, 2.0, 1.0));
    assert_eq!((e.window_lo, e.window_hi), (1.0 / 6.0, 1.0 / 3.0));
    assert!(e.window_nonempty && !e.blowup_holds);
}

#[test]
fn domain_errors_report_a_message() {
    let mut e = std::mem::MaybeUninit::<FlExponents>::uninit();
    assert_eq!(unsafe { fl_exponents(2, 3.0, 3.0, 0.0, 0.0, e.as_mut_ptr()) }, FlStatus::Domain);
    assert!(last_error().contains("denominator"));
    assert_eq!(unsafe { fl_exponents(2, 3.0, 3.0, 0.0, -0.5, ptr::null_mut()) }, FlStatus::NullPointer);
}

#[test]
fn problem_parse_failures_name_the_field() {
    let c = CString::new(r#"{"dim":1,"p":"two"}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fl_problem_from_json(c.as_ptr(), &mut out) }, FlStatus::Parse);
    assert!(out.is_null());
    assert!(last_error().contains("`p`"), "{}", last_error());

    let bad = SMALL_1D.replace("\"q\":2.0", "\"q\":0.5");
    let c = CString::new(bad).unwrap();
    assert_eq!(unsafe { fl_problem_from_json(c.as_ptr(), &mut out) }, FlStatus::Invalid);
    assert_eq!(unsafe { fl_problem_from_json(ptr::null(), &mut out) }, FlStatus::NullPointer);
    let not_utf8 = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { fl_problem_from_json(not_utf8.as_ptr().cast(), &mut out) }, FlStatus::InvalidUtf8);
}

#[test]
fn classify_and_report() {
    let p = problem(FORCED_3D);
    let mut r = FlRegime::Gap;
    assert_eq!(unsafe { fl_problem_classify(p, &mut r) }, FlStatus::Ok);
    assert_eq!(r, FlRegime::Blowup);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fl_problem_exponents_json(p, &mut s) }, FlStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    assert_eq!(v["regime"], "blowup");
    assert_eq!(v["blowup_holds"], true);
    unsafe {
        fl_string_free(s);
        fl_problem_free(p);
    }
    assert_eq!(unsafe { fl_problem_classify(ptr::null(), &mut r) }, FlStatus::NullPointer);
}

#[test]
fn simulate_and_read_the_trajectory() {
    let p = problem(SMALL_1D);
    let cfg = CString::new(r#"{"dt0":0.01,"t_end":1.0}"#).unwrap();
    let geom = CString::new(r#"{"dim":1,"half_width":16.0,"points_per_axis":128}"#).unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { fl_simulate(p, cfg.as_ptr(), geom.as_ptr(), &mut t) }, FlStatus::Ok);
    let mut n = 0usize;
    assert_eq!(unsafe { fl_trajectory_len(t, &mut n) }, FlStatus::Ok);
    assert!(n >= 2);
    let (mut times, mut sup) = (ptr::null(), ptr::null());
    assert_eq!(unsafe { fl_trajectory_columns(t, &mut times, ptr::null_mut(), &mut sup) }, FlStatus::Ok);
    let times = unsafe { std::slice::from_raw_parts(times, n) };
    let sup = unsafe { std::slice::from_raw_parts(sup, n) };
    assert_eq!(times[0], 0.0);
    assert_eq!(times[n - 1], 1.0);
    assert!(sup[n - 1] < sup[0]);
    let mut v = FlVerdict::StepUnderflow;
    let mut tb = 0.0;
    assert_eq!(unsafe { fl_trajectory_verdict(t, &mut v, &mut tb) }, FlStatus::Ok);
    assert_eq!(v, FlVerdict::Completed);
    assert!(tb.is_nan());
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { fl_trajectory_to_json(t, &mut s) }, FlStatus::Ok);
    let json: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    assert_eq!(json["times"].as_array().unwrap().len(), n);
    unsafe {
        fl_string_free(s);
        fl_trajectory_free(t);
        fl_problem_free(p);
    }
}

#[test]
fn simulate_rejects_a_bad_config() {
    let p = problem(SMALL_1D);
    let cfg = CString::new(r#"{"dt0":0.01,"t_end":1.0,"bogus":1}"#).unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { fl_simulate(p, cfg.as_ptr(), ptr::null(), &mut t) }, FlStatus::Parse);
    assert!(t.is_null());
    assert!(last_error().contains("bogus"), "{}", last_error());
    unsafe { fl_problem_free(p) };
}

#[test]
fn mittag_leffler_of_order_one_is_the_exponential() {
    let (mut v, mut r) = (0.0, 0.0);
    assert_eq!(unsafe { fl_mittag_leffler(1.0, 2.0, &mut v, &mut r) }, FlStatus::Ok);
    assert!((v - 2f64.exp()).abs() < 1e-12 * v);
    assert!(r >= 0.0 && r < 1e-10);
    assert_eq!(unsafe { fl_mittag_leffler(1.5, 2.0, &mut v, ptr::null_mut()) }, FlStatus::Domain);
}

#[test]
fn null_handles_are_ignored_by_free() {
    unsafe {
        fl_problem_free(ptr::null_mut());
        fl_trajectory_free(ptr::null_mut());
        fl_string_free(ptr::null_mut());
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Compiles a C client against the generated header and the static library.
#[test]
fn c_client_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libfujita_lab_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("client.c");
    let bin = tmp.path().join("client");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "fujita_lab.h"
int main(void) {
    FlExponents e;
    if (fl_exponents(2, 3.0, 3.0, 0.0, -0.5, &e) != FL_STATUS_OK) return 1;
    if (e.p_c != 2.0 || e.ell != 1.0) return 2;
    FlProblem *p = NULL;
    if (fl_problem_from_json("{\"dim\":1}", &p) != FL_STATUS_PARSE) return 3;
    if (fl_last_error_message() == NULL) return 4;
    printf("%.1f\n", e.threshold);
    return 0;
}
"#,
    )
    .unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "client exited {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "3.0");
}
