use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use modorb_ffi::*;

fn fixture(name: &str) -> *mut ModorbDatum {
    let name = CString::new(name).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { modorb_datum_fixture(name.as_ptr(), &mut d) },
        ModorbStatus::Ok
    );
    assert!(!d.is_null());
    d
}

fn last_error() -> String {
    let p = modorb_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn rank(d: *const ModorbDatum) -> usize {
    let mut r = 0;
    assert_eq!(unsafe { modorb_datum_rank(d, &mut r) }, ModorbStatus::Ok);
    r
}

#[test]
fn fixture_queries() {
    let d = fixture("ising");
    assert_eq!(rank(d), 3);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe { modorb_datum_s_entry(d, 0, 2, &mut re, &mut im) },
        ModorbStatus::Ok
    );
    assert!((re - 0.5f64.sqrt()).abs() < 1e-15 && im == 0.0);
    let (mut num, mut den) = (0, 0);
    assert_eq!(
        unsafe { modorb_datum_t_angle(d, 2, &mut num, &mut den) },
        ModorbStatus::Ok
    );
    assert_eq!((num, den), (1, 24));
    let mut n = 0;
    assert_eq!(
        unsafe { modorb_datum_fusion(d, 2, 2, 1, &mut n) },
        ModorbStatus::Ok
    );
    assert_eq!(n, 1);
    let mut passed = 0;
    assert_eq!(
        unsafe { modorb_datum_validate(d, 1e-9, 1e-6, &mut passed) },
        ModorbStatus::Ok
    );
    assert_eq!(passed, 1);
    unsafe { modorb_datum_free(d) };
}

#[test]
fn out_of_range_and_null_arguments() {
    let d = fixture("fibonacci");
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe { modorb_datum_s_entry(d, 2, 0, &mut re, &mut im) },
        ModorbStatus::OutOfRange
    );
    assert!(last_error().contains("out of range"));
    assert_eq!(
        unsafe { modorb_datum_rank(ptr::null(), &mut 0) },
        ModorbStatus::NullPointer
    );
    assert_eq!(
        unsafe { modorb_datum_rank(d, ptr::null_mut()) },
        ModorbStatus::NullPointer
    );
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { modorb_datum_fixture(ptr::null(), &mut out) },
        ModorbStatus::NullPointer
    );
    // Success clears the message.
    assert_eq!(rank(d), 2);
    assert!(modorb_last_error_message().is_null());
    unsafe {
        modorb_datum_free(d);
        modorb_datum_free(ptr::null_mut());
        modorb_string_free(ptr::null_mut());
    }
}

#[test]
fn json_round_trip() {
    let d = fixture("ising");
    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { modorb_datum_to_json(d, &mut json) },
        ModorbStatus::Ok
    );
    let mut back = ptr::null_mut();
    assert_eq!(
        unsafe { modorb_datum_from_json(json, &mut back) },
        ModorbStatus::Ok
    );
    assert_eq!(rank(back), 3);
    let bad = CString::new("{\"central_charge\": \"1/0\"}").unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(
        unsafe { modorb_datum_from_json(bad.as_ptr(), &mut none) },
        ModorbStatus::Parse
    );
    assert!(none.is_null());
    unsafe {
        modorb_string_free(json);
        modorb_datum_free(back);
        modorb_datum_free(d);
    }
}

#[test]
fn permutation_orbifold() {
    let d = fixture("fibonacci");
    let mut o = ptr::null_mut();
    assert_eq!(
        unsafe { modorb_perm_orbifold(d, 3, ModorbConvention::Minus, &mut o) },
        ModorbStatus::Ok
    );
    assert_eq!(rank(o), 20);
    let mut passed = 0;
    assert_eq!(
        unsafe { modorb_datum_validate(o, 0.0, 0.0, &mut passed) },
        ModorbStatus::Ok
    );
    assert_eq!(passed, 1);
    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { modorb_datum_validation_report(o, 0.0, 0.0, &mut report) },
        ModorbStatus::Ok
    );
    assert!(unsafe { CStr::from_ptr(report) }
        .to_str()
        .unwrap()
        .contains("overall: PASS"));
    unsafe { modorb_string_free(report) };

    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { modorb_perm_orbifold(d, 9, ModorbConvention::Minus, &mut bad) },
        ModorbStatus::NotPrime
    );
    assert!(last_error().contains("k must be prime"));
    assert!(bad.is_null());
    unsafe {
        modorb_datum_free(o);
        modorb_datum_free(d);
    }
}

#[test]
fn sl2z_decompose() {
    let mut w = ptr::null_mut();
    assert_eq!(
        unsafe { modorb_sl2z_decompose(0, -1, 1, 0, &mut w) },
        ModorbStatus::Ok
    );
    assert_eq!(unsafe { CStr::from_ptr(w) }.to_str().unwrap(), "S");
    unsafe { modorb_string_free(w) };
    assert_eq!(
        unsafe { modorb_sl2z_decompose(2, 0, 0, 1, &mut w) },
        ModorbStatus::NotUnimodular
    );
}

fn target_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("CARGO_TARGET_DIR") {
        return PathBuf::from(dir);
    }
    // tests/… binary lives in <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

/// Compiles the C smoke test against the generated header and static library.
/// Skipped when no C compiler or static library is around.
#[test]
fn c_smoke_test() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libmodorb_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library at {} or no cc", lib.display());
        return;
    }
    let out = target_dir().join("modorb_c_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(
        String::from_utf8_lossy(&run.stdout),
        "S T^-1 S T^3 S T^2 S S S T\n"
    );
}
