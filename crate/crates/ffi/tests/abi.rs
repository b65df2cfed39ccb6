use std::ffi::{c_char, CStr, CString};
use std::ptr;

use omem_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe {
        let need = omem_last_error(ptr::null_mut(), 0);
        let mut buf = vec![0 as c_char; need];
        omem_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn new(config: &str) -> (OmemStatus, *mut OmemScenario) {
    let mut h = ptr::null_mut();
    let s = unsafe { omem_scenario_new(c(config).as_ptr(), &mut h) };
    (s, h)
}

fn dump(h: *const OmemScenario) -> String {
    unsafe {
        let need = omem_scenario_dump(h, ptr::null_mut(), 0);
        let mut buf = vec![0 as c_char; need];
        assert_eq!(omem_scenario_dump(h, buf.as_mut_ptr(), buf.len()), need);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn preset_round_trip() {
    let (s, h) = new("preset = groblacher\nfrequency-convention = angular");
    assert_eq!(s, OmemStatus::Ok);
    let mut out = OmemFidelity::default();
    assert_eq!(
        unsafe { omem_scenario_fidelity(h, &mut out) },
        OmemStatus::Ok
    );
    assert!((out.fidelity - 0.789).abs() < 0.01, "{out:?}");
    assert!((out.tau - 0.95e-6).abs() < 1e-15);

    assert_eq!(
        unsafe { omem_scenario_set(h, c("GammaL").as_ptr(), c("1kHz").as_ptr()) },
        OmemStatus::Ok
    );
    assert_eq!(
        unsafe { omem_scenario_set(h, c("gammac").as_ptr(), c("1kHz").as_ptr()) },
        OmemStatus::Ok
    );
    let mut noisy = OmemFidelity::default();
    assert_eq!(
        unsafe { omem_scenario_fidelity(h, &mut noisy) },
        OmemStatus::Ok
    );
    assert!(noisy.fidelity < out.fidelity);

    let text = dump(h);
    assert!(text.contains("GammaL = 1000 rad/s"), "{text}");
    // The dump is itself a valid configuration.
    let (s2, h2) = new(&text);
    assert_eq!(s2, OmemStatus::Ok);
    let mut again = OmemFidelity::default();
    unsafe { omem_scenario_fidelity(h2, &mut again) };
    assert!((again.fidelity - noisy.fidelity).abs() < 1e-12);
    unsafe {
        omem_scenario_free(h);
        omem_scenario_free(h2);
    }
}

#[test]
fn config_errors_carry_codes_and_messages() {
    let (s, h) = new("preset = teufel\nbogus = 1");
    assert_eq!(s, OmemStatus::Config);
    assert!(h.is_null());
    assert!(last_error().contains("bogus"));

    let (s, _) = new("omega_m = 1\nkappa = 0.2\ngamma = 1e-3\ng0 = 1e-3\nE_L = 1000\nDelta_0 = 1");
    assert_eq!(s, OmemStatus::Unstable, "{}", last_error());
}

#[test]
fn failed_set_leaves_the_handle_alone() {
    let (_, h) = new("preset = teufel");
    let before = dump(h);
    let s = unsafe { omem_scenario_set(h, c("tau").as_ptr(), c("-1 s").as_ptr()) };
    assert_ne!(s, OmemStatus::Ok);
    assert!(!last_error().is_empty());
    assert_eq!(dump(h), before);
    unsafe { omem_scenario_free(h) };
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(
            omem_scenario_new(ptr::null(), &mut h),
            OmemStatus::InvalidArgument
        );
        assert_eq!(
            omem_scenario_new(c("preset = teufel").as_ptr(), ptr::null_mut()),
            OmemStatus::InvalidArgument
        );
        let mut out = OmemFidelity::default();
        assert_eq!(
            omem_scenario_fidelity(ptr::null(), &mut out),
            OmemStatus::InvalidArgument
        );
        assert_eq!(
            omem_scenario_set(ptr::null_mut(), c("r").as_ptr(), c("0").as_ptr()),
            OmemStatus::InvalidArgument
        );
        assert_eq!(omem_scenario_dump(ptr::null(), ptr::null_mut(), 0), 0);
        omem_scenario_free(ptr::null_mut());
    }
    assert!(last_error().contains("null"));
}

#[test]
fn short_buffers_are_not_written() {
    let (_, h) = new("preset = teufel");
    let mut buf = [7 as c_char; 4];
    let need = unsafe { omem_scenario_dump(h, buf.as_mut_ptr(), buf.len()) };
    assert!(need > 4);
    assert_eq!(buf, [7; 4]);
    unsafe { omem_scenario_free(h) };
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(omem_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/omem.h")).unwrap();
    for name in [
        "omem_scenario_new",
        "omem_scenario_set",
        "omem_scenario_fidelity",
        "omem_scenario_dump",
        "omem_scenario_free",
        "omem_last_error",
        "omem_version",
        "OMEM_STATUS_UNSTABLE = 3",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use_header.c");
    std::fs::write(
        &src,
        "#include \"omem.h\"\n\
         int main(void) {\n\
           OmemScenario *h = 0;\n\
           OmemFidelity f;\n\
           if (omem_scenario_new(\"preset = teufel\", &h) != OMEM_STATUS_OK) return 1;\n\
           omem_scenario_fidelity(h, &f);\n\
           omem_scenario_free(h);\n\
           return f.fidelity > 0.0 ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let status = std::process::Command::new(&cc)
        .args([
            "-std=c99",
            "-Wall",
            "-Werror",
            "-fsyntax-only",
            "-I",
            concat!(env!("CARGO_MANIFEST_DIR"), "/include"),
        ])
        .arg(&src)
        .status()
        .expect("a C compiler is needed to check the header");
    assert!(status.success());
}
