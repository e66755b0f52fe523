use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use fockledger_ffi::*;

fn build(spec: &str) -> *mut FlState {
    let spec = CString::new(spec).unwrap();
    let mut out = ptr::null_mut();
    let code = unsafe { fl_state_from_spec(spec.as_ptr(), 0.0, &mut out) };
    assert_eq!(code, FL_OK, "{}", last_error());
    out
}

fn last_error() -> String {
    let p = fl_last_error_message();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

fn stats_of(s: *const FlState) -> FlStats {
    let mut out = FlStats::default();
    assert_eq!(unsafe { fl_state_stats(s, &mut out) }, FL_OK);
    out
}

#[test]
fn negative_binomial_round_trip() {
    let s = build("negbin:xi=0.5,mu=2");
    let st = stats_of(s);
    assert!((st.mean - 2.0).abs() < 1e-9);
    assert!((st.mandel_q - 1.0).abs() < 1e-9);
    assert_eq!(st.klass, FL_CLASS_SUPER_POISSONIAN);

    let mut pred = FlPredictions::default();
    assert_eq!(unsafe { fl_state_predictions(s, &mut pred) }, FL_OK);
    assert!((pred.n_minus - 3.0).abs() < 1e-9);

    let mut sub = ptr::null_mut();
    let mut norm_sq = 0.0;
    assert_eq!(
        unsafe { fl_state_apply(s, FL_OP_ANNIHILATE, &mut sub, &mut norm_sq) },
        FL_OK
    );
    assert!((norm_sq - 2.0).abs() < 1e-9);
    assert!((stats_of(sub).mean - 3.0).abs() < 1e-9);
    unsafe {
        fl_state_free(sub);
        fl_state_free(s);
    }
}

#[test]
fn amplitudes_copy_and_buffer_check() {
    let re = [1.0, 0.0, 1.0];
    let im = [0.0, 0.0, 0.0];
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { fl_state_from_amplitudes(re.as_ptr(), im.as_ptr(), 3, &mut s) },
        FL_OK
    );

    let mut cutoff = 0;
    assert_eq!(unsafe { fl_state_cutoff(s, &mut cutoff) }, FL_OK);
    assert_eq!(cutoff, 2);

    let (mut r, mut i, mut needed) = ([0.0; 2], [0.0; 2], 0);
    let code = unsafe { fl_state_amplitudes(s, r.as_mut_ptr(), i.as_mut_ptr(), 2, &mut needed) };
    assert_eq!(code, FL_BUFFER_TOO_SMALL);
    assert_eq!(needed, 3);

    let (mut r, mut i) = ([0.0; 3], [9.0; 3]);
    assert_eq!(
        unsafe { fl_state_amplitudes(s, r.as_mut_ptr(), i.as_mut_ptr(), 3, &mut needed) },
        FL_OK
    );
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((r[0] - h).abs() < 1e-15 && r[1] == 0.0 && (r[2] - h).abs() < 1e-15);
    assert_eq!(i, [0.0; 3]);
    unsafe { fl_state_free(s) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let vacuum = build("fock:n=0");
    let st = stats_of(vacuum);
    assert!(st.mandel_q.is_nan() && st.g2.is_nan());
    assert_eq!(st.klass, FL_CLASS_UNDEFINED);

    let mut out = ptr::null_mut();
    let code = unsafe { fl_state_apply(vacuum, FL_OP_ANNIHILATE, &mut out, ptr::null_mut()) };
    assert_eq!(code, FL_ZERO_STATE);
    assert!(out.is_null());
    assert!(last_error().contains("zero state"));

    assert_eq!(
        unsafe { fl_state_apply(vacuum, 42, &mut out, ptr::null_mut()) },
        FL_INVALID_PARAMS
    );
    unsafe { fl_state_free(vacuum) };

    let bad = CString::new("log0:nbar=2").unwrap();
    assert_eq!(
        unsafe { fl_state_from_spec(bad.as_ptr(), 0.0, &mut out) },
        FL_INVALID_PARAMS
    );
    let bad = CString::new("nosuch:x=1").unwrap();
    assert_eq!(
        unsafe { fl_state_from_spec(bad.as_ptr(), 0.0, &mut out) },
        FL_PARSE
    );
    let bad = CString::new("cohvac:alpha=3,eta=3").unwrap();
    assert_eq!(
        unsafe { fl_state_from_spec(bad.as_ptr(), 0.0, &mut out) },
        FL_NO_REAL_ROOT
    );
    let ok = CString::new("fock:n=1").unwrap();
    assert_eq!(
        unsafe { fl_state_from_spec(ok.as_ptr(), 2.0, &mut out) },
        FL_INVALID_PARAMS
    );
    assert_eq!(
        unsafe { fl_state_from_spec(ptr::null(), 0.0, &mut out) },
        FL_NULL_POINTER
    );
    assert_eq!(
        unsafe { fl_state_stats(ptr::null(), ptr::null_mut()) },
        FL_NULL_POINTER
    );

    let zeros = [0.0; 4];
    assert_eq!(
        unsafe { fl_state_from_amplitudes(zeros.as_ptr(), ptr::null(), 4, &mut out) },
        FL_ZERO_STATE
    );

    let ok_state = build("fock:n=2");
    assert!(last_error().is_empty(), "success clears the message");
    unsafe { fl_state_free(ok_state) };
}

#[test]
fn verify_returns_json_report() {
    let filter = CString::new("eq7").unwrap();
    let mut json = ptr::null_mut();
    let mut all = -1;
    assert_eq!(
        unsafe { fl_verify_json(filter.as_ptr(), 7, 10, &mut json, &mut all) },
        FL_OK
    );
    assert_eq!(all, 1);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { fl_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["seed"], 7);
    assert!(!v["claims"].as_array().unwrap().is_empty());
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(fl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fockledger.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "#ifndef FOCKLEDGER_H",
        "typedef struct FlState FlState;",
        "fl_state_from_spec",
        "fl_state_from_amplitudes",
        "fl_state_free",
        "fl_state_cutoff",
        "fl_state_amplitudes",
        "fl_state_apply",
        "fl_state_stats",
        "fl_state_predictions",
        "fl_verify_json",
        "fl_string_free",
        "fl_last_error_message",
        "fl_version",
        "#define FL_PANIC 11",
        "double factorial_moments[4];",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

fn c_compiler() -> Option<&'static str> {
    ["cc", "clang", "gcc"].into_iter().find(|c| {
        Command::new(c)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"fockledger.h\"\nint main(void) { FlStats s; FlState *p = 0; return fl_state_stats(p, &s) == FL_NULL_POINTER ? 0 : 1; }\n",
    )
    .unwrap();
    let include = header().parent().unwrap().to_path_buf();
    for lang in ["c", "c++"] {
        let out = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(&include)
            .arg(&src)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{lang}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

/// Links a small C program against the static library and runs it.
#[test]
fn c_program_links_and_runs() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let lib = exe
        .parent()
        .and_then(Path::parent)
        .unwrap()
        .join("libfockledger_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("demo.c");
    std::fs::write(&src, DEMO).unwrap();
    let bin = dir.path().join("demo");
    let out = Command::new(cc)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(
        run.status.success(),
        "{stdout}{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(stdout.trim(), "mean=3.000000 q=1.000000");
}

const DEMO: &str = r#"#include <stdio.h>
#include "fockledger.h"

int main(void) {
    FlState *s = NULL, *sub = NULL;
    FlStats st;
    double norm_sq;
    if (fl_state_from_spec("negbin:xi=0.5,mu=2", 0.0, &s) != FL_OK) return 1;
    if (fl_state_apply(s, FL_OP_ANNIHILATE, &sub, &norm_sq) != FL_OK) return 2;
    if (fl_state_stats(sub, &st) != FL_OK) return 3;
    if (fl_state_apply(NULL, FL_OP_CREATE, &sub, NULL) != FL_NULL_POINTER) return 4;
    if (fl_last_error_message() == NULL) return 5;
    printf("mean=%f q=%f\n", st.mean, st.mandel_q);
    fl_state_free(sub);
    fl_state_free(s);
    return 0;
}
"#;
