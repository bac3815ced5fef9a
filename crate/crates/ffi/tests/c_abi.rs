use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use rulebase_ffi::*;

const PEOPLE: &str = r#"
("Alan" "is" "blue" "+") ("Alan" "is" "rough" "+") ("Alan" "is" "young" "+")
("Bob" "is" "big" "+") ("Bob" "is" "round" "+")
("Charlie" "is" "big" "+") ("Charlie" "is" "blue" "+") ("Charlie" "is" "green" "+")
("Dave" "is" "green" "+") ("Dave" "is" "rough" "+")
((("someone" "is" "big" "+")) -> ("someone" "is" "rough" "+"))
((("someone" "is" "young" "+") ("someone" "is" "round" "+")) -> ("someone" "is" "kind" "+"))
((("someone" "is" "round" "+") ("someone" "is" "big" "+")) -> ("someone" "is" "blue" "+"))
((("someone" "is" "rough" "+")) -> ("someone" "is" "green" "+"))
"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rb_last_error()) }.to_str().unwrap().to_string()
}

fn model(text: &str) -> *mut RbModel {
    let mut t = ptr::null_mut();
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(rb_theory_parse(c(text).as_ptr(), &mut t), RbCode::Ok);
        assert_eq!(rb_model_new(t, &mut m), RbCode::Ok);
        rb_theory_free(t);
    }
    m
}

#[test]
fn answers_and_depths() {
    let m = model(PEOPLE);
    let mut answer = false;
    let mut depth = 0u32;
    unsafe {
        let q = c(r#"("Bob" "is" "green" "+")"#);
        assert_eq!(rb_model_answer(m, q.as_ptr(), &mut answer, &mut depth), RbCode::Ok);
        assert!(answer);
        assert_eq!(depth, 2);
        let q = c(r#"("Dave" "is" "blue" "+")"#);
        assert_eq!(rb_model_answer(m, q.as_ptr(), &mut answer, &mut depth), RbCode::Ok);
        assert!(!answer);
        let q = c(r#"("someone" "is" "blue" "+")"#);
        assert_eq!(rb_model_answer(m, q.as_ptr(), &mut answer, &mut depth), RbCode::NonGround);
        assert!(!last_error().is_empty());
        rb_model_free(m);
    }
}

#[test]
fn explanation_json_lists_critical_sentences() {
    let m = model(PEOPLE);
    let mut out = ptr::null_mut();
    unsafe {
        let q = c(r#"("Bob" "is" "green" "+")"#);
        assert_eq!(rb_model_explain_json(m, q.as_ptr(), &mut out), RbCode::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        assert_eq!(v["critical"], serde_json::json!([3, 10, 13]));
        rb_string_free(out);
        rb_model_free(m);
    }
}

#[test]
fn syntax_errors_and_nulls() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(rb_theory_parse(c(r#"("Bob" "is")"#).as_ptr(), &mut t), RbCode::Syntax);
        assert!(t.is_null());
        assert!(last_error().contains("syntax error"));
        assert_eq!(rb_theory_parse(ptr::null(), &mut t), RbCode::NullPointer);
        assert_eq!(rb_theory_sentence_count(ptr::null()), 0);
        rb_theory_free(ptr::null_mut());
        rb_model_free(ptr::null_mut());
        rb_string_free(ptr::null_mut());
    }
}

#[test]
fn inconsistent_theory_reports_status() {
    let m = model(r#"("Bob" "is" "big" "+") ("Bob" "is" "big" "-")"#);
    let mut status = RbStatus::Consistent;
    let (mut a, mut d) = (false, 0);
    unsafe {
        assert_eq!(rb_model_status(m, &mut status), RbCode::Ok);
        assert_eq!(status, RbStatus::Inconsistent);
        let q = c(r#"("Bob" "is" "big" "+")"#);
        assert_eq!(rb_model_answer(m, q.as_ptr(), &mut a, &mut d), RbCode::Inconsistent);
        rb_model_free(m);
    }
}

#[test]
fn corpus_and_generation() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(rb_corpus_json(c("birds2").as_ptr(), &mut out), RbCode::Ok);
        assert!(CStr::from_ptr(out).to_str().unwrap().contains("Arthur can fly."));
        rb_string_free(out);
        assert_eq!(rb_corpus_json(c("nope").as_ptr(), &mut out), RbCode::UnknownCorpus);
        assert_eq!(rb_generate_theory(2, false, 2, 7, 10_000, &mut out), RbCode::Ok);
        let a = CStr::from_ptr(out).to_str().unwrap().to_string();
        rb_string_free(out);
        assert_eq!(rb_generate_theory(2, false, 2, 7, 10_000, &mut out), RbCode::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), a);
        rb_string_free(out);
        assert_eq!(rb_generate_theory(3, false, 2, 7, 10, &mut out), RbCode::InvalidArgument);
    }
}

#[test]
fn round_trip_through_emit() {
    let mut t = ptr::null_mut();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(rb_theory_parse(c(PEOPLE).as_ptr(), &mut t), RbCode::Ok);
        assert_eq!(rb_theory_sentence_count(t), 14);
        assert_eq!(rb_theory_emit(t, &mut out), RbCode::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_string();
        rb_string_free(out);
        rb_theory_free(t);
        assert_eq!(rb_theory_parse(c(&text).as_ptr(), &mut t), RbCode::Ok);
        assert_eq!(rb_theory_sentence_count(t), 14);
        rb_theory_free(t);
    }
}

/// Compiles `tests/smoke.c` against the generated header and the static
/// library, then runs it.
#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("librulebase_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = profile_dir.join("rulebase_ffi_smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("cc runs");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "true 2");
}
