//! C interface to the reasoner.
//!
//! Theories and models are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an [`RbCode`];
//! on failure [`rb_last_error`] describes the problem. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`rb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rulebase::corpora::{load_corpus, CorpusError};
use rulebase::engine::{forward_chain, EngineError, Model, Status};
use rulebase::explain::explain;
use rulebase::generator::{generate_theory, theory_rng};
use rulebase::logic::{Theory, TheoryType};
use rulebase::syntax::{emit_theory, parse_literal, parse_theory};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbCode {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    NonGround = 4,
    /// The theory derives a literal and its negation.
    Inconsistent = 5,
    /// The theory has a negative dependency cycle.
    Unstratified = 6,
    UnknownCorpus = 7,
    GenerateFailed = 8,
    InvalidArgument = 9,
    Internal = 99,
}

/// Outcome of forward chaining.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbStatus {
    Consistent = 0,
    Inconsistent = 1,
    Unstratified = 2,
}

/// A parsed theory.
pub struct RbTheory(Theory);

/// A forward-chained model with proofs recorded.
pub struct RbModel(Model);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

struct Failure(RbCode, String);

impl Failure {
    fn new(code: RbCode, message: impl Into<String>) -> Failure {
        Failure(code, message.into())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        let code = match e {
            EngineError::NonGround => RbCode::NonGround,
            EngineError::InconsistentTheory(Status::Unstratified) => RbCode::Unstratified,
            EngineError::InconsistentTheory(_) => RbCode::Inconsistent,
            EngineError::ProvenAtom | EngineError::NotProven => RbCode::Internal,
        };
        Failure(code, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RbCode {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RbCode::Ok
        }
        Ok(Err(Failure(code, message))) => {
            set_error(message);
            code
        }
        Err(_) => {
            set_error("internal panic");
            RbCode::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(RbCode::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::new(RbCode::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn check_out<T>(p: *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::new(RbCode::NullPointer, format!("{what} is null")));
    }
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) {
    let c = CString::new(s.replace('\0', " ")).expect("nul bytes removed");
    *out = c.into_raw();
}

unsafe fn model_ref<'a>(m: *const RbModel) -> Result<&'a Model, Failure> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| Failure::new(RbCode::NullPointer, "model is null"))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses statement text into a new theory handle.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_theory_parse(text: *const c_char, out: *mut *mut RbTheory) -> RbCode {
    guard(|| {
        check_out(out, "out")?;
        *out = ptr::null_mut();
        let text = read_str(text, "text")?;
        let t = parse_theory(text).map_err(|e| Failure::new(RbCode::Syntax, e.to_string()))?;
        *out = Box::into_raw(Box::new(RbTheory(t)));
        Ok(())
    })
}

/// # Safety
/// `t` must come from [`rb_theory_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn rb_theory_free(t: *mut RbTheory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of sentences, or 0 for a null handle.
///
/// # Safety
/// `t` must be a live theory handle or null.
#[no_mangle]
pub unsafe extern "C" fn rb_theory_sentence_count(t: *const RbTheory) -> usize {
    t.as_ref().map_or(0, |t| t.0.len())
}

/// Writes the theory back as statement text, one statement per line.
///
/// # Safety
/// `t` must be a live theory handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_theory_emit(t: *const RbTheory, out: *mut *mut c_char) -> RbCode {
    guard(|| {
        check_out(out, "out")?;
        let t = t.as_ref().ok_or_else(|| Failure::new(RbCode::NullPointer, "theory is null"))?;
        write_string(out, emit_theory(&t.0));
        Ok(())
    })
}

/// Forward-chains a theory. The theory handle stays owned by the caller.
///
/// # Safety
/// `t` must be a live theory handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_model_new(t: *const RbTheory, out: *mut *mut RbModel) -> RbCode {
    guard(|| {
        check_out(out, "out")?;
        *out = ptr::null_mut();
        let t = t.as_ref().ok_or_else(|| Failure::new(RbCode::NullPointer, "theory is null"))?;
        *out = Box::into_raw(Box::new(RbModel(forward_chain(&t.0))));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`rb_model_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn rb_model_free(m: *mut RbModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live model handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_model_status(m: *const RbModel, out: *mut RbStatus) -> RbCode {
    guard(|| {
        check_out(out, "out")?;
        *out = match model_ref(m)?.status() {
            Status::Consistent => RbStatus::Consistent,
            Status::Inconsistent => RbStatus::Inconsistent,
            Status::Unstratified => RbStatus::Unstratified,
        };
        Ok(())
    })
}

/// Closed-world answer and depth for one ground statement such as
/// `("Bob" "is" "green" "+")`. The depth is the proof depth of the literal
/// the answer rests on, or the failure depth when nothing is derived.
///
/// # Safety
/// `m` must be a live model handle; `statement` a nul-terminated string;
/// `answer` and `depth` writable.
#[no_mangle]
pub unsafe extern "C" fn rb_model_answer(
    m: *const RbModel,
    statement: *const c_char,
    answer: *mut bool,
    depth: *mut u32,
) -> RbCode {
    guard(|| {
        check_out(answer, "answer")?;
        check_out(depth, "depth")?;
        let model = model_ref(m)?;
        let s = parse_literal(read_str(statement, "statement")?)
            .map_err(|e| Failure::new(RbCode::Syntax, e.to_string()))?;
        let e = explain(model, &s)?;
        match (e.answer, e.depth) {
            (Some(a), Some(d)) => {
                *answer = a;
                *depth = d;
                Ok(())
            }
            _ => Err(EngineError::InconsistentTheory(e.status).into()),
        }
    })
}

/// Full explanation as JSON: answer, depth, proofs, critical sentence
/// indices and a model summary.
///
/// # Safety
/// `m` must be a live model handle; `statement` a nul-terminated string;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rb_model_explain_json(
    m: *const RbModel,
    statement: *const c_char,
    out: *mut *mut c_char,
) -> RbCode {
    guard(|| {
        check_out(out, "out")?;
        let model = model_ref(m)?;
        let s = parse_literal(read_str(statement, "statement")?)
            .map_err(|e| Failure::new(RbCode::Syntax, e.to_string()))?;
        let e = explain(model, &s)?;
        write_string(out, serde_json::to_string(&e).map_err(|e| Failure::new(RbCode::Internal, e.to_string()))?);
        Ok(())
    })
}

/// A bundled corpus with its English wording and known answers, as JSON.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rb_corpus_json(name: *const c_char, out: *mut *mut c_char) -> RbCode {
    guard(|| {
        check_out(out, "out")?;
        let corpus = load_corpus(read_str(name, "name")?).map_err(|e| match e {
            CorpusError::UnknownCorpus(_) => Failure::new(RbCode::UnknownCorpus, e.to_string()),
            _ => Failure::new(RbCode::Internal, e.to_string()),
        })?;
        write_string(out, serde_json::to_string(&corpus).map_err(|e| Failure::new(RbCode::Internal, e.to_string()))?);
        Ok(())
    })
}

/// Samples one theory reaching `depth` and returns its statement text.
/// `theory_type` is 1 for attribute-only theories and 2 for relational ones.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rb_generate_theory(
    theory_type: u32,
    negation: bool,
    depth: u32,
    seed: u64,
    max_attempts: usize,
    out: *mut *mut c_char,
) -> RbCode {
    guard(|| {
        check_out(out, "out")?;
        let t = match theory_type {
            1 => TheoryType::Type1Att,
            2 => TheoryType::Type2Rel,
            other => return Err(Failure::new(RbCode::InvalidArgument, format!("theory type {other} is not 1 or 2"))),
        };
        let g = generate_theory(t, negation, depth, max_attempts, &mut theory_rng(seed, 0))
            .map_err(|e| Failure::new(RbCode::GenerateFailed, e.to_string()))?;
        write_string(out, emit_theory(&g.theory));
        Ok(())
    })
}
