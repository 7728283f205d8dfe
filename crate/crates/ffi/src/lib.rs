//! C ABI over the synthesis toolkit.
//!
//! Every function returns an [`RsStatus`]; on failure the message is kept in a
//! thread-local slot readable with [`rs_last_error`]. Handles are opaque and
//! owned by the caller, who releases them with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ratsynth::cli::{cmd_synth, format_assignment, parse_assignment, split_names, Config};
use ratsynth::formula::Spec;
use ratsynth::runtime::run_program;
use ratsynth::smtlib::parse_problem;
use ratsynth::synth::ProgIR;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    SynthError = 4,
    RuntimeError = 5,
    /// The program returned no output for this input.
    Bot = 6,
    Panic = 7,
}

pub struct RsProblem {
    spec: Spec,
}

pub struct RsProgram {
    prog: ProgIR,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn fail(status: RsStatus, msg: impl Into<String>) -> RsStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> RsStatus) -> RsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(RsStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, RsStatus> {
    if p.is_null() {
        return Err(fail(RsStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(RsStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn rs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|s| s.as_ptr()).unwrap_or(ptr::null()))
}

/// Parses an SMT-LIB problem; `inputs` and `outputs` are comma-separated names.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_problem_parse(
    smt2: *const c_char,
    inputs: *const c_char,
    outputs: *const c_char,
    out: *mut *mut RsProblem,
) -> RsStatus {
    guard(|| {
        if out.is_null() {
            return fail(RsStatus::NullArgument, "null output pointer");
        }
        let (text, ins, outs) = match (read_str(smt2), read_str(inputs), read_str(outputs)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
        };
        match parse_problem(text, &split_names(ins), &split_names(outs)) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(RsProblem { spec }));
                RsStatus::Ok
            }
            Err(e) => fail(RsStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `p` must be null or a handle from [`rs_problem_parse`], freed once.
#[no_mangle]
pub unsafe extern "C" fn rs_problem_free(p: *mut RsProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Synthesizes a program with `iteration_budget` loop iterations (0 keeps the
/// default). `complete` receives 1 when the program is complete.
///
/// # Safety
/// `problem` must be a live handle; `out` must be writable; `complete` may be null.
#[no_mangle]
pub unsafe extern "C" fn rs_synthesize(
    problem: *const RsProblem,
    iteration_budget: u32,
    out: *mut *mut RsProgram,
    complete: *mut i32,
) -> RsStatus {
    guard(|| {
        if problem.is_null() || out.is_null() {
            return fail(RsStatus::NullArgument, "null handle");
        }
        let mut cfg = Config::default();
        if iteration_budget > 0 {
            cfg.iteration_budget = iteration_budget as usize;
        }
        match cmd_synth(&(*problem).spec, &cfg) {
            Ok(res) => {
                if !complete.is_null() {
                    *complete = (res.report.completeness == ratsynth::synth::Completeness::Complete) as i32;
                }
                *out = Box::into_raw(Box::new(RsProgram { prog: res.program }));
                RsStatus::Ok
            }
            Err(e) => fail(RsStatus::SynthError, format!("{e:#}")),
        }
    })
}

/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_program_from_json(json: *const c_char, out: *mut *mut RsProgram) -> RsStatus {
    guard(|| {
        if out.is_null() {
            return fail(RsStatus::NullArgument, "null output pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ProgIR::from_json(text) {
            Ok(prog) => {
                *out = Box::into_raw(Box::new(RsProgram { prog }));
                RsStatus::Ok
            }
            Err(e) => fail(RsStatus::ParseError, e.to_string()),
        }
    })
}

/// Serialized program; release with [`rs_string_free`].
///
/// # Safety
/// `prog` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_program_to_json(prog: *const RsProgram, out: *mut *mut c_char) -> RsStatus {
    guard(|| {
        if prog.is_null() || out.is_null() {
            return fail(RsStatus::NullArgument, "null handle");
        }
        *out = to_c((*prog).prog.to_json());
        RsStatus::Ok
    })
}

/// Runs the program on an input such as `"x=1/2"`. On `Ok`, `out` receives
/// the outputs as `name=value` lines; on `Bot` it is left untouched.
///
/// # Safety
/// `prog` must be a live handle; `input` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_program_run(prog: *const RsProgram, input: *const c_char, out: *mut *mut c_char) -> RsStatus {
    guard(|| {
        if prog.is_null() || out.is_null() {
            return fail(RsStatus::NullArgument, "null handle");
        }
        let text = match read_str(input) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let a = match parse_assignment(text) {
            Ok(a) => a,
            Err(e) => return fail(RsStatus::ParseError, format!("{e:#}")),
        };
        match run_program(&(*prog).prog, &a, &Config::default().run_options()) {
            Ok(r) => match r.outcome {
                Some(b) => {
                    *out = to_c(format_assignment(&b));
                    RsStatus::Ok
                }
                None => RsStatus::Bot,
            },
            Err(e) => fail(RsStatus::RuntimeError, e.to_string()),
        }
    })
}

/// # Safety
/// `p` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn rs_program_free(p: *mut RsProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn rs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
