use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::algebra::rat::parse_decimal;
use crate::algebra::{Rat, Var};
use crate::formula::Formula;

use super::print::print_script;
use super::sexp::{parse_sexps, Sexp};
use super::SmtError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverAnswer {
    /// Rational coordinates in `values`; coordinates given as algebraic
    /// numbers or approximations are listed in `irrational` only.
    Sat { values: BTreeMap<Var, Rat>, irrational: BTreeSet<Var> },
    Unsat,
    Unknown,
}

/// Exact value of a solver answer term, `None` for irrational forms.
fn value_of(e: &Sexp) -> Option<Rat> {
    match e {
        Sexp::Atom(s, _) => {
            if s.ends_with('?') {
                return None;
            }
            if !s.chars().all(|c| c.is_ascii_digit() || c == '.') {
                return None;
            }
            parse_decimal(s)
        }
        Sexp::List(items, _) => {
            let head = items.first()?.as_atom()?;
            match (head, items.len()) {
                ("-", 2) => value_of(&items[1]).map(|r| -r),
                ("/", 3) => {
                    let d = value_of(&items[2])?;
                    if num_traits::Zero::is_zero(&d) {
                        return None;
                    }
                    Some(value_of(&items[1])? / d)
                }
                _ => None,
            }
        }
    }
}

/// Interprets the solver's output for a script ending in `check-sat` and `get-value`.
pub fn parse_answer(text: &str, vars: &[Var]) -> Result<SolverAnswer, SmtError> {
    let fail = |m: &str| SmtError::ExternalSolverFailure(m.to_string());
    let items = parse_sexps(text).map_err(|e| fail(&e.to_string()))?;
    let mut it = items.iter();
    let status = it.next().and_then(|s| s.as_atom()).ok_or_else(|| fail("empty response"))?;
    match status {
        "unsat" => return Ok(SolverAnswer::Unsat),
        "unknown" => return Ok(SolverAnswer::Unknown),
        "sat" => {}
        other => return Err(fail(&format!("unexpected status `{other}`"))),
    }
    let mut values = BTreeMap::new();
    let mut irrational = BTreeSet::new();
    if let Some(Sexp::List(pairs, _)) = it.next() {
        for p in pairs {
            let Sexp::List(kv, _) = p else { return Err(fail("malformed value pair")) };
            if kv.len() != 2 {
                return Err(fail("malformed value pair"));
            }
            let name = kv[0].as_atom().ok_or_else(|| fail("malformed value pair"))?;
            let v = Var::new(name);
            match value_of(&kv[1]) {
                Some(r) => {
                    values.insert(v, r);
                }
                None => {
                    irrational.insert(v);
                }
            }
        }
    }
    for v in vars {
        if !values.contains_key(v) && !irrational.contains(v) {
            return Err(fail(&format!("no value for `{v}`")));
        }
    }
    Ok(SolverAnswer::Sat { values, irrational })
}

/// Runs an SMT-LIB 2 solver on `phi`, killing it after `timeout`.
///
/// `command` is split on whitespace into program and arguments.
pub fn external_solve(phi: &Formula, vars: &[Var], command: &str, timeout: Duration) -> Result<SolverAnswer, SmtError> {
    let mut parts = command.split_whitespace();
    let prog = parts.next().ok_or_else(|| SmtError::ExternalSolverFailure("empty solver command".into()))?;
    let mut child = Command::new(prog)
        .args(parts)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| SmtError::ExternalSolverFailure(format!("cannot start `{prog}`: {e}")))?;
    let script = print_script(phi, vars, true) + "(exit)\n";
    if let Some(mut stdin) = child.stdin.take() {
        // a solver that exits early closes the pipe; its output decides
        let _ = stdin.write_all(script.as_bytes());
    }
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let start = Instant::now();
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(SmtError::Timeout);
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            Err(e) => return Err(SmtError::ExternalSolverFailure(e.to_string())),
        }
    }
    let out = reader.join().unwrap_or_default();
    parse_answer(&out, vars)
}
