//! Execution of synthesized programs on rational inputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, Assignment, Poly, Rat, Var};
use crate::formula::{hat_transform, Formula};
use crate::realroots::{cand_rat_roots, rational_samples_eps, RootsError, DEFAULT_DIVISOR_BUDGET};
use crate::synth::{ProgIR, SingleOutputProgram};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeError {
    #[error("input `{0}` is missing")]
    InputArity(String),
    #[error("branch {branch} produced an output violating the specification")]
    VerificationFailure { branch: usize },
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    /// The first branch whose guard holds decides the result.
    #[default]
    Guard,
    /// Branches are tried in order until one yields a value.
    Fallthrough,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub samples_tried: usize,
    pub candidates_tried: usize,
    pub budget_errors: Vec<String>,
}

impl Diagnostics {
    fn absorb(&mut self, o: Diagnostics) {
        self.samples_tried += o.samples_tried;
        self.candidates_tried += o.candidates_tried;
        self.budget_errors.extend(o.budget_errors);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    /// Output values, or `None` for bottom.
    pub outcome: Option<BTreeMap<Var, Rat>>,
    pub branch: Option<usize>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Evaluate the stored `psi` first and skip the sample path when it fails.
    pub psi_gate: bool,
    pub divisor_budget: u64,
    /// Width of the isolating intervals behind the rational samples.
    pub eps0: Rat,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            psi_gate: false,
            divisor_budget: DEFAULT_DIVISOR_BUDGET,
            eps0: Rat::from_integer(1.into()),
        }
    }
}

/// Rational `y` satisfying `chi`, whose only free variable is `y`.
///
/// Samples of the strict version are tried first, then rational-root
/// candidates of each polynomial in `boundary`.
pub fn solve_univariate(
    chi: &Formula,
    y: &Var,
    boundary: &[Poly],
    try_samples: bool,
    opts: &RunOptions,
) -> Result<(Option<Rat>, Diagnostics), RuntimeError> {
    let mut diag = Diagnostics::default();
    let at = |v: &Rat| -> Assignment { [(y.clone(), v.clone())].into_iter().collect() };
    if try_samples {
        let chi_hat = hat_transform(chi, y);
        for s in rational_samples_eps(&chi_hat, y, &opts.eps0)? {
            diag.samples_tried += 1;
            let a = at(&s);
            if chi_hat.eval(&a)? && chi.eval(&a)? {
                return Ok((Some(s), diag));
            }
        }
    }
    for p in boundary {
        if !p.contains_var(y) {
            continue;
        }
        let Some(u) = p.to_unipoly(y) else { continue };
        let cands = match cand_rat_roots(&u, opts.divisor_budget) {
            Ok(c) => c,
            Err(RootsError::DivisorBudgetExceeded) => {
                diag.budget_errors.push(format!("divisor budget exceeded for {p}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for c in cands {
            diag.candidates_tried += 1;
            if u.sign_at(&c) == 0 && chi.eval(&at(&c))? {
                return Ok((Some(c), diag));
            }
        }
    }
    Ok((None, diag))
}

/// Runs a single-output program at input `a`.
///
/// Atoms that vanish identically after substitution fold to their truth at
/// zero (non-strict true, strict false) before the strict version is built.
pub fn run_single(
    prog: &SingleOutputProgram,
    a: &Assignment,
    opts: &RunOptions,
) -> Result<(Option<Rat>, Diagnostics), RuntimeError> {
    let chi = prog.phi.substitute(a);
    let boundary: Vec<Poly> = prog.nonstrict.iter().map(|p| p.substitute(a)).collect();
    let try_samples = match (&prog.psi, opts.psi_gate) {
        (Some(psi), true) => psi.eval(a)?,
        _ => true,
    };
    let r = solve_univariate(&chi, &prog.output, &boundary, try_samples, opts)?;
    if let Some(v) = &r.0 {
        let mut full = a.clone();
        full.insert(prog.output.clone(), v.clone());
        debug_assert!(prog.phi.eval(&full).unwrap_or(false));
    }
    Ok(r)
}

/// Exact check of `phi(A, B)`.
pub fn verify_output(phi: &Formula, a: &Assignment, b: &Assignment) -> bool {
    let mut full = a.clone();
    full.extend(b.iter().map(|(k, v)| (k.clone(), v.clone())));
    phi.eval(&full).unwrap_or(false)
}

fn run_branch(
    prog: &ProgIR,
    idx: usize,
    a: &Assignment,
    opts: &RunOptions,
    diag: &mut Diagnostics,
) -> Result<Option<BTreeMap<Var, Rat>>, RuntimeError> {
    let br = &prog.branches[idx];
    let mut out: BTreeMap<Var, Rat> = br.fixed.clone();
    if let Some(solve) = &br.solve {
        let (v, d) = run_single(solve, a, opts)?;
        diag.absorb(d);
        match v {
            None => return Ok(None),
            Some(v) => {
                out.insert(solve.output.clone(), v);
            }
        }
    }
    if !verify_output(&prog.spec, a, &out) {
        return Err(RuntimeError::VerificationFailure { branch: idx });
    }
    Ok(Some(out))
}

/// Executes the decision list at input `a`.
pub fn run_program(prog: &ProgIR, a: &Assignment, opts: &RunOptions) -> Result<RunResult, RuntimeError> {
    for x in &prog.inputs {
        if !a.contains_key(x) {
            return Err(RuntimeError::InputArity(x.name().to_string()));
        }
    }
    let a: Assignment = prog.inputs.iter().map(|x| (x.clone(), a[x].clone())).collect();
    let mut diag = Diagnostics::default();
    for (i, br) in prog.branches.iter().enumerate() {
        let guard_holds = br.guard.eval(&a)?;
        let taken = match prog.mode {
            RunMode::Guard => guard_holds,
            RunMode::Fallthrough => guard_holds || !br.guard_exact,
        };
        if !taken {
            continue;
        }
        let out = run_branch(prog, i, &a, opts, &mut diag)?;
        if out.is_some() || prog.mode == RunMode::Guard {
            return Ok(RunResult { outcome: out, branch: Some(i), diagnostics: diag });
        }
    }
    Ok(RunResult { outcome: None, branch: None, diagnostics: diag })
}
