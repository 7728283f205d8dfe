//! Rational model search for residual specifications.

use std::collections::{BTreeMap, VecDeque};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Assignment, Rat, Var};
use crate::formula::{nonstrict_polys, to_dnf, Formula};
use crate::qe::{interval_refute, Refutation};
use crate::realroots::signed_rationals;
use crate::runtime::{solve_univariate, RunOptions};
use crate::smtlib::{external_solve, SolverAnswer};

use super::{Model, SynthConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RsolveBackend {
    Internal,
    /// SMT-LIB 2 solver executable, consulted after the internal search.
    External { command: String, timeout: Duration },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RsolveOutcome {
    Model(Model),
    ProvedUnsat,
    UnknownBudget,
}

/// Mutable search state shared across the calls of one synthesis run.
pub struct RsolveState {
    replay: VecDeque<BTreeMap<Var, Rat>>,
    rng: ChaCha8Rng,
    search_budget: usize,
    dnf_budget: usize,
    backend: RsolveBackend,
    opts: RunOptions,
    /// Number of replayed assignments that did not satisfy the formula.
    pub replay_rejected: usize,
    pub external_failures: Vec<String>,
}

impl RsolveState {
    pub fn new(cfg: &SynthConfig) -> RsolveState {
        RsolveState {
            replay: cfg.replay.iter().cloned().collect(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            search_budget: cfg.search_budget,
            dnf_budget: cfg.dnf_budget,
            backend: cfg.backend.clone(),
            opts: cfg.run_options(),
            replay_rejected: 0,
            external_failures: vec![],
        }
    }
}

/// Index tuples of length `k` ordered by their maximum entry, then lexicographically.
struct Shells {
    k: usize,
    m: usize,
    queue: VecDeque<Vec<usize>>,
}

impl Shells {
    fn new(k: usize) -> Shells {
        Shells { k, m: 0, queue: VecDeque::from([vec![0; k]]) }
    }

    fn fill(&mut self) {
        self.m += 1;
        let m = self.m;
        let mut cur = vec![0usize; self.k];
        loop {
            if cur.iter().any(|&c| c == m) {
                self.queue.push_back(cur.clone());
            }
            let mut i = self.k;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if cur[i] < m {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 0;
            }
        }
    }
}

impl Iterator for Shells {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.k == 0 {
            return self.queue.pop_front();
        }
        if self.queue.is_empty() {
            self.fill();
        }
        self.queue.pop_front()
    }
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    let n: i64 = rng.gen_range(-16..=16);
    let d: i64 = rng.gen_range(1..=16);
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn close_last(
    phi: &Formula,
    point: &Assignment,
    last: &Var,
    opts: &RunOptions,
) -> Option<Assignment> {
    let chi = phi.substitute(point);
    let boundary = nonstrict_polys(&chi, last);
    let (v, _) = solve_univariate(&chi, last, &boundary, true, opts).ok()?;
    let mut full = point.clone();
    full.insert(last.clone(), v?);
    phi.eval(&full).ok()?.then_some(full)
}

/// Rational model of `phi` over `inputs ∪ outputs`.
///
/// Order of attempts: replayed assignments, interval refutation of every DNF
/// clause, enumeration of rational points over all variables but the last
/// output (closing the last one exactly), then the external solver.
pub fn rsolve(
    phi: &Formula,
    inputs: &[Var],
    outputs: &[Var],
    st: &mut RsolveState,
    deadline: Option<Instant>,
) -> RsolveOutcome {
    while let Some(m) = st.replay.pop_front() {
        if phi.eval(&m).unwrap_or(false) {
            return RsolveOutcome::Model(Model::rational(m));
        }
        st.replay_rejected += 1;
    }
    if *phi == Formula::False {
        return RsolveOutcome::ProvedUnsat;
    }
    if let Ok(clauses) = to_dnf(phi, st.dnf_budget) {
        if clauses.iter().all(|c| interval_refute(c) == Refutation::Refuted) {
            return RsolveOutcome::ProvedUnsat;
        }
    }
    let vars: Vec<Var> = inputs.iter().chain(outputs.iter()).cloned().collect();
    if let Some(m) = search(phi, &vars, st, deadline) {
        return RsolveOutcome::Model(Model::rational(m));
    }
    if let RsolveBackend::External { command, timeout } = st.backend.clone() {
        let timeout = match deadline {
            Some(d) => timeout.min(d.saturating_duration_since(Instant::now())),
            None => timeout,
        };
        match external_solve(phi, &vars, &command, timeout) {
            Ok(SolverAnswer::Unsat) => return RsolveOutcome::ProvedUnsat,
            Ok(SolverAnswer::Sat { values, irrational }) => {
                let complete = irrational.is_empty();
                if !complete || phi.eval(&values).unwrap_or(false) {
                    return RsolveOutcome::Model(Model { values, irrational: irrational.into_iter().collect() });
                }
                st.external_failures.push("external model fails verification".into());
            }
            Ok(SolverAnswer::Unknown) => {}
            Err(e) => st.external_failures.push(e.to_string()),
        }
    }
    RsolveOutcome::UnknownBudget
}

fn search(phi: &Formula, vars: &[Var], st: &mut RsolveState, deadline: Option<Instant>) -> Option<Assignment> {
    let (last, rest) = vars.split_last()?;
    let k = rest.len();
    let mut shells = Shells::new(k);
    let mut table: Vec<Rat> = signed_rationals(16);
    for n in 0..st.search_budget {
        if n % 16 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
            return None;
        }
        let point: Assignment = if n % 2 == 0 {
            let idx = shells.next()?;
            let need = idx.iter().copied().max().unwrap_or(0) + 1;
            if need > table.len() {
                table = signed_rationals(need * 2);
            }
            rest.iter().cloned().zip(idx.iter().map(|&i| table[i].clone())).collect()
        } else {
            rest.iter().map(|v| (v.clone(), random_rat(&mut st.rng))).collect()
        };
        if let Some(m) = close_last(phi, &point, last, &st.opts) {
            return Some(m);
        }
        if k == 0 {
            return None;
        }
    }
    None
}
