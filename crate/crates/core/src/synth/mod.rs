//! Program synthesis: single-output programs, the multi-output decision-list
//! loop and the model-enumeration baseline.

pub mod rsolve;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{Assignment, Poly, Rat, Var};
use crate::formula::{hat_transform, nonstrict_polys, normalize, Formula, Rel, Spec, DEFAULT_DNF_BUDGET};
use crate::qe::{eliminate_exists_with, Engine, QeConfig};
use crate::realroots::DEFAULT_DIVISOR_BUDGET;
use crate::runtime::{RunMode, RunOptions};

pub use rsolve::{rsolve, RsolveBackend, RsolveOutcome, RsolveState};

pub const IR_VERSION: u32 = 1;

pub mod serde_var_rat_map {
    use super::*;
    use crate::algebra::rat::{format_rat, parse_rat};
    use serde::ser::SerializeMap;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<Var, Rat>, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k.name(), &format_rat(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Var, Rat>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| parse_rat(&v).map(|r| (Var::new(&k), r)).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Program for one output variable: strict samples first, boundary roots second.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleOutputProgram {
    #[serde(rename = "solve_var")]
    pub output: Var,
    pub phi: Formula,
    pub phi_hat: Formula,
    pub nonstrict: Vec<Poly>,
    /// `exists y. phi_hat`, present only when elimination was exact.
    pub psi: Option<Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub guard: Formula,
    pub guard_exact: bool,
    #[serde(with = "serde_var_rat_map")]
    pub fixed: BTreeMap<Var, Rat>,
    #[serde(flatten)]
    pub solve: Option<SingleOutputProgram>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgIR {
    pub version: u32,
    pub mode: RunMode,
    pub spec_digest: String,
    pub inputs: Vec<Var>,
    pub outputs: Vec<Var>,
    pub spec: Formula,
    pub branches: Vec<Branch>,
}

impl ProgIR {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("IR serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<ProgIR, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Completeness {
    Complete,
    BudgetExhausted,
    QEIncomplete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Nqsynth,
    Modenum,
}

/// A satisfying assignment over inputs and outputs. Coordinates the solver
/// reported as irrational are listed in `irrational` and absent from `values`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Model {
    #[serde(with = "serde_var_rat_map")]
    pub values: BTreeMap<Var, Rat>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub irrational: Vec<Var>,
}

impl Model {
    pub fn rational(values: BTreeMap<Var, Rat>) -> Model {
        Model { values, irrational: vec![] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardRecord {
    pub iteration: usize,
    pub output: Option<Var>,
    pub guard: Formula,
    pub exact: bool,
    pub engine: Engine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthReport {
    pub strategy: Strategy,
    pub iterations: usize,
    pub iteration_budget: usize,
    pub wall_timeout_s: Option<f64>,
    pub models: Vec<Model>,
    pub guards: Vec<GuardRecord>,
    pub completeness: Completeness,
    pub skipped_irrational: usize,
    pub stop_reason: String,
}

impl SynthReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub iteration_budget: usize,
    pub wall_timeout: Option<Duration>,
    pub eps0: Rat,
    pub divisor_budget: u64,
    pub dnf_budget: usize,
    /// Candidate points tried by the internal model search per call.
    pub search_budget: usize,
    pub backend: RsolveBackend,
    pub replay: Vec<BTreeMap<Var, Rat>>,
    pub mode: RunMode,
    pub seed: u64,
    pub qe: QeConfig,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            iteration_budget: 64,
            wall_timeout: None,
            eps0: Rat::from_integer(1.into()),
            divisor_budget: DEFAULT_DIVISOR_BUDGET,
            dnf_budget: DEFAULT_DNF_BUDGET,
            search_budget: 2000,
            backend: RsolveBackend::Internal,
            replay: vec![],
            mode: RunMode::Guard,
            seed: 0,
            qe: QeConfig::default(),
        }
    }
}

impl SynthConfig {
    pub fn run_options(&self) -> RunOptions {
        RunOptions { psi_gate: false, divisor_budget: self.divisor_budget, eps0: self.eps0.clone() }
    }

    pub(crate) fn deadline(&self, start: Instant) -> Option<Instant> {
        self.wall_timeout.map(|d| start + d)
    }
}

/// Hex SHA-256 of the canonical JSON of the specification.
pub fn spec_digest(spec: &Spec) -> String {
    let text = serde_json::to_string(spec).expect("spec serializes");
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Builds the single-output program for `phi` solved in `y`.
pub fn synth_single(phi: &Formula, y: &Var, qe: &QeConfig) -> SingleOutputProgram {
    let phi = normalize(phi);
    let phi_hat = hat_transform(&phi, y);
    let nonstrict = nonstrict_polys(&phi, y);
    let r = eliminate_exists_with(&phi_hat, y, qe);
    SingleOutputProgram {
        output: y.clone(),
        phi,
        phi_hat,
        nonstrict,
        psi: r.exact.then_some(r.psi),
    }
}

/// `sum_j (x_j - a_j)^2 > 0`: excludes exactly the input point `a`.
fn block_point(inputs: &[Var], a: &BTreeMap<Var, Rat>) -> Formula {
    let mut s = Poly::zero();
    for x in inputs {
        let d = &Poly::var(x) - &Poly::constant(a[x].clone());
        s = &s + &(&d * &d);
    }
    Formula::atom(s, Rel::Gt)
}

fn new_ir(spec: &Spec, mode: RunMode) -> ProgIR {
    ProgIR {
        version: IR_VERSION,
        mode,
        spec_digest: spec_digest(spec),
        inputs: spec.inputs.clone(),
        outputs: spec.outputs.clone(),
        spec: normalize(&spec.formula),
        branches: vec![],
    }
}

fn new_report(strategy: Strategy, cfg: &SynthConfig) -> SynthReport {
    SynthReport {
        strategy,
        iterations: 0,
        iteration_budget: cfg.iteration_budget,
        wall_timeout_s: cfg.wall_timeout.map(|d| d.as_secs_f64()),
        models: vec![],
        guards: vec![],
        completeness: Completeness::BudgetExhausted,
        skipped_irrational: 0,
        stop_reason: String::new(),
    }
}

fn single_output_case(spec: &Spec, cfg: &SynthConfig) -> (ProgIR, SynthReport) {
    let y = &spec.outputs[0];
    let mut ir = new_ir(spec, cfg.mode);
    let mut report = new_report(Strategy::Nqsynth, cfg);
    report.iterations = 1;
    let phi = normalize(&spec.formula);
    let guard = eliminate_exists_with(&phi, y, &cfg.qe);
    report.guards.push(GuardRecord {
        iteration: 1,
        output: Some(y.clone()),
        guard: guard.psi.clone(),
        exact: guard.exact,
        engine: guard.engine_used,
    });
    if guard.exact && guard.psi == Formula::False {
        report.completeness = Completeness::Complete;
        report.stop_reason = "specification unsatisfiable".into();
        return (ir, report);
    }
    ir.branches.push(Branch {
        guard: if guard.exact { guard.psi } else { Formula::True },
        guard_exact: guard.exact,
        fixed: BTreeMap::new(),
        solve: Some(synth_single(&phi, y, &cfg.qe)),
    });
    if guard.exact {
        report.completeness = Completeness::Complete;
        report.stop_reason = "single output".into();
    } else {
        ir.mode = RunMode::Fallthrough;
        report.completeness = Completeness::QEIncomplete;
        report.stop_reason = "single output, inexact guard".into();
    }
    (ir, report)
}

fn out_of_time(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

/// Decision-list synthesis for any number of outputs.
pub fn synth_multi(spec: &Spec, cfg: &SynthConfig) -> (ProgIR, SynthReport) {
    if spec.outputs.len() == 1 {
        return single_output_case(spec, cfg);
    }
    let start = Instant::now();
    let deadline = cfg.deadline(start);
    let phi = normalize(&spec.formula);
    let mut ir = new_ir(spec, cfg.mode);
    let mut report = new_report(Strategy::Nqsynth, cfg);
    let mut residual = phi.clone();
    let mut state = RsolveState::new(cfg);
    let mut any_inexact = false;
    loop {
        if report.iterations >= cfg.iteration_budget {
            report.stop_reason = "iteration budget".into();
            break;
        }
        if out_of_time(deadline) {
            report.stop_reason = "wall timeout".into();
            break;
        }
        report.iterations += 1;
        let sigma = match rsolve(&residual, &spec.inputs, &spec.outputs, &mut state, deadline) {
            RsolveOutcome::ProvedUnsat => {
                report.completeness = Completeness::Complete;
                report.stop_reason = "residual unsatisfiable".into();
                break;
            }
            RsolveOutcome::UnknownBudget => {
                report.stop_reason = "model search budget".into();
                break;
            }
            RsolveOutcome::Model(m) => m,
        };
        report.models.push(sigma.clone());
        let mut blocks = Vec::new();
        let mut need_point_block = false;
        let mut produced = 0;
        for (i, yi) in spec.outputs.iter().enumerate() {
            let others: Vec<&Var> = spec.outputs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).collect();
            if others.iter().any(|v| !sigma.values.contains_key(*v)) {
                report.skipped_irrational += 1;
                continue;
            }
            let fixed: BTreeMap<Var, Rat> = others.iter().map(|v| ((*v).clone(), sigma.values[*v].clone())).collect();
            let phi_i = normalize(&phi.substitute(&fixed));
            let q = eliminate_exists_with(&phi_i, yi, &cfg.qe);
            report.guards.push(GuardRecord {
                iteration: report.iterations,
                output: Some(yi.clone()),
                guard: q.psi.clone(),
                exact: q.exact,
                engine: q.engine_used,
            });
            if q.exact {
                if q.psi == Formula::False {
                    continue;
                }
                blocks.push(Formula::not(q.psi.clone()));
            } else {
                any_inexact = true;
                need_point_block = true;
            }
            produced += 1;
            ir.branches.push(Branch {
                guard: if q.exact { q.psi } else { Formula::True },
                guard_exact: q.exact,
                fixed,
                solve: Some(synth_single(&phi_i, yi, &cfg.qe)),
            });
        }
        let inputs_rational = spec.inputs.iter().all(|x| sigma.values.contains_key(x));
        if (need_point_block || produced == 0) && inputs_rational {
            blocks.push(block_point(&spec.inputs, &sigma.values));
        }
        if blocks.is_empty() {
            report.stop_reason = "no progress on irrational model".into();
            break;
        }
        residual = normalize(&Formula::and(std::iter::once(residual).chain(blocks)));
    }
    if any_inexact {
        ir.mode = RunMode::Fallthrough;
        if report.completeness == Completeness::Complete {
            report.completeness = Completeness::QEIncomplete;
        }
    }
    (ir, report)
}

/// Baseline: every model becomes a branch returning its output values,
/// guarded by the specification with those values substituted.
pub fn synth_modenum(spec: &Spec, cfg: &SynthConfig) -> (ProgIR, SynthReport) {
    let start = Instant::now();
    let deadline = cfg.deadline(start);
    let phi = normalize(&spec.formula);
    let mut ir = new_ir(spec, cfg.mode);
    let mut report = new_report(Strategy::Modenum, cfg);
    let mut residual = phi.clone();
    let mut state = RsolveState::new(cfg);
    loop {
        if report.iterations >= cfg.iteration_budget {
            report.stop_reason = "iteration budget".into();
            break;
        }
        if out_of_time(deadline) {
            report.stop_reason = "wall timeout".into();
            break;
        }
        report.iterations += 1;
        let sigma = match rsolve(&residual, &spec.inputs, &spec.outputs, &mut state, deadline) {
            RsolveOutcome::ProvedUnsat => {
                report.completeness = Completeness::Complete;
                report.stop_reason = "residual unsatisfiable".into();
                break;
            }
            RsolveOutcome::UnknownBudget => {
                report.stop_reason = "model search budget".into();
                break;
            }
            RsolveOutcome::Model(m) => m,
        };
        report.models.push(sigma.clone());
        if spec.outputs.iter().any(|y| !sigma.values.contains_key(y)) {
            report.skipped_irrational += 1;
            let inputs_rational = spec.inputs.iter().all(|x| sigma.values.contains_key(x));
            if !inputs_rational {
                report.stop_reason = "no progress on irrational model".into();
                break;
            }
            residual = normalize(&Formula::and([residual, block_point(&spec.inputs, &sigma.values)]));
            continue;
        }
        let fixed: Assignment = spec.outputs.iter().map(|y| (y.clone(), sigma.values[y].clone())).collect();
        let guard = normalize(&phi.substitute(&fixed));
        report.guards.push(GuardRecord {
            iteration: report.iterations,
            output: None,
            guard: guard.clone(),
            exact: true,
            engine: Engine::None,
        });
        residual = normalize(&Formula::and([residual, Formula::not(guard.clone())]));
        ir.branches.push(Branch { guard, guard_exact: true, fixed, solve: None });
    }
    (ir, report)
}

/// Runs the configured strategy.
pub fn synthesize(spec: &Spec, strategy: Strategy, cfg: &SynthConfig) -> (ProgIR, SynthReport) {
    match strategy {
        Strategy::Nqsynth => synth_multi(spec, cfg),
        Strategy::Modenum => synth_modenum(spec, cfg),
    }
}
