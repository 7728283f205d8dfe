//! Command implementations behind the `ratsynth` binary.

pub mod bench;
pub mod gen;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::rat::{format_rat, parse_rat};
use crate::algebra::{Assignment, Rat, Var};
use crate::formula::{delta_relax, htp_reduce, normalize, to_dnf, Formula, Rel, Spec};
use crate::qe::{eliminate_exists_with, QeConfig, DEFAULT_MAX_PROJECTION_DEGREE};
use crate::realroots::{signed_rationals, DEFAULT_DIVISOR_BUDGET};
use crate::runtime::{run_program, verify_output, RunMode, RunOptions, RuntimeError};
use crate::smtlib::{parse_problem, print_formula, print_script, Sidecar};
use crate::synth::{synthesize, Completeness, ProgIR, RsolveBackend, Strategy, SynthConfig, SynthReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_PROGRAM: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_BOT: i32 = 10;

pub const SOLVER_ENV: &str = "RATSYNTH_SOLVER";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub iteration_budget: usize,
    pub wall_timeout_s: Option<f64>,
    #[serde(with = "crate::algebra::rat::serde_rat")]
    pub eps0: Rat,
    pub divisor_budget: u64,
    pub dnf_budget: usize,
    pub search_budget: usize,
    /// `internal` or `cmd:<executable>`.
    pub rsolve: String,
    pub replay: Option<PathBuf>,
    pub mode: RunMode,
    pub seed: u64,
    pub strategy: Strategy,
    pub max_projection_degree: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            iteration_budget: 64,
            wall_timeout_s: None,
            eps0: Rat::from_integer(1.into()),
            divisor_budget: DEFAULT_DIVISOR_BUDGET,
            dnf_budget: crate::formula::DEFAULT_DNF_BUDGET,
            search_budget: 2000,
            rsolve: "internal".into(),
            replay: None,
            mode: RunMode::Guard,
            seed: 0,
            strategy: Strategy::Nqsynth,
            max_projection_degree: DEFAULT_MAX_PROJECTION_DEGREE,
        }
    }
}

/// Reads a replay file: a JSON list of `{"var": "p/q", ...}` objects.
pub fn read_replay(text: &str) -> Result<Vec<BTreeMap<Var, Rat>>> {
    let raw: Vec<BTreeMap<String, String>> = serde_json::from_str(text).context("replay file")?;
    raw.into_iter()
        .map(|m| {
            m.into_iter()
                .map(|(k, v)| Ok((Var::new(&k), parse_rat(&v).map_err(|e| anyhow!("replay value `{v}`: {e}"))?)))
                .collect()
        })
        .collect()
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.iteration_budget == 0 || self.divisor_budget == 0 || self.dnf_budget == 0 || self.search_budget == 0 {
            bail!("budgets must be positive");
        }
        if self.wall_timeout_s.is_some_and(|t| !(t > 0.0)) {
            bail!("wall timeout must be positive");
        }
        if self.eps0 <= Rat::from_integer(0.into()) {
            bail!("eps0 must be positive");
        }
        self.backend()?;
        Ok(())
    }

    fn backend(&self) -> Result<RsolveBackend> {
        if self.rsolve == "internal" {
            return Ok(RsolveBackend::Internal);
        }
        match self.rsolve.strip_prefix("cmd:") {
            Some(cmd) if !cmd.trim().is_empty() => {
                let t = self.wall_timeout_s.unwrap_or(10.0);
                Ok(RsolveBackend::External { command: cmd.to_string(), timeout: Duration::from_secs_f64(t) })
            }
            _ => bail!("--rsolve must be `internal` or `cmd:<executable>`"),
        }
    }

    pub fn synth_config(&self) -> Result<SynthConfig> {
        self.validate()?;
        let replay = match &self.replay {
            None => vec![],
            Some(p) => read_replay(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        };
        Ok(SynthConfig {
            iteration_budget: self.iteration_budget,
            wall_timeout: self.wall_timeout_s.map(Duration::from_secs_f64),
            eps0: self.eps0.clone(),
            divisor_budget: self.divisor_budget,
            dnf_budget: self.dnf_budget,
            search_budget: self.search_budget,
            backend: self.backend()?,
            replay,
            mode: self.mode,
            seed: self.seed,
            qe: QeConfig { max_projection_degree: self.max_projection_degree },
        })
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions { psi_gate: false, divisor_budget: self.divisor_budget, eps0: self.eps0.clone() }
    }
}

/// Splits `a,b , c` into names.
pub fn split_names(s: &str) -> Vec<String> {
    s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
}

pub fn sidecar_path(problem: &Path) -> PathBuf {
    problem.with_extension("json")
}

/// Parses a problem file; the input/output split comes from the flags when
/// given, otherwise from the sidecar next to the script.
pub fn load_problem(path: &Path, inputs: Option<&str>, outputs: Option<&str>) -> Result<Spec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (ins, outs) = match (inputs, outputs) {
        (Some(i), Some(o)) => (split_names(i), split_names(o)),
        _ => {
            let sc = sidecar_path(path);
            let side = std::fs::read_to_string(&sc)
                .with_context(|| format!("no --inputs/--outputs and no sidecar {}", sc.display()))?;
            let s = Sidecar::from_json(&side)?;
            (
                inputs.map(split_names).unwrap_or(s.inputs),
                outputs.map(split_names).unwrap_or(s.outputs),
            )
        }
    };
    if outs.is_empty() {
        bail!("no output variables");
    }
    Ok(parse_problem(&text, &ins, &outs)?)
}

/// Parses `x=1/2, y=-3` into an assignment.
pub fn parse_assignment(s: &str) -> Result<Assignment> {
    let mut a = Assignment::new();
    for part in s.split([',', ' ']).filter(|p| !p.trim().is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| anyhow!("expected name=value, got `{part}`"))?;
        a.insert(Var::new(k.trim()), parse_rat(v.trim()).map_err(|e| anyhow!("value `{v}`: {e}"))?);
    }
    Ok(a)
}

pub fn format_assignment(a: &BTreeMap<Var, Rat>) -> String {
    a.iter().map(|(k, v)| format!("{k}={}", format_rat(v))).collect::<Vec<_>>().join("\n")
}

pub struct SynthOutput {
    pub program: ProgIR,
    pub report: SynthReport,
}

pub fn cmd_synth(spec: &Spec, cfg: &Config) -> Result<SynthOutput> {
    let sc = cfg.synth_config()?;
    let (program, report) = synthesize(spec, cfg.strategy, &sc);
    Ok(SynthOutput { program, report })
}

/// Exit code for a finished synthesis run.
pub fn synth_exit_code(out: &SynthOutput) -> i32 {
    if out.program.branches.is_empty() && out.report.completeness != Completeness::Complete {
        EXIT_NO_PROGRAM
    } else {
        EXIT_OK
    }
}

/// Inputs for fuzzing: half enumerated from the signed rationals, half seeded random.
pub fn fuzz_inputs(inputs: &[Var], n: usize, seed: u64) -> Vec<Assignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = signed_rationals(n.max(4));
    let k = inputs.len();
    let mut out = Vec::with_capacity(n);
    if k == 0 {
        return vec![Assignment::new(); n.min(1)];
    }
    let half = n.div_ceil(2).max(1);
    let mut base = 1usize;
    while base.pow(k as u32) < half {
        base += 1;
    }
    for i in 0..n {
        let a: Assignment = if i % 2 == 0 {
            // base-`b` digits of the index pick one table entry per input
            let mut idx = i / 2;
            inputs
                .iter()
                .map(|x| {
                    let j = idx % base;
                    idx /= base;
                    (x.clone(), table[j].clone())
                })
                .collect()
        } else {
            inputs
                .iter()
                .map(|x| {
                    let n: i64 = rng.gen_range(-400..=400);
                    let d: i64 = rng.gen_range(1..=200);
                    (x.clone(), Rat::new(n.into(), d.into()))
                })
                .collect()
        };
        out.push(a);
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub samples: usize,
    pub values: usize,
    pub bots: usize,
    pub violations: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Fuzzes `prog` and checks every returned value against `spec` exactly.
pub fn cmd_check(prog: &ProgIR, spec: &Spec, n: usize, seed: u64, opts: &RunOptions) -> CheckReport {
    let phi = normalize(&spec.formula);
    let mut rep = CheckReport { samples: n, ..Default::default() };
    for a in fuzz_inputs(&spec.inputs, n, seed) {
        match run_program(prog, &a, opts) {
            Ok(r) => match r.outcome {
                None => rep.bots += 1,
                Some(b) => {
                    rep.values += 1;
                    if !verify_output(&phi, &a, &b) {
                        rep.violations.push(format!("{} -> {}", fmt_inline(&a), fmt_inline(&b)));
                    }
                }
            },
            Err(e @ RuntimeError::VerificationFailure { .. }) => {
                rep.violations.push(format!("{}: {e}", fmt_inline(&a)));
            }
            Err(e) => rep.violations.push(format!("{}: error {e}", fmt_inline(&a))),
        }
    }
    rep
}

fn fmt_inline(a: &BTreeMap<Var, Rat>) -> String {
    a.iter().map(|(k, v)| format!("{k}={}", format_rat(v))).collect::<Vec<_>>().join(",")
}

/// `exists y. phi` for a problem, as SMT-LIB text plus the engine used.
pub fn cmd_qe(spec: &Spec, var: &Var, cfg: &Config) -> String {
    let phi = normalize(&spec.formula);
    let r = eliminate_exists_with(&phi, var, &QeConfig { max_projection_degree: cfg.max_projection_degree });
    format!(
        "; engine {}, {}\n{}\n",
        serde_json::to_string(&r.engine_used).unwrap_or_default().trim_matches('"'),
        if r.exact { "exact" } else { "inexact" },
        print_formula(&r.psi)
    )
}

/// One polynomial equation per DNF clause, each in its own `push`/`pop`
/// scope with its fresh variables, so every scope is checked separately.
pub fn cmd_reduce(spec: &Spec, cfg: &Config) -> Result<String> {
    let clauses = to_dnf(&normalize(&spec.formula), cfg.dnf_budget)?;
    let mut out = String::from("(set-logic QF_NRA)\n");
    for v in spec.all_vars() {
        writeln!(out, "(declare-const {} Real)", v.name()).unwrap();
    }
    for c in &clauses {
        let r = htp_reduce(c);
        out.push_str("(push 1)\n");
        for v in &r.fresh_vars {
            writeln!(out, "(declare-const {} Real)", v.name()).unwrap();
        }
        let eq = Formula::atom(r.equation.clone(), Rel::Eq);
        writeln!(out, "(assert {})\n(check-sat)\n(pop 1)", print_formula(&eq)).unwrap();
    }
    Ok(out)
}

/// Relaxed script and sidecar with the new input.
pub fn cmd_relax(spec: &Spec, delta: &str) -> Result<(String, Sidecar)> {
    let r = delta_relax(spec, &Var::new(delta))?;
    let vars = r.all_vars();
    let script = print_script(&r.formula, &vars, false);
    let side = Sidecar {
        inputs: r.inputs.iter().map(|v| v.name().to_string()).collect(),
        outputs: r.outputs.iter().map(|v| v.name().to_string()).collect(),
    };
    Ok((script, side))
}
