use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ratsynth::algebra::rat::parse_rat;
use ratsynth::algebra::Var;
use ratsynth::cli::bench::{cmd_bench, format_summary, summarize, write_csv};
use ratsynth::cli::gen::cmd_gen_geometric;
use ratsynth::cli::{
    cmd_check, cmd_qe, cmd_reduce, cmd_relax, cmd_synth, format_assignment, load_problem, parse_assignment,
    synth_exit_code, Config, EXIT_BOT, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, SOLVER_ENV,
};
use ratsynth::runtime::{run_program, RunMode};
use ratsynth::synth::{ProgIR, Strategy};

#[derive(Parser)]
#[command(name = "ratsynth", version, about = "Exact rational program synthesis for polynomial specifications")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Nqsynth,
    Modenum,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Guard,
    Fallthrough,
}

#[derive(Args, Clone)]
struct Io {
    /// Comma-separated input variables (default: sidecar JSON)
    #[arg(long)]
    inputs: Option<String>,
    /// Comma-separated output variables (default: sidecar JSON)
    #[arg(long)]
    outputs: Option<String>,
}

#[derive(Args, Clone)]
struct Knobs {
    #[arg(long, value_enum, default_value = "nqsynth")]
    strategy: StrategyArg,
    /// Iteration budget of the synthesis loop
    #[arg(long, default_value_t = 64)]
    timeout_iters: usize,
    /// Wall-clock budget in seconds
    #[arg(long)]
    wall_timeout: Option<f64>,
    /// `internal` or `cmd:<executable>`; defaults to $RATSYNTH_SOLVER when set
    #[arg(long)]
    rsolve: Option<String>,
    /// JSON list of models returned first by the model search
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "guard")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Width of root isolating intervals
    #[arg(long, default_value = "1")]
    eps0: String,
    #[arg(long, default_value_t = ratsynth::realroots::DEFAULT_DIVISOR_BUDGET)]
    divisor_budget: u64,
    #[arg(long, default_value_t = ratsynth::formula::DEFAULT_DNF_BUDGET)]
    dnf_budget: usize,
    /// Candidate points per model search
    #[arg(long, default_value_t = 2000)]
    search_budget: usize,
}

impl Knobs {
    fn config(&self) -> Result<Config> {
        let rsolve = match &self.rsolve {
            Some(r) => r.clone(),
            None => match std::env::var(SOLVER_ENV) {
                Ok(cmd) if !cmd.trim().is_empty() => format!("cmd:{cmd}"),
                _ => "internal".into(),
            },
        };
        let cfg = Config {
            iteration_budget: self.timeout_iters,
            wall_timeout_s: self.wall_timeout,
            eps0: parse_rat(&self.eps0).map_err(|e| anyhow::anyhow!("--eps0: {e}"))?,
            divisor_budget: self.divisor_budget,
            dnf_budget: self.dnf_budget,
            search_budget: self.search_budget,
            rsolve,
            replay: self.replay.clone(),
            mode: match self.mode {
                ModeArg::Guard => RunMode::Guard,
                ModeArg::Fallthrough => RunMode::Fallthrough,
            },
            seed: self.seed,
            strategy: match self.strategy {
                StrategyArg::Nqsynth => Strategy::Nqsynth,
                StrategyArg::Modenum => Strategy::Modenum,
            },
            ..Config::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a program from an SMT-LIB problem
    Synth {
        problem: PathBuf,
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        knobs: Knobs,
        /// Program output path
        #[arg(long, short, default_value = "program.json")]
        out: PathBuf,
        /// Report output path
        #[arg(long, default_value = "report.json")]
        report: PathBuf,
    },
    /// Run a program on one input, e.g. `x=1/2`
    Run {
        program: PathBuf,
        input: String,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Fuzz a program against its problem
    Check {
        program: PathBuf,
        problem: PathBuf,
        #[command(flatten)]
        io: Io,
        #[arg(long, short = 'n', default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Eliminate one output variable
    Qe {
        problem: PathBuf,
        #[command(flatten)]
        io: Io,
        /// Variable to eliminate (default: the first output)
        #[arg(long)]
        var: Option<String>,
    },
    /// Reduce every DNF clause to a single polynomial equation
    Reduce {
        problem: PathBuf,
        #[command(flatten)]
        io: Io,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Replace equalities by a tolerance band around a new input
    Relax {
        problem: PathBuf,
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "delta")]
        delta: String,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Benchmark every problem of a directory
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Inputs fuzzed per synthesized program
        #[arg(long, default_value_t = 100)]
        fuzz: usize,
    },
    /// Write the geometric problem family
    GenGeometric {
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_program(p: &PathBuf) -> Result<ProgIR> {
    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    ProgIR::from_json(&text).with_context(|| format!("parsing {}", p.display()))
}

fn apply_mode(prog: &mut ProgIR, mode: Option<ModeArg>) {
    match mode {
        Some(ModeArg::Guard) => prog.mode = RunMode::Guard,
        Some(ModeArg::Fallthrough) => prog.mode = RunMode::Fallthrough,
        None => {}
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Synth { problem, io, knobs, out, report } => {
            let cfg = knobs.config()?;
            let spec = load_problem(&problem, io.inputs.as_deref(), io.outputs.as_deref())?;
            let res = cmd_synth(&spec, &cfg)?;
            std::fs::write(&out, res.program.to_json())?;
            std::fs::write(&report, res.report.to_json())?;
            println!(
                "{} branches, {:?} after {} iterations",
                res.program.branches.len(),
                res.report.completeness,
                res.report.iterations
            );
            Ok(synth_exit_code(&res))
        }
        Cmd::Run { program, input, mode } => {
            let mut prog = read_program(&program)?;
            apply_mode(&mut prog, mode);
            let a = parse_assignment(&input)?;
            let r = run_program(&prog, &a, &Config::default().run_options())?;
            for e in &r.diagnostics.budget_errors {
                eprintln!("warning: {e}");
            }
            match r.outcome {
                Some(b) => {
                    println!("{}", format_assignment(&b));
                    Ok(EXIT_OK)
                }
                None => {
                    println!("bot");
                    Ok(EXIT_BOT)
                }
            }
        }
        Cmd::Check { program, problem, io, samples, seed, mode } => {
            let mut prog = read_program(&program)?;
            apply_mode(&mut prog, mode);
            let spec = load_problem(&problem, io.inputs.as_deref(), io.outputs.as_deref())?;
            let rep = cmd_check(&prog, &spec, samples, seed, &Config::default().run_options());
            println!("{}", serde_json::to_string_pretty(&rep)?);
            Ok(if rep.passed() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Cmd::Qe { problem, io, var } => {
            let spec = load_problem(&problem, io.inputs.as_deref(), io.outputs.as_deref())?;
            let v = var.map(|n| Var::new(&n)).unwrap_or_else(|| spec.outputs[0].clone());
            print!("{}", cmd_qe(&spec, &v, &Config::default()));
            Ok(EXIT_OK)
        }
        Cmd::Reduce { problem, io, out } => {
            let spec = load_problem(&problem, io.inputs.as_deref(), io.outputs.as_deref())?;
            let text = cmd_reduce(&spec, &Config::default())?;
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(EXIT_OK)
        }
        Cmd::Relax { problem, io, delta, out } => {
            let spec = load_problem(&problem, io.inputs.as_deref(), io.outputs.as_deref())?;
            let (script, side) = cmd_relax(&spec, &delta)?;
            std::fs::write(&out, script)?;
            std::fs::write(out.with_extension("json"), serde_json::to_string(&side)? + "\n")?;
            Ok(EXIT_OK)
        }
        Cmd::Bench { dir, knobs, jobs, csv, fuzz } => {
            let cfg = knobs.config()?;
            let timeout = cfg.wall_timeout_s.unwrap_or(120.0);
            let recs = cmd_bench(&dir, &cfg, timeout, jobs, fuzz)?;
            match csv {
                Some(p) => write_csv(&recs, std::fs::File::create(p)?)?,
                None => write_csv(&recs, std::io::stdout())?,
            }
            eprintln!("{}", format_summary(&summarize(&recs, timeout)));
            Ok(EXIT_OK)
        }
        Cmd::GenGeometric { out, count, seed } => {
            let paths = cmd_gen_geometric(&out, count, seed)?;
            println!("wrote {} problems to {}", paths.len(), out.display());
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_OK as u8 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
