//! Benchmark harness with PAR2 scoring.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cmd_check, cmd_synth, load_problem, Config};
use crate::synth::{Completeness, Strategy};

pub const CSV_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Solved,
    Timeout,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub version: u32,
    pub id: String,
    pub strategy: Strategy,
    pub outcome: Outcome,
    pub wall_s: f64,
    pub iterations: usize,
    pub completeness: Option<Completeness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub solved: usize,
    /// (min, avg, max) wall time over solved instances.
    pub solved_time: Option<(f64, f64, f64)>,
    pub par2: f64,
}

/// Mean of the solved times with every other instance charged `2 * timeout`.
pub fn par2(records: &[BenchRecord], timeout: f64) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let total: f64 = records
        .iter()
        .map(|r| if r.outcome == Outcome::Solved { r.wall_s } else { 2.0 * timeout })
        .sum();
    total / records.len() as f64
}

pub fn summarize(records: &[BenchRecord], timeout: f64) -> Summary {
    let times: Vec<f64> = records.iter().filter(|r| r.outcome == Outcome::Solved).map(|r| r.wall_s).collect();
    let solved_time = if times.is_empty() {
        None
    } else {
        let min = times.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some((min, times.iter().sum::<f64>() / times.len() as f64, max))
    };
    Summary { total: records.len(), solved: times.len(), solved_time, par2: par2(records, timeout) }
}

/// `.smt2` files of a directory in name order.
pub fn list_problems(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "smt2"))
        .collect();
    out.sort();
    if out.is_empty() {
        bail!("no .smt2 problems in {}", dir.display());
    }
    Ok(out)
}

/// Synthesizes one problem and gates the program on a soundness fuzz.
pub fn bench_one(path: &Path, cfg: &Config, timeout: f64, fuzz: usize) -> BenchRecord {
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut rec = BenchRecord {
        version: CSV_VERSION,
        id,
        strategy: cfg.strategy,
        outcome: Outcome::Error,
        wall_s: 0.0,
        iterations: 0,
        completeness: None,
    };
    let start = Instant::now();
    let mut cfg = cfg.clone();
    cfg.wall_timeout_s = Some(timeout);
    let Ok(spec) = load_problem(path, None, None) else {
        return rec;
    };
    let Ok(out) = cmd_synth(&spec, &cfg) else {
        return rec;
    };
    rec.iterations = out.report.iterations;
    rec.completeness = Some(out.report.completeness);
    let check = cmd_check(&out.program, &spec, fuzz, cfg.seed, &cfg.run_options());
    let elapsed = start.elapsed().as_secs_f64();
    rec.wall_s = elapsed.min(2.0 * timeout);
    rec.outcome = if !check.passed() {
        Outcome::Error
    } else if elapsed > timeout || out.report.completeness != Completeness::Complete {
        Outcome::Timeout
    } else {
        Outcome::Solved
    };
    rec
}

/// Runs every problem of `dir` on a pool of `jobs` workers; records come
/// back sorted by id.
pub fn cmd_bench(dir: &Path, cfg: &Config, timeout: f64, jobs: usize, fuzz: usize) -> Result<Vec<BenchRecord>> {
    let problems = list_problems(dir)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let mut recs: Vec<BenchRecord> =
        pool.install(|| problems.par_iter().map(|p| bench_one(p, cfg, timeout, fuzz)).collect());
    recs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(recs)
}

pub fn write_csv(records: &[BenchRecord], w: impl std::io::Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv(r: impl std::io::Read) -> Result<Vec<BenchRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in rd.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn format_summary(s: &Summary) -> String {
    let t = match s.solved_time {
        Some((a, b, c)) => format!("({a:.3}, {b:.3}, {c:.3})"),
        None => "(-, -, -)".into(),
    };
    format!("solved {}/{}  time (min, avg, max) {t}  PAR2 {:.3}", s.solved, s.total, s.par2)
}
