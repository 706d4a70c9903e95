//! Seeded batch runs and their output files.
//!
//! A batch of `R` runs of problem `P` with base seed `S` writes, into the
//! output directory:
//!
//! * `P-{seed}.json` — one [`RunResult`] per run;
//! * `P-{seed}-convergence.csv` — one row per evaluation with columns
//!   `eval_index,raw_objective,penalized_objective,best_so_far,feasible,phase`;
//! * `P-summary.csv` — `snapshot,min,max,median` of the best objective over
//!   the runs at each snapshot and at convergence;
//! * `P-{seed}-profile.csv` (pole problems) or `P-{seed}-truss.txt`
//!   (ten-bar) for the best design.

mod config;

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

pub use config::{parse_snapshots, RunConfig};

use crate::pole::{PoleGeometry, PoleProfile};
use crate::problem::EvaluationRecord;
use crate::problems::{build_problem, RegistryError};
use crate::search::{run_search, SearchError, SearchOutcome, Termination, Visit};
use crate::truss::{build_ten_bar, write_truss, TenBarDesign, TenBarLayout};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read config file {path}: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("run with seed {seed}: {source}")]
    Search { seed: u64, source: SearchError },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("no runs requested")]
    NoRuns,
}

/// Best objective after a number of evaluations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    /// The evaluation count, or `converged` for the end of the run.
    pub label: String,
    pub evaluations: usize,
    pub best: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub problem: String,
    pub config: RunConfig,
    pub seed: u64,
    pub best_vector: Vec<f64>,
    pub best_raw_objective: f64,
    pub best_penalized_objective: f64,
    pub best_violations: Vec<f64>,
    pub feasible: bool,
    pub best_feasible_objective: Option<f64>,
    pub best_feasible_vector: Option<Vec<f64>>,
    pub evaluations: usize,
    pub termination: Termination,
    pub final_step: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Every current solution in order, with how it was reached.
    pub visits: Vec<Visit>,
    pub wall_time_s: f64,
}

impl RunResult {
    fn new(config: &RunConfig, seed: u64, outcome: &SearchOutcome, wall_time_s: f64) -> Self {
        let mut snapshots: Vec<Snapshot> = config
            .snapshots
            .iter()
            .map(|&n| Snapshot {
                label: n.to_string(),
                evaluations: n.min(outcome.evaluations()),
                best: outcome.best_after(n),
            })
            .collect();
        snapshots.push(Snapshot {
            label: "converged".into(),
            evaluations: outcome.evaluations(),
            best: outcome.best.penalized_objective,
        });
        let best = &outcome.best;
        Self {
            problem: config.problem.clone(),
            config: config.clone(),
            seed,
            best_vector: best.vector.values().to_vec(),
            best_raw_objective: best.raw_objective,
            best_penalized_objective: best.penalized_objective,
            best_violations: best.violations.clone(),
            feasible: best.feasible,
            best_feasible_objective: outcome.best_feasible.as_ref().map(|r| r.raw_objective),
            best_feasible_vector: outcome
                .best_feasible
                .as_ref()
                .map(|r| r.vector.values().to_vec()),
            evaluations: outcome.evaluations(),
            termination: outcome.termination,
            final_step: outcome.final_step.clone(),
            snapshots,
            visits: outcome.visits.clone(),
            wall_time_s,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results are plain data");
        s.push('\n');
        s
    }
}

/// The convergence log: header plus one row per evaluation.
pub fn convergence_csv(history: &[EvaluationRecord]) -> String {
    let mut out =
        String::from("eval_index,raw_objective,penalized_objective,best_so_far,feasible,phase\n");
    let mut best = f64::INFINITY;
    for r in history {
        best = best.min(r.penalized_objective);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.eval_index, r.raw_objective, r.penalized_objective, best, r.feasible, r.phase
        );
    }
    out
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// `snapshot,min,max,median` over runs, one row per snapshot label in the
/// order of the first result.
pub fn summary_csv(results: &[RunResult]) -> String {
    let mut out = String::from("snapshot,min,max,median\n");
    let Some(first) = results.first() else {
        return out;
    };
    for (i, snap) in first.snapshots.iter().enumerate() {
        let mut v: Vec<f64> = results.iter().map(|r| r.snapshots[i].best).collect();
        v.sort_by(f64::total_cmp);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            snap.label,
            v[0],
            v[v.len() - 1],
            median(&v)
        );
    }
    out
}

fn write(path: PathBuf, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(&path, contents).map_err(|source| HarnessError::Write { path, source })
}

/// A plot-ready rendering of the best design, if the problem has one.
fn design_file(config: &RunConfig, best: &[f64]) -> Option<(&'static str, String)> {
    match config.problem.as_str() {
        "pole1" | "pole2" | "pole3" | "pole4" => {
            let mut pairs: Vec<[f64; 2]> = best.chunks(2).map(|p| [p[0], p[1]]).collect();
            pairs.sort_by(|a, b| a[0].total_cmp(&b[0]));
            let params: Vec<f64> = pairs.into_iter().flatten().collect();
            PoleProfile::new(&params, &PoleGeometry::default())
                .ok()
                .map(|p| ("profile.csv", p.to_csv()))
        }
        "tenbar" if config.problem_options.is_empty() => {
            let layout = TenBarLayout::default();
            let model = build_ten_bar(&TenBarDesign::from_vector(best)?, &layout).ok()?;
            Some(("truss.txt", write_truss(&model)))
        }
        _ => None,
    }
}

/// Runs one seed and writes its result, convergence log and design file.
pub fn run_one(config: &RunConfig, seed: u64) -> Result<RunResult, HarnessError> {
    let problem = build_problem(&config.problem, &config.problem_options)?;
    let engine = config.engine_for(seed, problem.dimension());
    let t0 = Instant::now();
    let outcome =
        run_search(&problem, &engine).map_err(|source| HarnessError::Search { seed, source })?;
    let result = RunResult::new(config, seed, &outcome, t0.elapsed().as_secs_f64());

    let dir = &config.out_dir;
    let stem = format!("{}-{seed}", config.problem);
    write(dir.join(format!("{stem}.json")), &result.to_json())?;
    write(
        dir.join(format!("{stem}-convergence.csv")),
        &convergence_csv(&outcome.history),
    )?;
    if let Some((suffix, text)) = design_file(config, &result.best_vector) {
        write(dir.join(format!("{stem}-{suffix}")), &text)?;
    }
    Ok(result)
}

/// Runs every seed of the batch (concurrently) and writes the summary.
/// Results come back in seed order.
pub fn run_batch(config: &RunConfig) -> Result<Vec<RunResult>, HarnessError> {
    if config.runs == 0 {
        return Err(HarnessError::NoRuns);
    }
    // fail fast on a bad problem before spawning anything
    build_problem(&config.problem, &config.problem_options)?;
    create_dir(&config.out_dir)?;
    let seeds: Vec<u64> = config.seeds().collect();
    let results: Vec<Result<RunResult, HarnessError>> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| s.spawn(move || run_one(config, seed)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    write(
        config.out_dir.join(format!("{}-summary.csv", config.problem)),
        &summary_csv(&results),
    )?;
    Ok(results)
}

fn create_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Write {
        path: dir.to_path_buf(),
        source,
    })
}
