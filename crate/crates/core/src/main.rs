use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use tabu_forge::harness::{parse_snapshots, run_batch, HarnessError, RunConfig};
use tabu_forge::problems::{RegistryError, PROBLEM_NAMES};

/// Seeded tabu search runs on the bundled design problems.
#[derive(Debug, Parser)]
#[command(name = "tabu-forge", version)]
struct Cli {
    /// Problem to solve: twobasin, tenbar, pole1, pole2, pole3 or pole4.
    #[arg(long)]
    problem: Option<String>,
    /// Seed of the first run; later runs use seed+1, seed+2, ...
    #[arg(long)]
    seed: Option<u64>,
    /// Number of runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Objective evaluation budget per run.
    #[arg(long = "max-evals")]
    max_evals: Option<usize>,
    /// key = value config file; flags override its settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (TABU_FORGE_OUT takes precedence).
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Comma list of evaluation counts for best-so-far snapshots.
    #[arg(long)]
    snapshots: Option<String>,
    /// Disable the aspiration criterion.
    #[arg(long = "strict-paper")]
    strict_paper: bool,
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}\n");
    let _ = Cli::command().print_help();
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        if let Err(e) = config.apply_file(path) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(p) = cli.problem {
        config.problem = p;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(r) = cli.runs {
        config.runs = r;
    }
    if let Some(m) = cli.max_evals {
        config.engine.max_evaluations = m;
    }
    if let Some(d) = cli.out_dir {
        config.out_dir = d;
    }
    if let Some(s) = cli.snapshots {
        match parse_snapshots(&s) {
            Ok(s) => config.snapshots = s,
            Err(e) => return usage_error(&format!("--snapshots: {e}")),
        }
    }
    if cli.strict_paper {
        config.strict_paper = true;
    }
    if let Some(d) = std::env::var_os("TABU_FORGE_OUT").filter(|d| !d.is_empty()) {
        config.out_dir = PathBuf::from(d);
    }
    if config.problem.is_empty() {
        return usage_error(&format!(
            "no problem given (choose one of: {})",
            PROBLEM_NAMES.join(", ")
        ));
    }

    match run_batch(&config) {
        Ok(results) => {
            for r in &results {
                let feasible = r
                    .best_feasible_objective
                    .map_or("none".to_string(), |f| format!("{f:.6}"));
                println!(
                    "{} seed {}: best {:.6} (best feasible {feasible}) after {} evaluations",
                    r.problem, r.seed, r.best_penalized_objective, r.evaluations
                );
            }
            println!("results in {}", config.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(HarnessError::Registry(e @ RegistryError::Unknown(_))) => usage_error(&e.to_string()),
        Err(e @ HarnessError::Registry(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
