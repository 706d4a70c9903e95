//! Run configuration: defaults, `key = value` files, and overrides.
//!
//! ```text
//! # comment
//! problem.name = tenbar
//! problem.bay = 910          # any other problem.* key is a problem option
//! engine.tabu_tenure = 7
//! engine.best_memory_size = 5
//! engine.initial_step = 20   # one value for every dimension, or a comma list
//! engine.step_reduction_factor = 0.5
//! engine.intensify_after = 10   # "off" disables
//! engine.diversify_after = 15   # "off" disables
//! engine.reduce_after = 25
//! engine.max_evaluations = 20000
//! engine.seed = 0
//! engine.aspiration = true
//! run.runs = 5
//! run.out_dir = results
//! run.snapshots = 20,100,1000
//! run.strict_paper = false
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::HarnessError;
use crate::search::SearchConfig;

/// Everything a batch needs. Serialized verbatim into each result file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub problem: String,
    pub problem_options: BTreeMap<String, String>,
    /// Seed of the first run; run `i` uses `seed + i`.
    pub seed: u64,
    pub runs: usize,
    pub out_dir: PathBuf,
    pub snapshots: Vec<usize>,
    /// Disable aspiration.
    pub strict_paper: bool,
    /// Engine settings; `seed` and `aspiration` here are overwritten per run.
    pub engine: SearchConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: String::new(),
            problem_options: BTreeMap::new(),
            seed: 0,
            runs: 5,
            out_dir: PathBuf::from("results"),
            snapshots: vec![20, 100, 1000],
            strict_paper: false,
            engine: SearchConfig::default(),
        }
    }
}

impl RunConfig {
    /// Search settings for the run with the given seed.
    pub fn engine_for(&self, seed: u64, dimension: usize) -> SearchConfig {
        let mut c = self.engine.clone();
        c.seed = seed;
        c.aspiration = self.engine.aspiration && !self.strict_paper;
        if let Some(step) = &c.initial_step {
            if step.len() == 1 && dimension > 1 {
                c.initial_step = Some(vec![step[0]; dimension]);
            }
        }
        c
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.runs as u64).map(move |i| self.seed.wrapping_add(i))
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("'{v}' is not a valid number"))
        }
        fn flag(v: &str) -> Result<bool, String> {
            match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(format!("'{v}' is not a boolean")),
            }
        }
        fn trigger(v: &str) -> Result<Option<usize>, String> {
            if v == "off" {
                Ok(None)
            } else {
                num(v).map(Some)
            }
        }
        fn list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>, String> {
            v.split(',').map(|s| num(s.trim())).collect()
        }
        let e = &mut self.engine;
        match key {
            "problem.name" => self.problem = value.to_string(),
            "engine.tabu_tenure" => e.tabu_tenure = num(value)?,
            "engine.best_memory_size" => e.best_memory_size = num(value)?,
            "engine.initial_step" => e.initial_step = Some(list(value)?),
            "engine.step_reduction_factor" => e.step_reduction_factor = num(value)?,
            "engine.intensify_after" => e.intensify_after = trigger(value)?,
            "engine.diversify_after" => e.diversify_after = trigger(value)?,
            "engine.reduce_after" => e.reduce_after = num(value)?,
            "engine.max_evaluations" => e.max_evaluations = num(value)?,
            "engine.seed" => self.seed = num(value)?,
            "engine.aspiration" => e.aspiration = flag(value)?,
            "run.runs" => self.runs = num(value)?,
            "run.out_dir" => self.out_dir = PathBuf::from(value),
            "run.snapshots" => self.snapshots = parse_snapshots(value)?,
            "run.strict_paper" => self.strict_paper = flag(value)?,
            k => match k.strip_prefix("problem.") {
                Some(opt) if !opt.is_empty() => {
                    self.problem_options.insert(opt.to_string(), value.to_string());
                }
                _ => return Err(format!("unknown key '{k}'")),
            },
        }
        Ok(())
    }

    /// Applies every setting of a config file's text.
    pub fn apply_text(&mut self, text: &str) -> Result<(), HarnessError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| HarnessError::Config {
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, found '{line}'")))?;
            self.set(key.trim(), value.trim()).map_err(err)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text)
    }
}

/// Parses a comma list of evaluation counts.
pub fn parse_snapshots(v: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for s in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let n: usize = s
            .parse()
            .map_err(|_| format!("'{s}' is not an evaluation count"))?;
        if n == 0 {
            return Err("snapshot counts must be positive".into());
        }
        out.push(n);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_settings_apply() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# a run\nproblem.name = tenbar\nproblem.bay=914.4\nengine.tabu_tenure = 9 # more\n\
             engine.intensify_after = off\nrun.snapshots = 100, 20\nrun.strict_paper = true\n",
        )
        .unwrap();
        assert_eq!(c.problem, "tenbar");
        assert_eq!(c.problem_options["bay"], "914.4");
        assert_eq!(c.engine.tabu_tenure, 9);
        assert_eq!(c.engine.intensify_after, None);
        assert_eq!(c.snapshots, vec![20, 100]);
        assert!(!c.engine_for(3, 2).aspiration);
        assert_eq!(c.engine_for(3, 2).seed, 3);
    }

    #[test]
    fn errors_name_the_line() {
        let mut c = RunConfig::default();
        match c.apply_text("run.runs = 2\nengine.colour = red\n") {
            Err(HarnessError::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            c.apply_text("just words"),
            Err(HarnessError::Config { line: 1, .. })
        ));
        assert!(c.apply_text("run.runs = many").is_err());
        assert!(c.apply_text("problem. = x").is_err());
    }

    #[test]
    fn scalar_step_is_broadcast() {
        let mut c = RunConfig::default();
        c.set("engine.initial_step", "2.5").unwrap();
        assert_eq!(c.engine_for(0, 3).initial_step, Some(vec![2.5; 3]));
        c.set("engine.initial_step", "1,2,3").unwrap();
        assert_eq!(c.engine_for(0, 3).initial_step, Some(vec![1.0, 2.0, 3.0]));
    }

    #[test]
    fn seeds_are_consecutive() {
        let c = RunConfig {
            seed: 42,
            runs: 3,
            ..Default::default()
        };
        assert_eq!(c.seeds().collect::<Vec<_>>(), vec![42, 43, 44]);
    }

    #[test]
    fn snapshot_list_rules() {
        assert_eq!(parse_snapshots("1000,20,100,20").unwrap(), vec![20, 100, 1000]);
        assert!(parse_snapshots("0").is_err());
        assert!(parse_snapshots("x").is_err());
    }
}
