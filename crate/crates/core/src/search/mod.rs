//! The tabu search engine.
//!
//! A run is a steepest-descent walk over the quantized axis neighbourhood
//! that always moves, even uphill, and never returns to any of the last
//! `tabu_tenure` visited points. Consecutive moves that fail to improve the
//! best solution drive three restart events in turn: intensification from
//! the mean of the elite list, diversification from a random point, and
//! finally step reduction with a restart from the best point.

mod engine;
mod memory;
mod moves;

use serde::Serialize;
use thiserror::Error;

use crate::problem::{Grid, ProblemError};

pub use engine::{run_search, SearchOutcome, Termination, Visit, VisitKind};
pub use memory::{BestMemory, TabuMemory};
pub use moves::{diversify, generate_neighbors, intensify, select_move, step_units, MoveKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("problem has no design variables")]
    ZeroDimension,
    #[error("expected {expected} components, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("intensification needs at least one elite solution")]
    EmptyBestMemory,
    #[error("evaluation budget must be at least 1")]
    NoBudget,
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Which restart event the search last went through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    Local,
    Intensified,
    Diversified,
    Reduced,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Local => "LOCAL",
            Phase::Intensified => "INTENSIFIED",
            Phase::Diversified => "DIVERSIFIED",
            Phase::Reduced => "REDUCED",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tunables of one search run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Number of recent visits held tabu. Zero turns the engine into a
    /// plain always-move hill climber.
    pub tabu_tenure: usize,
    pub best_memory_size: usize,
    /// Starting step per dimension in problem units; `None` means 1/20 of
    /// each range.
    pub initial_step: Option<Vec<f64>>,
    pub step_reduction_factor: f64,
    /// Non-improving moves before an intensification restart (`None`
    /// disables it).
    pub intensify_after: Option<usize>,
    pub diversify_after: Option<usize>,
    pub reduce_after: usize,
    pub max_evaluations: usize,
    pub seed: u64,
    /// Admit tabu candidates that beat the best objective.
    pub aspiration: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            tabu_tenure: 7,
            best_memory_size: 5,
            initial_step: None,
            step_reduction_factor: 0.5,
            intensify_after: Some(10),
            diversify_after: Some(15),
            reduce_after: 25,
            max_evaluations: 20_000,
            seed: 0,
            aspiration: true,
        }
    }
}

impl SearchConfig {
    /// The bare hill climber: no tabu memory, no intensification, no
    /// diversification. Step reduction and termination are unchanged.
    pub fn hill_climber(&self) -> Self {
        Self {
            tabu_tenure: 0,
            intensify_after: None,
            diversify_after: None,
            ..self.clone()
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidConfig(m));
        if self.max_evaluations < 1 {
            return Err(SearchError::NoBudget);
        }
        if self.best_memory_size < 1 {
            return bad("best_memory_size must be at least 1".into());
        }
        let f = self.step_reduction_factor;
        if !(f > 0.0 && f < 1.0) {
            return bad(format!("step_reduction_factor {f} must lie in (0, 1)"));
        }
        let mut last = 0;
        for (name, t) in [
            ("intensify_after", self.intensify_after),
            ("diversify_after", self.diversify_after),
            ("reduce_after", Some(self.reduce_after)),
        ] {
            if let Some(t) = t {
                if t <= last {
                    return bad(format!(
                        "{name} = {t} breaks 0 < intensify_after < diversify_after < reduce_after"
                    ));
                }
                last = t;
            }
        }
        if let Some(step) = &self.initial_step {
            if step.len() != grid.dimension() {
                return Err(SearchError::WrongLength {
                    expected: grid.dimension(),
                    got: step.len(),
                });
            }
            if let Some(s) = step.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
                return bad(format!("initial step {s} must be positive"));
            }
        }
        Ok(())
    }

    /// Starting step in grid units.
    pub(crate) fn initial_units(&self, grid: &Grid) -> Vec<i64> {
        match &self.initial_step {
            Some(step) => step_units(grid, step),
            None => grid
                .counts()
                .iter()
                .map(|&c| ((c as f64 / 20.0).round() as i64).max(1))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(vec![0.0; 2], vec![10.0; 2], vec![0.1; 2]).unwrap()
    }

    #[test]
    fn default_config_is_valid() {
        SearchConfig::default().validate(&grid()).unwrap();
        SearchConfig::default().hill_climber().validate(&grid()).unwrap();
    }

    #[test]
    fn trigger_order_enforced() {
        let c = SearchConfig {
            diversify_after: Some(10),
            ..Default::default()
        };
        assert!(matches!(c.validate(&grid()), Err(SearchError::InvalidConfig(_))));
        let c = SearchConfig {
            intensify_after: Some(0),
            ..Default::default()
        };
        assert!(c.validate(&grid()).is_err());
    }

    #[test]
    fn zero_budget_rejected() {
        let c = SearchConfig {
            max_evaluations: 0,
            ..Default::default()
        };
        assert_eq!(c.validate(&grid()), Err(SearchError::NoBudget));
    }

    #[test]
    fn bad_factor_rejected() {
        for f in [0.0, 1.0, 1.5, f64::NAN] {
            let c = SearchConfig {
                step_reduction_factor: f,
                ..Default::default()
            };
            assert!(c.validate(&grid()).is_err());
        }
    }

    #[test]
    fn default_step_is_a_twentieth_of_range() {
        assert_eq!(SearchConfig::default().initial_units(&grid()), vec![5, 5]);
    }
}
