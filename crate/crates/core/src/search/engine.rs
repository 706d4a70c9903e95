use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::memory::{BestMemory, TabuMemory};
use super::moves::{intensify, neighbor_indices, random_indices, select_move, MoveKind};
use super::{Phase, SearchConfig, SearchError};
use crate::problem::{evaluate, EvaluationRecord, ProblemDefinition, SolutionVector};

/// How a point became the current solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VisitKind {
    Start,
    /// Ordinary move to a non-tabu neighbour.
    Free,
    /// Move to a tabu neighbour admitted by aspiration.
    Aspiration,
    /// Move to a tabu neighbour because every neighbour was tabu.
    Escape,
    Intensify,
    Diversify,
    /// Restart from the best point after a step reduction.
    Reduce,
}

impl From<MoveKind> for VisitKind {
    fn from(k: MoveKind) -> Self {
        match k {
            MoveKind::Free => VisitKind::Free,
            MoveKind::Aspiration => VisitKind::Aspiration,
            MoveKind::Escape => VisitKind::Escape,
        }
    }
}

impl VisitKind {
    /// Whether this visit is allowed to land on a tabu point.
    pub fn may_revisit(self) -> bool {
        !matches!(self, VisitKind::Free)
    }
}

/// One entry of the trajectory of current solutions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Visit {
    pub vector: SolutionVector,
    pub objective: f64,
    /// Evaluation that produced the objective; `None` when it came from the
    /// tabu memory or the best record without a new objective call.
    pub eval_index: Option<usize>,
    pub kind: VisitKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Termination {
    BudgetExhausted,
    /// A reduction event fired with every step already at its minimum.
    Converged,
    /// No dimension has room to move.
    NoNeighbors,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: EvaluationRecord,
    pub best_feasible: Option<EvaluationRecord>,
    pub history: Vec<EvaluationRecord>,
    pub visits: Vec<Visit>,
    pub termination: Termination,
    /// Step per dimension in problem units when the run stopped.
    pub final_step: Vec<f64>,
}

impl SearchOutcome {
    pub fn evaluations(&self) -> usize {
        self.history.len()
    }

    /// Best penalized objective after each evaluation.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.history
            .iter()
            .map(|r| {
                if r.penalized_objective < best {
                    best = r.penalized_objective;
                }
                best
            })
            .collect()
    }

    /// Best penalized objective after `n` evaluations, or at termination if
    /// the run used fewer.
    pub fn best_after(&self, n: usize) -> f64 {
        self.history
            .iter()
            .take(n.max(1))
            .map(|r| r.penalized_objective)
            .fold(f64::INFINITY, f64::min)
    }
}

struct Run<'a> {
    problem: &'a ProblemDefinition,
    budget: usize,
    history: Vec<EvaluationRecord>,
    best: Option<usize>,
    best_feasible: Option<usize>,
    phase: Phase,
}

impl Run<'_> {
    fn exhausted(&self) -> bool {
        self.history.len() >= self.budget
    }

    fn best_objective(&self) -> f64 {
        self.best
            .map(|i| self.history[i].penalized_objective)
            .unwrap_or(f64::INFINITY)
    }

    /// Calls the objective once. Returns `None` if the budget is spent.
    fn evaluate(&mut self, x: &SolutionVector) -> Option<(f64, usize, bool)> {
        if self.exhausted() {
            return None;
        }
        let eval_index = self.history.len() + 1;
        let rec = evaluate(self.problem, self.problem.penalty(), x, eval_index, self.phase);
        let f = rec.penalized_objective;
        let improved = f < self.best_objective();
        let i = self.history.len();
        if improved {
            self.best = Some(i);
        }
        if rec.feasible
            && self
                .best_feasible
                .is_none_or(|b| rec.raw_objective < self.history[b].raw_objective)
        {
            self.best_feasible = Some(i);
        }
        self.history.push(rec);
        Some((f, eval_index, improved))
    }
}

/// Runs one tabu search on `problem`.
///
/// Each iteration evaluates the axis neighbourhood of the current point
/// (tabu neighbours reuse their remembered objective) and moves to the best
/// admissible neighbour. After `intensify_after` consecutive moves without
/// a new best the search restarts from the mean of the elite list, after
/// `diversify_after` from a random point, and after `reduce_after` the step
/// shrinks and the search restarts from the best point. A reduction with
/// all steps already at the grid quantum ends the run.
pub fn run_search(
    problem: &ProblemDefinition,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let grid = problem.grid();
    config.validate(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut units = config.initial_units(grid);
    let mut tabu = TabuMemory::new(config.tabu_tenure);
    let mut elite = BestMemory::new(config.best_memory_size);
    let mut visits: Vec<Visit> = Vec::new();
    let mut run = Run {
        problem,
        budget: config.max_evaluations,
        history: Vec::with_capacity(config.max_evaluations.min(1 << 20)),
        best: None,
        best_feasible: None,
        phase: Phase::Local,
    };

    let start = match problem.start() {
        Some(s) => s.clone(),
        None => grid.point(&random_indices(grid, &mut rng)),
    };
    let (f0, e0, _) = run.evaluate(&start).ok_or(SearchError::NoBudget)?;
    let mut current = grid.indices(&start);
    tabu.record_visit(start.clone(), f0);
    elite.update(&start, f0);
    visits.push(Visit {
        vector: start,
        objective: f0,
        eval_index: Some(e0),
        kind: VisitKind::Start,
    });

    let mut stall = 0usize;
    let termination = 'search: loop {
        if run.exhausted() {
            break Termination::BudgetExhausted;
        }
        let neighbors = neighbor_indices(&current, &units, grid.counts());
        if neighbors.is_empty() {
            break Termination::NoNeighbors;
        }

        // aspiration compares against the best known before this neighbourhood
        let best_before = run.best_objective();
        let mut candidates: Vec<(SolutionVector, f64)> = Vec::with_capacity(neighbors.len());
        let mut evals: Vec<Option<usize>> = Vec::with_capacity(neighbors.len());
        let mut improved = false;
        let mut cut_short = false;
        for n in &neighbors {
            let x = grid.point(n);
            if let Some(f) = tabu.objective_of(&x) {
                candidates.push((x, f));
                evals.push(None);
                continue;
            }
            match run.evaluate(&x) {
                Some((f, e, better)) => {
                    improved |= better;
                    candidates.push((x, f));
                    evals.push(Some(e));
                }
                None => {
                    cut_short = true;
                    break;
                }
            }
        }

        let Some((choice, kind)) =
            select_move(&candidates, &tabu, best_before, config.aspiration)
        else {
            break Termination::BudgetExhausted;
        };
        let (x, f) = candidates.swap_remove(choice);
        current = grid.indices(&x);
        tabu.record_visit(x.clone(), f);
        elite.update(&x, f);
        visits.push(Visit {
            vector: x,
            objective: f,
            eval_index: evals[choice],
            kind: kind.into(),
        });

        if improved {
            stall = 0;
            run.phase = Phase::Local;
        } else {
            stall += 1;
        }
        if cut_short {
            break Termination::BudgetExhausted;
        }

        let restart = if config.intensify_after == Some(stall) {
            let p = intensify(&elite, grid)?;
            run.phase = Phase::Intensified;
            Some((p, VisitKind::Intensify))
        } else if config.diversify_after == Some(stall) {
            run.phase = Phase::Diversified;
            Some((grid.point(&random_indices(grid, &mut rng)), VisitKind::Diversify))
        } else if stall >= config.reduce_after {
            if units.iter().all(|&u| u == 1) {
                break Termination::Converged;
            }
            for u in units.iter_mut() {
                *u = ((*u as f64 * config.step_reduction_factor).floor() as i64).max(1);
            }
            stall = 0;
            run.phase = Phase::Reduced;
            let b = &run.history[run.best.expect("start point was evaluated")];
            Some((b.vector.clone(), VisitKind::Reduce))
        } else {
            None
        };

        if let Some((p, kind)) = restart {
            let known = tabu.objective_of(&p).or_else(|| {
                let b = &run.history[run.best?];
                (b.vector == p).then_some(b.penalized_objective)
            });
            let (f, eval_index) = match known {
                Some(f) => (f, None),
                None => match run.evaluate(&p) {
                    Some((f, e, better)) => {
                        if better {
                            stall = 0;
                        }
                        (f, Some(e))
                    }
                    None => break 'search Termination::BudgetExhausted,
                },
            };
            current = grid.indices(&p);
            tabu.record_visit(p.clone(), f);
            elite.update(&p, f);
            visits.push(Visit {
                vector: p,
                objective: f,
                eval_index,
                kind,
            });
        }
    };

    let final_step = units
        .iter()
        .zip(grid.min_steps())
        .map(|(&u, m)| u as f64 * m)
        .collect();
    let best = run.history[run.best.expect("start point was evaluated")].clone();
    let best_feasible = run.best_feasible.map(|i| run.history[i].clone());
    Ok(SearchOutcome {
        best,
        best_feasible,
        history: run.history,
        visits,
        termination,
        final_step,
    })
}
