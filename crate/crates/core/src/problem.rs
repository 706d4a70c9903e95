//! The contract between the search engine and a design problem: bounds and
//! step quanta, the raw objective, constraint violations and the penalty
//! that folds them into a single scalar.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::Phase;

/// Penalized objective assigned to evaluations whose objective or model
/// failed (non-finite value, mechanism, degenerate geometry).
pub const INFEASIBLE_SENTINEL: f64 = 1e30;

/// Relative slack used when deciding whether a real value sits on the grid.
const GRID_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("problem has no design variables")]
    ZeroDimension,
    #[error("bound/step vectors disagree in length ({lower}, {upper}, {steps})")]
    LengthMismatch {
        lower: usize,
        upper: usize,
        steps: usize,
    },
    #[error("dimension {dim}: lower bound {lower} exceeds upper bound {upper}")]
    InvertedBounds { dim: usize, lower: f64, upper: f64 },
    #[error("dimension {dim}: step {step} must be finite and positive")]
    InvalidStep { dim: usize, step: f64 },
    #[error("dimension {dim}: range {range} is not a whole number of steps of {step}")]
    RangeNotMultiple { dim: usize, range: f64, step: f64 },
    #[error("vector has {got} components, problem has {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("penalty has {got} weights for {expected} constraints")]
    PenaltyArity { expected: usize, got: usize },
    #[error("penalty weight {index} = {weight} must be finite and positive")]
    InvalidWeight { index: usize, weight: f64 },
    #[error("penalty exponent {0} must be finite and >= 1")]
    InvalidExponent(f64),
}

/// A point of the design space. Components are stored in problem units;
/// vectors produced through a [`Grid`] are exact grid points, so equality is
/// plain bitwise float equality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolutionVector(Vec<f64>);

impl SolutionVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for SolutionVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl fmt::Display for SolutionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Quantized design space: per-dimension lower bound, upper bound and
/// minimum step. Grid point `k` of dimension `i` is `lower_i + k * step_i`,
/// with `k` in `0..=count_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    steps: Vec<f64>,
    counts: Vec<i64>,
}

impl Grid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, steps: Vec<f64>) -> Result<Self, ProblemError> {
        if lower.len() != upper.len() || lower.len() != steps.len() {
            return Err(ProblemError::LengthMismatch {
                lower: lower.len(),
                upper: upper.len(),
                steps: steps.len(),
            });
        }
        if lower.is_empty() {
            return Err(ProblemError::ZeroDimension);
        }
        let mut counts = Vec::with_capacity(lower.len());
        for dim in 0..lower.len() {
            let (lo, hi, step) = (lower[dim], upper[dim], steps[dim]);
            if !(step.is_finite() && step > 0.0) {
                return Err(ProblemError::InvalidStep { dim, step });
            }
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(ProblemError::InvertedBounds {
                    dim,
                    lower: lo,
                    upper: hi,
                });
            }
            let range = hi - lo;
            let ratio = range / step;
            let count = ratio.round();
            if (ratio - count).abs() > GRID_EPS * ratio.max(1.0) {
                return Err(ProblemError::RangeNotMultiple { dim, range, step });
            }
            counts.push(count as i64);
        }
        Ok(Self {
            lower,
            upper,
            steps,
            counts,
        })
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn min_steps(&self) -> &[f64] {
        &self.steps
    }

    /// Highest grid index per dimension.
    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    /// Value of grid index `k` in dimension `dim`. The top index maps onto
    /// the upper bound exactly.
    pub fn value(&self, dim: usize, k: i64) -> f64 {
        if k >= self.counts[dim] {
            self.upper[dim]
        } else if k <= 0 {
            self.lower[dim]
        } else {
            self.lower[dim] + k as f64 * self.steps[dim]
        }
    }

    /// Nearest grid index to `v`, clamped to the bounds. Halves round away
    /// from the lower bound.
    pub fn index_of(&self, dim: usize, v: f64) -> i64 {
        if v.is_nan() {
            return 0;
        }
        let t = (v - self.lower[dim]) / self.steps[dim];
        let k = (t + 0.5 + GRID_EPS * t.abs().max(1.0)).floor();
        (k.max(0.0) as i64).min(self.counts[dim])
    }

    pub fn point(&self, indices: &[i64]) -> SolutionVector {
        SolutionVector(
            indices
                .iter()
                .enumerate()
                .map(|(dim, &k)| self.value(dim, k))
                .collect(),
        )
    }

    pub fn indices(&self, x: &SolutionVector) -> Vec<i64> {
        x.values()
            .iter()
            .enumerate()
            .map(|(dim, &v)| self.index_of(dim, v))
            .collect()
    }

    /// Clamp every component into bounds and round it to the nearest grid
    /// point.
    pub fn quantize(&self, raw: &[f64]) -> Result<SolutionVector, ProblemError> {
        self.check_len(raw.len())?;
        Ok(SolutionVector(
            raw.iter()
                .enumerate()
                .map(|(dim, &v)| self.value(dim, self.index_of(dim, v)))
                .collect(),
        ))
    }

    /// True when `x` has the right length and every component is exactly a
    /// grid point.
    pub fn contains(&self, x: &SolutionVector) -> bool {
        x.len() == self.dimension()
            && x
                .values()
                .iter()
                .enumerate()
                .all(|(dim, &v)| self.value(dim, self.index_of(dim, v)) == v)
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<(), ProblemError> {
        if got != self.dimension() {
            return Err(ProblemError::WrongLength {
                expected: self.dimension(),
                got,
            });
        }
        Ok(())
    }
}

/// Static exterior penalty: `raw + sum_j weight_j * violation_j^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenaltyConfig {
    weights: Vec<f64>,
    exponent: f64,
}

impl PenaltyConfig {
    pub fn new(weights: Vec<f64>, exponent: f64) -> Result<Self, ProblemError> {
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(ProblemError::InvalidWeight { index, weight });
            }
        }
        if !(exponent.is_finite() && exponent >= 1.0) {
            return Err(ProblemError::InvalidExponent(exponent));
        }
        Ok(Self { weights, exponent })
    }

    /// Quadratic penalty with the given weights.
    pub fn quadratic(weights: Vec<f64>) -> Result<Self, ProblemError> {
        Self::new(weights, 2.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn penalty(&self, violations: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(violations)
            .filter(|(_, &v)| v > 0.0)
            .map(|(w, &v)| w * v.powf(self.exponent))
            .sum()
    }
}

/// Raw objective and per-constraint violations (0 when satisfied) of one
/// design point.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub raw_objective: f64,
    pub violations: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct ModelError(pub String);

/// Something that can score a design vector. Implementations must be pure.
pub trait DesignModel: Send + Sync {
    fn constraint_names(&self) -> Vec<String>;

    fn assess(&self, x: &[f64]) -> Result<Assessment, ModelError>;
}

type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A [`DesignModel`] assembled from plain closures.
pub struct FnModel {
    objective: ScalarFn,
    constraints: Vec<(String, ScalarFn)>,
}

impl FnModel {
    pub fn new(objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            objective: Box::new(objective),
            constraints: Vec::new(),
        }
    }

    /// Adds a constraint returning its violation magnitude (0 when met).
    pub fn constraint(
        mut self,
        name: impl Into<String>,
        violation: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.constraints.push((name.into(), Box::new(violation)));
        self
    }
}

impl DesignModel for FnModel {
    fn constraint_names(&self) -> Vec<String> {
        self.constraints.iter().map(|(n, _)| n.clone()).collect()
    }

    fn assess(&self, x: &[f64]) -> Result<Assessment, ModelError> {
        Ok(Assessment {
            raw_objective: (self.objective)(x),
            violations: self.constraints.iter().map(|(_, c)| c(x)).collect(),
        })
    }
}

/// A complete, immutable problem statement.
pub struct ProblemDefinition {
    name: String,
    grid: Grid,
    model: Box<dyn DesignModel>,
    penalty: PenaltyConfig,
    start: Option<SolutionVector>,
}

impl fmt::Debug for ProblemDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDefinition")
            .field("name", &self.name)
            .field("grid", &self.grid)
            .field("constraints", &self.model.constraint_names())
            .field("penalty", &self.penalty)
            .field("start", &self.start)
            .finish()
    }
}

impl ProblemDefinition {
    pub fn new(
        name: impl Into<String>,
        grid: Grid,
        model: impl DesignModel + 'static,
        penalty: PenaltyConfig,
    ) -> Result<Self, ProblemError> {
        let expected = model.constraint_names().len();
        if penalty.weights().len() != expected {
            return Err(ProblemError::PenaltyArity {
                expected,
                got: penalty.weights().len(),
            });
        }
        Ok(Self {
            name: name.into(),
            grid,
            model: Box::new(model),
            penalty,
            start: None,
        })
    }

    /// Fixes the starting point of every search (quantized onto the grid).
    /// Without one, searches start from a seeded random grid point.
    pub fn with_start(mut self, start: &[f64]) -> Result<Self, ProblemError> {
        self.start = Some(self.grid.quantize(start)?);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    pub fn penalty(&self) -> &PenaltyConfig {
        &self.penalty
    }

    pub fn start(&self) -> Option<&SolutionVector> {
        self.start.as_ref()
    }

    pub fn constraint_names(&self) -> Vec<String> {
        self.model.constraint_names()
    }

    pub fn model(&self) -> &dyn DesignModel {
        self.model.as_ref()
    }

    pub fn quantize(&self, raw: &[f64]) -> Result<SolutionVector, ProblemError> {
        self.grid.quantize(raw)
    }
}

/// One objective call, as logged by the engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationRecord {
    pub vector: SolutionVector,
    pub raw_objective: f64,
    pub violations: Vec<f64>,
    pub penalized_objective: f64,
    pub feasible: bool,
    pub eval_index: usize,
    pub phase: Phase,
    /// Set when the model failed; such records carry the sentinel objective.
    pub failure: Option<String>,
}

/// Scores `x` under `penalty`. Model failures and non-finite objectives
/// yield an infeasible record with [`INFEASIBLE_SENTINEL`] as penalized
/// objective; any violations the model did report are kept.
pub fn evaluate(
    problem: &ProblemDefinition,
    penalty: &PenaltyConfig,
    x: &SolutionVector,
    eval_index: usize,
    phase: Phase,
) -> EvaluationRecord {
    let n_constraints = penalty.weights().len();
    let failed = |violations: Vec<f64>, raw: f64, why: String| EvaluationRecord {
        vector: x.clone(),
        raw_objective: raw,
        violations,
        penalized_objective: INFEASIBLE_SENTINEL,
        feasible: false,
        eval_index,
        phase,
        failure: Some(why),
    };

    if let Err(e) = problem.grid.check_len(x.len()) {
        return failed(vec![INFEASIBLE_SENTINEL; n_constraints], INFEASIBLE_SENTINEL, e.to_string());
    }
    match problem.model.assess(x.values()) {
        Err(e) => failed(vec![INFEASIBLE_SENTINEL; n_constraints], INFEASIBLE_SENTINEL, e.to_string()),
        Ok(Assessment {
            raw_objective,
            violations,
        }) => {
            if violations.len() != n_constraints {
                let why = format!(
                    "model reported {} violations for {} constraints",
                    violations.len(),
                    n_constraints
                );
                return failed(vec![INFEASIBLE_SENTINEL; n_constraints], raw_objective, why);
            }
            if !raw_objective.is_finite() {
                return failed(violations, raw_objective, format!("objective is {raw_objective}"));
            }
            if let Some(v) = violations.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return failed(violations.clone(), raw_objective, format!("violation is {v}"));
            }
            let feasible = violations.iter().all(|&v| v == 0.0);
            let penalized_objective = if feasible {
                raw_objective
            } else {
                raw_objective + penalty.penalty(&violations)
            };
            EvaluationRecord {
                vector: x.clone(),
                raw_objective,
                violations,
                penalized_objective,
                feasible,
                eval_index,
                phase,
                failure: None,
            }
        }
    }
}
