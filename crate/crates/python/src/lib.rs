//! Python bindings: search configuration and runs, the bundled problems,
//! ten-bar analysis and the pole surrogate.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tabu_forge::pole::{self, PoleGeometry, PoleProfile};
use tabu_forge::problem::{Assessment, DesignModel, Grid, ModelError, PenaltyConfig};
use tabu_forge::problems::{problem_by_name, PROBLEM_NAMES};
use tabu_forge::truss::{self, build_ten_bar, TenBarDesign, TenBarLayout};
use tabu_forge::{ProblemDefinition, SearchOutcome};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Tunables of one search run.
#[pyclass(name = "SearchConfig", from_py_object)]
#[derive(Clone)]
struct PySearchConfig {
    inner: tabu_forge::SearchConfig,
}

#[pymethods]
impl PySearchConfig {
    #[new]
    #[pyo3(signature = (seed=0, max_evaluations=20_000, tabu_tenure=7, aspiration=true))]
    fn new(seed: u64, max_evaluations: usize, tabu_tenure: usize, aspiration: bool) -> Self {
        Self {
            inner: tabu_forge::SearchConfig {
                seed,
                max_evaluations,
                tabu_tenure,
                aspiration,
                ..Default::default()
            },
        }
    }

    /// The same settings without tabu memory, intensification or
    /// diversification.
    fn hill_climber(&self) -> Self {
        Self {
            inner: self.inner.hill_climber(),
        }
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    #[setter]
    fn set_seed(&mut self, v: u64) {
        self.inner.seed = v;
    }
    #[getter]
    fn max_evaluations(&self) -> usize {
        self.inner.max_evaluations
    }
    #[setter]
    fn set_max_evaluations(&mut self, v: usize) {
        self.inner.max_evaluations = v;
    }
    #[getter]
    fn tabu_tenure(&self) -> usize {
        self.inner.tabu_tenure
    }
    #[setter]
    fn set_tabu_tenure(&mut self, v: usize) {
        self.inner.tabu_tenure = v;
    }
    #[getter]
    fn best_memory_size(&self) -> usize {
        self.inner.best_memory_size
    }
    #[setter]
    fn set_best_memory_size(&mut self, v: usize) {
        self.inner.best_memory_size = v;
    }
    #[getter]
    fn initial_step(&self) -> Option<Vec<f64>> {
        self.inner.initial_step.clone()
    }
    #[setter]
    fn set_initial_step(&mut self, v: Option<Vec<f64>>) {
        self.inner.initial_step = v;
    }
    #[getter]
    fn step_reduction_factor(&self) -> f64 {
        self.inner.step_reduction_factor
    }
    #[setter]
    fn set_step_reduction_factor(&mut self, v: f64) {
        self.inner.step_reduction_factor = v;
    }
    #[getter]
    fn intensify_after(&self) -> Option<usize> {
        self.inner.intensify_after
    }
    #[setter]
    fn set_intensify_after(&mut self, v: Option<usize>) {
        self.inner.intensify_after = v;
    }
    #[getter]
    fn diversify_after(&self) -> Option<usize> {
        self.inner.diversify_after
    }
    #[setter]
    fn set_diversify_after(&mut self, v: Option<usize>) {
        self.inner.diversify_after = v;
    }
    #[getter]
    fn reduce_after(&self) -> usize {
        self.inner.reduce_after
    }
    #[setter]
    fn set_reduce_after(&mut self, v: usize) {
        self.inner.reduce_after = v;
    }
    #[getter]
    fn aspiration(&self) -> bool {
        self.inner.aspiration
    }
    #[setter]
    fn set_aspiration(&mut self, v: bool) {
        self.inner.aspiration = v;
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Outcome of one run.
#[pyclass(name = "SearchResult", frozen)]
struct PySearchResult {
    outcome: SearchOutcome,
}

#[pymethods]
impl PySearchResult {
    #[getter]
    fn best_vector(&self) -> Vec<f64> {
        self.outcome.best.vector.values().to_vec()
    }
    #[getter]
    fn best_objective(&self) -> f64 {
        self.outcome.best.penalized_objective
    }
    #[getter]
    fn best_raw_objective(&self) -> f64 {
        self.outcome.best.raw_objective
    }
    #[getter]
    fn best_violations(&self) -> Vec<f64> {
        self.outcome.best.violations.clone()
    }
    #[getter]
    fn feasible(&self) -> bool {
        self.outcome.best.feasible
    }
    #[getter]
    fn best_feasible_objective(&self) -> Option<f64> {
        self.outcome.best_feasible.as_ref().map(|r| r.raw_objective)
    }
    #[getter]
    fn best_feasible_vector(&self) -> Option<Vec<f64>> {
        self.outcome
            .best_feasible
            .as_ref()
            .map(|r| r.vector.values().to_vec())
    }
    #[getter]
    fn evaluations(&self) -> usize {
        self.outcome.evaluations()
    }
    #[getter]
    fn termination(&self) -> String {
        format!("{:?}", self.outcome.termination)
    }
    #[getter]
    fn final_step(&self) -> Vec<f64> {
        self.outcome.final_step.clone()
    }
    /// Best penalized objective after each evaluation.
    fn best_so_far(&self) -> Vec<f64> {
        self.outcome.best_so_far()
    }
    fn best_after(&self, n: usize) -> f64 {
        self.outcome.best_after(n)
    }
    /// `(vector, objective, kind)` for every current solution in order.
    fn visits(&self) -> Vec<(Vec<f64>, f64, String)> {
        self.outcome
            .visits
            .iter()
            .map(|v| (v.vector.values().to_vec(), v.objective, format!("{:?}", v.kind)))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SearchResult(best_objective={}, evaluations={}, termination={:?})",
            self.outcome.best.penalized_objective,
            self.outcome.evaluations(),
            self.outcome.termination
        )
    }
}

fn run(problem: &ProblemDefinition, config: &PySearchConfig) -> PyResult<PySearchResult> {
    let outcome = tabu_forge::run_search(problem, &config.inner).map_err(value_error)?;
    Ok(PySearchResult { outcome })
}

/// Runs a search on one of the bundled problems.
#[pyfunction]
#[pyo3(signature = (name, config=None))]
fn solve_problem(name: &str, config: Option<PySearchConfig>) -> PyResult<PySearchResult> {
    let problem = problem_by_name(name).map_err(value_error)?;
    run(&problem, &config.unwrap_or_else(|| PySearchConfig::new(0, 20_000, 7, true)))
}

/// A Python callable `f(x) -> (objective, [violations...])`.
struct PyModel {
    func: Py<PyAny>,
    n_constraints: usize,
}

impl DesignModel for PyModel {
    fn constraint_names(&self) -> Vec<String> {
        (0..self.n_constraints).map(|i| format!("c{i}")).collect()
    }

    fn assess(&self, x: &[f64]) -> Result<Assessment, ModelError> {
        Python::attach(|py| {
            let (raw_objective, violations): (f64, Vec<f64>) = self
                .func
                .call1(py, (x.to_vec(),))
                .and_then(|r| r.extract(py))
                .map_err(|e| ModelError(e.to_string()))?;
            Ok(Assessment {
                raw_objective,
                violations,
            })
        })
    }
}

/// Minimizes a Python objective on a box grid.
///
/// `func(x)` must return `(objective, violations)`; `weights` gives one
/// penalty weight per violation (quadratic penalty).
#[pyfunction]
#[pyo3(signature = (func, lower, upper, steps, config=None, weights=Vec::new(), start=None))]
fn minimize(
    func: Py<PyAny>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    steps: Vec<f64>,
    config: Option<PySearchConfig>,
    weights: Vec<f64>,
    start: Option<Vec<f64>>,
) -> PyResult<PySearchResult> {
    let grid = Grid::new(lower, upper, steps).map_err(value_error)?;
    let model = PyModel {
        func,
        n_constraints: weights.len(),
    };
    let penalty = PenaltyConfig::quadratic(weights).map_err(value_error)?;
    let mut problem =
        ProblemDefinition::new("python", grid, model, penalty).map_err(value_error)?;
    if let Some(s) = start {
        problem = problem.with_start(&s).map_err(value_error)?;
    }
    run(&problem, &config.unwrap_or_else(|| PySearchConfig::new(0, 20_000, 7, true)))
}

/// Snaps `x` to the nearest point of the grid.
#[pyfunction]
fn quantize(lower: Vec<f64>, upper: Vec<f64>, steps: Vec<f64>, x: Vec<f64>) -> PyResult<Vec<f64>> {
    let grid = Grid::new(lower, upper, steps).map_err(value_error)?;
    Ok(grid.quantize(&x).map_err(value_error)?.into_inner())
}

#[pyfunction]
fn problem_names() -> Vec<&'static str> {
    PROBLEM_NAMES.to_vec()
}

/// The 16-variable vector of the reference ten-bar design.
#[pyfunction]
fn ten_bar_reference() -> Vec<f64> {
    TenBarDesign::reference().to_vector()
}

fn ten_bar_model(x: &[f64]) -> PyResult<(truss::TrussModel, TenBarLayout)> {
    let layout = TenBarLayout::default();
    let design = TenBarDesign::from_vector(x)
        .ok_or_else(|| PyValueError::new_err(format!("expected 16 values, got {}", x.len())))?;
    let model = build_ten_bar(&design, &layout).map_err(value_error)?;
    Ok((model, layout))
}

/// Mass in kg of a ten-bar design vector.
#[pyfunction]
fn ten_bar_mass(x: Vec<f64>) -> PyResult<f64> {
    Ok(truss::mass(&ten_bar_model(&x)?.0))
}

/// Analyses every member of a ten-bar design: a dict with `axial_force`,
/// `stress`, `length`, `critical_buckling_load`, per-family violation
/// totals and the equilibrium residual.
#[pyfunction]
fn ten_bar_solve<'py>(py: Python<'py>, x: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let (model, layout) = ten_bar_model(&x)?;
    let sol = truss::solve(&model).map_err(value_error)?;
    let v = truss::check_constraints(&sol.members, &layout.limits);
    let d = PyDict::new(py);
    let col = |f: fn(&truss::MemberState) -> f64| sol.members.iter().map(f).collect::<Vec<_>>();
    d.set_item("axial_force", col(|m| m.axial_force))?;
    d.set_item("stress", col(|m| m.stress))?;
    d.set_item("length", col(|m| m.length))?;
    d.set_item("critical_buckling_load", col(|m| m.critical_buckling_load))?;
    d.set_item("violations", v.totals().to_vec())?;
    d.set_item("mass", truss::mass(&model))?;
    d.set_item("residual", sol.residual)?;
    Ok(d)
}

/// Constraint totals (stress, buckling, length) the optimizer sees for a
/// design, i.e. judged on the reduced topology where that applies.
#[pyfunction]
fn ten_bar_violations(x: Vec<f64>) -> PyResult<Vec<f64>> {
    let model = truss::TenBarModel {
        layout: TenBarLayout::default(),
    };
    Ok(model.assess(&x).map_err(value_error)?.violations)
}

#[pyfunction]
fn critical_buckling_load(youngs_modulus: f64, area: f64, length: f64) -> f64 {
    truss::critical_buckling_load(youngs_modulus, area, length)
}

/// Field-uniformity objective of a pole profile `[r1, h1, .., rk, hk]`.
#[pyfunction]
fn pole_objective(params: Vec<f64>) -> PyResult<f64> {
    let g = PoleGeometry::default();
    let profile = PoleProfile::new(&params, &g).map_err(value_error)?;
    pole::uniformity_objective(&profile, &g).map_err(value_error)
}

/// Polyline `(r, h)` of a pole profile.
#[pyfunction]
fn pole_profile(params: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    let profile = PoleProfile::new(&params, &PoleGeometry::default()).map_err(value_error)?;
    Ok(profile.polyline())
}

/// Field `(B_r, B_z)` of the pole pair at `(r, z)` in the gap.
#[pyfunction]
fn pole_field(params: Vec<f64>, r: f64, z: f64) -> PyResult<(f64, f64)> {
    let g = PoleGeometry::default();
    let profile = PoleProfile::new(&params, &g).map_err(value_error)?;
    pole::field_at(&profile, &g, r, z).map_err(value_error)
}

#[pymodule]
fn tabu_forge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySearchConfig>()?;
    m.add_class::<PySearchResult>()?;
    m.add_function(wrap_pyfunction!(solve_problem, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(problem_names, m)?)?;
    m.add_function(wrap_pyfunction!(ten_bar_reference, m)?)?;
    m.add_function(wrap_pyfunction!(ten_bar_mass, m)?)?;
    m.add_function(wrap_pyfunction!(ten_bar_solve, m)?)?;
    m.add_function(wrap_pyfunction!(ten_bar_violations, m)?)?;
    m.add_function(wrap_pyfunction!(critical_buckling_load, m)?)?;
    m.add_function(wrap_pyfunction!(pole_objective, m)?)?;
    m.add_function(wrap_pyfunction!(pole_profile, m)?)?;
    m.add_function(wrap_pyfunction!(pole_field, m)?)?;
    Ok(())
}
