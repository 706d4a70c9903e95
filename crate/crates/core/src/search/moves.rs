//! Neighbourhood generation, move selection and the two restart generators.

use rand::Rng;
use serde::Serialize;

use super::memory::{BestMemory, TabuMemory};
use super::SearchError;
use crate::problem::{Grid, SolutionVector};

/// How a move got past the short-term memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MoveKind {
    /// The chosen candidate was not tabu.
    Free,
    /// Tabu, admitted because it beats the best objective found so far.
    Aspiration,
    /// Every candidate was tabu and none aspirated; the best was taken anyway.
    Escape,
}

/// Converts a per-dimension step in problem units into whole grid units
/// (at least one).
pub fn step_units(grid: &Grid, step: &[f64]) -> Vec<i64> {
    step.iter()
        .zip(grid.min_steps())
        .map(|(s, m)| ((s / m).round() as i64).max(1))
        .collect()
}

/// Axis moves `x ± units_i` in grid-index space, ordered by dimension and
/// then negative direction first. Moves past a bound clamp onto it; moves
/// that end where they started are dropped.
pub(crate) fn neighbor_indices(x: &[i64], units: &[i64], counts: &[i64]) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(2 * x.len());
    for dim in 0..x.len() {
        for dir in [-1, 1] {
            let k = (x[dim] + dir * units[dim]).clamp(0, counts[dim]);
            if k != x[dim] {
                let mut n = x.to_vec();
                n[dim] = k;
                out.push(n);
            }
        }
    }
    out
}

/// Up to `2 * dim` candidates `x ± step_i e_i`, clamped to the grid.
pub fn generate_neighbors(
    grid: &Grid,
    x: &SolutionVector,
    step: &[f64],
) -> Result<Vec<SolutionVector>, SearchError> {
    if x.is_empty() || step.is_empty() {
        return Err(SearchError::ZeroDimension);
    }
    if x.len() != grid.dimension() || step.len() != grid.dimension() {
        return Err(SearchError::WrongLength {
            expected: grid.dimension(),
            got: x.len().min(step.len()),
        });
    }
    let idx = grid.indices(x);
    let units = step_units(grid, step);
    Ok(neighbor_indices(&idx, &units, grid.counts())
        .iter()
        .map(|n| grid.point(n))
        .collect())
}

/// Chooses the lowest-objective admissible candidate. Ties go to the
/// earlier candidate, which for [`generate_neighbors`] output means lowest
/// dimension, then negative direction. Returns `None` only for an empty
/// candidate list.
pub fn select_move(
    candidates: &[(SolutionVector, f64)],
    memory: &TabuMemory,
    best_objective: f64,
    aspiration: bool,
) -> Option<(usize, MoveKind)> {
    let mut admissible: Option<(usize, f64, MoveKind)> = None;
    let mut any: Option<(usize, f64)> = None;
    for (i, (x, f)) in candidates.iter().enumerate() {
        let f = *f;
        if any.is_none_or(|(_, g)| f < g) {
            any = Some((i, f));
        }
        let kind = if !memory.is_tabu(x) {
            MoveKind::Free
        } else if aspiration && f < best_objective {
            MoveKind::Aspiration
        } else {
            continue;
        };
        if admissible.is_none_or(|(_, g, _)| f < g) {
            admissible = Some((i, f, kind));
        }
    }
    match admissible {
        Some((i, _, kind)) => Some((i, kind)),
        None => any.map(|(i, _)| (i, MoveKind::Escape)),
    }
}

/// Componentwise mean of the stored elite solutions, rounded onto the grid.
pub fn intensify(memory: &BestMemory, grid: &Grid) -> Result<SolutionVector, SearchError> {
    let entries = memory.entries();
    if entries.is_empty() {
        return Err(SearchError::EmptyBestMemory);
    }
    let dim = grid.dimension();
    let mut mean = vec![0.0; dim];
    for (x, _) in entries {
        for (m, v) in mean.iter_mut().zip(x.values()) {
            *m += v;
        }
    }
    let n = entries.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(grid.quantize(&mean)?)
}

pub(crate) fn random_indices<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Vec<i64> {
    grid.counts().iter().map(|&c| rng.gen_range(0..=c)).collect()
}

/// Uniformly random grid point.
pub fn diversify<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> SolutionVector {
    grid.point(&random_indices(grid, rng))
}
