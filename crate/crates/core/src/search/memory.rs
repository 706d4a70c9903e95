use std::collections::VecDeque;

use crate::problem::SolutionVector;

/// Short-term memory: the last `tenure` visited solutions, oldest first.
/// Each entry keeps the penalized objective it had when visited so a tabu
/// neighbour never has to be re-evaluated.
#[derive(Debug, Clone, Default)]
pub struct TabuMemory {
    tenure: usize,
    recent: VecDeque<(SolutionVector, f64)>,
}

impl TabuMemory {
    pub fn new(tenure: usize) -> Self {
        Self {
            tenure,
            recent: VecDeque::with_capacity(tenure),
        }
    }

    pub fn tenure(&self) -> usize {
        self.tenure
    }

    pub fn len(&self) -> usize {
        self.recent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recent.is_empty()
    }

    pub fn is_tabu(&self, candidate: &SolutionVector) -> bool {
        self.recent.iter().any(|(v, _)| v == candidate)
    }

    /// Objective recorded for `candidate` if it is currently tabu.
    pub fn objective_of(&self, candidate: &SolutionVector) -> Option<f64> {
        self.recent
            .iter()
            .rev()
            .find(|(v, _)| v == candidate)
            .map(|&(_, f)| f)
    }

    /// Appends a visit, evicting the oldest entry once the tenure is
    /// exceeded. A tenure of zero keeps nothing.
    pub fn record_visit(&mut self, x: SolutionVector, objective: f64) {
        if self.tenure == 0 {
            return;
        }
        if self.recent.len() == self.tenure {
            self.recent.pop_front();
        }
        self.recent.push_back((x, objective));
    }

    pub fn iter(&self) -> impl Iterator<Item = &SolutionVector> {
        self.recent.iter().map(|(v, _)| v)
    }
}

/// Intermediate-term memory: the `capacity` best distinct solutions seen,
/// sorted by objective ascending.
#[derive(Debug, Clone, Default)]
pub struct BestMemory {
    capacity: usize,
    entries: Vec<(SolutionVector, f64)>,
}

impl BestMemory {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: Vec::with_capacity(capacity),
        }
    }

    pub fn entries(&self) -> &[(SolutionVector, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn worst(&self) -> Option<f64> {
        self.entries.last().map(|&(_, f)| f)
    }

    /// Inserts `x` if it is new and either the memory has room or `f`
    /// beats the worst entry. Returns whether the memory changed.
    pub fn update(&mut self, x: &SolutionVector, f: f64) -> bool {
        if self.capacity == 0 || f.is_nan() {
            return false;
        }
        if self.entries.iter().any(|(v, _)| v == x) {
            return false;
        }
        let full = self.entries.len() >= self.capacity;
        if full && self.worst().is_some_and(|w| f >= w) {
            return false;
        }
        let pos = self.entries.partition_point(|&(_, g)| g <= f);
        self.entries.insert(pos, (x.clone(), f));
        self.entries.truncate(self.capacity);
        true
    }
}
