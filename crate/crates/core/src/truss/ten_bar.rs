//! The ten-bar cantilever with movable interior nodes.
//!
//! Node numbering (1-based, matching the reference design), with the
//! lower support at the origin and `b` the bay size:
//!
//! ```text
//!   1 --------- 5 --------- 6
//!   | \       / | \       / |
//!       \   /   |   \   /   |
//!         X     |     X     |
//!       /   \   |   /   \   |
//!   | /       \ | /       \ |
//!   4 --------- 2 --------- 3  <- load, downward
//! ```
//!
//! Nodes 1 and 4 are the supports at `(0, b)` and the origin; node 3 is the
//! loaded tip at `(2b, 0)`. Members A1..A10 are, in order, 1-5, 5-6, 4-2,
//! 2-3, 6-3, 5-2, 4-5, 1-2, 2-6 and 5-3.
//!
//! Nodes 1, 3 and 4 are fixed in space; nodes 2, 5 and 6 are design
//! variables with nominal positions `(b, 0)`, `(b, b)` and `(2b, b)`.

use serde::Serialize;

use super::{
    check_constraints, mass, solve, thin_members, Material, TrussError, TrussLimits, TrussModel,
    MIN_AREA,
};
use crate::problem::{
    Assessment, DesignModel, Grid, ModelError, PenaltyConfig, ProblemDefinition, ProblemError,
};

/// Member connectivity, 1-based node numbers, in member order A1..A10.
pub const TEN_BAR_MEMBERS: [(usize, usize); 10] = [
    (1, 5),
    (5, 6),
    (4, 2),
    (2, 3),
    (6, 3),
    (5, 2),
    (4, 5),
    (1, 2),
    (2, 6),
    (5, 3),
];

/// Design vector layout: `[x2, y2, x5, y5, x6, y6, A1, .., A10]`.
pub const COORD_VARS: usize = 6;
pub const AREA_VARS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TenBarDesign {
    /// Member areas A1..A10, cm².
    pub areas: [f64; 10],
    /// Positions of nodes 2, 5 and 6 relative to the lower support, cm.
    pub coords: [[f64; 2]; 3],
}

impl TenBarDesign {
    /// The reference design: 1598 kg, members 4 and 7 at minimum area.
    pub fn reference() -> Self {
        Self {
            areas: [
                60.39, 16.6, 183.17, 0.01, 239.9, 3.04, 0.01, 1.42, 310.26, 47.9,
            ],
            coords: [[445.0, -61.0], [807.0, 408.0], [1197.0, -112.0]],
        }
    }

    /// Free nodes on the undeformed grid with uniform areas.
    pub fn nominal(layout: &TenBarLayout, area: f64) -> Self {
        let b = layout.bay;
        Self {
            areas: [area; 10],
            coords: [[b, 0.0], [b, b], [2.0 * b, b]],
        }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        self.coords
            .iter()
            .flatten()
            .chain(self.areas.iter())
            .copied()
            .collect()
    }

    pub fn from_vector(x: &[f64]) -> Option<Self> {
        if x.len() != COORD_VARS + AREA_VARS {
            return None;
        }
        let mut areas = [0.0; 10];
        areas.copy_from_slice(&x[COORD_VARS..]);
        Some(Self {
            areas,
            coords: [[x[0], x[1]], [x[2], x[3]], [x[4], x[5]]],
        })
    }
}

/// Everything about the benchmark that is not a design variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TenBarLayout {
    /// Bay width and height, cm.
    pub bay: f64,
    /// Downward load at node 3, N.
    pub load: f64,
    pub material: Material,
    pub limits: TrussLimits,
    /// Largest member area, cm².
    pub area_max: f64,
    /// Half-extent of the free-node box around the bay grid, in bays.
    pub box_margin: f64,
    /// Penalty weights for stress (per N/cm²), buckling (per N) and length
    /// (per cm) violations.
    pub weights: [f64; 3],
    /// Check constraints on the structure left after dropping members at
    /// the minimum area (when that is not a mechanism) rather than on all
    /// ten members.
    pub check_reduced: bool,
}

impl Default for TenBarLayout {
    fn default() -> Self {
        Self {
            bay: 910.0,
            load: 444_822.0,
            material: Material::ALUMINIUM,
            limits: TrussLimits::default(),
            area_max: 500.0,
            box_margin: 0.5,
            weights: [1e-1, 1e-2, 1.0],
            check_reduced: true,
        }
    }
}

impl TenBarLayout {
    fn fixed_nodes(&self) -> [(usize, [f64; 2]); 3] {
        [(1, [0.0, self.bay]), (3, [2.0 * self.bay, 0.0]), (4, [0.0, 0.0])]
    }

    /// Bounds for the coordinate variables: x in `[0, 2b]`, y in
    /// `[-m·b, (1+m)·b]` with `m = box_margin`, rounded outwards to whole cm.
    pub fn coord_bounds(&self) -> ([f64; 2], [f64; 2]) {
        let b = self.bay;
        let m = self.box_margin;
        (
            [0.0, (2.0 * b).ceil()],
            [(-m * b).floor(), ((1.0 + m) * b).ceil()],
        )
    }
}

pub fn build_ten_bar(design: &TenBarDesign, layout: &TenBarLayout) -> Result<TrussModel, TrussError> {
    let mut positions = [[0.0; 2]; 6];
    for (n, p) in layout.fixed_nodes() {
        positions[n - 1] = p;
    }
    for (n, p) in [2, 5, 6].into_iter().zip(design.coords) {
        positions[n - 1] = p;
    }
    for i in 0..6 {
        for j in i + 1..6 {
            let (p, q) = (positions[i], positions[j]);
            if (p[0] - q[0]).hypot(p[1] - q[1]) < 1e-9 {
                return Err(TrussError::DegenerateGeometry(i + 1, j + 1));
            }
        }
    }
    let mut model = TrussModel::new(layout.material);
    for p in positions {
        model.add_node(p[0], p[1]);
    }
    for ((a, b), &area) in TEN_BAR_MEMBERS.iter().zip(&design.areas) {
        model.add_member(a - 1, b - 1, area)?;
    }
    model.fix(0, true, true)?;
    model.fix(3, true, true)?;
    model.set_load(2, 0.0, -layout.load)?;
    Ok(model)
}

/// Mass objective with stress, buckling and length violation totals.
#[derive(Debug, Clone)]
pub struct TenBarModel {
    pub layout: TenBarLayout,
}

impl DesignModel for TenBarModel {
    fn constraint_names(&self) -> Vec<String> {
        vec!["stress".into(), "buckling".into(), "length".into()]
    }

    fn assess(&self, x: &[f64]) -> Result<Assessment, ModelError> {
        let design = TenBarDesign::from_vector(x)
            .ok_or_else(|| ModelError(format!("expected 16 variables, got {}", x.len())))?;
        let model = build_ten_bar(&design, &self.layout).map_err(|e| ModelError(e.to_string()))?;
        let reduced = if self.layout.check_reduced {
            let thin = thin_members(&model, MIN_AREA);
            (!thin.is_empty())
                .then(|| solve(&model.without_members(&thin)).ok())
                .flatten()
        } else {
            None
        };
        let solution = match reduced {
            Some(s) => s,
            None => solve(&model).map_err(|e| ModelError(e.to_string()))?,
        };
        let violations = check_constraints(&solution.members, &self.layout.limits);
        Ok(Assessment {
            raw_objective: mass(&model),
            violations: violations.totals().to_vec(),
        })
    }
}

/// The 16-variable benchmark: node positions on a 1 cm grid, areas on a
/// 0.01 cm² grid.
pub fn make_ten_bar_problem(layout: TenBarLayout) -> Result<ProblemDefinition, ProblemError> {
    let (xb, yb) = layout.coord_bounds();
    let mut lower = Vec::with_capacity(16);
    let mut upper = Vec::with_capacity(16);
    let mut steps = Vec::with_capacity(16);
    for _ in 0..3 {
        lower.extend([xb[0], yb[0]]);
        upper.extend([xb[1], yb[1]]);
        steps.extend([1.0, 1.0]);
    }
    for _ in 0..AREA_VARS {
        lower.push(super::MIN_AREA);
        upper.push(layout.area_max);
        steps.push(0.01);
    }
    let grid = Grid::new(lower, upper, steps)?;
    let penalty = PenaltyConfig::quadratic(layout.weights.to_vec())?;
    ProblemDefinition::new("tenbar", grid, TenBarModel { layout }, penalty)
}
