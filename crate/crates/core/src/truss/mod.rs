//! Linear-elastic analysis of planar pin-jointed trusses by the direct
//! stiffness method, the stress / Euler buckling / length constraint set,
//! and minimum-area member removal.

mod io;
mod ten_bar;

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

pub use io::{parse_truss, write_truss};
pub use ten_bar::{
    build_ten_bar, make_ten_bar_problem, TenBarDesign, TenBarLayout, TenBarModel,
    TEN_BAR_MEMBERS,
};

/// Smallest admissible member area, cm².
pub const MIN_AREA: f64 = 0.01;

/// A pivot below this fraction of the largest stiffness diagonal marks the
/// structure as a mechanism.
const PIVOT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrussError {
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("member joins node {0} to itself")]
    SelfLoop(usize),
    #[error("member area {0} cm² is below the {MIN_AREA} cm² minimum")]
    AreaTooSmall(f64),
    #[error("nodes {0} and {1} coincide")]
    DegenerateGeometry(usize, usize),
    #[error("only {0} degrees of freedom are restrained, at least 3 are needed")]
    Underconstrained(usize),
    #[error("the structure acts as a mechanism (stiffness pivot {pivot:e} at dof {dof})")]
    Mechanism { dof: usize, pivot: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Material {
    /// N/cm²
    pub youngs_modulus: f64,
    /// kg/cm³
    pub density: f64,
}

impl Material {
    pub const ALUMINIUM: Material = Material {
        youngs_modulus: 6.88e6,
        density: 2.7e-3,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Member {
    pub a: usize,
    pub b: usize,
    /// cm²
    pub area: f64,
}

/// Pin-jointed planar truss. Lengths in cm, forces in N.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrussModel {
    nodes: Vec<[f64; 2]>,
    members: Vec<Member>,
    supports: Vec<[bool; 2]>,
    loads: Vec<[f64; 2]>,
    material: Material,
}

impl TrussModel {
    pub fn new(material: Material) -> Self {
        Self {
            nodes: Vec::new(),
            members: Vec::new(),
            supports: Vec::new(),
            loads: Vec::new(),
            material,
        }
    }

    pub fn add_node(&mut self, x: f64, y: f64) -> usize {
        self.nodes.push([x, y]);
        self.supports.push([false; 2]);
        self.loads.push([0.0; 2]);
        self.nodes.len() - 1
    }

    pub fn add_member(&mut self, a: usize, b: usize, area: f64) -> Result<usize, TrussError> {
        for n in [a, b] {
            if n >= self.nodes.len() {
                return Err(TrussError::UnknownNode(n));
            }
        }
        if a == b {
            return Err(TrussError::SelfLoop(a));
        }
        if !(area >= MIN_AREA * (1.0 - 1e-9)) {
            return Err(TrussError::AreaTooSmall(area));
        }
        self.members.push(Member { a, b, area });
        Ok(self.members.len() - 1)
    }

    pub fn fix(&mut self, node: usize, fix_x: bool, fix_y: bool) -> Result<(), TrussError> {
        let s = self.supports.get_mut(node).ok_or(TrussError::UnknownNode(node))?;
        *s = [fix_x, fix_y];
        Ok(())
    }

    pub fn set_load(&mut self, node: usize, fx: f64, fy: f64) -> Result<(), TrussError> {
        let l = self.loads.get_mut(node).ok_or(TrussError::UnknownNode(node))?;
        *l = [fx, fy];
        Ok(())
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn supports(&self) -> &[[bool; 2]] {
        &self.supports
    }

    pub fn loads(&self) -> &[[f64; 2]] {
        &self.loads
    }

    pub fn material(&self) -> Material {
        self.material
    }

    pub fn member_length(&self, m: usize) -> f64 {
        let Member { a, b, .. } = self.members[m];
        let [xa, ya] = self.nodes[a];
        let [xb, yb] = self.nodes[b];
        (xb - xa).hypot(yb - ya)
    }

    /// Copy with every node and load moved by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let mut t = self.clone();
        for p in &mut t.nodes {
            p[0] += dx;
            p[1] += dy;
        }
        t
    }

    /// Copy with every member area multiplied by `c`.
    pub fn scaled_areas(&self, c: f64) -> Self {
        let mut t = self.clone();
        for m in &mut t.members {
            m.area *= c;
        }
        t
    }

    fn restrained_dofs(&self) -> usize {
        self.supports
            .iter()
            .map(|s| s.iter().filter(|&&f| f).count())
            .sum()
    }

    /// Copy without the listed members; nodes left with no member, load or
    /// support are dropped and the rest renumbered.
    pub fn without_members(&self, drop: &[usize]) -> Self {
        let members: Vec<Member> = self
            .members
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, m)| *m)
            .collect();
        let keep: Vec<bool> = (0..self.nodes.len())
            .map(|n| {
                members.iter().any(|m| m.a == n || m.b == n)
                    || self.loads[n] != [0.0; 2]
                    || self.supports[n] != [false; 2]
            })
            .collect();
        let mut renumber = vec![usize::MAX; self.nodes.len()];
        let mut out = Self::new(self.material);
        for n in (0..self.nodes.len()).filter(|&n| keep[n]) {
            let i = out.add_node(self.nodes[n][0], self.nodes[n][1]);
            out.supports[i] = self.supports[n];
            out.loads[i] = self.loads[n];
            renumber[n] = i;
        }
        out.members = members
            .into_iter()
            .map(|m| Member {
                a: renumber[m.a],
                b: renumber[m.b],
                area: m.area,
            })
            .collect();
        out
    }
}

/// Per-member analysis result. Tension is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemberState {
    pub length: f64,
    pub axial_force: f64,
    pub stress: f64,
    pub critical_buckling_load: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrussSolution {
    pub displacements: Vec<[f64; 2]>,
    pub members: Vec<MemberState>,
    /// `‖K·u − F‖` over the unrestrained degrees of freedom.
    pub residual: f64,
    /// `‖F‖` over the unrestrained degrees of freedom.
    pub load_norm: f64,
}

/// Euler load of a pinned strut with a solid circular section of area
/// `area`: `π² E I / L²` with `I = A² / 4π`.
pub fn critical_buckling_load(youngs_modulus: f64, area: f64, length: f64) -> f64 {
    let second_moment = area * area / (4.0 * PI);
    PI * PI * youngs_modulus * second_moment / (length * length)
}

/// Direct-stiffness solve for nodal displacements and member forces.
pub fn solve(model: &TrussModel) -> Result<TrussSolution, TrussError> {
    let restrained = model.restrained_dofs();
    if restrained < 3 {
        return Err(TrussError::Underconstrained(restrained));
    }
    let n_nodes = model.nodes.len();
    for (i, m) in model.members.iter().enumerate() {
        if !(model.member_length(i) > 1e-9) {
            return Err(TrussError::DegenerateGeometry(m.a, m.b));
        }
    }

    // global dof -> position in the reduced system
    let mut free_index = vec![usize::MAX; 2 * n_nodes];
    let mut n_free = 0;
    for (node, s) in model.supports.iter().enumerate() {
        for d in 0..2 {
            if !s[d] {
                free_index[2 * node + d] = n_free;
                n_free += 1;
            }
        }
    }

    let e = model.material.youngs_modulus;
    let mut k = vec![0.0; n_free * n_free];
    let geometry: Vec<(f64, f64, f64)> = (0..model.members.len())
        .map(|m| {
            let Member { a, b, .. } = model.members[m];
            let l = model.member_length(m);
            let c = (model.nodes[b][0] - model.nodes[a][0]) / l;
            let s = (model.nodes[b][1] - model.nodes[a][1]) / l;
            (l, c, s)
        })
        .collect();
    for (m, &(l, c, s)) in model.members.iter().zip(&geometry) {
        let stiffness = e * m.area / l;
        let dofs = [2 * m.a, 2 * m.a + 1, 2 * m.b, 2 * m.b + 1];
        let dir = [-c, -s, c, s];
        for i in 0..4 {
            let fi = free_index[dofs[i]];
            if fi == usize::MAX {
                continue;
            }
            for j in 0..4 {
                let fj = free_index[dofs[j]];
                if fj != usize::MAX {
                    k[fi * n_free + fj] += stiffness * dir[i] * dir[j];
                }
            }
        }
    }
    let mut f = vec![0.0; n_free];
    for (node, load) in model.loads.iter().enumerate() {
        for d in 0..2 {
            let fi = free_index[2 * node + d];
            if fi != usize::MAX {
                f[fi] = load[d];
            }
        }
    }

    let u_free = solve_dense(k.clone(), f.clone(), n_free)?;

    let residual = (0..n_free)
        .map(|i| {
            let ku: f64 = (0..n_free).map(|j| k[i * n_free + j] * u_free[j]).sum();
            (ku - f[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    let load_norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut displacements = vec![[0.0; 2]; n_nodes];
    for node in 0..n_nodes {
        for d in 0..2 {
            let fi = free_index[2 * node + d];
            if fi != usize::MAX {
                displacements[node][d] = u_free[fi];
            }
        }
    }
    let members = model
        .members
        .iter()
        .zip(&geometry)
        .map(|(m, &(l, c, s))| {
            let [ua, va] = displacements[m.a];
            let [ub, vb] = displacements[m.b];
            let elongation = c * (ub - ua) + s * (vb - va);
            let axial_force = e * m.area / l * elongation;
            MemberState {
                length: l,
                axial_force,
                stress: axial_force / m.area,
                critical_buckling_load: critical_buckling_load(e, m.area, l),
            }
        })
        .collect();
    Ok(TrussSolution {
        displacements,
        members,
        residual,
        load_norm,
    })
}

/// Gaussian elimination with partial pivoting on a row-major `n × n`
/// system.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>, TrussError> {
    let max_diag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    let tol = PIVOT_TOLERANCE * max_diag;
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[r * n + col]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("non-empty pivot range");
        if !(pivot.abs() > tol) {
            return Err(TrussError::Mechanism { dof: col, pivot });
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= factor * a[col * n + j];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|j| a[row * n + j] * x[j]).sum();
        x[row] = (b[row] - tail) / a[row * n + row];
    }
    Ok(x)
}

pub fn mass(model: &TrussModel) -> f64 {
    (0..model.members.len())
        .map(|m| model.material.density * model.members[m].area * model.member_length(m))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrussLimits {
    /// Allowable |stress|, N/cm².
    pub max_stress: f64,
    /// Longest allowed member, cm.
    pub max_length: f64,
}

impl Default for TrussLimits {
    fn default() -> Self {
        Self {
            max_stress: 17_200.0,
            max_length: 1_500.0,
        }
    }
}

/// Per-member violations of the three constraint families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violations {
    /// `max(0, |σ| − σ_max)`, N/cm².
    pub stress: Vec<f64>,
    /// `max(0, |N| − P_cr)` for compressed members, N.
    pub buckling: Vec<f64>,
    /// `max(0, L − L_max)`, cm.
    pub length: Vec<f64>,
}

impl Violations {
    /// Family sums in the order stress, buckling, length.
    pub fn totals(&self) -> [f64; 3] {
        [
            self.stress.iter().sum(),
            self.buckling.iter().sum(),
            self.length.iter().sum(),
        ]
    }

    pub fn is_feasible(&self) -> bool {
        self.totals().iter().all(|&t| t == 0.0)
    }
}

pub fn check_constraints(states: &[MemberState], limits: &TrussLimits) -> Violations {
    Violations {
        stress: states
            .iter()
            .map(|s| (s.stress.abs() - limits.max_stress).max(0.0))
            .collect(),
        buckling: states
            .iter()
            .map(|s| {
                if s.axial_force < 0.0 {
                    (-s.axial_force - s.critical_buckling_load).max(0.0)
                } else {
                    0.0
                }
            })
            .collect(),
        length: states
            .iter()
            .map(|s| (s.length - limits.max_length).max(0.0))
            .collect(),
    }
}

/// Members whose area is at or below `threshold`.
pub fn thin_members(model: &TrussModel, threshold: f64) -> Vec<usize> {
    model
        .members
        .iter()
        .enumerate()
        .filter(|(_, m)| m.area <= threshold * (1.0 + 1e-9))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReductionStatus {
    Reduced,
    NothingToRemove,
    /// Removal made the structure a mechanism; original kept.
    Mechanism(TrussError),
    /// Reduced structure violates constraints (family totals); original kept.
    Violations([f64; 3]),
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub model: TrussModel,
    /// Indices (0-based) of members removed; empty unless `Reduced`.
    pub removed: Vec<usize>,
    pub status: ReductionStatus,
}

/// Removes every member with area at most `threshold` and keeps the
/// result only if it still solves and meets every constraint.
pub fn reduce_topology(model: &TrussModel, limits: &TrussLimits, threshold: f64) -> Reduction {
    let candidates = thin_members(model, threshold);
    let keep_original = |status| Reduction {
        model: model.clone(),
        removed: Vec::new(),
        status,
    };
    if candidates.is_empty() {
        return keep_original(ReductionStatus::NothingToRemove);
    }
    let reduced = model.without_members(&candidates);
    match solve(&reduced) {
        Err(e) => keep_original(ReductionStatus::Mechanism(e)),
        Ok(sol) => {
            let v = check_constraints(&sol.members, limits);
            if v.is_feasible() {
                Reduction {
                    model: reduced,
                    removed: candidates,
                    status: ReductionStatus::Reduced,
                }
            } else {
                keep_original(ReductionStatus::Violations(v.totals()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bar(area: f64, force: f64) -> TrussModel {
        let mut t = TrussModel::new(Material::ALUMINIUM);
        let a = t.add_node(0.0, 0.0);
        let b = t.add_node(100.0, 0.0);
        t.add_member(a, b, area).unwrap();
        t.fix(a, true, true).unwrap();
        t.fix(b, false, true).unwrap();
        t.set_load(b, force, 0.0).unwrap();
        t
    }

    #[test]
    fn single_bar_in_tension() {
        let sol = solve(&bar(2.0, 1000.0)).unwrap();
        let m = sol.members[0];
        assert!((m.axial_force - 1000.0).abs() < 1e-9);
        assert!((m.stress - 500.0).abs() < 1e-9);
        assert!(sol.residual <= 1e-8 * sol.load_norm);
    }

    #[test]
    fn mass_of_one_member() {
        let t = bar(1.0, 0.0);
        assert!((mass(&t) - 0.27).abs() < 1e-12);
        assert_eq!(mass(&TrussModel::new(Material::ALUMINIUM)), 0.0);
    }

    #[test]
    fn buckling_formula() {
        // A = π cm² is a 2 cm diameter rod: I = π/4 cm⁴.
        let p = critical_buckling_load(6.88e6, PI, 100.0);
        let expected = PI * PI * 6.88e6 * (PI / 4.0) / 100.0f64.powi(2);
        assert!(((p - expected) / expected).abs() < 1e-12);
        assert!((p - 5333.0).abs() < 1.0, "{p}");
    }

    #[test]
    fn stress_limit_is_inclusive() {
        let s = MemberState {
            length: 10.0,
            axial_force: 17_200.0,
            stress: 17_200.0,
            critical_buckling_load: 1.0,
        };
        let v = check_constraints(&[s], &TrussLimits::default());
        assert_eq!(v.stress, vec![0.0]);
        // tension never buckles
        assert_eq!(v.buckling, vec![0.0]);
    }

    #[test]
    fn compression_beyond_euler_load() {
        let s = MemberState {
            length: 10.0,
            axial_force: -150.0,
            stress: -1.0,
            critical_buckling_load: 100.0,
        };
        let v = check_constraints(&[s], &TrussLimits::default());
        assert_eq!(v.buckling, vec![50.0]);
        assert_eq!(v.totals(), [0.0, 50.0, 0.0]);
    }

    #[test]
    fn long_member_violates_length() {
        let s = MemberState {
            length: 1600.0,
            axial_force: 0.0,
            stress: 0.0,
            critical_buckling_load: 1.0,
        };
        let v = check_constraints(&[s], &TrussLimits::default());
        assert_eq!(v.length, vec![100.0]);
    }

    #[test]
    fn mechanism_is_reported() {
        // a node hanging off a single bar can swing freely
        let mut t = bar(1.0, 0.0);
        let c = t.add_node(100.0, 100.0);
        t.add_member(1, c, 1.0).unwrap();
        t.set_load(c, 10.0, 0.0).unwrap();
        assert!(matches!(solve(&t), Err(TrussError::Mechanism { .. })));
    }

    #[test]
    fn underconstrained_is_reported() {
        let mut t = TrussModel::new(Material::ALUMINIUM);
        let a = t.add_node(0.0, 0.0);
        let b = t.add_node(1.0, 0.0);
        t.add_member(a, b, 1.0).unwrap();
        t.fix(a, true, true).unwrap();
        assert_eq!(solve(&t), Err(TrussError::Underconstrained(2)));
    }

    #[test]
    fn invalid_members_rejected() {
        let mut t = TrussModel::new(Material::ALUMINIUM);
        let a = t.add_node(0.0, 0.0);
        assert_eq!(t.add_member(a, a, 1.0), Err(TrussError::SelfLoop(a)));
        assert_eq!(t.add_member(a, 4, 1.0), Err(TrussError::UnknownNode(4)));
        let b = t.add_node(1.0, 0.0);
        assert!(matches!(t.add_member(a, b, 0.001), Err(TrussError::AreaTooSmall(_))));
    }

    #[test]
    fn reduction_without_small_members_is_a_no_op() {
        let t = bar(2.0, 10.0);
        let r = reduce_topology(&t, &TrussLimits::default(), MIN_AREA);
        assert_eq!(r.status, ReductionStatus::NothingToRemove);
        assert_eq!(r.model, t);
    }

    #[test]
    fn reduction_into_mechanism_keeps_original() {
        // two-bar frame where one bar is at minimum area: removing it leaves
        // the loaded node on a single bar
        let mut t = TrussModel::new(Material::ALUMINIUM);
        let a = t.add_node(-100.0, 100.0);
        let b = t.add_node(100.0, 100.0);
        let c = t.add_node(0.0, 0.0);
        t.add_member(a, c, 5.0).unwrap();
        t.add_member(b, c, MIN_AREA).unwrap();
        t.fix(a, true, true).unwrap();
        t.fix(b, true, true).unwrap();
        t.set_load(c, 0.0, -10.0).unwrap();
        let r = reduce_topology(&t, &TrussLimits::default(), MIN_AREA);
        assert!(matches!(r.status, ReductionStatus::Mechanism(_)));
        assert_eq!(r.model, t);
        assert!(r.removed.is_empty());
    }
}
