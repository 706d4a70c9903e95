//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use tabu_forge::truss::{Material, TrussModel};

/// A statically determinate truss with its supports and loads.
pub struct Fixture {
    pub name: &'static str,
    pub model: TrussModel,
}

fn build(
    nodes: &[[f64; 2]],
    members: &[(usize, usize, f64)],
    supports: &[(usize, bool, bool)],
    loads: &[(usize, f64, f64)],
) -> TrussModel {
    let mut m = TrussModel::new(Material::ALUMINIUM);
    for p in nodes {
        m.add_node(p[0], p[1]);
    }
    for &(a, b, area) in members {
        m.add_member(a, b, area).unwrap();
    }
    for &(n, x, y) in supports {
        m.fix(n, x, y).unwrap();
    }
    for &(n, fx, fy) in loads {
        m.set_load(n, fx, fy).unwrap();
    }
    m
}

/// Three determinate fixtures with uneven areas (the member forces of a
/// determinate truss do not depend on them).
pub fn determinate_fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "triangle",
            model: build(
                &[[0.0, 0.0], [400.0, 0.0], [150.0, 200.0]],
                &[(0, 1, 5.0), (0, 2, 12.0), (1, 2, 0.7)],
                &[(0, true, true), (1, false, true)],
                &[(2, 3000.0, -10_000.0)],
            ),
        },
        Fixture {
            name: "two-bay warren",
            model: build(
                &[
                    [0.0, 0.0],
                    [300.0, 0.0],
                    [600.0, 0.0],
                    [150.0, 260.0],
                    [450.0, 260.0],
                ],
                &[
                    (0, 1, 10.0),
                    (1, 2, 3.0),
                    (0, 3, 8.0),
                    (1, 3, 2.5),
                    (1, 4, 40.0),
                    (2, 4, 1.0),
                    (3, 4, 6.0),
                ],
                &[(0, true, true), (2, false, true)],
                &[(1, 0.0, -5000.0), (4, 2000.0, -1000.0)],
            ),
        },
        Fixture {
            name: "wall cantilever",
            model: build(
                &[
                    [0.0, 0.0],
                    [0.0, 200.0],
                    [250.0, 30.0],
                    [250.0, 220.0],
                    [520.0, 110.0],
                ],
                &[
                    (0, 2, 20.0),
                    (1, 3, 15.0),
                    (1, 2, 4.0),
                    (2, 3, 9.0),
                    (2, 4, 0.5),
                    (3, 4, 30.0),
                ],
                &[(0, true, true), (1, true, true)],
                &[(4, 0.0, -8000.0), (3, 1000.0, 0.0)],
            ),
        },
    ]
}

/// Member forces (tension positive) by nodal equilibrium alone: one
/// equation per degree of freedom, unknowns are the member forces and the
/// support reactions. Requires `members + reactions == 2 · nodes`.
pub fn method_of_joints(model: &TrussModel) -> Vec<f64> {
    let nodes = model.nodes();
    let n_dof = 2 * nodes.len();
    let n_mem = model.members().len();
    let reactions: Vec<usize> = model
        .supports()
        .iter()
        .enumerate()
        .flat_map(|(i, s)| (0..2).filter(move |&d| s[d]).map(move |d| 2 * i + d))
        .collect();
    let n = n_mem + reactions.len();
    assert_eq!(n, n_dof, "fixture is not statically determinate");

    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for (j, m) in model.members().iter().enumerate() {
        let (pa, pb) = (nodes[m.a], nodes[m.b]);
        let l = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        let (c, s) = ((pb[0] - pa[0]) / l, (pb[1] - pa[1]) / l);
        // a member in tension pulls each end towards the other
        a[2 * m.a][j] += c;
        a[2 * m.a + 1][j] += s;
        a[2 * m.b][j] -= c;
        a[2 * m.b + 1][j] -= s;
    }
    for (k, &dof) in reactions.iter().enumerate() {
        a[dof][n_mem + k] = 1.0;
    }
    for (i, load) in model.loads().iter().enumerate() {
        b[2 * i] = -load[0];
        b[2 * i + 1] = -load[1];
    }

    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        assert!(a[p][col].abs() > 1e-12, "fixture is a mechanism");
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.truncate(n_mem);
    x
}

/// Largest force error relative to the largest force magnitude.
pub fn relative_force_error(got: &[f64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(0.0f64, |m, f| m.max(f.abs()));
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs() / scale)
        .fold(0.0, f64::max)
}

/// Whether every tabu-restricted move in a trajectory avoided the previous
/// `tenure` visits. Returns the offending visit index, if any.
pub fn first_tabu_breach(visits: &[tabu_forge::search::Visit], tenure: usize) -> Option<usize> {
    (1..visits.len()).find(|&i| {
        !visits[i].kind.may_revisit()
            && visits[i.saturating_sub(tenure)..i]
                .iter()
                .any(|v| v.vector == visits[i].vector)
    })
}
