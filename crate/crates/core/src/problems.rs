//! Named benchmark problems.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::pole::{make_pole_problem_with, PoleError, PoleGeometry};
use crate::problem::{FnModel, Grid, PenaltyConfig, ProblemDefinition, ProblemError};
use crate::truss::{make_ten_bar_problem, TenBarLayout};

pub const PROBLEM_NAMES: [&str; 6] = ["twobasin", "tenbar", "pole1", "pole2", "pole3", "pole4"];

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown problem '{0}' (expected one of: {list})", list = PROBLEM_NAMES.join(", "))]
    Unknown(String),
    #[error("problem '{problem}' has no option '{key}'")]
    UnknownOption { problem: String, key: String },
    #[error("option '{key}': cannot use '{value}'")]
    BadOption { key: String, value: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Pole(#[from] PoleError),
}

/// Global minimum of the two-basin fixture.
pub const TWO_BASIN_GLOBAL: [f64; 2] = [2.0, 2.0];
/// Centre of the narrow local well (its grid minimum is at (-2.95, -2.95)).
pub const TWO_BASIN_LOCAL: [f64; 2] = [-3.0, -3.0];

/// Two Gaussian wells on `[-5, 5]²`: a wide global well of depth 3 at
/// (2, 2) and a narrow local well of depth 1.5 at (-3, -3).
pub fn two_basin(x: &[f64]) -> f64 {
    let well = |c: [f64; 2], depth: f64, width2: f64| {
        let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
        -depth * (-d2 / width2).exp()
    };
    well(TWO_BASIN_GLOBAL, 3.0, 18.0) + well(TWO_BASIN_LOCAL, 1.5, 2.0)
}

/// The escape fixture: unconstrained, 0.05 grid, started at (-4, -4) on the
/// far side of the local well.
pub fn make_two_basin_problem() -> Result<ProblemDefinition, ProblemError> {
    let grid = Grid::new(vec![-5.0; 2], vec![5.0; 2], vec![0.05; 2])?;
    ProblemDefinition::new(
        "twobasin",
        grid,
        FnModel::new(two_basin),
        PenaltyConfig::quadratic(vec![])?,
    )?
    .with_start(&[-4.0, -4.0])
}

/// Whether `x` lies in the global basin of the two-basin fixture.
pub fn in_global_basin(x: &[f64]) -> bool {
    (x[0] - TWO_BASIN_GLOBAL[0]).hypot(x[1] - TWO_BASIN_GLOBAL[1]) < 1.0
}

pub fn problem_by_name(name: &str) -> Result<ProblemDefinition, RegistryError> {
    build_problem(name, &BTreeMap::new())
}

/// Builds a registered problem with overrides of its fixed data.
///
/// `tenbar` accepts `bay`, `load`, `max_stress`, `max_length`, `area_max`,
/// `box_margin`, `check_reduced`, `w_stress`, `w_buckling` and `w_length`;
/// the pole problems accept `n_ring`; `twobasin` takes none.
pub fn build_problem(
    name: &str,
    options: &BTreeMap<String, String>,
) -> Result<ProblemDefinition, RegistryError> {
    let unknown = |key: &str| RegistryError::UnknownOption {
        problem: name.to_string(),
        key: key.to_string(),
    };
    let parse = |key: &str, value: &str| -> Result<f64, RegistryError> {
        value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| RegistryError::BadOption {
                key: key.to_string(),
                value: value.to_string(),
            })
    };
    match name {
        "twobasin" => {
            if let Some(key) = options.keys().next() {
                return Err(unknown(key));
            }
            Ok(make_two_basin_problem()?)
        }
        "tenbar" => {
            let mut layout = TenBarLayout::default();
            for (key, value) in options {
                match key.as_str() {
                    "check_reduced" => {
                        layout.check_reduced =
                            value.parse().map_err(|_| RegistryError::BadOption {
                                key: key.clone(),
                                value: value.clone(),
                            })?
                    }
                    k => {
                        let v = parse(k, value)?;
                        match k {
                            "bay" => layout.bay = v,
                            "load" => layout.load = v,
                            "max_stress" => layout.limits.max_stress = v,
                            "max_length" => layout.limits.max_length = v,
                            "area_max" => layout.area_max = v,
                            "box_margin" => layout.box_margin = v,
                            "w_stress" => layout.weights[0] = v,
                            "w_buckling" => layout.weights[1] = v,
                            "w_length" => layout.weights[2] = v,
                            _ => return Err(unknown(k)),
                        }
                    }
                }
            }
            Ok(make_ten_bar_problem(layout)?)
        }
        "pole1" | "pole2" | "pole3" | "pole4" => {
            let k = (name.as_bytes()[4] - b'0') as usize;
            let mut geometry = PoleGeometry::default();
            for (key, value) in options {
                match key.as_str() {
                    "n_ring" => {
                        geometry.n_ring = value.parse().map_err(|_| RegistryError::BadOption {
                            key: key.clone(),
                            value: value.clone(),
                        })?
                    }
                    k => return Err(unknown(k)),
                }
            }
            Ok(make_pole_problem_with(k, geometry)?)
        }
        other => Err(RegistryError::Unknown(other.to_string())),
    }
}
