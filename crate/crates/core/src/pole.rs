//! Shaped magnet poles tuned for a uniform gap field.
//!
//! Two mirror-image poles face each other across a gap of `2g`. Each face is
//! an axisymmetric ramp-and-plateau profile: height 0 out to the first break
//! radius, then a linear ramp of width `w` up (or down) to the next plateau
//! height, and so on. A positive height moves the face into the gap.
//!
//! The field model treats each face as a sheet of uniform magnetic surface
//! charge (uniform axial magnetization, so the charge per ring is `σ` times
//! its projected area). The face is cut into `n_ring` concentric rings and the
//! closed-form field of a charged ring is summed; the lower pole carries `+σ`
//! and the upper `-σ`, giving a positive axial field in the gap.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::problem::{
    Assessment, DesignModel, Grid, ModelError, PenaltyConfig, ProblemDefinition, ProblemError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoleError {
    #[error("ramp scheme must be 1..=4, got {0}")]
    InvalidScheme(usize),
    #[error("scheme {scheme} needs {expected} parameters, got {got}")]
    ParamCount {
        scheme: usize,
        expected: usize,
        got: usize,
    },
    #[error("break radii must satisfy 0 < r_1 < ... < r_k < R (break {0})")]
    BadBreak(usize),
    #[error("plateau height {0} exceeds the limit")]
    HeightOutOfRange(f64),
    #[error("radius {0} lies outside the pole face")]
    OutsideFace(f64),
    #[error("point (r={r}, z={z}) is not inside the gap")]
    OutsideGap { r: f64, z: f64 },
    #[error("the face needs at least one ring")]
    NoRings,
    #[error("mean axial field is zero")]
    ZeroMeanField,
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Fixed geometry and discretization of the benchmark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleGeometry {
    pub pole_radius: f64,
    /// Half the distance between the two flat faces.
    pub gap_half_width: f64,
    pub max_height: f64,
    pub ramp_width: f64,
    pub n_ring: usize,
    pub surface_charge: f64,
    /// Region of interest: `r <= roi_radius`, `|z| <= roi_half_height`.
    pub roi_radius: f64,
    pub roi_half_height: f64,
    /// Sample counts along r and z (inclusive of both ends).
    pub samples: [usize; 2],
}

impl Default for PoleGeometry {
    fn default() -> Self {
        Self {
            pole_radius: 16.0,
            gap_half_width: 10.0,
            max_height: 6.0,
            ramp_width: 0.05 * 16.0,
            n_ring: 200,
            surface_charge: 1.0,
            roi_radius: 6.0,
            roi_half_height: 4.0,
            samples: [9, 9],
        }
    }
}

impl PoleGeometry {
    /// The `(r, z)` sample lattice over the region of interest, row by row
    /// in r.
    pub fn sample_points(&self) -> Vec<[f64; 2]> {
        let [nr, nz] = self.samples;
        let along = |n: usize, i: usize, lo: f64, hi: f64| {
            if n < 2 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut pts = Vec::with_capacity(nr * nz);
        for i in 0..nr {
            for j in 0..nz {
                pts.push([
                    along(nr, i, 0.0, self.roi_radius),
                    along(nz, j, -self.roi_half_height, self.roi_half_height),
                ]);
            }
        }
        pts
    }
}

/// A ramp-and-plateau pole face.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleProfile {
    /// `(r_j, h_j)` per ramp, sorted by radius.
    breaks: Vec<(f64, f64)>,
    pole_radius: f64,
    ramp_width: f64,
}

impl PoleProfile {
    /// Builds a profile from `[r_1, h_1, .., r_k, h_k]`.
    pub fn new(params: &[f64], geometry: &PoleGeometry) -> Result<Self, PoleError> {
        let scheme = params.len() / 2;
        check_scheme(scheme)?;
        if params.len() != 2 * scheme {
            return Err(PoleError::ParamCount {
                scheme,
                expected: 2 * scheme,
                got: params.len(),
            });
        }
        let breaks: Vec<(f64, f64)> = params.chunks(2).map(|p| (p[0], p[1])).collect();
        let mut last = 0.0;
        for (j, &(r, h)) in breaks.iter().enumerate() {
            if !(r > last && r < geometry.pole_radius) {
                return Err(PoleError::BadBreak(j + 1));
            }
            if !(h.abs() <= geometry.max_height) {
                return Err(PoleError::HeightOutOfRange(h));
            }
            last = r;
        }
        Ok(Self {
            breaks,
            pole_radius: geometry.pole_radius,
            ramp_width: geometry.ramp_width,
        })
    }

    /// A profile from possibly out-of-order pairs: they are sorted by radius
    /// and coincident breaks become vertical steps. Used by the optimizer,
    /// which reports the ordering violation separately.
    fn sorted(params: &[f64], geometry: &PoleGeometry) -> Self {
        let mut breaks: Vec<(f64, f64)> = params.chunks(2).map(|p| (p[0], p[1])).collect();
        breaks.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            breaks,
            pole_radius: geometry.pole_radius,
            ramp_width: geometry.ramp_width,
        }
    }

    /// A flat face.
    pub fn flat(geometry: &PoleGeometry) -> Self {
        Self {
            breaks: vec![(geometry.pole_radius / 2.0, 0.0)],
            pole_radius: geometry.pole_radius,
            ramp_width: geometry.ramp_width,
        }
    }

    pub fn scheme(&self) -> usize {
        self.breaks.len()
    }

    pub fn breaks(&self) -> &[(f64, f64)] {
        &self.breaks
    }

    pub fn params(&self) -> Vec<f64> {
        self.breaks.iter().flat_map(|&(r, h)| [r, h]).collect()
    }

    fn ramp_end(&self, j: usize) -> f64 {
        let r = self.breaks[j].0;
        let next = self
            .breaks
            .get(j + 1)
            .map_or(self.pole_radius, |b| b.0);
        r + self.ramp_width.min(next - r).max(0.0)
    }

    /// Face height at radius `r`.
    pub fn height_at(&self, r: f64) -> Result<f64, PoleError> {
        if !(0.0..=self.pole_radius).contains(&r) {
            return Err(PoleError::OutsideFace(r));
        }
        let mut h = 0.0;
        for (j, &(rj, hj)) in self.breaks.iter().enumerate() {
            if r < rj {
                break;
            }
            let end = self.ramp_end(j);
            h = if r >= end {
                hj
            } else {
                h + (hj - h) * (r - rj) / (end - rj)
            };
        }
        Ok(h)
    }

    /// Corner points of the face from the axis to the rim.
    pub fn polyline(&self) -> Vec<(f64, f64)> {
        let mut pts = vec![(0.0, 0.0)];
        let mut prev = 0.0;
        for (j, &(rj, hj)) in self.breaks.iter().enumerate() {
            pts.push((rj, prev));
            pts.push((self.ramp_end(j), hj));
            prev = hj;
        }
        pts.push((self.pole_radius, prev));
        pts
    }

    /// The polyline as CSV with an `r,h` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,h\n");
        for (r, h) in self.polyline() {
            let _ = writeln!(out, "{r},{h}");
        }
        out
    }
}

fn check_scheme(k: usize) -> Result<(), PoleError> {
    if (1..=4).contains(&k) {
        Ok(())
    } else {
        Err(PoleError::InvalidScheme(k))
    }
}

/// Complete elliptic integrals `K(m)` and `E(m)`, parameter `m = k²`, by the
/// arithmetic-geometric mean.
pub fn elliptic_ke(m: f64) -> (f64, f64) {
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..32 {
        let c = 0.5 * (a - b);
        if c.abs() < 1e-16 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    let k = std::f64::consts::PI / (2.0 * a);
    (k, k * (1.0 - sum))
}

/// Field `(E_ρ, E_z)` at `(rho, dz)` of a ring of radius `a` carrying total
/// charge `q`, with `dz` measured from the ring's plane.
fn ring_field(a: f64, q: f64, rho: f64, dz: f64) -> Option<(f64, f64)> {
    use std::f64::consts::PI;
    let s = (a + rho).powi(2) + dz * dz;
    let d = (a - rho).powi(2) + dz * dz;
    if d < 1e-18 * s.max(1.0) {
        return None;
    }
    let (k, e) = elliptic_ke(4.0 * a * rho / s);
    let root = s.sqrt();
    let ez = q / (4.0 * PI) * 2.0 * dz * e / (PI * d * root);
    let er = if rho == 0.0 {
        0.0
    } else {
        q / (4.0 * PI * PI * rho * root) * (k - (a * a - rho * rho + dz * dz) / d * e)
    };
    Some((er, ez))
}

/// Discretized face: `(ring mid radius, ring charge per unit σ, face height)`.
fn rings(profile: &PoleProfile, n: usize) -> Vec<(f64, f64, f64)> {
    let big_r = profile.pole_radius;
    (0..n)
        .map(|i| {
            let r1 = big_r * i as f64 / n as f64;
            let r2 = big_r * (i + 1) as f64 / n as f64;
            let mid = 0.5 * (r1 + r2);
            let h = profile.height_at(mid).expect("ring midpoints lie on the face");
            (mid, std::f64::consts::PI * (r2 * r2 - r1 * r1), h)
        })
        .collect()
}

fn check_in_gap(
    profile: &PoleProfile,
    geometry: &PoleGeometry,
    r: f64,
    z: f64,
) -> Result<(), PoleError> {
    let outside = PoleError::OutsideGap { r, z };
    if !(r >= 0.0 && r <= geometry.pole_radius && z.is_finite()) {
        return Err(outside);
    }
    let face = geometry.gap_half_width - profile.height_at(r)?;
    if z.abs() >= face {
        return Err(outside);
    }
    Ok(())
}

/// Field `(B_r, B_z)` of a single face lying at `z = z_face - h(r)` with
/// surface charge `sigma`. No gap check is made.
pub fn face_field(
    profile: &PoleProfile,
    n_ring: usize,
    z_face: f64,
    sigma: f64,
    r: f64,
    z: f64,
) -> Result<(f64, f64), PoleError> {
    let mut br = 0.0;
    let mut bz = 0.0;
    for (a, area, h) in rings(profile, n_ring) {
        let (er, ez) = ring_field(a, sigma * area, r, z - (z_face - h))
            .ok_or(PoleError::OutsideGap { r, z })?;
        br += er;
        bz += ez;
    }
    Ok((br, bz))
}

fn pair_field(
    rings: &[(f64, f64, f64)],
    geometry: &PoleGeometry,
    r: f64,
    z: f64,
) -> Result<(f64, f64), PoleError> {
    let g = geometry.gap_half_width;
    let sigma = geometry.surface_charge;
    let mut br = 0.0;
    let mut bz = 0.0;
    for &(a, area, h) in rings {
        let q = sigma * area;
        let zf = g - h;
        let outside = PoleError::OutsideGap { r, z };
        let (ur, uz) = ring_field(a, -q, r, z - zf).ok_or(outside.clone())?;
        let (lr, lz) = ring_field(a, q, r, z + zf).ok_or(outside)?;
        br += ur + lr;
        bz += uz + lz;
    }
    Ok((br, bz))
}

/// Field `(B_r, B_z)` of the pole pair at `(r, z)` inside the gap.
pub fn field_at(
    profile: &PoleProfile,
    geometry: &PoleGeometry,
    r: f64,
    z: f64,
) -> Result<(f64, f64), PoleError> {
    check_in_gap(profile, geometry, r, z)?;
    pair_field(&rings(profile, geometry.n_ring), geometry, r, z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub r: f64,
    pub z: f64,
    pub axial_field: f64,
}

/// Axial field over the sample lattice. The pair is mirror-symmetric, so
/// only `z >= 0` is computed and the rest is reflected.
pub fn sample_field(
    profile: &PoleProfile,
    geometry: &PoleGeometry,
) -> Result<Vec<FieldSample>, PoleError> {
    let rings = rings(profile, geometry.n_ring);
    let points = geometry.sample_points();
    let mut cache: Vec<([f64; 2], f64)> = Vec::new();
    let mut out = Vec::with_capacity(points.len());
    for [r, z] in points {
        let key = [r, z.abs()];
        let bz = match cache.iter().find(|(k, _)| *k == key) {
            Some(&(_, b)) => b,
            None => {
                check_in_gap(profile, geometry, r, key[1])?;
                let b = pair_field(&rings, geometry, r, key[1])?.1;
                cache.push((key, b));
                b
            }
        };
        out.push(FieldSample { r, z, axial_field: bz });
    }
    Ok(out)
}

/// `Σ (B − B̄)² · 1e6 / B̄²` over the given samples.
pub fn uniformity(values: &[f64]) -> Result<f64, PoleError> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean == 0.0 || !mean.is_finite() {
        return Err(PoleError::ZeroMeanField);
    }
    Ok(values.iter().map(|b| (b - mean).powi(2)).sum::<f64>() * 1e6 / (mean * mean))
}

pub fn uniformity_objective(
    profile: &PoleProfile,
    geometry: &PoleGeometry,
) -> Result<f64, PoleError> {
    let b: Vec<f64> = sample_field(profile, geometry)?
        .iter()
        .map(|s| s.axial_field)
        .collect();
    uniformity(&b)
}

/// Total amount by which break radii fail to increase by at least 0.1 cm.
pub fn ordering_violation(params: &[f64]) -> f64 {
    params
        .chunks(2)
        .zip(params.chunks(2).skip(1))
        .map(|(a, b)| (a[0] - b[0] + 0.1).max(0.0))
        .sum()
}

#[derive(Debug, Clone)]
pub struct PoleModel {
    pub geometry: PoleGeometry,
}

impl DesignModel for PoleModel {
    fn constraint_names(&self) -> Vec<String> {
        vec!["ordering".into()]
    }

    fn assess(&self, x: &[f64]) -> Result<Assessment, ModelError> {
        let profile = PoleProfile::sorted(x, &self.geometry);
        let raw = uniformity_objective(&profile, &self.geometry)
            .map_err(|e| ModelError(e.to_string()))?;
        Ok(Assessment {
            raw_objective: raw,
            violations: vec![ordering_violation(x)],
        })
    }
}

/// Penalty weight on the ordering violation (per cm, squared).
pub const ORDERING_WEIGHT: f64 = 1e5;

/// The `2k`-variable pole problem: `[r_1, h_1, .., r_k, h_k]` on a 0.1 cm
/// grid.
pub fn make_pole_problem(k: usize) -> Result<ProblemDefinition, PoleError> {
    make_pole_problem_with(k, PoleGeometry::default())
}

pub fn make_pole_problem_with(
    k: usize,
    g: PoleGeometry,
) -> Result<ProblemDefinition, PoleError> {
    check_scheme(k)?;
    if g.n_ring == 0 {
        return Err(PoleError::NoRings);
    }
    let mut lower = Vec::with_capacity(2 * k);
    let mut upper = Vec::with_capacity(2 * k);
    for _ in 0..k {
        lower.extend([0.5, -g.max_height]);
        upper.extend([g.pole_radius - 0.5, g.max_height]);
    }
    let grid = Grid::new(lower, upper, vec![0.1; 2 * k])?;
    let penalty = PenaltyConfig::quadratic(vec![ORDERING_WEIGHT])?;
    Ok(ProblemDefinition::new(
        format!("pole{k}"),
        grid,
        PoleModel { geometry: g },
        penalty,
    )?)
}
