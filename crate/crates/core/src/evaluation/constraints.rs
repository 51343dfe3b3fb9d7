use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;
use crate::pathmodel::{control_points_in_range, ControlPath, PathBounds, Waypoints};
use crate::scenario::Scenario;

/// Largest admissible climb slope at altitude `z`.
pub fn climb_limit(z: f64) -> f64 {
    -1.5377e-10 * z * z - 2.6997e-5 * z + 0.4211
}

/// Smallest admissible glide slope at altitude `z`.
pub fn glide_limit(z: f64) -> f64 {
    2.5063e-9 * z * z - 6.3014e-6 * z - 0.3257
}

pub const DEFAULT_SLOPE_SENTINEL: f64 = 1e6;

/// Vertical over horizontal run from `a` to `b`. A vertical segment gets
/// `±sentinel`.
pub fn slope(a: Vec3, b: Vec3, sentinel: f64) -> f64 {
    let run = (b - a).norm_xy();
    let rise = b.z - a.z;
    if run > 0.0 {
        rise / run
    } else if rise == 0.0 {
        0.0
    } else {
        sentinel * rise.signum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub h1: usize,
    pub h2: usize,
}

/// Indices `k` (0-based) whose slope toward `k+1` is constrained. The first
/// segment is exempt unless it is the only one.
fn slope_indices(m: usize) -> std::ops::Range<usize> {
    if m <= 2 {
        0..m.saturating_sub(1)
    } else {
        1..m - 1
    }
}

pub(crate) fn constraints_with(
    w: &Waypoints,
    path: &ControlPath,
    scenario: &Scenario,
    bounds: &PathBounds,
    sentinel: f64,
    ground: impl Fn(f64, f64) -> f64,
) -> Constraints {
    let p = &w.points;
    let (mut g1, mut g2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for k in slope_indices(p.len()) {
        let s = slope(p[k], p[k + 1], sentinel);
        g1 = g1.max(s - climb_limit(p[k].z));
        g2 = g2.max(glide_limit(p[k].z) - s);
    }
    let clearance = p.iter().skip(1).map(|q| q.z - ground(q.x, q.y)).fold(f64::INFINITY, f64::min);
    Constraints {
        g1,
        g2,
        g3: scenario.safe_height - clearance,
        h1: p.iter().filter(|q| scenario.in_no_fly_zone(q.x, q.y)).count(),
        h2: control_points_in_range(path, bounds),
    }
}

/// Climb, glide and clearance margins plus no-fly and range counts.
pub fn eval_constraints(w: &Waypoints, path: &ControlPath, scenario: &Scenario, bounds: &PathBounds) -> Constraints {
    constraints_with(w, path, scenario, bounds, DEFAULT_SLOPE_SENTINEL, |x, y| {
        scenario.terrain.height_clamped(x, y)
    })
}
