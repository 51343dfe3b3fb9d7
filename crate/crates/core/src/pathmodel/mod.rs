//! Candidate path representation: rotated frame, control points, bounds,
//! heuristic initialization and smoothing into waypoints.

mod bounds;
mod frame;
mod init;
mod smooth;

use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;

pub use bounds::{compute_bounds, control_points_in_range, PathBounds, Z_HEADROOM};
pub use frame::RotatedFrame;
pub use init::initialize_path;
pub use smooth::{bezier_point, smooth, SmoothMethod, SmoothParams};

/// `n` control points in the rotated frame, stored as a flat gene vector
/// `[x1, y1, z1, x2, y2, z2, ...]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlPath {
    pub genes: Vec<f64>,
    pub delta_l: f64,
}

impl ControlPath {
    pub fn from_points(points: &[Vec3], delta_l: f64) -> Self {
        let genes = points.iter().flat_map(|p| [p.x, p.y, p.z]).collect();
        Self { genes, delta_l }
    }

    pub fn n(&self) -> usize {
        self.genes.len() / 3
    }

    pub fn point(&self, i: usize) -> Vec3 {
        Vec3::new(self.genes[3 * i], self.genes[3 * i + 1], self.genes[3 * i + 2])
    }

    pub fn set_point(&mut self, i: usize, p: Vec3) {
        self.genes[3 * i] = p.x;
        self.genes[3 * i + 1] = p.y;
        self.genes[3 * i + 2] = p.z;
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.n()).map(|i| self.point(i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.genes.iter().all(|g| g.is_finite())
    }
}

/// World-frame samples of a smoothed path, start and target included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Waypoints {
    pub points: Vec<Vec3>,
}

impl Waypoints {
    pub fn new(points: Vec<Vec3>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Vec3 {
        self.points[0]
    }

    pub fn last(&self) -> Vec3 {
        self.points[self.points.len() - 1]
    }
}
