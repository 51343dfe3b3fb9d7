use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;

/// Horizontal frame with its X axis along start to target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotatedFrame {
    pub theta: f64,
    pub origin: [f64; 2],
}

impl RotatedFrame {
    pub fn new(theta: f64, origin: [f64; 2]) -> Self {
        Self { theta, origin }
    }

    /// Frame whose X axis points from `start` toward `target`.
    pub fn between(start: Vec3, target: Vec3) -> Self {
        let theta = (target.y - start.y).atan2(target.x - start.x);
        Self::new(theta, [start.x, start.y])
    }

    pub fn to_world(&self, p: Vec3) -> Vec3 {
        let (s, c) = self.theta.sin_cos();
        Vec3::new(
            p.x * c - p.y * s + self.origin[0],
            p.x * s + p.y * c + self.origin[1],
            p.z,
        )
    }

    pub fn to_rotated(&self, w: Vec3) -> Vec3 {
        let (s, c) = self.theta.sin_cos();
        let dx = w.x - self.origin[0];
        let dy = w.y - self.origin[1];
        Vec3::new(dx * c + dy * s, -dx * s + dy * c, w.z)
    }

    /// Rotated-frame `y` of a horizontal world position.
    pub fn rotated_y(&self, x: f64, y: f64) -> f64 {
        self.to_rotated(Vec3::new(x, y, 0.0)).y
    }
}
