//! Mission scenarios: terrain, threats and endpoints.

mod file;
mod generate;
mod terrain;
mod threat;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

pub use file::{load_scenario, save_scenario, scenario_digest, scenario_from_json, scenario_to_json};
pub use generate::{generate_scenario, DensityPreset, Endpoints, ReliefPreset, ScenarioParams};
pub use terrain::{generate_terrain, GridDomain, NoiseSpec, Octave, Terrain};
pub use threat::{Missile, NoFlyZone, Radar, Threat};

/// Ellipsoid semi-axes of the vehicle, meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UavShape {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for UavShape {
    fn default() -> Self {
        Self { a: 0.3, b: 0.3, c: 0.1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionSpace {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl MissionSpace {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    pub fn contains_tol(&self, x: f64, y: f64, tol: f64) -> bool {
        x >= self.x_min - tol && x <= self.x_max + tol && y >= self.y_min - tol && y <= self.y_max + tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub terrain: Terrain,
    pub threats: Vec<Threat>,
    pub start: Vec3,
    pub target: Vec3,
    pub mission_space: MissionSpace,
    pub uav: UavShape,
    pub safe_height: f64,
}

impl Scenario {
    /// Checks every scenario invariant, naming the first offending field.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.threats.iter().enumerate() {
            if let Some((field, reason)) = t.check() {
                return Err(Error::schema(format!("threats[{i}].{field}"), reason));
            }
        }
        let ms = &self.mission_space;
        if !(ms.x_min < ms.x_max && ms.y_min < ms.y_max) {
            return Err(Error::schema("mission_space", "rectangle is degenerate"));
        }
        let (tw, td) = (self.terrain.width(), self.terrain.depth());
        if ms.x_min < 0.0 || ms.y_min < 0.0 || ms.x_max > tw + 1e-9 || ms.y_max > td + 1e-9 {
            return Err(Error::schema("mission_space", "not covered by the terrain"));
        }
        for (name, p) in [("start", self.start), ("target", self.target)] {
            if !p.is_finite() {
                return Err(Error::schema(name, "not finite"));
            }
            if !ms.contains(p.x, p.y) {
                return Err(Error::schema(name, "outside the mission space"));
            }
            if self.threats.iter().any(|t| blocks_endpoint(t, p)) {
                return Err(Error::schema(name, "inside a no-fly zone or missile radius"));
            }
        }
        if (self.target - self.start).norm_xy() <= 0.0 {
            return Err(Error::schema("target", "coincides horizontally with start"));
        }
        let u = &self.uav;
        if ![u.a, u.b, u.c].iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::schema("uav", "semi-axes must be positive"));
        }
        if !(self.safe_height.is_finite() && self.safe_height >= 0.0) {
            return Err(Error::schema("safe_height", "must be non-negative"));
        }
        Ok(())
    }

    pub fn radars(&self) -> impl Iterator<Item = &Radar> {
        self.threats.iter().filter_map(|t| match t {
            Threat::Radar(r) => Some(r),
            _ => None,
        })
    }

    pub fn missiles(&self) -> impl Iterator<Item = &Missile> {
        self.threats.iter().filter_map(|t| match t {
            Threat::Missile(m) => Some(m),
            _ => None,
        })
    }

    pub fn no_fly_zones(&self) -> impl Iterator<Item = &NoFlyZone> {
        self.threats.iter().filter_map(|t| match t {
            Threat::Nfz(z) => Some(z),
            _ => None,
        })
    }

    pub fn in_no_fly_zone(&self, x: f64, y: f64) -> bool {
        self.no_fly_zones().any(|z| z.contains(x, y))
    }
}

pub(crate) fn blocks_endpoint(t: &Threat, p: Vec3) -> bool {
    match t {
        Threat::Nfz(z) => z.contains(p.x, p.y),
        Threat::Missile(m) => (p.x - m.center[0]).hypot(p.y - m.center[1]) <= m.radius,
        Threat::Radar(_) => false,
    }
}
