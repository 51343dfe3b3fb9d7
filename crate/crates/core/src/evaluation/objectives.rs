use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::pathmodel::Waypoints;
use crate::scenario::{Radar, Scenario, Terrain, UavShape};

/// Path length over the straight start to end distance.
pub fn f_length(w: &Waypoints) -> Result<f64> {
    let pts = &w.points;
    if pts.len() < 2 {
        return Err(Error::InvalidInput("need at least two waypoints".into()));
    }
    let chord = pts[0].distance(pts[pts.len() - 1]);
    if chord <= 0.0 {
        return Err(Error::DegeneratePath);
    }
    let total: f64 = pts.windows(2).map(|s| s[0].distance(s[1])).sum();
    Ok(total / chord)
}

pub(crate) fn altitude_with(w: &Waypoints, ground: impl Fn(f64, f64) -> Result<f64>) -> Result<f64> {
    let m = w.len() as f64;
    let mut sum = 0.0;
    for p in w.points.iter().skip(1) {
        let g = ground(p.x, p.y)?;
        if p.z > g {
            sum += (p.z - g) / m;
        }
    }
    Ok(sum)
}

/// Mean clearance above ground, counting waypoints 2..m.
pub fn f_altitude(w: &Waypoints, terrain: &Terrain) -> Result<f64> {
    altitude_with(w, |x, y| terrain.height(x, y))
}

/// Attitude-dependent quantities between one waypoint and one radar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarGeometry {
    pub d: f64,
    /// Angle between the velocity and the line of sight to the radar.
    pub psi_e: f64,
    pub phi_e: f64,
    pub roll: f64,
    pub elevation: f64,
    pub azimuth: f64,
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = (a + PI).rem_euclid(2.0 * PI) - PI;
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Geometry of the vehicle at `here`, arriving from `prev`, relative to a
/// radar antenna at `radar`. Roll is zero, heading follows the horizontal
/// velocity and pitch follows the climb angle of the segment.
pub fn radar_geometry(prev: Vec3, here: Vec3, radar: Vec3) -> RadarGeometry {
    let v = here - prev;
    let los = radar - here;
    let d = los.norm();
    let psi_e = match (v.normalized(), los.normalized()) {
        (Some(a), Some(b)) => a.dot(b).clamp(-1.0, 1.0).acos(),
        _ => FRAC_PI_2,
    };
    let heading = v.y.atan2(v.x);
    let climb = v.z.atan2(v.norm_xy());
    let azimuth = wrap_angle(los.y.atan2(los.x) - heading);
    let elevation = los.z.atan2(los.norm_xy()) - climb;
    let roll = 0.0;
    let ratio = elevation.tan() / azimuth.sin();
    let phi_e = roll - if ratio.is_nan() { 0.0 } else { ratio.atan() };
    RadarGeometry {
        d,
        psi_e,
        phi_e,
        roll,
        elevation,
        azimuth,
    }
}

const RCS_FLOOR: f64 = 1e-12;

/// Radar cross section of the vehicle ellipsoid seen under the given
/// aspect angles.
pub fn rcs(uav: &UavShape, psi_e: f64, phi_e: f64) -> f64 {
    let (az, bz) = psi_e.sin_cos();
    let (ap, bp) = phi_e.sin_cos();
    let (a, b, c) = (uav.a, uav.b, uav.c);
    let q = (a * az * bp).powi(2) + (b * az * ap).powi(2) + (c * bz).powi(2);
    PI * (a * b * c).powi(2) / (q * q).max(RCS_FLOOR)
}

pub fn radar_probability(geom: &RadarGeometry, radar: &Radar, uav: &UavShape) -> f64 {
    if geom.d > radar.radius {
        return 0.0;
    }
    let s = rcs(uav, geom.psi_e, geom.phi_e);
    1.0 / (1.0 + radar.zeta2 * (geom.d.powi(4) / s).powf(radar.zeta1))
}

/// Antenna position: the radar centre at ground level.
pub fn radar_position(radar: &Radar, terrain: &Terrain) -> Vec3 {
    let [x, y] = radar.center;
    Vec3::new(x, y, terrain.height_clamped(x, y))
}

/// Summed detection probability over radars and waypoints 2..m.
pub fn f_radar(w: &Waypoints, scenario: &Scenario) -> f64 {
    let mut sum = 0.0;
    for radar in scenario.radars() {
        let pos = radar_position(radar, &scenario.terrain);
        for s in w.points.windows(2) {
            if s[1].distance(pos) > radar.radius {
                continue;
            }
            let g = radar_geometry(s[0], s[1], pos);
            sum += radar_probability(&g, radar, &scenario.uav);
        }
    }
    sum
}

pub fn missile_probability(d: f64, radius: f64) -> f64 {
    if d > radius {
        0.0
    } else {
        let r4 = radius.powi(4);
        r4 / (r4 + d.powi(4))
    }
}

/// Summed hit probability over missile sites and waypoints 2..m.
pub fn f_missile(w: &Waypoints, scenario: &Scenario) -> f64 {
    let mut sum = 0.0;
    for m in scenario.missiles() {
        let [x, y] = m.center;
        let pos = Vec3::new(x, y, scenario.terrain.height_clamped(x, y));
        for p in w.points.iter().skip(1) {
            sum += missile_probability(p.distance(pos), m.radius);
        }
    }
    sum
}

/// Which vector each segment's heading is compared against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TurningMode {
    /// Toward the final waypoint.
    #[default]
    ToTarget,
    /// The following segment.
    NextSegment,
}

fn angle_2d(a: Vec3, b: Vec3) -> f64 {
    let (na, nb) = (a.norm_xy(), b.norm_xy());
    if na <= 0.0 || nb <= 0.0 {
        return 0.0;
    }
    ((a.x * b.x + a.y * b.y) / (na * nb)).clamp(-1.0, 1.0).acos()
}

/// Summed horizontal turning angle, radians.
pub fn f_turning(w: &Waypoints, mode: TurningMode) -> f64 {
    let p = &w.points;
    let m = p.len();
    (1..m)
        .map(|i| {
            let seg = p[i] - p[i - 1];
            let other = match mode {
                TurningMode::ToTarget => p[m - 1] - p[i],
                TurningMode::NextSegment if i + 1 < m => p[i + 1] - p[i],
                TurningMode::NextSegment => Vec3::ZERO,
            };
            angle_2d(seg, other)
        })
        .sum()
}
