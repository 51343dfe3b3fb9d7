use serde::{Deserialize, Serialize};

use super::{ControlPath, RotatedFrame};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scenario::{MissionSpace, Scenario, Threat};

/// Search-space limits for control points in the rotated frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathBounds {
    pub y_min: f64,
    pub y_max: f64,
    /// `x` window of control point `i` (0-based), centred on `(i+1)·Δl`.
    pub x_windows: Vec<(f64, f64)>,
    pub delta_d: f64,
    /// Half-width of the initial `y` corridor.
    pub delta_big_d: f64,
    pub delta_l: f64,
    /// Altitude range used by redraw-style mutation and clamping.
    pub z_range: (f64, f64),
    pub frame: RotatedFrame,
    pub mission: MissionSpace,
}

const TOL: f64 = 1e-9;

/// Headroom above the highest terrain sample that control points may use.
pub const Z_HEADROOM: f64 = 40.0;

/// Builds the path bounds for `n` control points.
pub fn compute_bounds(scenario: &Scenario, frame: &RotatedFrame, n: usize, delta_d: f64) -> Result<PathBounds> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 control points, got {n}")));
    }
    if !(delta_d.is_finite() && delta_d >= 0.0) {
        return Err(Error::InvalidInput("delta_d must be non-negative".into()));
    }
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for t in &scenario.threats {
        let (a, b) = match t {
            Threat::Radar(r) => {
                let y = frame.rotated_y(r.center[0], r.center[1]);
                (y - r.radius, y + r.radius)
            }
            Threat::Missile(m) => {
                let y = frame.rotated_y(m.center[0], m.center[1]);
                (y - m.radius, y + m.radius)
            }
            Threat::Nfz(z) => z.corners().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| {
                let y = frame.rotated_y(c[0], c[1]);
                (a.min(y), b.max(y))
            }),
        };
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let length = frame.to_rotated(scenario.target).x;
    let delta_l = length / (n + 1) as f64;
    let x_windows = (1..=n)
        .map(|i| ((i as f64 - 1.0) * delta_l, (i as f64 + 1.0) * delta_l))
        .collect();
    let z_lo = scenario.terrain.min_height();
    let z_hi = scenario.terrain.max_height() + scenario.safe_height + Z_HEADROOM;
    Ok(PathBounds {
        y_min: lo - delta_d,
        y_max: hi + delta_d,
        x_windows,
        delta_d,
        delta_big_d: delta_l,
        delta_l,
        z_range: (z_lo.min(scenario.start.z).min(scenario.target.z), z_hi),
        frame: *frame,
        mission: scenario.mission_space,
    })
}

/// Solves `lo ≤ coef·y ≤ hi` for `y`.
fn linear_interval(coef: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if coef.abs() < 1e-12 {
        (lo <= TOL && hi >= -TOL).then_some((f64::NEG_INFINITY, f64::INFINITY))
    } else if coef > 0.0 {
        Some((lo / coef, hi / coef))
    } else {
        Some((hi / coef, lo / coef))
    }
}

impl PathBounds {
    pub fn n(&self) -> usize {
        self.x_windows.len()
    }

    /// Admissible `y` at rotated abscissa `x`: the corridor intersected with
    /// the mission space.
    pub fn y_interval(&self, x: f64) -> (f64, f64) {
        let (s, c) = self.frame.theta.sin_cos();
        let ms = &self.mission;
        let [ox, oy] = self.frame.origin;
        let ix = linear_interval(-s, ms.x_min - ox - x * c, ms.x_max - ox - x * c);
        let iy = linear_interval(c, ms.y_min - oy - x * s, ms.y_max - oy - x * s);
        let (mut lo, mut hi) = (self.y_min, self.y_max);
        for (a, b) in [ix, iy].into_iter().flatten() {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        if lo > hi {
            // Only reachable for x outside every window; the chord is inside
            // the mission space so y = 0 is admissible there.
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    /// Whether control point `i` lies outside its admissible region.
    pub fn out_of_range(&self, i: usize, p: Vec3) -> bool {
        let (xl, xh) = self.x_windows[i];
        if !(p.x >= xl - TOL && p.x <= xh + TOL) || !(p.y >= self.y_min - TOL && p.y <= self.y_max + TOL) {
            return true;
        }
        let w = self.frame.to_world(p);
        !self.mission.contains_tol(w.x, w.y, TOL)
    }

    /// Gene-wise limits of control point `i`, used to redraw genes.
    pub fn gene_range(&self, i: usize, axis: usize) -> (f64, f64) {
        match axis {
            0 => self.x_windows[i],
            1 => (self.y_min, self.y_max),
            _ => self.z_range,
        }
    }

    /// Moves control point `i` into its admissible region.
    pub fn clamp_point(&self, i: usize, p: Vec3) -> Vec3 {
        let (xl, xh) = self.x_windows[i];
        let x = if p.x.is_nan() { 0.5 * (xl + xh) } else { p.x.clamp(xl, xh) };
        let (yl, yh) = self.y_interval(x);
        let y = if p.y.is_nan() { 0.0 } else { p.y.clamp(yl, yh) };
        let z = if p.z.is_nan() { self.z_range.0 } else { p.z.clamp(self.z_range.0, self.z_range.1) };
        Vec3::new(x, y, z)
    }

    pub fn clamp_path(&self, path: &mut ControlPath) {
        for i in 0..path.n() {
            let q = self.clamp_point(i, path.point(i));
            path.set_point(i, q);
        }
    }
}

/// Number of control points outside their admissible region.
pub fn control_points_in_range(path: &ControlPath, bounds: &PathBounds) -> usize {
    (0..path.n()).filter(|&i| bounds.out_of_range(i, path.point(i))).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, DensityPreset, Missile, ReliefPreset, ScenarioParams};

    fn flat() -> Scenario {
        let mut s = generate_scenario(1, &ScenarioParams::new(DensityPreset::None, ReliefPreset::Basic)).unwrap();
        s.threats.clear();
        s
    }

    fn frame0() -> RotatedFrame {
        RotatedFrame::new(0.0, [0.0, 0.0])
    }

    #[test]
    fn no_threats_gives_symmetric_corridor() {
        let b = compute_bounds(&flat(), &frame0(), 4, 10.0).unwrap();
        assert_eq!((b.y_min, b.y_max), (-10.0, 10.0));
    }

    #[test]
    fn threat_above_axis_extends_y_max_only() {
        let mut s = flat();
        s.threats.push(Threat::Missile(Missile { center: [50.0, 5.0], radius: 3.0 }));
        let b = compute_bounds(&s, &frame0(), 4, 10.0).unwrap();
        assert_eq!(b.y_max, 18.0);
        assert_eq!(b.y_min, -10.0);
    }

    #[test]
    fn threat_below_axis_extends_y_min() {
        let mut s = flat();
        s.threats.push(Threat::Missile(Missile { center: [60.0, -20.0], radius: 5.0 }));
        let b = compute_bounds(&s, &frame0(), 4, 2.0).unwrap();
        assert_eq!(b.y_min, -27.0);
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(compute_bounds(&flat(), &frame0(), 1, 10.0).is_err());
    }

    #[test]
    fn windows_are_centred_on_pitch_multiples() {
        let s = flat();
        let f = RotatedFrame::between(s.start, s.target);
        let b = compute_bounds(&s, &f, 6, 10.0).unwrap();
        for (i, (lo, hi)) in b.x_windows.iter().enumerate() {
            let c = (i + 1) as f64 * b.delta_l;
            assert!((0.5 * (lo + hi) - c).abs() < 1e-9);
            assert!(hi > lo);
        }
    }
}
