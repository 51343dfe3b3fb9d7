//! Objectives, constraints and the ordering used to compare candidate
//! paths.

mod constraints;
mod objectives;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathmodel::{smooth, ControlPath, PathBounds, SmoothMethod, SmoothParams, Waypoints};
use crate::scenario::Scenario;

pub use constraints::{climb_limit, eval_constraints, glide_limit, slope, Constraints, DEFAULT_SLOPE_SENTINEL};
pub use objectives::{
    f_altitude, f_length, f_missile, f_radar, f_turning, missile_probability, radar_geometry, radar_position,
    radar_probability, rcs, RadarGeometry, TurningMode,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights(pub [f64; 5]);

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self([0.2; 5])
    }
}

impl ObjectiveWeights {
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Config("objective weights must be non-negative".into()));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("objective weights sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// Weighted sum of the five objectives.
pub fn aggregate(f: &[f64; 5], weights: &ObjectiveWeights) -> Result<f64> {
    weights.validate()?;
    Ok(f.iter().zip(&weights.0).map(|(f, w)| f * w).sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub f: [f64; 5],
    pub fitness: f64,
    pub g: [f64; 3],
    pub h1: usize,
    pub h2: usize,
    pub feasible: bool,
}

impl EvaluationReport {
    pub fn new(f: [f64; 5], fitness: f64, c: Constraints) -> Self {
        let feasible = c.g1 <= 0.0 && c.g2 <= 0.0 && c.g3 <= 0.0 && c.h1 == 0 && c.h2 == 0;
        Self {
            f,
            fitness,
            g: [c.g1, c.g2, c.g3],
            h1: c.h1,
            h2: c.h2,
            feasible,
        }
    }

    /// Total violation: positive parts of `g` plus the counts.
    pub fn violation(&self) -> f64 {
        let g: f64 = self.g.iter().map(|g| g.max(0.0)).sum();
        let v = g + (self.h1 + self.h2) as f64;
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    /// Violation magnitudes in the order `(g1, g2, g3, h1, h2)`.
    pub fn constraint_vector(&self) -> [f64; 5] {
        [
            self.g[0].max(0.0),
            self.g[1].max(0.0),
            self.g[2].max(0.0),
            self.h1 as f64,
            self.h2 as f64,
        ]
    }

    /// Number of constraints whose violation exceeds `tol`.
    pub fn violation_count(&self, tol: f64) -> usize {
        self.constraint_vector().iter().filter(|v| **v > tol).count()
    }

    fn key(&self) -> (bool, f64, f64) {
        let infeasible = !self.feasible;
        let v = if infeasible { self.violation() } else { 0.0 };
        let f = if self.fitness.is_nan() { f64::INFINITY } else { self.fitness };
        (infeasible, v, f)
    }

    /// The single ordering used everywhere: feasible first, then smaller
    /// violation, then smaller fitness. `Less` means better.
    pub fn compare(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2))
    }

    pub fn is_better_than(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Less
    }

    /// Report for a path that could not be scored at all.
    pub fn unusable(n: usize) -> Self {
        Self {
            f: [f64::INFINITY; 5],
            fitness: f64::INFINITY,
            g: [f64::INFINITY; 3],
            h1: 0,
            h2: n,
            feasible: false,
        }
    }
}

/// Everything besides the scenario and smoother that scoring depends on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub weights: ObjectiveWeights,
    pub smooth: SmoothParams,
    /// Waypoints emitted per control point.
    pub waypoints_per_point: usize,
    pub turning: TurningMode,
    pub slope_sentinel: f64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            weights: ObjectiveWeights::default(),
            smooth: SmoothParams::default(),
            waypoints_per_point: 10,
            turning: TurningMode::ToTarget,
            slope_sentinel: DEFAULT_SLOPE_SENTINEL,
        }
    }
}

/// Scores already-smoothed waypoints. Ground lookups outside the terrain
/// take the nearest boundary height, since smoothers can overshoot the
/// domain edge slightly.
pub fn score_waypoints(
    w: &Waypoints,
    path: &ControlPath,
    scenario: &Scenario,
    bounds: &PathBounds,
    settings: &EvalSettings,
) -> Result<EvaluationReport> {
    let ground = |x: f64, y: f64| scenario.terrain.height_clamped(x, y);
    let f = [
        f_length(w)?,
        objectives::altitude_with(w, |x, y| Ok(ground(x, y)))?,
        f_radar(w, scenario),
        f_missile(w, scenario),
        f_turning(w, settings.turning),
    ];
    let fitness = aggregate(&f, &settings.weights)?;
    let c = constraints::constraints_with(w, path, scenario, bounds, settings.slope_sentinel, ground);
    Ok(EvaluationReport::new(f, fitness, c))
}

/// Smooths `path` and scores the resulting waypoints.
pub fn evaluate(
    path: &ControlPath,
    scenario: &Scenario,
    bounds: &PathBounds,
    method: SmoothMethod,
    settings: &EvalSettings,
) -> Result<(Waypoints, EvaluationReport)> {
    let m = settings.waypoints_per_point * path.n();
    let w = smooth(path, method, &settings.smooth, m, &bounds.frame, scenario.start, scenario.target)?;
    if !path.is_finite() || w.points.iter().any(|p| !p.is_finite()) {
        return Ok((w, EvaluationReport::unusable(path.n())));
    }
    let report = score_waypoints(&w, path, scenario, bounds, settings)?;
    Ok((w, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::pathmodel::{compute_bounds, RotatedFrame};
    use crate::scenario::{generate_scenario, DensityPreset, Missile, NoFlyZone, Radar, ReliefPreset, ScenarioParams, Terrain, Threat, UavShape};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn wp(pts: &[[f64; 3]]) -> Waypoints {
        Waypoints::new(pts.iter().map(|p| Vec3::from(*p)).collect())
    }

    fn flat_scenario(h: f64) -> Scenario {
        let mut s = generate_scenario(1, &ScenarioParams::new(DensityPreset::None, ReliefPreset::Basic)).unwrap();
        let (nx, ny) = (s.terrain.nx(), s.terrain.ny());
        s.terrain = Terrain::from_grid(nx, ny, 1.0, vec![h; nx * ny]).unwrap();
        s.start.z = h + 1.0;
        s.target.z = h + 1.0;
        s
    }

    #[test]
    fn length_of_right_angle_path() {
        let w = wp(&[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [3.0, 4.0, 0.0]]);
        assert!((f_length(&w).unwrap() - 1.4).abs() < 1e-12);
        let straight = wp(&[[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0]]);
        assert!((f_length(&straight).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(f_length(&wp(&[[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]])), Err(Error::DegeneratePath)));
    }

    #[test]
    fn altitude_counts_from_second_waypoint() {
        let t = Terrain::from_grid(3, 3, 10.0, vec![0.0; 9]).unwrap();
        let w = wp(&[[0.0, 0.0, 9.0], [5.0, 0.0, 4.0], [10.0, 0.0, 4.0], [15.0, 0.0, 4.0]]);
        assert!((f_altitude(&w, &t).unwrap() - 3.0).abs() < 1e-12);
        let low = wp(&[[0.0, 0.0, 0.0], [5.0, 0.0, -1.0], [10.0, 0.0, 0.0]]);
        assert_eq!(f_altitude(&low, &t).unwrap(), 0.0);
        assert!(f_altitude(&wp(&[[0.0, 0.0, 1.0], [25.0, 0.0, 1.0]]), &t).is_err());
    }

    #[test]
    fn sphere_cross_section_is_its_disc() {
        let r = 0.7;
        let uav = UavShape { a: r, b: r, c: r };
        for (p, q) in [(FRAC_PI_2, FRAC_PI_2), (0.3, 1.1), (2.0, -0.4)] {
            assert!((rcs(&uav, p, q) - PI * r * r).abs() < 1e-12);
        }
    }

    #[test]
    fn radar_probability_limits() {
        let radar = Radar { center: [0.0, 0.0], radius: 10.0, zeta1: 1.0, zeta2: 1.0 };
        let uav = UavShape::default();
        let mut g = radar_geometry(Vec3::new(-1.0, 0.0, 0.0), Vec3::new(10.1, 0.0, 0.0), Vec3::ZERO);
        assert_eq!(radar_probability(&g, &radar, &uav), 0.0);
        g.d = 1e-9;
        assert!((radar_probability(&g, &radar, &uav) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missile_probability_values() {
        assert_eq!(missile_probability(5.0, 5.0), 0.5);
        assert_eq!(missile_probability(5.005, 5.0), 0.0);
        assert_eq!(missile_probability(0.0, 5.0), 1.0);
    }

    #[test]
    fn turning_angle_cases() {
        let straight = wp(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 5.0]]);
        assert_eq!(f_turning(&straight, TurningMode::ToTarget), 0.0);
        let bend = wp(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]);
        assert!((f_turning(&bend, TurningMode::ToTarget) - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn slope_limits_at_sea_level() {
        assert_eq!(climb_limit(0.0), 0.4211);
        assert_eq!(glide_limit(0.0), -0.3257);
    }

    #[test]
    fn level_flight_constraints() {
        let s = flat_scenario(2.0);
        let f = RotatedFrame::between(s.start, s.target);
        let b = compute_bounds(&s, &f, 4, 10.0).unwrap();
        let z = 2.0 + s.safe_height + 1.0;
        let pts: Vec<Vec3> = (1..=4).map(|i| Vec3::new(i as f64 * b.delta_l, 0.0, z)).collect();
        let cp = crate::pathmodel::ControlPath::from_points(&pts, b.delta_l);
        let w = Waypoints::new((0..=10).map(|i| f.to_world(Vec3::new(i as f64 * 5.0, 0.0, z))).collect());
        let c = eval_constraints(&w, &cp, &s, &b);
        assert!(c.g1 < 0.0 && c.g2 < 0.0);
        assert!((c.g3 + 1.0).abs() < 1e-12);
        assert_eq!((c.h1, c.h2), (0, 0));
    }

    #[test]
    fn waypoint_in_no_fly_zone_counts_once() {
        let mut s = flat_scenario(0.0);
        s.threats.push(Threat::Nfz(NoFlyZone { x_min: 40.0, x_max: 45.0, y_min: 40.0, y_max: 45.0 }));
        let f = RotatedFrame::between(s.start, s.target);
        let b = compute_bounds(&s, &f, 4, 10.0).unwrap();
        let cp = crate::pathmodel::ControlPath::from_points(
            &(1..=4).map(|i| Vec3::new(i as f64 * b.delta_l, 0.0, 2.0)).collect::<Vec<_>>(),
            b.delta_l,
        );
        let w = wp(&[[0.0, 0.0, 2.0], [42.0, 42.0, 2.0], [50.0, 50.0, 2.0], [100.0, 70.0, 2.0]]);
        assert_eq!(eval_constraints(&w, &cp, &s, &b).h1, 1);
    }

    #[test]
    fn aggregate_with_basis_and_uniform_weights() {
        let f = [1.3, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(aggregate(&f, &ObjectiveWeights([1.0, 0.0, 0.0, 0.0, 0.0])).unwrap(), 1.3);
        assert!((aggregate(&[1.0, 0.0, 0.0, 0.0, 0.0], &ObjectiveWeights::default()).unwrap() - 0.2).abs() < 1e-15);
        assert!(aggregate(&f, &ObjectiveWeights([0.5; 5])).is_err());
    }

    #[test]
    fn evaluate_is_deterministic_and_shrinking_threats_helps() {
        let mut s = generate_scenario(4, &ScenarioParams::new(DensityPreset::Dense, ReliefPreset::Hills)).unwrap();
        let f = RotatedFrame::between(s.start, s.target);
        let b = compute_bounds(&s, &f, 8, 10.0).unwrap();
        let mut rng = crate::rng::stream(3, &[]);
        let p = crate::pathmodel::initialize_path(&s, &b, &mut rng);
        let set = EvalSettings::default();
        let (_, r1) = evaluate(&p, &s, &b, SmoothMethod::BSpline, &set).unwrap();
        let (_, r2) = evaluate(&p, &s, &b, SmoothMethod::BSpline, &set).unwrap();
        assert_eq!(r1, r2);
        for t in s.threats.iter_mut() {
            match t {
                Threat::Radar(r) => r.radius *= 0.5,
                Threat::Missile(Missile { radius, .. }) => *radius *= 0.5,
                Threat::Nfz(_) => {}
            }
        }
        let (_, r3) = evaluate(&p, &s, &b, SmoothMethod::BSpline, &set).unwrap();
        assert!(r3.f[2] <= r1.f[2] && r3.f[3] <= r1.f[3]);
    }

    #[test]
    fn ordering_prefers_feasible_then_small_violation() {
        let c = |g3: f64, h1: usize| Constraints { g1: -1.0, g2: -1.0, g3, h1, h2: 0 };
        let good = EvaluationReport::new([0.0; 5], 5.0, c(-1.0, 0));
        let bad_small = EvaluationReport::new([0.0; 5], 0.1, c(0.5, 0));
        let bad_big = EvaluationReport::new([0.0; 5], 0.1, c(0.5, 2));
        assert!(good.is_better_than(&bad_small));
        assert!(bad_small.is_better_than(&bad_big));
        assert_eq!(good.compare(&good), Ordering::Equal);
    }
}
