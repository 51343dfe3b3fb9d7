use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{ControlPath, PathBounds};
use crate::geometry::Vec3;
use crate::rng::PlannerRng;
use crate::scenario::Scenario;

const MAX_REDRAWS: usize = 16;

fn draw_abscissas(bounds: &PathBounds, rng: &mut PlannerRng) -> Vec<f64> {
    let n = bounds.n();
    let dl = bounds.delta_l;
    let normal = Normal::new(0.0, dl / 3.0).expect("positive spread");
    let mut xs = vec![0.0; n];
    for _ in 0..MAX_REDRAWS {
        for (i, x) in xs.iter_mut().enumerate() {
            let (lo, hi) = bounds.x_windows[i];
            *x = ((i + 1) as f64 * dl + normal.sample(rng)).clamp(lo, hi);
        }
        xs.sort_by(f64::total_cmp);
        if xs.windows(2).all(|w| w[0] < w[1]) {
            return xs;
        }
    }
    // Clamping piled several draws on a shared window edge; fall back to
    // the window centres, which are strictly increasing.
    (1..=n).map(|i| i as f64 * dl).collect()
}

/// Draws one control path with the heuristic distributions: `x` near its
/// pitch multiple, `y` in a corridor around the extrapolated heading, `z`
/// following the terrain.
pub fn initialize_path(scenario: &Scenario, bounds: &PathBounds, rng: &mut PlannerRng) -> ControlPath {
    let n = bounds.n();
    let xs = draw_abscissas(bounds, rng);
    let frame = &bounds.frame;
    let big_d = bounds.delta_big_d;
    let dh = Normal::new(0.0, bounds.delta_l / 3.0).expect("positive spread");
    let start_r = frame.to_rotated(scenario.start);
    let ground = |p: Vec3| {
        let w = frame.to_world(p);
        scenario.terrain.height_clamped(w.x, w.y)
    };

    let mut pts: Vec<Vec3> = Vec::with_capacity(n);
    for (i, &x) in xs.iter().enumerate() {
        let (yl, yh) = bounds.y_interval(x);
        let yt = match i {
            0 => 0.0,
            _ => {
                let a = if i >= 2 { pts[i - 2] } else { start_r };
                let b = pts[i - 1];
                let run = b.x - a.x;
                if run.abs() > 1e-12 {
                    b.y + (b.y - a.y) / run * (x - b.x)
                } else {
                    b.y
                }
            }
        };
        let yt = yt.clamp(yl, yh);
        let y = rng.random_range(yt - big_d..=yt + big_d).clamp(yl, yh);
        let mut p = Vec3::new(x, y, 0.0);
        let here = ground(p);
        p.z = match i {
            0 => here + scenario.safe_height,
            _ => {
                let prev = pts[i - 1];
                prev.z + here - ground(prev) + dh.sample(rng)
            }
        };
        pts.push(bounds.clamp_point(i, p));
    }
    ControlPath::from_points(&pts, bounds.delta_l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathmodel::{compute_bounds, control_points_in_range, RotatedFrame};
    use crate::rng::stream;
    use crate::scenario::{generate_scenario, DensityPreset, ReliefPreset, ScenarioParams};

    fn setup(density: DensityPreset) -> (Scenario, PathBounds) {
        let s = generate_scenario(5, &ScenarioParams::new(density, ReliefPreset::Hills)).unwrap();
        let f = RotatedFrame::between(s.start, s.target);
        let b = compute_bounds(&s, &f, 8, 10.0).unwrap();
        (s, b)
    }

    #[test]
    fn initialized_paths_are_in_range_and_monotone() {
        let (s, b) = setup(DensityPreset::Dense);
        let mut rng = stream(1, &[]);
        for _ in 0..500 {
            let p = initialize_path(&s, &b, &mut rng);
            assert_eq!(control_points_in_range(&p, &b), 0);
            let pts = p.points();
            assert!(pts.windows(2).all(|w| w[0].x < w[1].x));
        }
    }

    #[test]
    fn first_point_lies_in_the_initial_corridor() {
        let (s, b) = setup(DensityPreset::Sparse);
        let mut rng = stream(2, &[]);
        for _ in 0..500 {
            let p = initialize_path(&s, &b, &mut rng);
            assert!(p.point(0).y.abs() <= b.delta_big_d + 1e-12);
        }
    }
}
