mod common;

use proptest::prelude::*;

use evoplanner::evaluation::{eval_constraints, f_length, f_missile, f_radar, f_turning, TurningMode};
use evoplanner::genome::{decode, describe, encode, parse_describe, PlannerGenome, GENOME_BITS, LAYOUT};
use evoplanner::operators::Problem;
use evoplanner::pathmodel::{compute_bounds, initialize_path, ControlPath, RotatedFrame, SmoothMethod, Waypoints};
use evoplanner::rng::stream;
use evoplanner::scenario::{Scenario, Terrain, Threat};
use evoplanner::Vec3;

fn point() -> impl Strategy<Value = Vec3> {
    (20.0..130.0f64, 20.0..80.0f64, 0.0..40.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn path(len: usize) -> impl Strategy<Value = Vec<Vec3>> {
    prop::collection::vec(point(), len)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn shrink_threats(s: &Scenario, k: f64) -> Scenario {
    let mut t = s.clone();
    for threat in &mut t.threats {
        match threat {
            Threat::Radar(r) => r.radius *= k,
            Threat::Missile(m) => m.radius *= k,
            Threat::Nfz(_) => {}
        }
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn frame_is_an_isometry(theta in -7.0..7.0f64, ox in -50.0..50.0f64, oy in -50.0..50.0f64,
                            p in point(), q in point()) {
        let f = RotatedFrame::new(theta, [ox, oy]);
        let (a, b) = (f.to_world(p), f.to_world(q));
        prop_assert!(rel_close(a.distance(b), p.distance(q), 1e-9));
        prop_assert!(f.to_rotated(a).distance(p) <= 1e-9 * p.norm().max(1.0));
    }

    #[test]
    fn length_ratio_is_at_least_one(pts in path(6)) {
        let w = Waypoints::new(pts);
        prop_assume!(w.first().distance(w.last()) > 1e-3);
        prop_assert!(f_length(&w).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn collinear_paths_have_unit_length_ratio(a in point(), b in point(), mut ts in prop::collection::vec(0.0..1.0f64, 4)) {
        prop_assume!(a.distance(b) > 1e-3);
        ts.sort_by(f64::total_cmp);
        let mut pts = vec![a];
        pts.extend(ts.iter().map(|t| a.lerp(b, *t)));
        pts.push(b);
        prop_assert!((f_length(&Waypoints::new(pts)).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn threat_costs_shrink_with_radii(pts in path(8), k in 0.0..1.0f64) {
        let s = common::reference_scenario();
        let w = Waypoints::new(pts);
        let (f3, f4) = (f_radar(&w, &s), f_missile(&w, &s));
        let m = (w.len() - 1) as f64;
        let radars = s.radars().count() as f64;
        let missiles = s.missiles().count() as f64;
        prop_assert!(f3 >= 0.0 && f3 <= radars * m);
        prop_assert!(f4 >= 0.0 && f4 <= missiles * m);
        let small = shrink_threats(&s, k);
        prop_assert!(f_radar(&w, &small) <= f3);
        prop_assert!(f_missile(&w, &small) <= f4);
    }

    #[test]
    fn slope_constraints_ignore_horizontal_shifts(pts in path(7), dx in -15.0..15.0f64, dy in -15.0..15.0f64) {
        let s = common::reference_scenario();
        let frame = RotatedFrame::between(s.start, s.target);
        let bounds = compute_bounds(&s, &frame, 5, 10.0).unwrap();
        let ctrl = initialize_path(&s, &bounds, &mut stream(1, &[]));
        let moved: Vec<Vec3> = pts.iter().map(|p| Vec3::new(p.x + dx, p.y + dy, p.z)).collect();
        let a = eval_constraints(&Waypoints::new(pts), &ctrl, &s, &bounds);
        let b = eval_constraints(&Waypoints::new(moved), &ctrl, &s, &bounds);
        prop_assert!((a.g1 - b.g1).abs() <= 1e-9);
        prop_assert!((a.g2 - b.g2).abs() <= 1e-9);
    }

    #[test]
    fn turning_cost_ignores_horizontal_rotation(pts in path(6), theta in -3.2..3.2f64) {
        let (s, c) = theta.sin_cos();
        let rotated: Vec<Vec3> = pts.iter().map(|p| Vec3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)).collect();
        let a = f_turning(&Waypoints::new(pts), TurningMode::ToTarget);
        let b = f_turning(&Waypoints::new(rotated), TurningMode::ToTarget);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn genome_round_trips(bits in any::<u64>()) {
        let g = PlannerGenome(bits);
        let c = decode(g);
        prop_assert_eq!(encode(&c).unwrap(), g);
        prop_assert_eq!(decode(encode(&c).unwrap()), c);
        prop_assert_eq!(parse_describe(&describe(g)).unwrap(), g);
        prop_assert_eq!(g.to_string().parse::<PlannerGenome>().unwrap(), g);
    }

    #[test]
    fn one_bit_flip_touches_one_field(bits in any::<u64>(), i in 0..GENOME_BITS) {
        let g = PlannerGenome(bits);
        let h = g.with_bit(i, !g.bit(i));
        let changed: Vec<_> = LAYOUT.iter().filter(|f| g.field(f) != h.field(f)).collect();
        prop_assert_eq!(changed.len(), 1);
        let (token, param) = (changed[0].token, format!("{}_param", changed[0].token));
        // Besides its own line, a kind token may change how its parameter reads.
        let (a, b) = (describe(g), describe(h));
        for (k, _) in a.lines().zip(b.lines()).enumerate().filter(|(_, (x, y))| x != y) {
            let t = LAYOUT[k].token;
            prop_assert!(t == token || t == param, "line {} changed", k);
        }
    }
}

#[test]
fn reference_fixture_matches_checksum() {
    // The loader asserts the recorded digest.
    let s = common::reference_scenario();
    s.validate().unwrap();
}

#[test]
fn stored_path_replays_its_fitness() {
    let s = common::reference_scenario();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(common::fixture("stored_path.json")).unwrap()).unwrap();
    assert_eq!(v["scenario_digest"], common::REFERENCE_DIGEST);
    let method: SmoothMethod = serde_json::from_value(v["smoother"].clone()).unwrap();
    let control: ControlPath = serde_json::from_value(v["control"].clone()).unwrap();
    let stored = v["fitness"].as_f64().unwrap();
    let prob = Problem::new(&s, control.n(), method, Default::default()).unwrap();
    let report = prob.evaluate(&control);
    assert!((report.fitness - stored).abs() <= 1e-9, "{} vs {stored}", report.fitness);
    assert!(report.feasible);
}

#[test]
fn flat_terrain_altitude_increments_are_centred() {
    let mut s = common::reference_scenario();
    let (nx, ny) = (s.terrain.nx(), s.terrain.ny());
    s.terrain = Terrain::from_grid(nx, ny, s.terrain.cell_size(), vec![2.0; nx * ny]).unwrap();
    s.start.z = 30.0;
    s.target.z = 30.0;
    s.threats.clear();
    let frame = RotatedFrame::between(s.start, s.target);
    let mut bounds = compute_bounds(&s, &frame, 8, 10.0).unwrap();
    // Without an altitude clamp the walk is unbiased.
    bounds.z_range = (-1e6, 1e6);
    let mut rng = stream(31, &[]);
    let mut incs = Vec::new();
    for _ in 0..2000 {
        let p = initialize_path(&s, &bounds, &mut rng).points();
        incs.extend(p.windows(2).map(|w| w[1].z - w[0].z));
    }
    let n = incs.len() as f64;
    let mean = incs.iter().sum::<f64>() / n;
    let dh = bounds.delta_l / 3.0;
    assert!(mean.abs() < 3.0 * dh / n.sqrt(), "mean {mean}, bound {}", 3.0 * dh / n.sqrt());
}
