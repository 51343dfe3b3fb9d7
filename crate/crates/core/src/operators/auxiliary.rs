use std::collections::HashMap;

use rand::Rng;

use super::{gaussian, Individual, Population, Problem};
use crate::error::Result;
use crate::evaluation::EvaluationReport;
use crate::geometry::Vec3;
use crate::pathmodel::ControlPath;
use crate::rng::PlannerRng;

/// Members kept unchanged for `pct` percent elitism.
pub fn elite_count(n: usize, pct: f64) -> usize {
    ((n as f64 * pct / 100.0).ceil() as usize).min(n)
}

/// Clearance added on top of a violated margin when repairing, meters.
const REPAIR_MARGIN: f64 = 1.0;

fn lift(path: &ControlPath, dz: f64) -> ControlPath {
    let mut out = path.clone();
    for i in 0..out.n() {
        out.genes[3 * i + 2] += dz;
    }
    out
}

fn smooth_altitudes(path: &ControlPath, z0: f64, z1: f64) -> ControlPath {
    let mut out = path.clone();
    let z: Vec<f64> = (0..path.n()).map(|i| path.genes[3 * i + 2]).collect();
    for i in 0..z.len() {
        let prev = if i == 0 { z0 } else { z[i - 1] };
        let next = if i + 1 == z.len() { z1 } else { z[i + 1] };
        out.genes[3 * i + 2] = (prev + z[i] + next) / 3.0;
    }
    out
}

/// Pushes control points lying over or beside a no-fly zone to its nearer
/// side across the corridor.
fn sidestep_zones(path: &ControlPath, prob: &Problem) -> ControlPath {
    let frame = &prob.bounds.frame;
    let reach = prob.bounds.delta_l;
    let mut out = path.clone();
    for zone in prob.scenario.no_fly_zones() {
        let corners: Vec<Vec3> = zone
            .corners()
            .iter()
            .map(|c| frame.to_rotated(Vec3::new(c[0], c[1], 0.0)))
            .collect();
        let fold = |f: fn(&Vec3) -> f64, max: bool| {
            corners
                .iter()
                .map(f)
                .fold(if max { f64::NEG_INFINITY } else { f64::INFINITY }, |a, b| if max { a.max(b) } else { a.min(b) })
        };
        let (x0, x1) = (fold(|p| p.x, false) - reach, fold(|p| p.x, true) + reach);
        let (y0, y1) = (fold(|p| p.y, false) - REPAIR_MARGIN, fold(|p| p.y, true) + REPAIR_MARGIN);
        for i in 0..out.n() {
            let p = out.point(i);
            if p.x >= x0 && p.x <= x1 && p.y > y0 && p.y < y1 {
                let y = if p.y - y0 < y1 - p.y { y0 } else { y1 };
                out.set_point(i, Vec3::new(p.x, y, p.z));
            }
        }
    }
    out
}

/// Greedy feasibility repair: raise the path over terrain, step around
/// no-fly zones and flatten altitude jumps. Each move is kept only if it
/// improves the report, for at most `rounds` rounds.
pub fn repair(path: &ControlPath, report: &EvaluationReport, prob: &Problem, rounds: usize) -> (ControlPath, EvaluationReport) {
    let (mut best, mut best_r) = (path.clone(), report.clone());
    let (z0, z1) = (prob.scenario.start.z, prob.scenario.target.z);
    for _ in 0..rounds {
        if best_r.feasible {
            break;
        }
        let mut moved = false;
        let mut candidates = Vec::new();
        if best_r.g[2] > 0.0 && best_r.g[2].is_finite() {
            candidates.push(lift(&best, best_r.g[2] + REPAIR_MARGIN));
        }
        if best_r.h1 > 0 {
            candidates.push(sidestep_zones(&best, prob));
        }
        if best_r.g[0] > 0.0 || best_r.g[1] > 0.0 {
            candidates.push(smooth_altitudes(&best, z0, z1));
        }
        for mut c in candidates {
            prob.clamp(&mut c);
            if c == best {
                continue;
            }
            let r = prob.evaluate(&c);
            if r.is_better_than(&best_r) {
                best = c;
                best_r = r;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    (best, best_r)
}

/// Local improvement: perturb one control point at a time by Normal(0,
/// `sigma`) and keep strict improvements.
pub fn pfih(
    path: &ControlPath,
    report: &EvaluationReport,
    prob: &Problem,
    iterations: usize,
    sigma: f64,
    rng: &mut PlannerRng,
) -> (ControlPath, EvaluationReport) {
    let (mut best, mut best_r) = (path.clone(), report.clone());
    if best.n() == 0 || sigma <= 0.0 {
        return (best, best_r);
    }
    for _ in 0..iterations {
        let i = rng.random_range(0..best.n());
        let p = best.point(i);
        let mut c = best.clone();
        c.set_point(i, p + Vec3::new(gaussian(rng, sigma), gaussian(rng, sigma), gaussian(rng, sigma)));
        prob.clamp(&mut c);
        let r = prob.evaluate(&c);
        if r.is_better_than(&best_r) {
            best = c;
            best_r = r;
        }
    }
    (best, best_r)
}

fn genotype(path: &ControlPath) -> Vec<u64> {
    path.genes.iter().map(|g| g.to_bits()).collect()
}

/// Perturbs every exact duplicate of an earlier member. Returns how many
/// members were changed.
pub fn forbid_clones(pop: &mut Population, sigma: f64, prob: &Problem, rng: &mut PlannerRng) -> usize {
    let mut seen = std::collections::HashSet::new();
    let mut changed = 0;
    for ind in &mut pop.members {
        if seen.insert(genotype(&ind.path)) {
            continue;
        }
        let genes = ind.path.genes.iter().map(|g| g + gaussian(rng, sigma)).collect();
        ind.set_genes(genes);
        changed += 1;
    }
    pop.refresh(prob);
    changed
}

/// Mating pool on a ring: slot `i` takes the better-ranked of two draws
/// from `{i−1, i, i+1}`. `positions[i]` is member `i`'s rank position.
pub fn cellular_select(positions: &[usize], rng: &mut PlannerRng) -> Vec<usize> {
    let n = positions.len();
    (0..n)
        .map(|i| {
            let mut draw = || (i + n + rng.random_range(0..3)).wrapping_sub(1) % n;
            let (a, b) = (draw(), draw());
            if positions[a] <= positions[b] {
                a
            } else {
                b
            }
        })
        .collect()
}

/// Appends `count` fresh random members.
pub fn inject(pop: &mut Population, count: usize, prob: &Problem, rng: &mut PlannerRng) {
    for _ in 0..count {
        pop.members.push(Individual::new(prob.random_path(rng)));
    }
    pop.refresh(prob);
}

/// Divides each rank score by `1 + strength·(c − 1)`, `c` being how many
/// members share that member's genotype. `scores` follow `order`.
pub fn antibody_scores(pop: &Population, order: &[usize], scores: &[f64], strength: f64) -> Vec<f64> {
    let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
    for m in &pop.members {
        *counts.entry(genotype(&m.path)).or_default() += 1;
    }
    order
        .iter()
        .zip(scores)
        .map(|(&i, s)| {
            let c = counts[&genotype(&pop.members[i].path)] as f64;
            s / (1.0 + strength * (c - 1.0))
        })
        .collect()
}

/// Shrinks the population's step scale.
pub fn decay(pop: &mut Population, factor: f64) {
    pop.scale *= factor;
}

/// Ring migration: the `count` best of each population replace the
/// `count` worst of the next one.
pub fn migrate(pops: &mut [Population], count: usize) -> Result<()> {
    if pops.len() < 2 {
        log::debug!("migration skipped: {} population(s)", pops.len());
        return Ok(());
    }
    let mut emigrants = Vec::with_capacity(pops.len());
    for p in pops.iter() {
        let order = p.order_by_report()?;
        let k = count.min(p.len());
        emigrants.push(order[..k].iter().map(|&i| p.members[i].clone()).collect::<Vec<_>>());
    }
    let n = pops.len();
    for (src, group) in emigrants.into_iter().enumerate() {
        let dst = &mut pops[(src + 1) % n];
        let order = dst.order_by_report()?;
        for (slot, m) in order.iter().rev().zip(group) {
            let r = m.report.clone().expect("ordered members are evaluated");
            dst.offer(&m.path, &r);
            dst.members[*slot] = m;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::testutil;
    use crate::rng::stream;

    #[test]
    fn elite_count_rounds_up() {
        assert_eq!(elite_count(10, 10.0), 1);
        assert_eq!(elite_count(10, 0.0), 0);
        assert_eq!(elite_count(7, 20.0), 2);
        assert_eq!(elite_count(3, 100.0), 3);
    }

    #[test]
    fn repair_and_pfih_never_worsen() {
        let s = testutil::scenario(21);
        let prob = testutil::problem(&s);
        let mut rng = stream(1, &[]);
        for _ in 0..10 {
            let p = prob.random_path(&mut rng);
            let r = prob.evaluate(&p);
            let (q, qr) = repair(&p, &r, &prob, 5);
            assert!(!r.is_better_than(&qr));
            if r.feasible {
                assert_eq!(q, p);
            }
            let (_, pr) = pfih(&q, &qr, &prob, 5, 2.0, &mut rng);
            assert!(!qr.is_better_than(&pr));
        }
    }

    #[test]
    fn clones_are_separated() {
        let s = testutil::scenario(22);
        let prob = testutil::problem(&s);
        let mut rng = stream(2, &[]);
        let mut pop = Population::random(&prob, 4, 10, &mut rng);
        let first = pop.members[0].clone();
        pop.members[2] = first.clone();
        pop.members[3] = first;
        assert_eq!(forbid_clones(&mut pop, 1.0, &prob, &mut rng), 2);
        assert_eq!(pop.len(), 4);
        assert!(super::super::homogeneity(&pop) < 0.5);
    }

    #[test]
    fn antibody_penalizes_duplicates_only() {
        let s = testutil::scenario(23);
        let prob = testutil::problem(&s);
        let mut rng = stream(3, &[]);
        let mut pop = Population::random(&prob, 3, 10, &mut rng);
        pop.members[1] = pop.members[0].clone();
        let out = antibody_scores(&pop, &[0, 1, 2], &[3.0, 2.0, 1.0], 1.0);
        assert_eq!(out, vec![1.5, 1.0, 1.0]);
    }

    #[test]
    fn cellular_picks_neighbours() {
        let mut rng = stream(4, &[]);
        let positions = [4, 0, 3, 1, 2];
        for _ in 0..50 {
            let pool = cellular_select(&positions, &mut rng);
            for (i, &j) in pool.iter().enumerate() {
                let d = (i as isize - j as isize).rem_euclid(5);
                assert!(d <= 1 || d == 4);
            }
        }
    }

    #[test]
    fn migration_moves_best_into_next_ring_slot() {
        let s = testutil::scenario(24);
        let prob = testutil::problem(&s);
        let mut rng = stream(5, &[]);
        let mut pops = vec![
            Population::random(&prob, 4, 10, &mut rng),
            Population::random(&prob, 4, 10, &mut rng),
        ];
        let best0 = pops[0].g_best().unwrap().report.clone();
        migrate(&mut pops, 1).unwrap();
        assert!(pops.iter().all(|p| p.len() == 4));
        assert!(!best0.is_better_than(&pops[1].g_best().unwrap().report));
        let mut single = vec![Population::random(&prob, 4, 10, &mut rng)];
        let before = single.clone();
        migrate(&mut single, 1).unwrap();
        assert_eq!(single, before);
    }

    #[test]
    fn decay_and_inject() {
        let s = testutil::scenario(25);
        let prob = testutil::problem(&s);
        let mut rng = stream(6, &[]);
        let mut pop = Population::random(&prob, 4, 10, &mut rng);
        decay(&mut pop, 0.5);
        assert_eq!(pop.scale, 0.5);
        inject(&mut pop, 3, &prob, &mut rng);
        assert_eq!(pop.len(), 7);
        assert!(pop.reports().is_ok());
    }
}
