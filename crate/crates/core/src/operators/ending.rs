use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Population;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EndMode {
    /// Stop once `t` reaches the population horizon.
    Generations,
    /// Stop once the run clock reaches `seconds`.
    WallTime { seconds: f64 },
}

/// Premature-ending test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Case1 {
    None,
    /// Best unchanged for this many generations.
    Stagnation(usize),
    /// At least this percentage of members share one genotype.
    Homogenization(f64),
    /// Best fitness at or below this value on a feasible path.
    Goal(f64),
}

/// Action on a population that resembles one already stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case2 {
    None,
    /// Re-seed the whole population.
    Reset,
    /// Stop the population.
    Kill,
    /// Re-seed the worse half.
    Adjust,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StopReason {
    Generations,
    WallTime,
    Stagnation,
    Homogenization,
    Goal,
}

impl StopReason {
    /// Whether the stop came from a premature-ending test.
    pub fn is_premature(self) -> bool {
        matches!(self, StopReason::Stagnation | StopReason::Homogenization | StopReason::Goal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EndDecision {
    Continue,
    Stop(StopReason),
}

/// Share of members carrying the most common exact genotype.
pub fn homogeneity(pop: &Population) -> f64 {
    if pop.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
    for m in &pop.members {
        let key = m.path.genes.iter().map(|g| g.to_bits()).collect();
        *counts.entry(key).or_default() += 1;
    }
    *counts.values().max().expect("non-empty") as f64 / pop.len() as f64
}

/// `elapsed` is the run clock in seconds.
pub fn ending_check(pop: &Population, mode: &EndMode, case1: &Case1, elapsed: f64) -> EndDecision {
    match *mode {
        EndMode::Generations if pop.t >= pop.horizon => return EndDecision::Stop(StopReason::Generations),
        EndMode::WallTime { seconds } if elapsed >= seconds => return EndDecision::Stop(StopReason::WallTime),
        _ => {}
    }
    let hit = match *case1 {
        Case1::None => None,
        Case1::Stagnation(n) => (pop.stale >= n).then_some(StopReason::Stagnation),
        Case1::Homogenization(pct) => {
            (homogeneity(pop) * 100.0 >= pct && pop.len() > 1).then_some(StopReason::Homogenization)
        }
        Case1::Goal(target) => pop
            .g_best
            .as_ref()
            .is_some_and(|b| b.report.feasible && b.report.fitness <= target)
            .then_some(StopReason::Goal),
    };
    hit.map_or(EndDecision::Continue, EndDecision::Stop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::testutil;
    use crate::rng::stream;

    fn pop() -> Population {
        let s = testutil::scenario(11);
        let prob = testutil::problem(&s);
        Population::random(&prob, 5, 10, &mut stream(1, &[]))
    }

    #[test]
    fn horizon_stops_generation_mode() {
        let mut p = pop();
        assert_eq!(ending_check(&p, &EndMode::Generations, &Case1::None, 0.0), EndDecision::Continue);
        p.t = 10;
        assert_eq!(
            ending_check(&p, &EndMode::Generations, &Case1::None, 0.0),
            EndDecision::Stop(StopReason::Generations)
        );
    }

    #[test]
    fn clock_stops_wall_time_mode() {
        let p = pop();
        let mode = EndMode::WallTime { seconds: 2.0 };
        assert_eq!(ending_check(&p, &mode, &Case1::None, 1.9), EndDecision::Continue);
        assert_eq!(ending_check(&p, &mode, &Case1::None, 2.0), EndDecision::Stop(StopReason::WallTime));
    }

    #[test]
    fn stagnation_after_n_generations() {
        let mut p = pop();
        p.stale = 4;
        assert_eq!(ending_check(&p, &EndMode::Generations, &Case1::Stagnation(5), 0.0), EndDecision::Continue);
        p.stale = 5;
        assert_eq!(
            ending_check(&p, &EndMode::Generations, &Case1::Stagnation(5), 0.0),
            EndDecision::Stop(StopReason::Stagnation)
        );
    }

    #[test]
    fn distinct_members_are_not_homogeneous() {
        let mut p = pop();
        assert!((homogeneity(&p) - 0.2).abs() < 1e-12);
        let h = Case1::Homogenization(100.0);
        assert_eq!(ending_check(&p, &EndMode::Generations, &h, 0.0), EndDecision::Continue);
        let first = p.members[0].clone();
        p.members.iter_mut().for_each(|m| *m = first.clone());
        assert_eq!(ending_check(&p, &EndMode::Generations, &h, 0.0), EndDecision::Stop(StopReason::Homogenization));
    }

    #[test]
    fn goal_needs_feasible_best() {
        let mut p = pop();
        let b = p.g_best.as_mut().unwrap();
        b.report.feasible = true;
        b.report.fitness = 3.0;
        let decide = |p: &Population, g| ending_check(p, &EndMode::Generations, &Case1::Goal(g), 0.0);
        assert_eq!(decide(&p, 3.0), EndDecision::Stop(StopReason::Goal));
        assert_eq!(decide(&p, 2.9), EndDecision::Continue);
        p.g_best.as_mut().unwrap().report.feasible = false;
        assert_eq!(decide(&p, 3.0), EndDecision::Continue);
    }
}
