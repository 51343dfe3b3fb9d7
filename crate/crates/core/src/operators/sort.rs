use serde::{Deserialize, Serialize};

use super::Population;
use crate::error::Result;
use crate::evaluation::EvaluationReport;

/// Constraint-handling rule used to order a population.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SortStrategy {
    /// `F + λ(t)·violation`, `λ` growing linearly from start to end.
    Penalty { lambda_start: f64, lambda_end: f64 },
    /// Feasible members by `F`, then Pareto fronts over `(F, violation)`,
    /// each front ordered by `F + weight·violation`.
    NonDominated { weight: f64 },
    /// Violation up to `α(t) = α0·(1 − t/T)^power` counts as feasible.
    AlphaLevel { alpha0: f64, power: f64 },
    /// Number of constraints violated beyond `tol`, ties by `F`.
    ViolationCount { tol: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SortOrder {
    /// Member indices, best first.
    pub order: Vec<usize>,
    pub strategy: SortStrategy,
}

fn progress(t: usize, horizon: usize) -> f64 {
    if horizon == 0 {
        1.0
    } else {
        (t as f64 / horizon as f64).min(1.0)
    }
}

impl SortStrategy {
    pub fn penalty_weight(&self, t: usize, horizon: usize) -> Option<f64> {
        match *self {
            SortStrategy::Penalty { lambda_start, lambda_end } => {
                Some(lambda_start + (lambda_end - lambda_start) * progress(t, horizon))
            }
            _ => None,
        }
    }

    pub fn alpha(&self, t: usize, horizon: usize) -> Option<f64> {
        match *self {
            SortStrategy::AlphaLevel { alpha0, power } => Some(alpha0 * (1.0 - progress(t, horizon)).powf(power)),
            _ => None,
        }
    }
}

fn fitness(r: &EvaluationReport) -> f64 {
    if r.fitness.is_nan() {
        f64::INFINITY
    } else {
        r.fitness
    }
}

fn by_key<K: Fn(&EvaluationReport) -> (f64, f64)>(reports: &[&EvaluationReport], key: K) -> Vec<usize> {
    let keys: Vec<(f64, f64)> = reports.iter().map(|r| key(r)).collect();
    let mut idx: Vec<usize> = (0..reports.len()).collect();
    idx.sort_by(|&a, &b| {
        keys[a]
            .0
            .total_cmp(&keys[b].0)
            .then(keys[a].1.total_cmp(&keys[b].1))
            .then(a.cmp(&b))
    });
    idx
}

fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

fn non_dominated(reports: &[&EvaluationReport], weight: f64) -> Vec<usize> {
    let feasible: Vec<usize> = (0..reports.len()).filter(|&i| reports[i].feasible).collect();
    let mut order = feasible.clone();
    order.sort_by(|&a, &b| fitness(reports[a]).total_cmp(&fitness(reports[b])).then(a.cmp(&b)));

    let obj: Vec<(f64, f64)> = reports.iter().map(|r| (fitness(r), r.violation())).collect();
    let mut rest: Vec<usize> = (0..reports.len()).filter(|&i| !reports[i].feasible).collect();
    while !rest.is_empty() {
        let (mut front, others): (Vec<usize>, Vec<usize>) = rest
            .iter()
            .partition(|&&i| !rest.iter().any(|&j| j != i && dominates(obj[j], obj[i])));
        if front.is_empty() {
            // Only possible with NaN objectives; keep the remainder as one front.
            front = others.clone();
        }
        let score = |i: usize| obj[i].0 + weight * obj[i].1;
        front.sort_by(|&a, &b| score(a).total_cmp(&score(b)).then(a.cmp(&b)));
        order.extend(&front);
        rest = if front.len() == rest.len() { Vec::new() } else { others };
    }
    order
}

/// Orders the population best-first under `strategy` at generation `t`
/// of `horizon`.
pub fn sort_population(pop: &Population, strategy: &SortStrategy, t: usize, horizon: usize) -> Result<SortOrder> {
    let reports = pop.reports()?;
    let order = match *strategy {
        SortStrategy::Penalty { .. } => {
            let lambda = strategy.penalty_weight(t, horizon).expect("penalty");
            by_key(&reports, |r| {
                let v = r.violation();
                let p = if v > 0.0 { lambda * v } else { 0.0 };
                (fitness(r) + p, 0.0)
            })
        }
        SortStrategy::NonDominated { weight } => non_dominated(&reports, weight),
        SortStrategy::AlphaLevel { .. } => {
            let alpha = strategy.alpha(t, horizon).expect("alpha level");
            let mut idx: Vec<usize> = (0..reports.len()).collect();
            let key = |r: &EvaluationReport| {
                let v = r.violation();
                if v <= alpha {
                    (false, 0.0)
                } else {
                    (true, v)
                }
            };
            idx.sort_by(|&a, &b| {
                let (ka, kb) = (key(reports[a]), key(reports[b]));
                ka.0.cmp(&kb.0)
                    .then(ka.1.total_cmp(&kb.1))
                    .then(fitness(reports[a]).total_cmp(&fitness(reports[b])))
                    .then(a.cmp(&b))
            });
            idx
        }
        SortStrategy::ViolationCount { tol } => by_key(&reports, |r| (r.violation_count(tol) as f64, fitness(r))),
    };
    Ok(SortOrder {
        order,
        strategy: *strategy,
    })
}

impl SortOrder {
    /// Position of each member in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &i) in self.order.iter().enumerate() {
            pos[i] = p;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::Constraints;
    use crate::operators::Individual;
    use crate::pathmodel::ControlPath;

    fn pop_with(reports: Vec<EvaluationReport>) -> Population {
        let members = reports
            .into_iter()
            .map(|r| {
                let mut ind = Individual::new(ControlPath::from_points(&[], 1.0));
                ind.report = Some(r);
                ind
            })
            .collect();
        Population::new(members, 10)
    }

    fn rep(f: f64, g3: f64, h1: usize) -> EvaluationReport {
        EvaluationReport::new([0.0; 5], f, Constraints { g1: -1.0, g2: -1.0, g3, h1, h2: 0 })
    }

    const ALL: [SortStrategy; 4] = [
        SortStrategy::Penalty { lambda_start: 1.0, lambda_end: 100.0 },
        SortStrategy::NonDominated { weight: 1.0 },
        SortStrategy::AlphaLevel { alpha0: 1.0, power: 1.0 },
        SortStrategy::ViolationCount { tol: 0.0 },
    ];

    #[test]
    fn all_feasible_orders_by_fitness() {
        let pop = pop_with(vec![rep(3.0, -1.0, 0), rep(1.0, -1.0, 0), rep(2.0, -1.0, 0)]);
        for s in ALL {
            assert_eq!(sort_population(&pop, &s, 3, 10).unwrap().order, vec![1, 2, 0]);
        }
    }

    #[test]
    fn penalty_end_ranks_infeasible_last() {
        let pop = pop_with(vec![rep(0.1, 0.5, 0), rep(3.0, -1.0, 0), rep(2.0, -1.0, 0)]);
        let s = SortStrategy::Penalty { lambda_start: 0.0, lambda_end: 1000.0 };
        assert_eq!(sort_population(&pop, &s, 10, 10).unwrap().order, vec![2, 1, 0]);
        assert_eq!(sort_population(&pop, &s, 0, 10).unwrap().order[0], 0);
    }

    #[test]
    fn violation_count_orders_by_count() {
        let pop = pop_with(vec![rep(1.0, -1.0, 0), rep(1.0, 1.0, 1), rep(1.0, 1.0, 0)]);
        let s = SortStrategy::ViolationCount { tol: 0.0 };
        assert_eq!(sort_population(&pop, &s, 0, 10).unwrap().order, vec![0, 2, 1]);
    }

    #[test]
    fn alpha_level_relaxes_early() {
        let pop = pop_with(vec![rep(5.0, -1.0, 0), rep(1.0, 0.2, 0)]);
        let s = SortStrategy::AlphaLevel { alpha0: 0.5, power: 1.0 };
        assert_eq!(sort_population(&pop, &s, 0, 10).unwrap().order, vec![1, 0]);
        assert_eq!(sort_population(&pop, &s, 10, 10).unwrap().order, vec![0, 1]);
    }

    #[test]
    fn non_dominated_puts_feasible_first_then_fronts() {
        let pop = pop_with(vec![rep(1.0, 2.0, 0), rep(9.0, -1.0, 0), rep(0.5, 1.0, 0), rep(2.0, 3.0, 0)]);
        let s = SortStrategy::NonDominated { weight: 1.0 };
        assert_eq!(sort_population(&pop, &s, 0, 10).unwrap().order, vec![1, 2, 0, 3]);
    }

    #[test]
    fn unevaluated_member_is_an_error() {
        let mut pop = pop_with(vec![rep(1.0, -1.0, 0)]);
        pop.members[0].report = None;
        assert!(sort_population(&pop, &ALL[0], 0, 1).is_err());
    }
}
