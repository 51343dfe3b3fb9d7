//! The meta-level genetic algorithm over planner genomes.
//!
//! A genome is scored by running its planner on every training scenario
//! under a fixed set of planner seeds. The seeds are shared by all genomes,
//! so genomes are compared on common random numbers and scores can be
//! cached by genome.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run_planner_with, RunBudget};
use crate::error::{Error, Result};
use crate::evaluation::{EvalSettings, EvaluationReport};
use crate::genome::{crossover_genome, decode_with, mutate_genome, random_genome, Codebook, PlannerGenome};
use crate::rng::{derive_seed, stream, PlannerRng};
use crate::scenario::Scenario;

const LABEL_POOL: u64 = 11;
const LABEL_EPOCH: u64 = 12;
const LABEL_PLANNER: u64 = 13;
const LABEL_REFILL: u64 = 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EPConfig {
    pub pool_size: usize,
    pub w1: f64,
    pub w2: f64,
    /// Expected planner running time `E_t`, run-clock seconds.
    pub expected_time: f64,
    /// Variation epochs after the initial pool is scored.
    pub epochs: Option<usize>,
    /// Run-clock seconds of planner time the evolution may spend.
    pub max_seconds: Option<f64>,
    /// Limits for each planner run; its seed is ignored.
    pub planner_budget: RunBudget,
    /// Planner seeds each genome is scored under.
    pub seeds_per_genome: usize,
    /// Weight of constraint violation added to `F` for infeasible runs.
    pub penalty: f64,
    pub p_bit: f64,
    /// Best genomes copied unchanged into the next pool.
    pub elites: usize,
    /// Share of the run, at the end, during which over-time genomes are
    /// removed.
    pub late_fraction: f64,
    pub seed: u64,
    /// Worker threads for genome scoring; 0 uses the global pool.
    pub workers: usize,
}

impl Default for EPConfig {
    fn default() -> Self {
        Self {
            pool_size: 20,
            w1: 0.8,
            w2: 0.2,
            expected_time: 0.1,
            epochs: Some(10),
            max_seconds: None,
            planner_budget: RunBudget {
                max_generations: 200,
                max_wall_time: 0.3,
                seed: 0,
            },
            seeds_per_genome: 3,
            penalty: 10.0,
            p_bit: 2.0 / 64.0,
            elites: 1,
            late_fraction: 1.0 / 3.0,
            seed: 0,
            workers: 0,
        }
    }
}

impl EPConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.pool_size < 2 {
            return bad("pool size must be at least 2");
        }
        if !(self.w1 >= 0.0 && self.w2 >= 0.0) || (self.w1 + self.w2 - 1.0).abs() > 1e-12 {
            return bad("W1 and W2 must be non-negative and sum to 1");
        }
        if !(self.expected_time > 0.0 && self.expected_time.is_finite()) {
            return bad("expected running time must be positive");
        }
        if self.epochs.is_none() && self.max_seconds.is_none() {
            return bad("an epoch count or a time budget is required");
        }
        if self.max_seconds.is_some_and(|s| s.is_nan() || s < 0.0) {
            return bad("time budget must be non-negative");
        }
        if self.seeds_per_genome == 0 {
            return bad("at least one planner seed per genome is required");
        }
        if self.penalty.is_nan() || self.penalty < 0.0 {
            return bad("violation penalty must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.p_bit) {
            return bad("bit-flip probability must be in [0, 1]");
        }
        if self.elites >= self.pool_size {
            return bad("elites must leave room for offspring");
        }
        if !(0.0..=1.0).contains(&self.late_fraction) {
            return bad("late fraction must be in [0, 1]");
        }
        self.planner_budget.validate()
    }
}

/// `1 / (W1·F + W2·F_t/E_t)`, with `F` raised by the weighted violation
/// when the run is infeasible.
pub fn fitness_ep(report: &EvaluationReport, elapsed: f64, cfg: &EPConfig) -> Result<f64> {
    if elapsed.is_nan() || elapsed < 0.0 {
        return Err(Error::InvalidInput(format!("running time {elapsed} is negative")));
    }
    let f = if report.feasible {
        report.fitness
    } else {
        report.fitness + cfg.penalty * report.violation()
    };
    let denom = cfg.w1 * f + cfg.w2 * elapsed / cfg.expected_time;
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::InvalidInput(format!("fitness denominator {denom} is not positive")));
    }
    Ok(1.0 / denom)
}

/// Linear scores from 0.8 (worst) to 1.2 (best); tied fitnesses share the
/// mean score of their positions.
pub fn rank_planners(fitness: &[f64]) -> Vec<f64> {
    let n = fitness.len();
    if n == 1 {
        return vec![1.2];
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
    let mut scores = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && fitness[idx[end]].total_cmp(&fitness[idx[start]]).is_eq() {
            end += 1;
        }
        let u = (start + end - 1) as f64 / 2.0 / (n - 1) as f64;
        for &i in &idx[start..end] {
            scores[i] = 0.8 * (1.0 - u) + 1.2 * u;
        }
        start = end;
    }
    scores
}

/// Mean results of one genome over all scenarios and planner seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenomeScore {
    pub fitness_ep: f64,
    pub mean_fitness: f64,
    pub mean_violation: f64,
    pub mean_elapsed: f64,
    /// Mean `F_EP` per scenario.
    pub per_scenario: Vec<f64>,
    /// Run-clock seconds spent scoring.
    pub cost: f64,
}

/// Planner seed for run `k` on scenario `s`.
pub fn planner_seed(cfg: &EPConfig, scenario: usize, k: usize) -> u64 {
    derive_seed(cfg.seed, &[LABEL_PLANNER, scenario as u64, k as u64])
}

pub fn score_genome(
    g: PlannerGenome,
    scenarios: &[Scenario],
    cfg: &EPConfig,
    codebook: &Codebook,
    settings: EvalSettings,
) -> Result<GenomeScore> {
    let planner = codebook.resolve(&decode_with(g, codebook));
    let runs = (scenarios.len() * cfg.seeds_per_genome) as f64;
    let (mut f, mut v, mut t, mut fit) = (0.0, 0.0, 0.0, 0.0);
    let mut per_scenario = Vec::with_capacity(scenarios.len());
    for (s, scenario) in scenarios.iter().enumerate() {
        let mut sum = 0.0;
        for k in 0..cfg.seeds_per_genome {
            let budget = RunBudget {
                seed: planner_seed(cfg, s, k),
                ..cfg.planner_budget
            };
            let run = run_planner_with(&planner, scenario, &budget, settings)?;
            let fe = fitness_ep(&run.best_report, run.elapsed, cfg)?;
            sum += fe;
            f += run.best_report.fitness;
            v += run.best_report.violation();
            t += run.elapsed;
        }
        fit += sum;
        per_scenario.push(sum / cfg.seeds_per_genome as f64);
    }
    Ok(GenomeScore {
        fitness_ep: fit / runs,
        mean_fitness: f / runs,
        mean_violation: v / runs,
        mean_elapsed: t / runs,
        per_scenario,
        cost: t,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub genomes: Vec<PlannerGenome>,
    pub fitness: Vec<f64>,
    pub elapsed: Vec<f64>,
    /// Best `F_EP` seen up to and including this epoch.
    pub best_ever: f64,
    /// Run-clock seconds spent so far.
    pub spent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EPResult {
    pub best_genome: PlannerGenome,
    pub best_fitness: f64,
    pub best_score: GenomeScore,
    pub lineage: Vec<EpochRecord>,
    /// Run-clock seconds spent on planner runs.
    pub total_elapsed: f64,
}

struct Evolution<'a> {
    scenarios: &'a [Scenario],
    cfg: &'a EPConfig,
    codebook: &'a Codebook,
    settings: EvalSettings,
    cache: HashMap<PlannerGenome, GenomeScore>,
    spent: f64,
}

impl Evolution<'_> {
    fn score_pool(&mut self, pool: &[PlannerGenome]) -> Result<Vec<GenomeScore>> {
        let mut todo: Vec<PlannerGenome> = pool.iter().copied().filter(|g| !self.cache.contains_key(g)).collect();
        todo.sort_unstable();
        todo.dedup();
        let (scenarios, cfg, codebook, settings) = (self.scenarios, self.cfg, self.codebook, self.settings);
        let work = || -> Vec<Result<GenomeScore>> {
            todo.par_iter()
                .map(|&g| score_genome(g, scenarios, cfg, codebook, settings))
                .collect()
        };
        let results = if cfg.workers > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?
                .install(work)
        } else {
            work()
        };
        for (g, r) in todo.iter().zip(results) {
            let s = r?;
            self.spent += s.cost;
            self.cache.insert(*g, s);
        }
        Ok(pool.iter().map(|g| self.cache[g].clone()).collect())
    }

    fn late(&self, epoch: usize) -> bool {
        let by_epoch = self
            .cfg
            .epochs
            .is_some_and(|e| e > 0 && epoch as f64 >= e as f64 * (1.0 - self.cfg.late_fraction));
        let by_time = self
            .cfg
            .max_seconds
            .is_some_and(|s| self.spent >= s * (1.0 - self.cfg.late_fraction));
        by_epoch || by_time
    }

    fn done(&self, epoch: usize) -> bool {
        self.cfg.epochs.is_some_and(|e| epoch >= e) || self.cfg.max_seconds.is_some_and(|s| self.spent >= s)
    }
}

fn roulette(scores: &[f64], rng: &mut PlannerRng) -> usize {
    let total: f64 = scores.iter().sum();
    let mut x = rng.random_range(0.0..total);
    for (i, s) in scores.iter().enumerate() {
        if x < *s {
            return i;
        }
        x -= s;
    }
    scores.len() - 1
}

/// Evolves planner genomes against `scenarios`. `initial` seeds the pool,
/// which is padded with random genomes.
pub fn evolve(initial: &[PlannerGenome], scenarios: &[Scenario], cfg: &EPConfig) -> Result<EPResult> {
    evolve_with(initial, scenarios, cfg, Codebook::builtin(), EvalSettings::default())
}

pub fn evolve_with(
    initial: &[PlannerGenome],
    scenarios: &[Scenario],
    cfg: &EPConfig,
    codebook: &Codebook,
    settings: EvalSettings,
) -> Result<EPResult> {
    cfg.validate()?;
    if scenarios.is_empty() {
        return Err(Error::InvalidInput("at least one training scenario is required".into()));
    }
    let mut rng = stream(cfg.seed, &[LABEL_POOL]);
    let mut pool: Vec<PlannerGenome> = initial.iter().copied().take(cfg.pool_size).collect();
    while pool.len() < cfg.pool_size {
        pool.push(random_genome(&mut rng));
    }
    let mut ev = Evolution {
        scenarios,
        cfg,
        codebook,
        settings,
        cache: HashMap::new(),
        spent: 0.0,
    };
    let mut lineage = Vec::new();
    let mut best: Option<(PlannerGenome, GenomeScore)> = None;
    let mut epoch = 0;
    loop {
        let scores = ev.score_pool(&pool)?;
        for (g, s) in pool.iter().zip(&scores) {
            if best.as_ref().is_none_or(|(_, b)| s.fitness_ep > b.fitness_ep) {
                best = Some((*g, s.clone()));
            }
        }
        let best_ever = best.as_ref().expect("pool is non-empty").1.fitness_ep;
        lineage.push(EpochRecord {
            epoch,
            genomes: pool.clone(),
            fitness: scores.iter().map(|s| s.fitness_ep).collect(),
            elapsed: scores.iter().map(|s| s.mean_elapsed).collect(),
            best_ever,
            spent: ev.spent,
        });
        log::info!("epoch {epoch}: best F_EP {best_ever:.4}, spent {:.2}s", ev.spent);
        if ev.done(epoch) {
            break;
        }

        let mut rng = stream(cfg.seed, &[LABEL_EPOCH, epoch as u64]);
        let (mut survivors, mut fits): (Vec<PlannerGenome>, Vec<f64>) = (pool.clone(), scores.iter().map(|s| s.fitness_ep).collect());
        if ev.late(epoch) {
            let keep: Vec<bool> = scores.iter().map(|s| s.mean_elapsed <= cfg.expected_time).collect();
            let removed = keep.iter().filter(|k| !**k).count();
            survivors = survivors.into_iter().zip(&keep).filter(|(_, k)| **k).map(|(g, _)| g).collect();
            fits = fits.into_iter().zip(&keep).filter(|(_, k)| **k).map(|(f, _)| f).collect();
            if removed > 0 {
                log::info!("epoch {epoch}: removed {removed} over-time genome(s)");
            }
            if survivors.len() < 2 {
                log::warn!("epoch {epoch}: pool collapsed to {}, refilling", survivors.len());
                let mut refill = stream(cfg.seed, &[LABEL_REFILL, epoch as u64]);
                let extra: Vec<PlannerGenome> = (survivors.len()..2).map(|_| random_genome(&mut refill)).collect();
                let extra_scores = ev.score_pool(&extra)?;
                for (g, s) in extra.into_iter().zip(extra_scores) {
                    survivors.push(g);
                    fits.push(s.fitness_ep);
                }
            }
        }
        let ranks = rank_planners(&fits);
        let mut order: Vec<usize> = (0..survivors.len()).collect();
        order.sort_by(|&a, &b| fits[b].total_cmp(&fits[a]).then(a.cmp(&b)));
        let mut next: Vec<PlannerGenome> = order.iter().take(cfg.elites).map(|&i| survivors[i]).collect();
        while next.len() < cfg.pool_size {
            let a = survivors[roulette(&ranks, &mut rng)];
            let b = survivors[roulette(&ranks, &mut rng)];
            let (ca, cb) = crossover_genome(a, b, &mut rng);
            next.push(mutate_genome(ca, cfg.p_bit, &mut rng)?);
            if next.len() < cfg.pool_size {
                next.push(mutate_genome(cb, cfg.p_bit, &mut rng)?);
            }
        }
        pool = next;
        epoch += 1;
    }
    let (best_genome, best_score) = best.expect("at least one epoch");
    Ok(EPResult {
        best_genome,
        best_fitness: best_score.fitness_ep,
        best_score,
        lineage,
        total_elapsed: ev.spent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::EvaluationReport;

    fn report(fitness: f64, feasible: bool) -> EvaluationReport {
        EvaluationReport {
            f: [0.0; 5],
            fitness,
            g: [if feasible { -1.0 } else { 0.5 }, -1.0, -1.0],
            h1: 0,
            h2: 0,
            feasible,
        }
    }

    #[test]
    fn fitness_ep_substitution() {
        let cfg = EPConfig {
            w1: 1.0,
            w2: 0.0,
            ..EPConfig::default()
        };
        assert_eq!(fitness_ep(&report(2.0, true), 0.3, &cfg).unwrap(), 0.5);
        let cfg = EPConfig {
            w1: 0.5,
            w2: 0.5,
            expected_time: 0.2,
            ..EPConfig::default()
        };
        assert_eq!(fitness_ep(&report(1.0, true), 0.2, &cfg).unwrap(), 1.0);
        let a = fitness_ep(&report(1.0, true), 0.1, &cfg).unwrap();
        let b = fitness_ep(&report(1.0, true), 0.3, &cfg).unwrap();
        assert!(a > b);
    }

    #[test]
    fn infeasible_runs_are_penalized() {
        let cfg = EPConfig {
            w1: 1.0,
            w2: 0.0,
            penalty: 10.0,
            ..EPConfig::default()
        };
        // F = 2 plus 10 * 0.5.
        assert!((fitness_ep(&report(2.0, false), 0.0, &cfg).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        assert!(fitness_ep(&report(-2.0, true), 0.0, &cfg).is_err());
        assert!(fitness_ep(&report(2.0, true), -1.0, &cfg).is_err());
    }

    #[test]
    fn rank_scores_span_and_ties() {
        assert_eq!(rank_planners(&[1.0, 3.0]), vec![0.8, 1.2]);
        let s = rank_planners(&[2.0, 2.0, 2.0]);
        assert!(s.iter().all(|v| (v - s[0]).abs() < 1e-15));
        assert_eq!(rank_planners(&[5.0]), vec![1.2]);
        let s = rank_planners(&[0.3, 0.9, 0.1, 0.5]);
        let best = s.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(best, 1);
        assert!((s[2] - 0.8).abs() < 1e-12 && (s[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(EPConfig::default().validate().is_ok());
        assert!(EPConfig { pool_size: 1, ..EPConfig::default() }.validate().is_err());
        assert!(EPConfig { w1: 0.7, w2: 0.2, ..EPConfig::default() }.validate().is_err());
        assert!(EPConfig { expected_time: 0.0, ..EPConfig::default() }.validate().is_err());
        assert!(EPConfig { epochs: None, max_seconds: None, ..EPConfig::default() }.validate().is_err());
    }
}
