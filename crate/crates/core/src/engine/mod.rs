//! Runs one decoded planner on a scenario.
//!
//! Time is measured on a run clock that charges a fixed cost per scored
//! waypoint, so ending criteria, budgets and the meta-level fitness are
//! reproducible bit for bit on any machine and under any parallelism.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{EvalSettings, EvaluationReport};
use crate::genome::{Codebook, Division, ExploitOp, ExploreOp, Planner, PlannerConfig};
use crate::operators::{
    antibody_scores, cellular_select, cinf_step, commensalism_step, crossover_step, de_step, elite_count,
    ending_check, forbid_clones, migrate, mutate_step, pfih, pso_step, pus_step, rank_scores, repair, safari_step,
    select, sgwo_step, sort_population, Best, Case2, EndDecision, Individual, Population, Problem,
    StopReason,
};
use crate::pathmodel::{ControlPath, Waypoints};
use crate::rng::{stream, PlannerRng};
use crate::scenario::Scenario;

/// Run-clock charge per scored waypoint, seconds. Calibrated against an
/// optimized build on a single core.
pub const SECONDS_PER_WAYPOINT: f64 = 3.5e-7;

/// Stream labels; kept distinct so no two phases share random numbers.
const LABEL_INIT: u64 = 1;
const LABEL_GENERATION: u64 = 2;
const LABEL_RESEED: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunBudget {
    pub max_generations: usize,
    /// Run-clock seconds; may be infinite.
    pub max_wall_time: f64,
    pub seed: u64,
}

impl RunBudget {
    pub fn generations(max_generations: usize, seed: u64) -> Self {
        Self {
            max_generations,
            max_wall_time: f64::INFINITY,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_wall_time.is_nan() || self.max_wall_time < 0.0 {
            return Err(Error::Config(format!("wall-time limit {} is not a duration", self.max_wall_time)));
        }
        Ok(())
    }
}

/// One line of run telemetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub violation: f64,
    pub feasible: bool,
    pub evaluations: u64,
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerRun {
    pub best_control: ControlPath,
    pub best_path: Waypoints,
    pub best_report: EvaluationReport,
    /// Run-clock seconds.
    pub elapsed: f64,
    pub evaluations: u64,
    pub generations_executed: usize,
    pub restarts: usize,
    pub trace: Vec<TraceRecord>,
    pub stop_reason: StopReason,
}

impl PlannerRun {
    /// Telemetry as one JSON object per line.
    pub fn telemetry_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("plain record") + "\n")
            .collect()
    }
}

struct Slot {
    pop: Population,
    stopped: Option<StopReason>,
}

/// A planner run in progress.
pub struct Engine<'a> {
    planner: Planner,
    prob: Problem<'a>,
    slots: Vec<Slot>,
    budget: RunBudget,
    generation: usize,
    best: Best,
    trace: Vec<TraceRecord>,
    stopped: Option<StopReason>,
    restarts: usize,
}

fn band_init(prob: &Problem, rng: &mut PlannerRng, band: usize, bands: usize) -> ControlPath {
    let mut p = prob.random_path(rng);
    if bands > 1 {
        let (lo, hi) = (prob.bounds.y_min, prob.bounds.y_max);
        let w = (hi - lo) / bands as f64;
        for i in 0..p.n() {
            let y = p.genes[3 * i + 1];
            let t = if hi > lo { (y - lo) / (hi - lo) } else { 0.5 };
            p.genes[3 * i + 1] = lo + w * (band as f64 + t);
        }
        prob.clamp(&mut p);
    }
    p
}

fn fresh_population(prob: &Problem, planner: &Planner, k: usize, rng: &mut PlannerRng) -> Population {
    let bands = if planner.division == Division::Cegda { planner.n_populations } else { 1 };
    let members = (0..planner.individuals)
        .map(|_| Individual::new(band_init(prob, rng, k, bands)))
        .collect();
    let mut pop = Population::new(members, planner.horizon);
    pop.refresh(prob);
    pop
}

fn rms(a: &ControlPath, b: &ControlPath) -> f64 {
    let n = a.genes.len().max(1) as f64;
    (a.genes.iter().zip(&b.genes).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / n).sqrt()
}

impl<'a> Engine<'a> {
    pub fn new(planner: &Planner, scenario: &'a Scenario, budget: &RunBudget, settings: EvalSettings) -> Result<Self> {
        budget.validate()?;
        if budget.max_wall_time <= 0.0 {
            return Err(Error::BudgetExhausted);
        }
        let prob = Problem::new(scenario, planner.n_control_points, planner.smoother, settings)?;
        let slots: Vec<Slot> = (0..planner.n_populations)
            .map(|k| {
                let mut rng = stream(budget.seed, &[LABEL_INIT, k as u64]);
                Slot {
                    pop: fresh_population(&prob, planner, k, &mut rng),
                    stopped: None,
                }
            })
            .collect();
        let best = Self::best_of(&slots)?;
        let mut engine = Self {
            planner: *planner,
            prob,
            slots,
            budget: *budget,
            generation: 0,
            best,
            trace: Vec::new(),
            stopped: None,
            restarts: 0,
        };
        engine.record();
        engine.check_budget();
        Ok(engine)
    }

    fn best_of(slots: &[Slot]) -> Result<Best> {
        let mut best: Option<&Best> = None;
        for s in slots {
            let b = s.pop.g_best()?;
            if best.is_none_or(|c| b.report.is_better_than(&c.report)) {
                best = Some(b);
            }
        }
        best.cloned().ok_or(Error::PopulationTooSmall { need: 1, have: 0 })
    }

    /// Run-clock seconds consumed so far.
    pub fn elapsed(&self) -> f64 {
        self.prob.evaluations() as f64 * self.prob.waypoint_count() as f64 * SECONDS_PER_WAYPOINT
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn is_stopped(&self) -> bool {
        self.stopped.is_some()
    }

    pub fn best(&self) -> &Best {
        &self.best
    }

    pub fn populations(&self) -> impl Iterator<Item = &Population> {
        self.slots.iter().map(|s| &s.pop)
    }

    pub fn problem(&self) -> &Problem<'a> {
        &self.prob
    }

    fn record(&mut self) {
        let r = &self.best.report;
        self.trace.push(TraceRecord {
            generation: self.generation,
            best_fitness: r.fitness,
            violation: r.violation(),
            feasible: r.feasible,
            evaluations: self.prob.evaluations(),
            elapsed: self.elapsed(),
        });
    }

    fn check_budget(&mut self) {
        if self.stopped.is_some() {
            return;
        }
        if self.generation >= self.budget.max_generations {
            self.stopped = Some(StopReason::Generations);
        } else if self.elapsed() >= self.budget.max_wall_time {
            self.stopped = Some(StopReason::WallTime);
        }
    }

    /// Applies one generation to every live population.
    pub fn step_generation(&mut self) -> Result<()> {
        if let Some(r) = self.stopped {
            return Err(Error::Stopped(format!("{r:?}")));
        }
        let t = self.generation;
        for k in 0..self.slots.len() {
            if self.slots[k].stopped.is_some() {
                continue;
            }
            let mut rng = stream(self.budget.seed, &[LABEL_GENERATION, k as u64, t as u64]);
            step_population(&mut self.slots[k].pop, &self.planner, &self.prob, &mut rng)?;
        }
        self.generation += 1;
        self.exchange()?;
        let best = Self::best_of(&self.slots)?;
        if best.report.is_better_than(&self.best.report) {
            self.best = best;
        }
        self.endings()?;
        self.record();
        self.check_budget();
        Ok(())
    }

    fn exchange(&mut self) -> Result<()> {
        let interval = self.planner.migration_interval;
        if interval == 0 || self.slots.len() < 2 || !self.generation.is_multiple_of(interval) {
            return Ok(());
        }
        let count = self.planner.fixed.migration_count;
        let live: Vec<usize> = (0..self.slots.len()).filter(|&k| self.slots[k].stopped.is_none()).collect();
        if live.len() < 2 {
            return Ok(());
        }
        let mut pops: Vec<Population> = live.iter().map(|&k| self.slots[k].pop.clone()).collect();
        if self.planner.division == Division::Maps {
            // Broadcast: the overall best replaces every population's worst.
            let best = Self::best_of(&self.slots)?;
            for p in &mut pops {
                let order = p.order_by_report()?;
                let worst = *order.last().expect("non-empty");
                let mut m = Individual::new(best.path.clone());
                m.report = Some(best.report.clone());
                p.members[worst] = m;
                p.refresh(&self.prob);
            }
        } else {
            migrate(&mut pops, count)?;
        }
        for (k, p) in live.into_iter().zip(pops) {
            self.slots[k].pop = p;
        }
        Ok(())
    }

    fn endings(&mut self) -> Result<()> {
        let elapsed = self.elapsed();
        let planner = self.planner;
        let mut solved: Vec<ControlPath> = Vec::new();
        for k in 0..self.slots.len() {
            if self.slots[k].stopped.is_some() {
                continue;
            }
            let decision = ending_check(&self.slots[k].pop, &planner.end, &planner.case1, elapsed);
            if let EndDecision::Stop(reason) = decision {
                let restartable = matches!(reason, StopReason::Stagnation | StopReason::Homogenization);
                if planner.restart && restartable {
                    let mut rng = stream(self.budget.seed, &[LABEL_RESEED, k as u64, self.generation as u64]);
                    self.reseed(k, false, &mut rng);
                    self.restarts += 1;
                } else {
                    self.slots[k].stopped = Some(reason);
                    if reason.is_premature() {
                        solved.push(self.slots[k].pop.g_best()?.path.clone());
                    }
                }
            }
        }
        if planner.case2 != Case2::None && !solved.is_empty() {
            for k in 0..self.slots.len() {
                if self.slots[k].stopped.is_some() {
                    continue;
                }
                let mine = self.slots[k].pop.g_best()?.path.clone();
                if !solved.iter().any(|s| rms(s, &mine) <= planner.similarity) {
                    continue;
                }
                let mut rng = stream(self.budget.seed, &[LABEL_RESEED, k as u64, self.generation as u64, 1]);
                match planner.case2 {
                    Case2::Kill => self.slots[k].stopped = Some(StopReason::Stagnation),
                    Case2::Reset => self.reseed(k, false, &mut rng),
                    Case2::Adjust => self.reseed(k, true, &mut rng),
                    Case2::None => {}
                }
            }
        }
        if self.slots.iter().all(|s| s.stopped.is_some()) {
            let reason = self.slots.iter().rev().find_map(|s| s.stopped).expect("all stopped");
            self.stopped = Some(reason);
        }
        Ok(())
    }

    /// Replaces all members, or only the worse half, with fresh ones.
    fn reseed(&mut self, k: usize, half: bool, rng: &mut PlannerRng) {
        let bands = if self.planner.division == Division::Cegda { self.planner.n_populations } else { 1 };
        let pop = &mut self.slots[k].pop;
        let order = pop.order_by_report().unwrap_or_else(|_| (0..pop.len()).collect());
        let keep = if half { pop.len() - pop.len() / 2 } else { 0 };
        for &i in &order[keep..] {
            pop.members[i] = Individual::new(band_init(&self.prob, rng, k, bands));
        }
        pop.stale = 0;
        pop.scale = 1.0;
        if !half {
            pop.g_best = None;
        }
        pop.refresh(&self.prob);
    }

    /// Runs to completion and re-scores the best path.
    pub fn run(mut self) -> Result<PlannerRun> {
        while !self.is_stopped() {
            self.step_generation()?;
        }
        self.finish()
    }

    pub fn finish(self) -> Result<PlannerRun> {
        let best_path = self.prob.waypoints(&self.best.path)?;
        let elapsed = self.elapsed();
        Ok(PlannerRun {
            best_control: self.best.path,
            best_path,
            best_report: self.best.report,
            elapsed,
            evaluations: self.prob.evaluations(),
            generations_executed: self.generation,
            restarts: self.restarts,
            trace: self.trace,
            stop_reason: self.stopped.unwrap_or(StopReason::Generations),
        })
    }
}

fn exploit(pop: &mut Population, planner: &Planner, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    match planner.exploit {
        ExploitOp::Crossover(c) => crossover_step(pop, &c, planner.twins, prob, rng),
        ExploitOp::Pso(p) => pso_step(pop, &p, prob, rng),
        ExploitOp::Safari(s) => safari_step(pop, &s, prob, rng),
        ExploitOp::Commensalism(d) => commensalism_step(pop, d, prob, rng),
        ExploitOp::De { variant, f, cr } => de_step(pop, variant, f, cr, prob, rng),
    }
}

fn explore(pop: &mut Population, planner: &Planner, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    let before = (!planner.keep_inferior).then(|| pop.members.clone());
    match planner.explore {
        ExploreOp::Mutation { kind, pm } => mutate_step(pop, kind, pm, prob, rng)?,
        ExploreOp::Pus { a } => pus_step(pop, a * pop.scale, prob, rng)?,
        ExploreOp::Sgwo => sgwo_step(pop, prob, rng)?,
        ExploreOp::Cinf(c) => cinf_step(pop, c.threshold, c.a, prob, rng)?,
        ExploreOp::None => return Ok(()),
    }
    if let Some(before) = before {
        for (now, old) in pop.members.iter_mut().zip(before) {
            let worse = match (&now.report, &old.report) {
                (Some(n), Some(o)) => o.is_better_than(n),
                _ => false,
            };
            if worse {
                *now = old;
            }
        }
    }
    Ok(())
}

/// One generation on one population: sort, keep elites, select, exploit,
/// explore, auxiliaries, then elites replace the worst members.
pub fn step_population(pop: &mut Population, planner: &Planner, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    let n = pop.len();
    let start_best = pop.g_best.as_ref().map(|b| b.report.clone());
    let order = sort_population(pop, &planner.sort, pop.t, pop.horizon)?;
    let elites: Vec<Individual> = order.order[..elite_count(n, planner.elitism_pct)]
        .iter()
        .map(|&i| pop.members[i].clone())
        .collect();
    let mut scores = rank_scores(n, planner.rank);
    if planner.antibody > 0.0 {
        scores = antibody_scores(pop, &order.order, &scores, planner.antibody);
    }
    let parents = if planner.cellular {
        cellular_select(&order.positions(), rng)
    } else {
        select(&order.order, &scores, &planner.selection, rng, n)?
    };
    pop.members = parents.iter().map(|&i| pop.members[i].clone()).collect();

    exploit(pop, planner, prob, rng)?;
    explore(pop, planner, prob, rng)?;

    if planner.repair_rounds > 0 {
        for m in &mut pop.members {
            let r = m.report.clone().ok_or(Error::NotEvaluated(0))?;
            if !r.feasible {
                let (p, pr) = repair(&m.path, &r, prob, planner.repair_rounds);
                if p != m.path {
                    m.path = p;
                    m.report = Some(pr);
                }
            }
        }
        pop.refresh(prob);
    }
    if planner.pfih_iterations > 0 {
        let best = pop.order_by_report()?[0];
        let m = &mut pop.members[best];
        let r = m.report.clone().expect("ordered members are evaluated");
        let (p, pr) = pfih(&m.path, &r, prob, planner.pfih_iterations, planner.fixed.pfih_sigma * pop.scale, rng);
        if p != m.path {
            m.path = p;
            m.report = Some(pr);
        }
        pop.refresh(prob);
    }
    if planner.forbid_clones {
        forbid_clones(pop, planner.fixed.clone_sigma, prob, rng);
    }
    if planner.injection > 0.0 {
        let count = ((n as f64 * planner.injection).ceil() as usize).min(n);
        let order = pop.order_by_report()?;
        for &i in order.iter().rev().take(count) {
            pop.members[i] = Individual::new(prob.random_path(rng));
        }
        pop.refresh(prob);
    }
    if planner.decay < 1.0 {
        crate::operators::decay(pop, planner.decay);
    }
    if !elites.is_empty() {
        let order = pop.order_by_report()?;
        for (&slot, e) in order.iter().rev().zip(elites) {
            pop.members[slot] = e;
        }
    }
    pop.refresh(prob);
    pop.t += 1;
    let improved = match (&start_best, &pop.g_best) {
        (Some(b), Some(g)) => g.report.is_better_than(b),
        _ => true,
    };
    pop.stale = if improved { 0 } else { pop.stale + 1 };
    Ok(())
}

/// Resolves `config` against the built-in codebook and runs it.
pub fn run_planner(config: &PlannerConfig, scenario: &Scenario, budget: &RunBudget) -> Result<PlannerRun> {
    let planner = Codebook::builtin().resolve(config);
    Engine::new(&planner, scenario, budget, EvalSettings::default())?.run()
}

pub fn run_planner_with(planner: &Planner, scenario: &Scenario, budget: &RunBudget, settings: EvalSettings) -> Result<PlannerRun> {
    Engine::new(planner, scenario, budget, settings)?.run()
}
