//! The operator library: constraint-aware sorting, ranking and selection,
//! exploitation and exploration steps, ending criteria and auxiliary
//! population maintenance.
//!
//! Every step operator clamps the paths it changes into their bounds,
//! re-evaluates them and updates the personal and global bests, so a
//! population is always fully evaluated between steps.

mod auxiliary;
mod ending;
mod exploit;
mod explore;
mod select;
mod sort;

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{evaluate, EvalSettings, EvaluationReport};
use crate::pathmodel::{
    compute_bounds, initialize_path, smooth, ControlPath, PathBounds, RotatedFrame, SmoothMethod, Waypoints,
};
use crate::rng::PlannerRng;
use crate::scenario::Scenario;

pub use auxiliary::{
    antibody_scores, cellular_select, decay, elite_count, forbid_clones, inject, migrate, pfih, repair,
};
pub use ending::{ending_check, homogeneity, Case1, Case2, EndDecision, EndMode, StopReason};
pub use exploit::{
    commensalism_step, crossover, crossover_step, de_step, n_point_at, pso_coefficients, pso_step, safari_step,
    CommensalDist, Crossover, DeVariant, PsoParams, SafariParams,
};
pub use explore::{
    cinf_step, cinf_weights, mutate, mutate_step, pus_step, sgwo_coefficient, sgwo_step, MutationKind,
};
pub use select::{rank_scores, select, RankScheme, SelectionPolicy};
pub use sort::{sort_population, SortOrder, SortStrategy};

/// Default outward margin of the `y` corridor, meters.
pub const DEFAULT_DELTA_D: f64 = 10.0;

/// A scenario prepared for one planner: frame, bounds, smoother and
/// scoring settings. Counts every evaluation it performs.
#[derive(Debug)]
pub struct Problem<'a> {
    pub scenario: &'a Scenario,
    pub bounds: PathBounds,
    pub method: SmoothMethod,
    pub settings: EvalSettings,
    evaluations: AtomicU64,
}

impl<'a> Problem<'a> {
    pub fn new(scenario: &'a Scenario, n_points: usize, method: SmoothMethod, settings: EvalSettings) -> Result<Self> {
        Self::with_delta_d(scenario, n_points, method, settings, DEFAULT_DELTA_D)
    }

    pub fn with_delta_d(
        scenario: &'a Scenario,
        n_points: usize,
        method: SmoothMethod,
        settings: EvalSettings,
        delta_d: f64,
    ) -> Result<Self> {
        settings.weights.validate()?;
        let frame = RotatedFrame::between(scenario.start, scenario.target);
        let bounds = compute_bounds(scenario, &frame, n_points, delta_d)?;
        Ok(Self {
            scenario,
            bounds,
            method,
            settings,
            evaluations: AtomicU64::new(0),
        })
    }

    pub fn n_points(&self) -> usize {
        self.bounds.n()
    }

    pub fn dim(&self) -> usize {
        3 * self.bounds.n()
    }

    pub fn waypoint_count(&self) -> usize {
        self.settings.waypoints_per_point * self.n_points()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(AtomicOrdering::Relaxed)
    }

    /// Scores a path; a path the smoother rejects gets the unusable report.
    pub fn evaluate(&self, path: &ControlPath) -> EvaluationReport {
        self.evaluations.fetch_add(1, AtomicOrdering::Relaxed);
        match evaluate(path, self.scenario, &self.bounds, self.method, &self.settings) {
            Ok((_, r)) => r,
            Err(_) => EvaluationReport::unusable(path.n()),
        }
    }

    pub fn waypoints(&self, path: &ControlPath) -> Result<Waypoints> {
        smooth(
            path,
            self.method,
            &self.settings.smooth,
            self.waypoint_count(),
            &self.bounds.frame,
            self.scenario.start,
            self.scenario.target,
        )
    }

    pub fn random_path(&self, rng: &mut PlannerRng) -> ControlPath {
        initialize_path(self.scenario, &self.bounds, rng)
    }

    /// Lower and upper limit of flat gene `j`.
    pub fn gene_range(&self, j: usize) -> (f64, f64) {
        self.bounds.gene_range(j / 3, j % 3)
    }

    pub fn clamp(&self, path: &mut ControlPath) {
        self.bounds.clamp_path(path);
    }
}

/// A path with its report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Best {
    pub path: ControlPath,
    pub report: EvaluationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub path: ControlPath,
    pub velocity: Vec<f64>,
    pub report: Option<EvaluationReport>,
    pub p_best: Option<Best>,
    /// Consecutive generations without improvement, for collective
    /// information replacement.
    pub cuu: u32,
    /// Report seen at the previous stagnation check.
    pub last_report: Option<EvaluationReport>,
}

impl Individual {
    pub fn new(path: ControlPath) -> Self {
        let dim = path.genes.len();
        Self {
            path,
            velocity: vec![0.0; dim],
            report: None,
            p_best: None,
            cuu: 0,
            last_report: None,
        }
    }

    /// Replaces the genes and marks the member for re-evaluation.
    pub fn set_genes(&mut self, genes: Vec<f64>) {
        self.path.genes = genes;
        self.report = None;
    }

    pub fn report(&self) -> Option<&EvaluationReport> {
        self.report.as_ref()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub members: Vec<Individual>,
    pub g_best: Option<Best>,
    /// Current generation.
    pub t: usize,
    /// Generation horizon `T` used by schedules.
    pub horizon: usize,
    /// Generations since `g_best` last improved.
    pub stale: usize,
    /// Step-size multiplier shrunk by the decay operator.
    pub scale: f64,
}

impl Population {
    pub fn new(members: Vec<Individual>, horizon: usize) -> Self {
        Self {
            members,
            g_best: None,
            t: 0,
            horizon,
            stale: 0,
            scale: 1.0,
        }
    }

    /// `size` freshly initialized and evaluated members.
    pub fn random(prob: &Problem, size: usize, horizon: usize, rng: &mut PlannerRng) -> Self {
        let members = (0..size).map(|_| Individual::new(prob.random_path(rng))).collect();
        let mut pop = Self::new(members, horizon);
        pop.refresh(prob);
        pop
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Clamps and evaluates members lacking a report, then updates the
    /// personal and global bests. Returns whether `g_best` improved.
    pub fn refresh(&mut self, prob: &Problem) -> bool {
        let mut improved = false;
        for ind in &mut self.members {
            if ind.report.is_none() {
                prob.clamp(&mut ind.path);
                ind.report = Some(prob.evaluate(&ind.path));
            }
            let r = ind.report.as_ref().expect("just evaluated");
            if ind.p_best.as_ref().is_none_or(|b| r.is_better_than(&b.report)) {
                ind.p_best = Some(Best {
                    path: ind.path.clone(),
                    report: r.clone(),
                });
            }
            if self.g_best.as_ref().is_none_or(|b| r.is_better_than(&b.report)) {
                self.g_best = Some(Best {
                    path: ind.path.clone(),
                    report: r.clone(),
                });
                improved = true;
            }
        }
        improved
    }

    /// Offers an externally scored path as a global best candidate.
    pub fn offer(&mut self, path: &ControlPath, report: &EvaluationReport) -> bool {
        if self.g_best.as_ref().is_none_or(|b| report.is_better_than(&b.report)) {
            self.g_best = Some(Best {
                path: path.clone(),
                report: report.clone(),
            });
            true
        } else {
            false
        }
    }

    pub fn g_best(&self) -> Result<&Best> {
        self.g_best.as_ref().ok_or(Error::NotEvaluated(0))
    }

    pub fn reports(&self) -> Result<Vec<&EvaluationReport>> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| m.report.as_ref().ok_or(Error::NotEvaluated(i)))
            .collect()
    }

    /// Member indices best-first under the shared report ordering.
    pub fn order_by_report(&self) -> Result<Vec<usize>> {
        let reports = self.reports()?;
        let mut idx: Vec<usize> = (0..reports.len()).collect();
        idx.sort_by(|&a, &b| reports[a].compare(reports[b]).then(a.cmp(&b)));
        Ok(idx)
    }
}

pub(crate) fn gaussian(rng: &mut PlannerRng, sigma: f64) -> f64 {
    use rand_distr::{Distribution, StandardNormal};
    let z: f64 = StandardNormal.sample(rng);
    z * sigma
}
