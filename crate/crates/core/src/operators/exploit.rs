use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{gaussian, Individual, Population, Problem};
use crate::error::{Error, Result};
use crate::pathmodel::ControlPath;
use crate::rng::PlannerRng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Crossover {
    /// Exchange blocks of whole control points between `points` cuts.
    NPoint { points: usize },
    /// Swap each gene with probability `rate`.
    Uniform { rate: f64 },
    /// Children `l1·a + l2·b` and `l2·a + l1·b`.
    Arithmetic { l1: f64, l2: f64 },
}

/// n-point recombination with cuts before the given control-point indices.
pub fn n_point_at(a: &ControlPath, b: &ControlPath, cuts: &[usize]) -> (ControlPath, ControlPath) {
    let (mut ca, mut cb) = (a.clone(), b.clone());
    let mut swap = false;
    let mut next = cuts.iter().copied().peekable();
    for i in 0..a.n() {
        while next.peek() == Some(&i) {
            swap = !swap;
            next.next();
        }
        if swap {
            ca.set_point(i, b.point(i));
            cb.set_point(i, a.point(i));
        }
    }
    (ca, cb)
}

pub fn crossover(a: &ControlPath, b: &ControlPath, variant: &Crossover, rng: &mut PlannerRng) -> Result<(ControlPath, ControlPath)> {
    if a.genes.len() != b.genes.len() {
        return Err(Error::InvalidInput(format!(
            "parents have {} and {} genes",
            a.genes.len(),
            b.genes.len()
        )));
    }
    Ok(match *variant {
        Crossover::NPoint { points } => {
            let n = a.n();
            let k = points.min(n.saturating_sub(1));
            let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n.saturating_sub(1), k)
                .into_iter()
                .map(|c| c + 1)
                .collect();
            cuts.sort_unstable();
            n_point_at(a, b, &cuts)
        }
        Crossover::Uniform { rate } => {
            let (mut ca, mut cb) = (a.clone(), b.clone());
            for j in 0..a.genes.len() {
                if rng.random::<f64>() < rate {
                    ca.genes[j] = b.genes[j];
                    cb.genes[j] = a.genes[j];
                }
            }
            (ca, cb)
        }
        Crossover::Arithmetic { l1, l2 } => {
            let (mut ca, mut cb) = (a.clone(), b.clone());
            for j in 0..a.genes.len() {
                ca.genes[j] = l1 * a.genes[j] + l2 * b.genes[j];
                cb.genes[j] = l2 * a.genes[j] + l1 * b.genes[j];
            }
            (ca, cb)
        }
    })
}

/// Recombines consecutive member pairs. With `twins` both children enter
/// the population, otherwise the second parent survives unchanged. A
/// trailing odd member is left alone.
pub fn crossover_step(pop: &mut Population, variant: &Crossover, twins: bool, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    for pair in 0..pop.len() / 2 {
        let (i, j) = (2 * pair, 2 * pair + 1);
        let (ca, cb) = crossover(&pop.members[i].path, &pop.members[j].path, variant, rng)?;
        if ca != pop.members[i].path {
            pop.members[i].set_genes(ca.genes);
        }
        if twins && cb != pop.members[j].path {
            pop.members[j].set_genes(cb.genes);
        }
    }
    pop.refresh(prob);
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub w: f64,
    pub c_max: f64,
    pub c_min: f64,
}

/// Cognitive and social coefficients at generation `t` of `horizon`.
pub fn pso_coefficients(p: &PsoParams, t: usize, horizon: usize) -> Result<(f64, f64)> {
    if horizon == 0 {
        return Err(Error::Schedule);
    }
    let frac = (t as f64 / horizon as f64).min(1.0);
    let span = p.c_max - p.c_min;
    Ok((p.c_max - span * frac, p.c_min + span * frac))
}

/// Largest velocity component as a fraction of the gene's range.
const VMAX_FRACTION: f64 = 0.5;

pub fn pso_step(pop: &mut Population, params: &PsoParams, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    let (c1, c2) = pso_coefficients(params, pop.t, pop.horizon)?;
    let g = pop.g_best()?.path.genes.clone();
    for ind in &mut pop.members {
        let pb = ind.p_best.as_ref().map_or_else(|| ind.path.genes.clone(), |b| b.path.genes.clone());
        let mut genes = ind.path.genes.clone();
        for j in 0..genes.len() {
            let (lo, hi) = prob.gene_range(j);
            let vmax = VMAX_FRACTION * (hi - lo);
            let (r1, r2): (f64, f64) = (rng.random(), rng.random());
            let v = params.w * ind.velocity[j] + c1 * r1 * (pb[j] - genes[j]) + c2 * r2 * (g[j] - genes[j]);
            ind.velocity[j] = v.clamp(-vmax, vmax);
            genes[j] += ind.velocity[j];
        }
        if genes != ind.path.genes {
            ind.set_genes(genes);
        }
    }
    pop.refresh(prob);
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafariParams {
    /// Move length toward the leader, meters.
    pub step: f64,
    /// Standard deviation of the scouting perturbation, meters.
    pub sigma: f64,
    /// Fraction of the population sent scouting.
    pub top_fraction: f64,
}

/// Moves every member `step` toward the leader, found by perturbing the
/// top members. A member sitting on the leader stays put.
pub fn safari_step(pop: &mut Population, params: &SafariParams, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    let order = pop.order_by_report()?;
    let scouts = ((pop.len() as f64 * params.top_fraction).ceil() as usize).clamp(1, pop.len());
    let sigma = params.sigma * pop.scale;
    if sigma > 0.0 {
        for &i in order.iter().take(scouts) {
            let mut p = pop.members[i].path.clone();
            for g in &mut p.genes {
                *g += gaussian(rng, sigma);
            }
            prob.clamp(&mut p);
            let r = prob.evaluate(&p);
            pop.offer(&p, &r);
        }
    }
    let leader = pop.g_best()?.path.genes.clone();
    let step = params.step * pop.scale;
    for ind in &mut pop.members {
        let diff: Vec<f64> = leader.iter().zip(&ind.path.genes).map(|(l, p)| l - p).collect();
        let dist = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
        if dist <= 1e-12 || step == 0.0 {
            continue;
        }
        let genes = ind.path.genes.iter().zip(&diff).map(|(p, d)| p + d / dist * step).collect();
        ind.set_genes(genes);
    }
    pop.refresh(prob);
    Ok(())
}

/// Distribution of the commensalism coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommensalDist {
    /// Uniform on (−1, 1).
    Symmetric,
    /// Uniform on (0, 1).
    Positive,
    /// Uniform on (−0.5, 0.5).
    Narrow,
    /// Normal(0, 0.5) clipped to [−1, 1].
    Gaussian,
}

impl CommensalDist {
    pub fn name(self) -> &'static str {
        match self {
            CommensalDist::Symmetric => "symmetric",
            CommensalDist::Positive => "positive",
            CommensalDist::Narrow => "narrow",
            CommensalDist::Gaussian => "gaussian",
        }
    }

    pub fn sample(self, rng: &mut PlannerRng) -> f64 {
        match self {
            CommensalDist::Symmetric => rng.random_range(-1.0..1.0),
            CommensalDist::Positive => rng.random_range(0.0..1.0),
            CommensalDist::Narrow => rng.random_range(-0.5..0.5),
            CommensalDist::Gaussian => gaussian(rng, 0.5).clamp(-1.0, 1.0),
        }
    }
}

/// Pairs members at random and moves each partner by `r·(G − other)`,
/// both updates reading pre-step positions.
pub fn commensalism_step(pop: &mut Population, dist: CommensalDist, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    if pop.len() < 2 {
        return Err(Error::PopulationTooSmall { need: 2, have: pop.len() });
    }
    let g = pop.g_best()?.path.genes.clone();
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.shuffle(rng);
    for pair in idx.chunks_exact(2) {
        let (i, j) = (pair[0], pair[1]);
        let r = dist.sample(rng);
        let (pi, pj) = (pop.members[i].path.genes.clone(), pop.members[j].path.genes.clone());
        let ni: Vec<f64> = pi.iter().zip(&pj).zip(&g).map(|((a, b), g)| a + r * (g - b)).collect();
        let nj: Vec<f64> = pj.iter().zip(&pi).zip(&g).map(|((b, a), g)| b + r * (g - a)).collect();
        if ni != pi {
            pop.members[i].set_genes(ni);
        }
        if nj != pj {
            pop.members[j].set_genes(nj);
        }
    }
    pop.refresh(prob);
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeVariant {
    Rand,
    Best,
}

fn distinct(rng: &mut PlannerRng, n: usize, exclude: &[usize], count: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = rng.random_range(0..n);
        if !exclude.contains(&c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// One synchronous differential-evolution generation with binomial
/// crossover and greedy replacement (ties go to the trial).
pub fn de_step(pop: &mut Population, variant: DeVariant, f: f64, cr: f64, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    let n = pop.len();
    let need = match variant {
        DeVariant::Rand => 4,
        DeVariant::Best => 3,
    };
    if n < need {
        return Err(Error::PopulationTooSmall { need, have: n });
    }
    pop.reports()?;
    let g = pop.g_best()?.path.genes.clone();
    let snapshot: Vec<Vec<f64>> = pop.members.iter().map(|m| m.path.genes.clone()).collect();
    let dim = snapshot[0].len();
    for i in 0..n {
        let donor: Vec<f64> = match variant {
            DeVariant::Rand => {
                let r = distinct(rng, n, &[i], 3);
                (0..dim)
                    .map(|j| snapshot[r[0]][j] + f * (snapshot[r[1]][j] - snapshot[r[2]][j]))
                    .collect()
            }
            DeVariant::Best => {
                let r = distinct(rng, n, &[i], 2);
                (0..dim).map(|j| g[j] + f * (snapshot[r[0]][j] - snapshot[r[1]][j])).collect()
            }
        };
        let rn = rng.random_range(0..dim);
        let trial_genes: Vec<f64> = (0..dim)
            .map(|j| {
                if rng.random::<f64>() <= cr || j == rn {
                    donor[j]
                } else {
                    snapshot[i][j]
                }
            })
            .collect();
        let mut trial = ControlPath {
            genes: trial_genes,
            delta_l: pop.members[i].path.delta_l,
        };
        prob.clamp(&mut trial);
        let report = prob.evaluate(&trial);
        let current = pop.members[i].report.as_ref().expect("checked above");
        if report.compare(current) != std::cmp::Ordering::Greater {
            let m: &mut Individual = &mut pop.members[i];
            m.path = trial;
            m.report = Some(report);
        }
    }
    pop.refresh(prob);
    Ok(())
}
