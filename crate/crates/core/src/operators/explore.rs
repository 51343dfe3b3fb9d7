use rand::Rng;
use rand_distr::{Cauchy, Distribution};
use serde::{Deserialize, Serialize};

use super::{gaussian, Population, Problem};
use crate::error::{Error, Result};
use crate::pathmodel::ControlPath;
use crate::rng::PlannerRng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MutationKind {
    /// Redraw uniformly within the gene's range.
    Uniform,
    /// Michalewicz non-uniform mutation with shape `b`.
    NonUniform { b: f64 },
    /// Add Normal(0, sigma), meters.
    Gaussian { sigma: f64 },
    /// Add Cauchy(0, scale), meters.
    Cauchy { scale: f64 },
}

impl MutationKind {
    /// The same operator with its spread multiplied by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        match self {
            MutationKind::Gaussian { sigma } => MutationKind::Gaussian { sigma: sigma * factor },
            MutationKind::Cauchy { scale } => MutationKind::Cauchy { scale: scale * factor },
            other => other,
        }
    }
}

/// Mutates each gene with probability `pm`. The result is not clamped.
pub fn mutate(
    path: &ControlPath,
    kind: MutationKind,
    pm: f64,
    t: usize,
    horizon: usize,
    prob: &Problem,
    rng: &mut PlannerRng,
) -> Result<ControlPath> {
    if !(0.0..=1.0).contains(&pm) {
        return Err(Error::Config(format!("mutation probability {pm} outside [0, 1]")));
    }
    let frac = match kind {
        MutationKind::NonUniform { .. } if horizon == 0 => return Err(Error::Schedule),
        MutationKind::NonUniform { .. } => (t as f64 / horizon as f64).min(1.0),
        _ => 0.0,
    };
    let mut out = path.clone();
    for j in 0..out.genes.len() {
        if rng.random::<f64>() >= pm {
            continue;
        }
        let (lo, hi) = prob.gene_range(j);
        let g = out.genes[j];
        out.genes[j] = match kind {
            MutationKind::Uniform => {
                if hi > lo {
                    rng.random_range(lo..=hi)
                } else {
                    lo
                }
            }
            MutationKind::NonUniform { b } => {
                let r: f64 = rng.random();
                let amp = 1.0 - r.powf((1.0 - frac).powf(b));
                if rng.random::<bool>() {
                    g + (hi - g).max(0.0) * amp
                } else {
                    g - (g - lo).max(0.0) * amp
                }
            }
            MutationKind::Gaussian { sigma } => g + gaussian(rng, sigma),
            MutationKind::Cauchy { scale: s } => {
                if s > 0.0 {
                    g + Cauchy::new(0.0, s).expect("positive scale").sample(rng)
                } else {
                    g
                }
            }
        };
    }
    Ok(out)
}

pub fn mutate_step(pop: &mut Population, kind: MutationKind, pm: f64, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    for i in 0..pop.len() {
        let child = mutate(&pop.members[i].path, kind.scaled(pop.scale), pm, pop.t, pop.horizon, prob, rng)?;
        if child != pop.members[i].path {
            pop.members[i].set_genes(child.genes);
        }
    }
    pop.refresh(prob);
    Ok(())
}

/// Replaces the worse half: the k-th worst becomes the k-th best plus
/// `a·r` per gene and takes its velocity.
pub fn pus_step(pop: &mut Population, a: f64, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    let order = pop.order_by_report()?;
    let half = pop.len() / 2;
    for k in 0..half {
        let (good, bad) = (order[k], order[order.len() - 1 - k]);
        let genes: Vec<f64> = pop.members[good]
            .path
            .genes
            .iter()
            .map(|g| g + a * rng.random::<f64>())
            .collect();
        let velocity = pop.members[good].velocity.clone();
        let m = &mut pop.members[bad];
        m.set_genes(genes);
        m.velocity = velocity;
    }
    pop.refresh(prob);
    Ok(())
}

/// The SGWO control parameter `a = 2 − 2t/T`.
pub fn sgwo_coefficient(t: usize, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::Schedule);
    }
    Ok(2.0 - 2.0 * (t as f64 / horizon as f64).min(1.0))
}

/// Moves each member by `−A·|C·G − P|` with one `(A, C)` pair per member.
pub fn sgwo_step(pop: &mut Population, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    let a = sgwo_coefficient(pop.t, pop.horizon)?;
    let g = pop.g_best()?.path.genes.clone();
    if a == 0.0 {
        return Ok(());
    }
    for ind in &mut pop.members {
        let c = 2.0 * rng.random::<f64>();
        let big_a = (2.0 * rng.random::<f64>() - 1.0) * a;
        let genes: Vec<f64> = ind
            .path
            .genes
            .iter()
            .zip(&g)
            .map(|(p, g)| p - big_a * (c * g - p).abs())
            .collect();
        if genes != ind.path.genes {
            ind.set_genes(genes);
        }
    }
    pop.refresh(prob);
    Ok(())
}

/// Weights `w_k = (m − k + 1) / (1 + … + m)` for `k = 1..=m`.
pub fn cinf_weights(m: usize) -> Vec<f64> {
    let total = (m * (m + 1)) as f64 / 2.0;
    (1..=m).map(|k| (m - k + 1) as f64 / total).collect()
}

/// Updates each member's unsuccessful-update counter and rebuilds members
/// stagnant for more than `threshold` generations from a weighted blend of
/// the current best members. A gene survives when `r ≤ a` or it is the
/// forced index.
pub fn cinf_step(pop: &mut Population, threshold: u32, a: f64, prob: &Problem, rng: &mut PlannerRng) -> Result<()> {
    pop.reports()?;
    for ind in &mut pop.members {
        let now = ind.report.clone().expect("checked above");
        let improved = ind.last_report.as_ref().is_none_or(|prev| now.is_better_than(prev));
        ind.cuu = if improved { 0 } else { ind.cuu + 1 };
        ind.last_report = Some(now);
    }
    let order = pop.order_by_report()?;
    let snapshot: Vec<Vec<f64>> = order.iter().map(|&i| pop.members[i].path.genes.clone()).collect();
    let dim = prob.dim();
    for (rank, &i) in order.iter().enumerate() {
        if pop.members[i].cuu <= threshold {
            continue;
        }
        let m = rng.random_range(1..=rank + 1);
        let w = cinf_weights(m);
        let collective: Vec<f64> = (0..dim)
            .map(|j| w.iter().enumerate().map(|(k, wk)| wk * snapshot[k][j]).sum())
            .collect();
        let rn = rng.random_range(0..dim);
        let ind = &mut pop.members[i];
        let genes: Vec<f64> = (0..dim)
            .map(|j| {
                if rng.random::<f64>() <= a || j == rn {
                    ind.path.genes[j]
                } else {
                    collective[j]
                }
            })
            .collect();
        ind.cuu = 0;
        if genes != ind.path.genes {
            ind.set_genes(genes);
        }
    }
    pop.refresh(prob);
    Ok(())
}
