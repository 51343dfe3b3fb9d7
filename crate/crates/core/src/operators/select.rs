use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::PlannerRng;

/// Shape of the score assigned to each rank position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RankScheme {
    Linear,
    Logarithmic,
    Exponential,
    Identity,
}

/// Ratio between adjacent exponential rank scores.
pub const EXPONENTIAL_RATIO: f64 = 0.8;

/// Scores for rank positions `0..n`, best first.
pub fn rank_scores(n: usize, scheme: RankScheme) -> Vec<f64> {
    (0..n)
        .map(|r| match scheme {
            RankScheme::Linear => (n - r) as f64,
            RankScheme::Logarithmic => ((n - r) as f64 + 1.0).ln(),
            RankScheme::Exponential => EXPONENTIAL_RATIO.powi(r as i32),
            RankScheme::Identity => 1.0,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SelectionPolicy {
    /// Best of `size` distinct uniformly drawn candidates.
    Tournament { size: usize },
    /// Uniform over the top `cutoff` fraction.
    Truncation { cutoff: f64 },
    /// Draw proportional to `score^pressure`.
    Roulette { pressure: f64 },
    /// Equally spaced pointers over the `score^pressure` wheel, one spin.
    Sus { pressure: f64 },
}

fn wheel(scores: &[f64], pressure: f64) -> Result<Vec<f64>> {
    let mut acc = 0.0;
    let cum: Vec<f64> = scores
        .iter()
        .map(|s| {
            acc += s.max(0.0).powf(pressure);
            acc
        })
        .collect();
    if !(acc > 0.0 && acc.is_finite()) {
        return Err(Error::EmptySelection("selection wheel has zero total weight".into()));
    }
    Ok(cum)
}

fn spin(cum: &[f64], x: f64) -> usize {
    cum.partition_point(|&c| c <= x).min(cum.len() - 1)
}

/// Picks `k` members. `order` lists member indices best-first and
/// `scores[p]` is the score of rank position `p`.
pub fn select(order: &[usize], scores: &[f64], policy: &SelectionPolicy, rng: &mut PlannerRng, k: usize) -> Result<Vec<usize>> {
    let n = order.len();
    if n == 0 {
        return Err(Error::EmptySelection("population is empty".into()));
    }
    if scores.len() != n {
        return Err(Error::InvalidInput("one score per rank position required".into()));
    }
    let positions: Vec<usize> = match *policy {
        SelectionPolicy::Tournament { size } => {
            let size = size.clamp(1, n);
            (0..k)
                .map(|_| {
                    sample(rng, n, size)
                        .into_iter()
                        .reduce(|a, b| {
                            let better = scores[b] > scores[a] || (scores[b] == scores[a] && b < a);
                            if better {
                                b
                            } else {
                                a
                            }
                        })
                        .expect("non-empty tournament")
                })
                .collect()
        }
        SelectionPolicy::Truncation { cutoff } => {
            let keep = (n as f64 * cutoff).floor() as usize;
            if keep == 0 {
                return Err(Error::EmptySelection(format!("cutoff {cutoff} keeps no member of {n}")));
            }
            let keep = keep.min(n);
            (0..k).map(|_| rng.random_range(0..keep)).collect()
        }
        SelectionPolicy::Roulette { pressure } => {
            let cum = wheel(scores, pressure)?;
            let total = cum[n - 1];
            (0..k).map(|_| spin(&cum, rng.random_range(0.0..total))).collect()
        }
        SelectionPolicy::Sus { pressure } => {
            let cum = wheel(scores, pressure)?;
            if k == 0 {
                return Ok(Vec::new());
            }
            let step = cum[n - 1] / k as f64;
            let start = rng.random_range(0.0..step);
            (0..k).map(|i| spin(&cum, start + i as f64 * step)).collect()
        }
    };
    Ok(positions.into_iter().map(|p| order[p]).collect())
}
