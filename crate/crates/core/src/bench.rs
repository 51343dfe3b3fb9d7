//! Repeated planner runs summarized as success rate, average fitness and
//! average time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run_planner_with, RunBudget};
use crate::error::{Error, Result};
use crate::evaluation::{EvalSettings, EvaluationReport};
use crate::genome::{encode_with, Codebook, PlannerConfig};
use crate::rng::derive_seed;
use crate::scenario::{generate_scenario, DensityPreset, ReliefPreset, Scenario, ScenarioParams};

/// Largest constraint value a successful run may carry.
pub const SUCCESS_TOLERANCE: f64 = 0.1;

/// A run succeeds when at most one constraint is violated and no
/// constraint value exceeds the tolerance. Constraint values are the
/// positive parts of g1..g3 followed by the counts h1, h2.
pub fn is_success(report: &EvaluationReport) -> bool {
    let v = report.constraint_vector();
    v.iter().filter(|x| **x > 0.0).count() <= 1 && v.iter().all(|x| *x <= SUCCESS_TOLERANCE)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub algorithm: String,
    pub case: String,
    pub repeat: usize,
    pub seed: u64,
    pub success: bool,
    pub fitness: f64,
    pub constraints: [f64; 5],
    /// Run-clock seconds.
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algorithm: String,
    /// `None` for the row pooled over all cases.
    pub case: Option<String>,
    pub runs: usize,
    /// Percent.
    pub sr: f64,
    pub af: f64,
    pub at: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchMeta {
    pub seed: u64,
    pub repeats: usize,
    pub budget: RunBudget,
    pub codebook: String,
    /// Algorithm name with its genome literal.
    pub algorithms: Vec<(String, String)>,
    pub cases: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub meta: BenchMeta,
    /// One pooled row per algorithm.
    pub rows: Vec<BenchRow>,
    /// One row per algorithm and case, case-major.
    pub per_case: Vec<BenchRow>,
    pub records: Vec<BenchRecord>,
}

pub fn summarize<'a>(
    algorithm: &str,
    case: Option<&str>,
    records: impl IntoIterator<Item = &'a BenchRecord>,
) -> BenchRow {
    let (mut n, mut ok, mut f, mut t) = (0usize, 0usize, 0.0, 0.0);
    for r in records {
        n += 1;
        ok += r.success as usize;
        f += r.fitness;
        t += r.elapsed;
    }
    let d = n.max(1) as f64;
    BenchRow {
        algorithm: algorithm.to_string(),
        case: case.map(str::to_string),
        runs: n,
        sr: 100.0 * ok as f64 / d,
        af: f / d,
        at: t / d,
    }
}

/// Seed of repeat `r` on case `c`; shared by every algorithm.
pub fn run_seed(seed: u64, case: usize, repeat: usize) -> u64 {
    derive_seed(seed, &[case as u64, repeat as u64])
}

pub fn bench(
    algorithms: &[(String, PlannerConfig)],
    cases: &[(String, Scenario)],
    repeats: usize,
    seed: u64,
    budget: RunBudget,
) -> Result<BenchReport> {
    bench_with(algorithms, cases, repeats, seed, budget, Codebook::builtin(), EvalSettings::default())
}

pub fn bench_with(
    algorithms: &[(String, PlannerConfig)],
    cases: &[(String, Scenario)],
    repeats: usize,
    seed: u64,
    budget: RunBudget,
    codebook: &Codebook,
    settings: EvalSettings,
) -> Result<BenchReport> {
    if repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    if algorithms.is_empty() || cases.is_empty() {
        return Err(Error::Config("at least one algorithm and one case are required".into()));
    }
    budget.validate()?;
    let mut jobs = Vec::new();
    for a in 0..algorithms.len() {
        for c in 0..cases.len() {
            for r in 0..repeats {
                jobs.push((a, c, r));
            }
        }
    }
    let planners: Vec<_> = algorithms.iter().map(|(_, cfg)| codebook.resolve(cfg)).collect();
    let records = jobs
        .par_iter()
        .map(|&(a, c, r)| {
            let s = run_seed(seed, c, r);
            let run = run_planner_with(&planners[a], &cases[c].1, &RunBudget { seed: s, ..budget }, settings)?;
            Ok(BenchRecord {
                algorithm: algorithms[a].0.clone(),
                case: cases[c].0.clone(),
                repeat: r,
                seed: s,
                success: is_success(&run.best_report),
                fitness: run.best_report.fitness,
                constraints: run.best_report.constraint_vector(),
                elapsed: run.elapsed,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = algorithms
        .iter()
        .map(|(name, _)| summarize(name, None, records.iter().filter(|r| &r.algorithm == name)))
        .collect();
    let mut per_case = Vec::new();
    for (case, _) in cases {
        for (name, _) in algorithms {
            per_case.push(summarize(
                name,
                Some(case),
                records.iter().filter(|r| &r.algorithm == name && &r.case == case),
            ));
        }
    }
    let meta = BenchMeta {
        seed,
        repeats,
        budget,
        codebook: codebook.digest().to_string(),
        algorithms: algorithms
            .iter()
            .map(|(n, c)| Ok((n.clone(), encode_with(c, codebook)?.to_string())))
            .collect::<Result<_>>()?,
        cases: cases.iter().map(|(n, _)| n.clone()).collect(),
    };
    Ok(BenchReport {
        meta,
        rows,
        per_case,
        records,
    })
}

impl BenchReport {
    pub fn row(&self, algorithm: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm)
    }

    pub fn case_row(&self, algorithm: &str, case: &str) -> Option<&BenchRow> {
        self.per_case
            .iter()
            .find(|r| r.algorithm == algorithm && r.case.as_deref() == Some(case))
    }

    /// Aligned text table, pooled rows first.
    pub fn table(&self) -> String {
        let mut out = format!("{:<12}{:<18}{:>6}{:>9}{:>10}{:>10}\n", "algorithm", "case", "runs", "SR%", "AF", "AT(s)");
        for r in self.rows.iter().chain(&self.per_case) {
            out.push_str(&format!(
                "{:<12}{:<18}{:>6}{:>9.1}{:>10.4}{:>10.4}\n",
                r.algorithm,
                r.case.as_deref().unwrap_or("all"),
                r.runs,
                r.sr,
                r.af,
                r.at
            ));
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("algorithm,case,runs,sr,af,at\n");
        for r in self.rows.iter().chain(&self.per_case) {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.algorithm,
                r.case.as_deref().unwrap_or("all"),
                r.runs,
                r.sr,
                r.af,
                r.at
            ));
        }
        out
    }

    pub fn records_csv(&self) -> String {
        let mut out = String::from("algorithm,case,repeat,seed,success,fitness,g1,g2,g3,h1,h2,elapsed\n");
        for r in &self.records {
            let c = r.constraints;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.algorithm, r.case, r.repeat, r.seed, r.success, r.fitness, c[0], c[1], c[2], c[3], c[4], r.elapsed
            ));
        }
        out
    }
}

/// The four benchmark cases: one per density step over the same mountain
/// relief, so density is the only thing that changes between cases.
pub fn desk_suite(seed: u64) -> Result<Vec<(String, Scenario)>> {
    [
        DensityPreset::Sparse,
        DensityPreset::Medium,
        DensityPreset::More,
        DensityPreset::Dense,
    ]
    .into_iter()
    .enumerate()
    .map(|(k, d)| {
        let r = ReliefPreset::Mountain;
        let s = generate_scenario(derive_seed(seed, &[k as u64]), &ScenarioParams::new(d, r))?;
        Ok((format!("{}-{}", d.name(), r.name()), s))
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(g: [f64; 3], h1: usize, h2: usize) -> EvaluationReport {
        EvaluationReport {
            f: [1.0; 5],
            fitness: 1.0,
            g,
            h1,
            h2,
            feasible: g.iter().all(|x| *x <= 0.0) && h1 == 0 && h2 == 0,
        }
    }

    #[test]
    fn success_rule() {
        assert!(is_success(&report([-1.0, -1.0, -1.0], 0, 0)));
        assert!(is_success(&report([0.1, -1.0, -1.0], 0, 0)));
        assert!(!is_success(&report([0.05, 0.05, -1.0], 0, 0)));
        assert!(!is_success(&report([0.11, -1.0, -1.0], 0, 0)));
        assert!(!is_success(&report([-1.0, -1.0, -1.0], 1, 0)));
    }

    #[test]
    fn summary_means() {
        let rec = |success, fitness, elapsed| BenchRecord {
            algorithm: "a".into(),
            case: "c".into(),
            repeat: 0,
            seed: 0,
            success,
            fitness,
            constraints: [0.0; 5],
            elapsed,
        };
        let rows = [rec(true, 2.0, 0.1), rec(false, 4.0, 0.3)];
        let s = summarize("a", None, &rows);
        assert_eq!((s.runs, s.sr, s.af), (2, 50.0, 3.0));
        assert!((s.at - 0.2).abs() < 1e-15);
    }
}
