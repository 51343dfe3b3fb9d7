use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{Case1Kind, Division, EndKind, ExploitKind, ExploreKind, PlannerConfig, SelectionKind, SortKind};
use crate::error::{Error, Result};
use crate::operators::{
    Case1, Case2, CommensalDist, Crossover, DeVariant, EndMode, MutationKind, PsoParams, RankScheme, SafariParams,
    SelectionPolicy, SortStrategy,
};
use crate::pathmodel::SmoothMethod;

/// Environment variable naming a codebook file to use instead of the
/// built-in one.
pub const CODEBOOK_ENV: &str = "EVOPLANNER_CODEBOOK";

const BUILTIN: &str = include_str!("../../codebook/default.json");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyRow {
    pub lambda_start: f64,
    pub lambda_end: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaRow {
    pub alpha0: f64,
    pub power: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SortRows {
    pub penalty: [PenaltyRow; 8],
    pub non_dominated: [f64; 8],
    pub alpha_level: [AlphaRow; 8],
    pub violation_count: [f64; 8],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionRows {
    pub tournament: [usize; 4],
    pub truncation: [f64; 4],
    pub roulette: [f64; 4],
    pub sus: [f64; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExploitRows {
    pub n_point: [usize; 4],
    pub uniform: [f64; 4],
    pub arithmetic: [[f64; 2]; 4],
    pub pso: [PsoParams; 4],
    pub safari: [SafariParams; 4],
    pub commensalism: [CommensalDist; 4],
    /// `(F, CR)` rows.
    pub de_rand: [[f64; 2]; 4],
    pub de_best: [[f64; 2]; 4],
}

/// Gene mutation probability with the operator's spread or shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationRow {
    pub pm: f64,
    pub spread: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cinf {
    pub threshold: u32,
    pub a: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExploreRows {
    pub uniform: [f64; 4],
    /// `spread` is the Michalewicz shape `b`.
    pub non_uniform: [MutationRow; 4],
    /// `spread` is sigma in meters.
    pub gaussian: [MutationRow; 4],
    /// `spread` is the Cauchy scale in meters.
    pub cauchy: [MutationRow; 4],
    /// Amplitude `a`, meters.
    pub pus: [f64; 4],
    pub cinf: [Cinf; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndRows {
    pub generations: [usize; 8],
    /// Run-clock seconds.
    pub wall_time: [f64; 8],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case1Rows {
    pub stagnation: [usize; 4],
    pub homogenization: [f64; 4],
    pub goal: [f64; 4],
}

/// Values not selected by any genome field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    /// Schedule horizon for planners that end on the clock.
    pub wall_time_horizon: usize,
    /// Step of the local search, meters.
    pub pfih_sigma: f64,
    /// Perturbation applied to clones, meters.
    pub clone_sigma: f64,
    /// Members exchanged per migration.
    pub migration_count: usize,
    /// Migration interval used by divided populations when `Mgrt` is off.
    pub default_migration_interval: usize,
}

/// Maps raw field values to concrete operators and parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Codebook {
    pub version: u32,
    pub control_points: [usize; 4],
    pub populations: [usize; 4],
    pub individuals: [usize; 8],
    pub elitism_pct: [f64; 4],
    pub sort: SortRows,
    pub selection: SelectionRows,
    pub exploit: ExploitRows,
    pub explore: ExploreRows,
    pub end: EndRows,
    pub case1: Case1Rows,
    /// Gene RMS distance, meters, under which two populations count as
    /// similar.
    pub case2_similarity: [f64; 4],
    /// Share of each population replaced by fresh members per generation.
    pub injection: [f64; 4],
    /// Repair rounds per infeasible member.
    pub repair: [usize; 4],
    /// Generations between migrations; 0 disables.
    pub migration: [usize; 4],
    pub antibody: [f64; 4],
    /// Per-generation step-scale factor.
    pub decay: [f64; 4],
    /// Local-search trials on the best member per generation.
    pub pfih: [usize; 8],
    pub fixed: FixedParams,
    #[serde(skip)]
    digest: String,
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("codebook: {what}")))
    }
}

fn all<T: Copy>(rows: &[T], f: impl Fn(T) -> bool) -> bool {
    rows.iter().all(|&r| f(r))
}

fn prob(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn non_negative(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

impl Codebook {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut cb: Codebook =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("codebook: {e}")))?;
        cb.validate()?;
        cb.digest = hex::encode(Sha256::digest(text.as_bytes()));
        Ok(cb)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// The codebook shipped with the crate.
    pub fn builtin() -> &'static Codebook {
        static CELL: OnceLock<Codebook> = OnceLock::new();
        CELL.get_or_init(|| Codebook::from_json(BUILTIN).expect("built-in codebook is valid"))
    }

    pub fn builtin_json() -> &'static str {
        BUILTIN
    }

    /// The file named by [`CODEBOOK_ENV`] if set, else the built-in one.
    pub fn from_env() -> Result<Codebook> {
        match std::env::var_os(CODEBOOK_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::builtin().clone()),
        }
    }

    /// SHA-256 of the source text, hex.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn validate(&self) -> Result<()> {
        check(self.version == 1, "unsupported version")?;
        check(all(&self.control_points, |n| (2..=64).contains(&n)), "control point counts must be in 2..=64")?;
        check(all(&self.populations, |n| (1..=16).contains(&n)), "population counts must be in 1..=16")?;
        check(all(&self.individuals, |n| (4..=4096).contains(&n)), "individual counts must be in 4..=4096")?;
        check(all(&self.elitism_pct, |p| (0.0..=100.0).contains(&p)), "elitism must be a percentage")?;
        let s = &self.sort;
        check(
            all(&s.penalty, |r| non_negative(r.lambda_start) && non_negative(r.lambda_end)),
            "penalty weights must be non-negative",
        )?;
        check(all(&s.non_dominated, non_negative), "front weights must be non-negative")?;
        check(
            all(&s.alpha_level, |r| non_negative(r.alpha0) && non_negative(r.power)),
            "alpha rows must be non-negative",
        )?;
        check(all(&s.violation_count, non_negative), "violation tolerances must be non-negative")?;
        let se = &self.selection;
        check(all(&se.tournament, |k| k >= 1), "tournament size must be positive")?;
        check(all(&se.truncation, |c| c > 0.0 && c <= 1.0), "truncation cutoff must be in (0, 1]")?;
        check(all(&se.roulette, non_negative) && all(&se.sus, non_negative), "wheel pressure must be non-negative")?;
        let ex = &self.exploit;
        check(all(&ex.n_point, |k| k >= 1), "crossover points must be positive")?;
        check(all(&ex.uniform, prob), "uniform crossover rate must be a probability")?;
        check(all(&ex.arithmetic, |r| r.iter().all(|v| v.is_finite())), "arithmetic weights must be finite")?;
        check(
            all(&ex.pso, |p| non_negative(p.w) && non_negative(p.c_max) && non_negative(p.c_min)),
            "PSO coefficients must be non-negative",
        )?;
        check(
            all(&ex.safari, |p| non_negative(p.step) && non_negative(p.sigma) && p.top_fraction > 0.0 && p.top_fraction <= 1.0),
            "safari rows out of range",
        )?;
        check(
            all(&ex.de_rand, |r| non_negative(r[0]) && prob(r[1])) && all(&ex.de_best, |r| non_negative(r[0]) && prob(r[1])),
            "DE rows need F ≥ 0 and CR in [0, 1]",
        )?;
        let xp = &self.explore;
        check(all(&xp.uniform, prob), "mutation probability must be in [0, 1]")?;
        for rows in [&xp.non_uniform, &xp.gaussian, &xp.cauchy] {
            check(all(rows, |r| prob(r.pm) && non_negative(r.spread)), "mutation rows out of range")?;
        }
        check(all(&xp.pus, non_negative), "PUS amplitude must be non-negative")?;
        check(all(&xp.cinf, |c| prob(c.a)), "CINF keep rate must be in [0, 1]")?;
        check(all(&self.end.generations, |g| g >= 1), "generation limits must be positive")?;
        check(all(&self.end.wall_time, positive), "time limits must be positive")?;
        check(all(&self.case1.stagnation, |n| n >= 1), "stagnation windows must be positive")?;
        check(
            all(&self.case1.homogenization, |p| p > 0.0 && p <= 100.0),
            "homogenization must be a percentage",
        )?;
        check(all(&self.case1.goal, |g| g.is_finite()), "goals must be finite")?;
        check(all(&self.case2_similarity, non_negative), "similarity must be non-negative")?;
        check(all(&self.injection, |r| (0.0..1.0).contains(&r)), "injection share must be in [0, 1)")?;
        check(all(&self.antibody, non_negative), "antibody strength must be non-negative")?;
        check(all(&self.decay, |d| d > 0.0 && d <= 1.0), "decay factors must be in (0, 1]")?;
        let f = &self.fixed;
        check(f.wall_time_horizon >= 1, "wall-time horizon must be positive")?;
        check(non_negative(f.pfih_sigma) && non_negative(f.clone_sigma), "fixed sigmas must be non-negative")?;
        Ok(())
    }

    /// Turns a config into concrete operators.
    pub fn resolve(&self, c: &PlannerConfig) -> Planner {
        let s = c.sort_param as usize;
        let sort = match c.sort {
            SortKind::Penalty => {
                let r = self.sort.penalty[s];
                SortStrategy::Penalty {
                    lambda_start: r.lambda_start,
                    lambda_end: r.lambda_end,
                }
            }
            SortKind::NonDominated => SortStrategy::NonDominated {
                weight: self.sort.non_dominated[s],
            },
            SortKind::AlphaLevel => {
                let r = self.sort.alpha_level[s];
                SortStrategy::AlphaLevel {
                    alpha0: r.alpha0,
                    power: r.power,
                }
            }
            SortKind::ViolationCount => SortStrategy::ViolationCount {
                tol: self.sort.violation_count[s],
            },
        };
        let p = c.selection_param as usize;
        let selection = match c.selection {
            SelectionKind::Tournament => SelectionPolicy::Tournament {
                size: self.selection.tournament[p],
            },
            SelectionKind::Truncation => SelectionPolicy::Truncation {
                cutoff: self.selection.truncation[p],
            },
            SelectionKind::Roulette => SelectionPolicy::Roulette {
                pressure: self.selection.roulette[p],
            },
            SelectionKind::Sus => SelectionPolicy::Sus {
                pressure: self.selection.sus[p],
            },
        };
        let e = c.exploit_param as usize;
        let ex = &self.exploit;
        let exploit = match c.exploit {
            ExploitKind::NPoint => ExploitOp::Crossover(Crossover::NPoint { points: ex.n_point[e] }),
            ExploitKind::Uniform => ExploitOp::Crossover(Crossover::Uniform { rate: ex.uniform[e] }),
            ExploitKind::Arithmetic => ExploitOp::Crossover(Crossover::Arithmetic {
                l1: ex.arithmetic[e][0],
                l2: ex.arithmetic[e][1],
            }),
            ExploitKind::Cipso => ExploitOp::Pso(ex.pso[e]),
            ExploitKind::Safari => ExploitOp::Safari(ex.safari[e]),
            ExploitKind::Commensalism => ExploitOp::Commensalism(ex.commensalism[e]),
            ExploitKind::DeRand => ExploitOp::De {
                variant: DeVariant::Rand,
                f: ex.de_rand[e][0],
                cr: ex.de_rand[e][1],
            },
            ExploitKind::DeBest => ExploitOp::De {
                variant: DeVariant::Best,
                f: ex.de_best[e][0],
                cr: ex.de_best[e][1],
            },
        };
        let x = c.explore_param as usize;
        let xp = &self.explore;
        let explore = match c.explore {
            ExploreKind::Uniform => ExploreOp::Mutation {
                kind: MutationKind::Uniform,
                pm: xp.uniform[x],
            },
            ExploreKind::NonUniform => ExploreOp::Mutation {
                kind: MutationKind::NonUniform {
                    b: xp.non_uniform[x].spread,
                },
                pm: xp.non_uniform[x].pm,
            },
            ExploreKind::Gaussian => ExploreOp::Mutation {
                kind: MutationKind::Gaussian {
                    sigma: xp.gaussian[x].spread,
                },
                pm: xp.gaussian[x].pm,
            },
            ExploreKind::Cauchy => ExploreOp::Mutation {
                kind: MutationKind::Cauchy {
                    scale: xp.cauchy[x].spread,
                },
                pm: xp.cauchy[x].pm,
            },
            ExploreKind::Pus => ExploreOp::Pus { a: xp.pus[x] },
            ExploreKind::Sgwo => ExploreOp::Sgwo,
            ExploreKind::Cinf => ExploreOp::Cinf(xp.cinf[x]),
            ExploreKind::None => ExploreOp::None,
        };
        let ep = c.end_param as usize;
        let (end, horizon) = match c.end {
            EndKind::Generations => (EndMode::Generations, self.end.generations[ep]),
            EndKind::WallTime => (
                EndMode::WallTime {
                    seconds: self.end.wall_time[ep],
                },
                self.fixed.wall_time_horizon,
            ),
        };
        let c1 = c.case1_param as usize;
        let case1 = match c.case1 {
            Case1Kind::None => Case1::None,
            Case1Kind::Stagnation => Case1::Stagnation(self.case1.stagnation[c1]),
            Case1Kind::Homogenization => Case1::Homogenization(self.case1.homogenization[c1]),
            Case1Kind::Goal => Case1::Goal(self.case1.goal[c1]),
        };
        let mut migration_interval = self.migration[c.migration as usize];
        if migration_interval == 0 && c.division != Division::Single && c.n_populations > 1 {
            migration_interval = self.fixed.default_migration_interval;
        }
        Planner {
            config: *c,
            n_control_points: c.n_control_points,
            n_populations: if c.division == Division::Single { 1 } else { c.n_populations },
            individuals: c.individuals,
            division: c.division,
            smoother: c.smoother,
            sort,
            elitism_pct: c.elitism_pct,
            rank: c.rank,
            selection,
            exploit,
            twins: c.twins,
            explore,
            keep_inferior: c.keep_inferior,
            end,
            horizon,
            case1,
            case2: c.case2,
            similarity: self.case2_similarity[c.case2_param as usize],
            restart: c.restart,
            cellular: c.cellular,
            injection: self.injection[c.injection as usize],
            repair_rounds: self.repair[c.repair as usize],
            migration_interval,
            antibody: self.antibody[c.antibody as usize],
            forbid_clones: c.forbid_clones,
            decay: self.decay[c.decay as usize],
            pfih_iterations: self.pfih[c.pfih as usize],
            fixed: self.fixed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExploitOp {
    Crossover(Crossover),
    Pso(PsoParams),
    Safari(SafariParams),
    Commensalism(CommensalDist),
    De { variant: DeVariant, f: f64, cr: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExploreOp {
    Mutation { kind: MutationKind, pm: f64 },
    Pus { a: f64 },
    Sgwo,
    Cinf(Cinf),
    None,
}

/// A config with every codebook lookup applied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Planner {
    pub config: PlannerConfig,
    pub n_control_points: usize,
    /// Populations actually run; a single division always runs one.
    pub n_populations: usize,
    pub individuals: usize,
    pub division: Division,
    pub smoother: SmoothMethod,
    pub sort: SortStrategy,
    pub elitism_pct: f64,
    pub rank: RankScheme,
    pub selection: SelectionPolicy,
    pub exploit: ExploitOp,
    pub twins: bool,
    pub explore: ExploreOp,
    pub keep_inferior: bool,
    pub end: EndMode,
    /// Generation horizon for schedules and the generation limit.
    pub horizon: usize,
    pub case1: Case1,
    pub case2: Case2,
    pub similarity: f64,
    pub restart: bool,
    pub cellular: bool,
    pub injection: f64,
    pub repair_rounds: usize,
    pub migration_interval: usize,
    pub antibody: f64,
    pub forbid_clones: bool,
    pub decay: f64,
    pub pfih_iterations: usize,
    pub fixed: FixedParams,
}

impl Planner {
    pub fn from_config(c: &PlannerConfig, cb: &Codebook) -> Self {
        cb.resolve(c)
    }
}
