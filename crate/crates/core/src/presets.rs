//! Named planner configs: the incumbent on-board planner and baseline
//! planners assembled from the operator library.
//!
//! The baselines borrow the core update rule of the algorithm they are
//! named after and share everything else with the origin planner, so a
//! comparison isolates operator choice rather than reimplementation
//! detail.

use crate::error::{Error, Result};
use crate::genome::{Case1Kind, Division, EndKind, ExploitKind, ExploreKind, PlannerConfig, SelectionKind, SortKind};
use crate::operators::{Case2, RankScheme};
use crate::pathmodel::SmoothMethod;

/// The incumbent planner: a plain generational GA.
pub fn origin() -> PlannerConfig {
    PlannerConfig {
        n_control_points: 8,
        n_populations: 1,
        individuals: 32,
        division: Division::Single,
        smoother: SmoothMethod::BSpline,
        sort: SortKind::Penalty,
        sort_param: 1,
        elitism_pct: 5.0,
        rank: RankScheme::Linear,
        selection: SelectionKind::Roulette,
        selection_param: 0,
        exploit: ExploitKind::NPoint,
        exploit_param: 0,
        twins: true,
        explore: ExploreKind::Gaussian,
        explore_param: 1,
        keep_inferior: true,
        end: EndKind::Generations,
        end_param: 3,
        case1: Case1Kind::None,
        case1_param: 0,
        case2: Case2::None,
        case2_param: 0,
        restart: false,
        cellular: false,
        injection: 0,
        repair: 0,
        migration: 0,
        antibody: 0,
        forbid_clones: false,
        decay: 0,
        pfih: 0,
    }
}

/// Swarm and DE updates keep their members in place: equal scores with
/// stochastic universal sampling select every member exactly once.
fn in_place(c: PlannerConfig) -> PlannerConfig {
    PlannerConfig {
        rank: RankScheme::Identity,
        selection: SelectionKind::Sus,
        selection_param: 0,
        ..c
    }
}

pub const BASELINES: [&str; 7] = ["ga", "cipso", "jade", "cipde", "mwps", "hsgwo", "hhpso"];

pub fn baseline(name: &str) -> Result<PlannerConfig> {
    let o = origin();
    Ok(match name {
        "ga" => o,
        "cipso" => in_place(PlannerConfig {
            exploit: ExploitKind::Cipso,
            exploit_param: 2,
            explore: ExploreKind::NonUniform,
            explore_param: 1,
            keep_inferior: false,
            ..o
        }),
        "jade" => in_place(PlannerConfig {
            exploit: ExploitKind::DeBest,
            exploit_param: 1,
            explore: ExploreKind::None,
            ..o
        }),
        "cipde" => in_place(PlannerConfig {
            exploit: ExploitKind::DeRand,
            exploit_param: 1,
            explore: ExploreKind::Cinf,
            explore_param: 1,
            ..o
        }),
        "mwps" => in_place(PlannerConfig {
            exploit: ExploitKind::Safari,
            exploit_param: 1,
            explore: ExploreKind::Gaussian,
            explore_param: 0,
            keep_inferior: false,
            ..o
        }),
        "hsgwo" => in_place(PlannerConfig {
            exploit: ExploitKind::Commensalism,
            exploit_param: 0,
            explore: ExploreKind::Sgwo,
            keep_inferior: false,
            ..o
        }),
        "hhpso" => in_place(PlannerConfig {
            exploit: ExploitKind::Cipso,
            exploit_param: 1,
            explore: ExploreKind::Pus,
            explore_param: 1,
            keep_inferior: false,
            ..o
        }),
        other => {
            return Err(Error::Config(format!(
                "unknown baseline `{other}`; expected one of {}",
                BASELINES.join(", ")
            )))
        }
    })
}
