use super::codebook::{ExploitOp, ExploreOp, Planner};
use super::config::{decode_with, Coded};
use super::{Codebook, PlannerGenome, LAYOUT};
use crate::error::{Error, Result};
use crate::operators::{Case1, Case2, Crossover, EndMode, MutationKind, SelectionPolicy, SortStrategy};

fn on_off(b: bool) -> String {
    if b { "on" } else { "off" }.to_string()
}

fn level<T: PartialEq + Default + std::fmt::Display>(name: &str, v: T) -> String {
    if v == T::default() {
        "off".to_string()
    } else {
        format!("{name}={v}")
    }
}

fn value(k: usize, p: &Planner) -> String {
    let c = &p.config;
    match k {
        0 => c.n_control_points.to_string(),
        1 => c.n_populations.to_string(),
        2 => c.individuals.to_string(),
        3 => c.division.name().into(),
        4 => c.smoother.name().into(),
        5 => c.sort.name().into(),
        6 => match p.sort {
            SortStrategy::Penalty { lambda_start, lambda_end } => {
                format!("lambda_start={lambda_start} lambda_end={lambda_end}")
            }
            SortStrategy::NonDominated { weight } => format!("weight={weight}"),
            SortStrategy::AlphaLevel { alpha0, power } => format!("alpha0={alpha0} power={power}"),
            SortStrategy::ViolationCount { tol } => format!("tol={tol}"),
        },
        7 => format!("{}%", c.elitism_pct),
        8 => c.rank.name().into(),
        9 => c.selection.name().into(),
        10 => match p.selection {
            SelectionPolicy::Tournament { size } => format!("size={size}"),
            SelectionPolicy::Truncation { cutoff } => format!("cutoff={cutoff}"),
            SelectionPolicy::Roulette { pressure } | SelectionPolicy::Sus { pressure } => {
                format!("pressure={pressure}")
            }
        },
        11 => c.exploit.name().into(),
        12 => match p.exploit {
            ExploitOp::Crossover(Crossover::NPoint { points }) => format!("points={points}"),
            ExploitOp::Crossover(Crossover::Uniform { rate }) => format!("rate={rate}"),
            ExploitOp::Crossover(Crossover::Arithmetic { l1, l2 }) => format!("l1={l1} l2={l2}"),
            ExploitOp::Pso(q) => format!("w={} c_max={} c_min={}", q.w, q.c_max, q.c_min),
            ExploitOp::Safari(q) => format!("step={} sigma={} top_fraction={}", q.step, q.sigma, q.top_fraction),
            ExploitOp::Commensalism(d) => format!("dist={}", d.name()),
            ExploitOp::De { f, cr, .. } => format!("F={f} CR={cr}"),
        },
        13 => on_off(c.twins),
        14 => c.explore.name().into(),
        15 => match p.explore {
            ExploreOp::Mutation { kind, pm } => match kind {
                MutationKind::Uniform => format!("pm={pm}"),
                MutationKind::NonUniform { b } => format!("pm={pm} b={b}"),
                MutationKind::Gaussian { sigma } => format!("pm={pm} sigma={sigma}"),
                MutationKind::Cauchy { scale } => format!("pm={pm} scale={scale}"),
            },
            ExploreOp::Pus { a } => format!("a={a}"),
            ExploreOp::Cinf(q) => format!("threshold={} a={}", q.threshold, q.a),
            ExploreOp::Sgwo | ExploreOp::None => "unused".into(),
        },
        16 => on_off(c.keep_inferior),
        17 => c.end.name().into(),
        18 => match p.end {
            EndMode::Generations => format!("generations={}", p.horizon),
            EndMode::WallTime { seconds } => format!("seconds={seconds}"),
        },
        19 => c.case1.name().into(),
        20 => match p.case1 {
            Case1::None => "unused".into(),
            Case1::Stagnation(n) => format!("generations={n}"),
            Case1::Homogenization(pct) => format!("percent={pct}"),
            Case1::Goal(f) => format!("fitness={f}"),
        },
        21 => c.case2.name().into(),
        22 => {
            if c.case2 == Case2::None {
                "unused".into()
            } else {
                format!("similarity={}", p.similarity)
            }
        }
        23 => on_off(c.restart),
        24 => on_off(c.cellular),
        25 => level("share", p.injection),
        26 => level("rounds", p.repair_rounds),
        27 => level("every", p.codebook_migration()),
        28 => level("strength", p.antibody),
        29 => on_off(c.forbid_clones),
        30 => {
            if p.decay == 1.0 {
                "off".into()
            } else {
                format!("factor={}", p.decay)
            }
        }
        31 => level("trials", p.pfih_iterations),
        _ => unreachable!("32 fields"),
    }
}

impl Planner {
    /// Migration interval chosen by the `Mgrt` field alone.
    fn codebook_migration(&self) -> usize {
        if self.config.migration == 0 {
            0
        } else {
            self.migration_interval
        }
    }
}

fn line(k: usize, g: PlannerGenome, p: &Planner) -> String {
    let f = &LAYOUT[k];
    format!("{:<4}{:<14}{:<4}{}", f.table.roman(), f.token, g.field_literal(f), value(k, p))
}

/// One line per token: table, token, raw bits and decoded value.
pub fn describe_with(g: PlannerGenome, cb: &Codebook) -> String {
    let p = cb.resolve(&decode_with(g, cb));
    let mut out = String::new();
    for k in 0..LAYOUT.len() {
        out.push_str(&line(k, g, &p));
        out.push('\n');
    }
    out
}

pub fn describe(g: PlannerGenome) -> String {
    describe_with(g, Codebook::builtin())
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Rebuilds the genome from describe output. The bit column is
/// authoritative; every value column must match what those bits decode to.
pub fn parse_describe_with(text: &str, cb: &Codebook) -> Result<PlannerGenome> {
    let bad = |k: usize, why: String| Error::GenomeLiteral(format!("describe line {}: {why}", k + 1));
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != LAYOUT.len() {
        return Err(Error::GenomeLiteral(format!("expected {} describe lines, got {}", LAYOUT.len(), lines.len())));
    }
    let mut g = PlannerGenome::ZEROS;
    for (k, (l, f)) in lines.iter().zip(&LAYOUT).enumerate() {
        let mut parts = l.split_whitespace();
        let (table, token, bits) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(bad(k, "too few columns".into())),
        };
        if table != f.table.roman() || token != f.token {
            return Err(bad(k, format!("expected {} {}, found {table} {token}", f.table.roman(), f.token)));
        }
        if bits.len() != f.width || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(bad(k, format!("`{bits}` is not a {}-bit field", f.width)));
        }
        let v = u32::from_str_radix(bits, 2).map_err(|e| bad(k, e.to_string()))?;
        g = g.with_bits_at(f.offset, f.width, v);
    }
    let p = cb.resolve(&decode_with(g, cb));
    for (k, l) in lines.iter().enumerate() {
        if normalize(l) != normalize(&line(k, g, &p)) {
            return Err(bad(k, format!("value does not match bits: `{}`", l.trim())));
        }
    }
    Ok(g)
}

pub fn parse_describe(text: &str) -> Result<PlannerGenome> {
    parse_describe_with(text, Codebook::builtin())
}
