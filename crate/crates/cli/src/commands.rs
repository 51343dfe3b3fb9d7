use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};

use evoplanner::bench::{bench_with, desk_suite, is_success};
use evoplanner::engine::{run_planner_with, PlannerRun, RunBudget};
use evoplanner::error::{Error, Result};
use evoplanner::evaluation::EvalSettings;
use evoplanner::evolver::{evolve_with, EPConfig, EPResult};
use evoplanner::genome::{decode_with, describe_with, encode_with, parse_describe_with, Codebook, PlannerConfig, PlannerGenome};
use evoplanner::presets::{baseline, BASELINES};
use evoplanner::rng::derive_seed;
use evoplanner::scenario::{
    generate_scenario, load_scenario, save_scenario, scenario_digest, DensityPreset, ReliefPreset, Scenario,
    ScenarioParams,
};

use crate::artifacts::{path_dump, read, write, write_json};
use crate::{BudgetArgs, Cli, Command};

/// EP planner time when `--full` is given, run-clock seconds.
const FULL_SECONDS: f64 = 1200.0;

/// Label separating comparison seeds from everything else under `--seed`.
const LABEL_COMPARE: u64 = 99;

/// Contents of the `--config` file. Every section is optional and command
/// flags take precedence over it.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<ScenarioParams>,
    pub budget: Option<RunBudget>,
    pub ep: Option<EPConfig>,
    pub settings: Option<EvalSettings>,
}

struct Context {
    seed: u64,
    out: PathBuf,
    file: FileConfig,
    codebook: Codebook,
    settings: EvalSettings,
}

impl Context {
    fn budget(&self, args: &BudgetArgs) -> RunBudget {
        let base = self.file.budget.unwrap_or(RunBudget {
            max_generations: 200,
            max_wall_time: 0.3,
            seed: 0,
        });
        RunBudget {
            max_generations: args.generations.unwrap_or(base.max_generations),
            max_wall_time: args.wall_time.unwrap_or(base.max_wall_time),
            seed: self.seed,
        }
    }

    /// A genome literal or a baseline name.
    fn planner(&self, spec: &str) -> Result<(PlannerGenome, PlannerConfig)> {
        if BASELINES.contains(&spec) {
            let c = baseline(spec)?;
            return Ok((encode_with(&c, &self.codebook)?, c));
        }
        if spec.trim().len() != 64 {
            return Err(Error::Config(format!(
                "`{spec}` is neither a genome literal nor a baseline; baselines are {}",
                BASELINES.join(", ")
            )));
        }
        let g: PlannerGenome = spec.parse()?;
        Ok((g, decode_with(g, &self.codebook)))
    }

    fn run(&self, c: &PlannerConfig, s: &Scenario, budget: &RunBudget) -> Result<PlannerRun> {
        run_planner_with(&self.codebook.resolve(c), s, budget, self.settings)
    }
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    let file: FileConfig = match &cli.config {
        Some(p) => serde_json::from_str(&read(p)?)?,
        None => FileConfig::default(),
    };
    let ctx = Context {
        seed: cli.seed,
        out: cli.out.clone(),
        settings: file.settings.unwrap_or_default(),
        codebook: Codebook::from_env()?,
        file,
    };
    match &cli.command {
        Command::GenScenario { density, relief, name } => gen_scenario(&ctx, density, relief, name),
        Command::Run {
            scenario,
            planner,
            budget,
        } => {
            let spec = planner.genome.as_deref().or(planner.baseline.as_deref()).expect("clap group");
            if let Some(b) = &planner.baseline {
                if !BASELINES.contains(&b.as_str()) {
                    return Err(Error::Config(format!("unknown baseline `{b}`; choose one of {}", BASELINES.join(", "))));
                }
            }
            run(&ctx, scenario, spec, budget)
        }
        Command::Evolve {
            scenario,
            origin,
            epochs,
            seconds,
            full,
            penalty,
            pool,
            workers,
            compare_seeds,
        } => {
            let mut cfg = ctx.file.ep.unwrap_or_default();
            cfg.seed = ctx.seed;
            if *full {
                cfg.epochs = None;
                cfg.max_seconds = Some(FULL_SECONDS);
            }
            if epochs.is_some() || seconds.is_some() {
                cfg.epochs = *epochs;
                cfg.max_seconds = *seconds;
            }
            cfg.penalty = penalty.unwrap_or(cfg.penalty);
            cfg.pool_size = pool.unwrap_or(cfg.pool_size);
            cfg.workers = workers.unwrap_or(cfg.workers);
            evolve(&ctx, scenario, origin, &cfg, *compare_seeds)
        }
        Command::Bench {
            scenario,
            algorithms,
            genomes,
            repeats,
            budget,
        } => run_bench(&ctx, scenario, algorithms, genomes, *repeats, budget),
        Command::Describe { genome, parse } => describe(&ctx, genome.as_deref(), parse.as_deref()),
    }
}

fn preset<T: Copy>(all: &[T], name: impl Fn(T) -> &'static str, value: &str, what: &str) -> Result<T> {
    all.iter().copied().find(|p| name(*p) == value).ok_or_else(|| {
        let names: Vec<_> = all.iter().map(|p| name(*p)).collect();
        Error::Config(format!("unknown {what} `{value}`; choose one of {}", names.join(", ")))
    })
}

fn gen_scenario(ctx: &Context, density: &str, relief: &str, name: &str) -> Result<()> {
    let params = ScenarioParams {
        density: preset(&DensityPreset::ALL, DensityPreset::name, density, "density")?,
        relief: preset(&ReliefPreset::ALL, ReliefPreset::name, relief, "relief")?,
        ..ctx.file.scenario.clone().unwrap_or_default()
    };
    let s = generate_scenario(ctx.seed, &params)?;
    let path = ctx.out.join(name);
    std::fs::create_dir_all(&ctx.out).map_err(|e| Error::io(&ctx.out, e))?;
    save_scenario(&s, &path)?;
    load_scenario(&path)?.validate()?;
    println!("scenario    {}", path.display());
    println!("preset      {density}/{relief}, seed {}", ctx.seed);
    println!(
        "threats     {} radars, {} missiles, {} no-fly zones",
        s.radars().count(),
        s.missiles().count(),
        s.no_fly_zones().count()
    );
    println!("terrain     {} x {} nodes, heights {:.2}..{:.2}", s.terrain.nx(), s.terrain.ny(), s.terrain.min_height(), s.terrain.max_height());
    println!("start       ({:.2}, {:.2}, {:.2})", s.start.x, s.start.y, s.start.z);
    println!("target      ({:.2}, {:.2}, {:.2})", s.target.x, s.target.y, s.target.z);
    println!("digest      {}", scenario_digest(&s));
    Ok(())
}

#[derive(Serialize)]
struct RunSummary<'a> {
    planner: String,
    scenario: String,
    budget: RunBudget,
    codebook: &'a str,
    success: bool,
    fitness: f64,
    constraints: [f64; 5],
    elapsed: f64,
    evaluations: u64,
    generations: usize,
    stop_reason: String,
}

fn run(ctx: &Context, scenario: &Path, spec: &str, budget: &BudgetArgs) -> Result<()> {
    let s = load_scenario(scenario)?;
    let (g, c) = ctx.planner(spec)?;
    let budget = ctx.budget(budget);
    let r = ctx.run(&c, &s, &budget)?;
    let summary = RunSummary {
        planner: g.to_string(),
        scenario: scenario_digest(&s),
        budget,
        codebook: ctx.codebook.digest(),
        success: is_success(&r.best_report),
        fitness: r.best_report.fitness,
        constraints: r.best_report.constraint_vector(),
        elapsed: r.elapsed,
        evaluations: r.evaluations,
        generations: r.generations_executed,
        stop_reason: format!("{:?}", r.stop_reason),
    };
    write(&ctx.out, "telemetry.jsonl", &r.telemetry_jsonl())?;
    write_json(&ctx.out, "report.json", &r.best_report)?;
    write_json(&ctx.out, "run.json", &summary)?;
    write(&ctx.out, "path.json", &path_dump(&r, &s)?)?;
    println!("planner     {g}");
    println!("fitness     {:.6}", summary.fitness);
    println!("constraints {:?}", summary.constraints);
    println!("success     {}", summary.success);
    println!("generations {} ({}), run clock {:.4}s", summary.generations, summary.stop_reason, summary.elapsed);
    Ok(())
}

#[derive(Serialize)]
struct Comparison {
    scenario: usize,
    seeds: usize,
    origin_fitness: f64,
    origin_violation: f64,
    origin_sr: f64,
    evolved_fitness: f64,
    evolved_violation: f64,
    evolved_sr: f64,
}

/// Mean fitness, mean violation and success rate over `seeds` runs.
fn measure(ctx: &Context, c: &PlannerConfig, s: &Scenario, budget: RunBudget, seeds: &[u64]) -> Result<(f64, f64, f64)> {
    let (mut f, mut v, mut ok) = (0.0, 0.0, 0usize);
    for &seed in seeds {
        let r = ctx.run(c, s, &RunBudget { seed, ..budget })?;
        f += r.best_report.fitness;
        v += r.best_report.violation();
        ok += is_success(&r.best_report) as usize;
    }
    let n = seeds.len().max(1) as f64;
    Ok((f / n, v / n, 100.0 * ok as f64 / n))
}

fn lineage_csv(r: &EPResult) -> String {
    let mut out = String::from("epoch,slot,genome,f_ep,elapsed,best_ever,spent\n");
    for e in &r.lineage {
        for (k, g) in e.genomes.iter().enumerate() {
            out.push_str(&format!("{},{k},{g},{},{},{},{}\n", e.epoch, e.fitness[k], e.elapsed[k], e.best_ever, e.spent));
        }
    }
    out
}

fn evolve(ctx: &Context, files: &[PathBuf], origin: &str, cfg: &EPConfig, compare_seeds: usize) -> Result<()> {
    let scenarios = files.iter().map(load_scenario).collect::<Result<Vec<_>>>()?;
    let (g0, c0) = ctx.planner(origin)?;
    info!("evolving from {g0} on {} scenario(s)", scenarios.len());
    let result = evolve_with(&[g0], &scenarios, cfg, &ctx.codebook, ctx.settings)?;
    let best = decode_with(result.best_genome, &ctx.codebook);
    let text = describe_with(result.best_genome, &ctx.codebook);

    let mut rows = Vec::new();
    for (i, s) in scenarios.iter().enumerate() {
        let seeds: Vec<u64> = (0..compare_seeds).map(|k| derive_seed(ctx.seed, &[LABEL_COMPARE, i as u64, k as u64])).collect();
        let (of, ov, osr) = measure(ctx, &c0, s, cfg.planner_budget, &seeds)?;
        let (ef, ev, esr) = measure(ctx, &best, s, cfg.planner_budget, &seeds)?;
        rows.push(Comparison {
            scenario: i,
            seeds: compare_seeds,
            origin_fitness: of,
            origin_violation: ov,
            origin_sr: osr,
            evolved_fitness: ef,
            evolved_violation: ev,
            evolved_sr: esr,
        });
    }

    write(&ctx.out, "genome.txt", &format!("{}\n", result.best_genome))?;
    write(&ctx.out, "describe.txt", &text)?;
    write(&ctx.out, "lineage.csv", &lineage_csv(&result))?;
    write_json(&ctx.out, "config.json", cfg)?;
    write(&ctx.out, "codebook.sha256", &format!("{}\n", ctx.codebook.digest()))?;
    write_json(&ctx.out, "result.json", &result)?;
    write_json(&ctx.out, "comparison.json", &rows)?;

    println!("{text}");
    println!("genome      {}", result.best_genome);
    println!("F_EP        {:.6} after {} epochs, run clock {:.2}s", result.best_fitness, result.lineage.len() - 1, result.total_elapsed);
    for (i, f) in result.best_score.per_scenario.iter().enumerate() {
        println!("  scenario {i}: mean F_EP {f:.6}");
    }
    println!("{:<10}{:>14}{:>14}{:>10}{:>14}{:>14}{:>10}", "scenario", "origin F", "origin viol", "SR%", "evolved F", "evolved viol", "SR%");
    for r in &rows {
        println!(
            "{:<10}{:>14.6}{:>14.6}{:>10.1}{:>14.6}{:>14.6}{:>10.1}",
            r.scenario, r.origin_fitness, r.origin_violation, r.origin_sr, r.evolved_fitness, r.evolved_violation, r.evolved_sr
        );
    }
    Ok(())
}

fn run_bench(
    ctx: &Context,
    files: &[PathBuf],
    algorithms: &[String],
    genomes: &[String],
    repeats: usize,
    budget: &BudgetArgs,
) -> Result<()> {
    let cases = if files.is_empty() {
        desk_suite(ctx.seed)?
    } else {
        files
            .iter()
            .map(|p| {
                let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                Ok((name, load_scenario(p)?))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let mut algs = Vec::new();
    for a in algorithms {
        if !BASELINES.contains(&a.as_str()) {
            return Err(Error::Config(format!("unknown baseline `{a}`; choose one of {}", BASELINES.join(", "))));
        }
        algs.push((a.clone(), baseline(a)?));
    }
    for spec in genomes {
        let (name, lit) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("`{spec}` is not NAME=GENOME")))?;
        algs.push((name.to_string(), ctx.planner(lit)?.1));
    }
    let report = bench_with(&algs, &cases, repeats, ctx.seed, ctx.budget(budget), &ctx.codebook, ctx.settings)?;
    write_json(&ctx.out, "bench.json", &report)?;
    write(&ctx.out, "bench.csv", &report.csv())?;
    write(&ctx.out, "records.csv", &report.records_csv())?;
    print!("{}", report.table());
    Ok(())
}

fn describe(ctx: &Context, genome: Option<&str>, parse: Option<&Path>) -> Result<()> {
    match (genome, parse) {
        (_, Some(p)) => println!("{}", parse_describe_with(&read(p)?, &ctx.codebook)?),
        (Some(spec), None) => print!("{}", describe_with(ctx.planner(spec)?.0, &ctx.codebook)),
        (None, None) => unreachable!("clap requires one of them"),
    }
    Ok(())
}
