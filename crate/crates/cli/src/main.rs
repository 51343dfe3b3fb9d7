mod artifacts;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use evoplanner::error::Error;

#[derive(Parser, Debug)]
#[command(name = "evoplanner", version, about = "Evolve and benchmark genome-encoded path planners")]
pub struct Cli {
    /// Master seed; every command is reproducible for a fixed seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// JSON file with `scenario`, `budget`, `ep` and `settings` overrides.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a scenario from a density and relief preset.
    GenScenario {
        #[arg(long, default_value = "sparse")]
        density: String,
        #[arg(long, default_value = "basic")]
        relief: String,
        /// File name inside the output directory.
        #[arg(long, default_value = "scenario.json")]
        name: String,
    },
    /// Run one planner on a scenario.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        planner: PlannerChoice,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Evolve a planner for one or more scenarios.
    Evolve {
        #[arg(long, required = true, num_args = 1..)]
        scenario: Vec<PathBuf>,
        /// Starting genome: a 64-bit literal or a baseline name.
        #[arg(long, default_value = "ga")]
        origin: String,
        #[arg(long)]
        epochs: Option<usize>,
        /// Run-clock seconds of planner time to spend.
        #[arg(long)]
        seconds: Option<f64>,
        /// Spend 20 minutes of planner time instead of the desk budget.
        #[arg(long, conflicts_with_all = ["epochs", "seconds"])]
        full: bool,
        #[arg(long)]
        penalty: Option<f64>,
        #[arg(long)]
        pool: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        /// Planner seeds per scenario in the before/after comparison.
        #[arg(long, default_value_t = 10)]
        compare_seeds: usize,
    },
    /// Success rate, average fitness and average time of several planners.
    Bench {
        /// Scenario files; the built-in four-case desk suite when omitted.
        #[arg(long, num_args = 1..)]
        scenario: Vec<PathBuf>,
        /// Comma-separated baseline names.
        #[arg(long, value_delimiter = ',', default_value = "ga,cipso,jade,cipde,mwps,hsgwo,hhpso")]
        algorithms: Vec<String>,
        /// Extra planner as NAME=GENOME; may be repeated.
        #[arg(long = "genome")]
        genomes: Vec<String>,
        #[arg(long, default_value_t = 25)]
        repeats: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print a genome's configuration, or parse a description back.
    Describe {
        /// Genome literal or baseline name.
        #[arg(required_unless_present = "parse")]
        genome: Option<String>,
        /// File holding describe output to turn back into a literal.
        #[arg(long, conflicts_with = "genome")]
        parse: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct PlannerChoice {
    /// 64-character 0/1 genome literal.
    #[arg(long)]
    pub genome: Option<String>,
    /// Named baseline planner.
    #[arg(long)]
    pub baseline: Option<String>,
}

#[derive(Args, Debug)]
pub struct BudgetArgs {
    #[arg(long)]
    pub generations: Option<usize>,
    /// Run-clock seconds per planner run.
    #[arg(long)]
    pub wall_time: Option<f64>,
}

/// Process exit code for a library error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Placement { .. } => 4,
        Error::InvalidSpec(_)
        | Error::Schema { .. }
        | Error::Config(_)
        | Error::InvalidInput(_)
        | Error::GenomeLiteral(_)
        | Error::Encoding { .. }
        | Error::Json(_)
        | Error::Schedule
        | Error::DegeneratePath => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
