//! `spsched`: validate, evaluate, solve, transform and render schedules.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spsched::error::Error;

#[derive(Parser)]
#[command(name = "spsched", version, about = "Shared-processor scheduling of multiprocessor jobs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Arith {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    /// Best order-compatible LP over all job orders.
    Exact,
    /// Enumeration of synchronized schedules.
    Oracle,
    /// α-private program solved by the simplex method.
    AlphaLp,
    /// α-private program solved as a max-profit flow.
    AlphaFlow,
    /// Single LP in processing-time order; antithetical instances only.
    Antithetical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Op {
    MakeSequential,
    Canonicalize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Check a schedule against the feasibility conditions.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, value_enum, default_value_t = Arith::Exact)]
        arith: Arith,
    },
    /// Total weighted overlap of a feasible schedule.
    Evaluate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, value_enum, default_value_t = Arith::Exact)]
        arith: Arith,
    },
    /// Solve an instance and print a summary.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        solver: Solver,
        #[arg(long, value_enum, default_value_t = Arith::Exact)]
        arith: Arith,
        /// Feed each job node with capacity m p/(2(m+1)) instead of (2m+1)p/(4(m+1)).
        #[arg(long)]
        paper_flow_capacity: bool,
        /// Write the schedule here instead of embedding it in the summary.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rewrite a schedule into sequential or canonical form.
    Transform {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long, value_enum, default_value_t = Arith::Exact)]
        arith: Arith,
        #[arg(long, default_value_t = spsched::structure::DEFAULT_CANONICALIZE_ITERATIONS)]
        max_iterations: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Gantt chart with one row per shared and per private processor.
    Render {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cross-check the solvers and transformations on seeded random instances.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        jobs: usize,
        #[arg(long)]
        machines: usize,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

/// 2 for bad input, 3 for refusals, 4 for broken invariants.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Refused(_) | Error::Precondition(_) | Error::NotDoable(_)) => 3,
        Some(Error::Invariant(_) | Error::LpStatus(_)) => 4,
        Some(_) => 2,
        None if err.downcast_ref::<commands::Breach>().is_some() => 4,
        None => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Validate { instance, schedule, arith } => commands::validate(&instance, &schedule, arith),
        Command::Evaluate { instance, schedule, arith } => commands::evaluate(&instance, &schedule, arith),
        Command::Solve { instance, solver, arith, paper_flow_capacity, output } => {
            commands::solve(&instance, solver, arith, paper_flow_capacity, output.as_deref())
        }
        Command::Transform { instance, schedule, op, arith, max_iterations, output } => {
            commands::transform(&instance, &schedule, op, arith, max_iterations, output.as_deref())
        }
        Command::Render { instance, schedule, format, output } => {
            commands::render(&instance, &schedule, format, output.as_deref())
        }
        Command::Fuzz { seed, jobs, machines, cases } => commands::fuzz(seed, jobs, machines, cases),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
