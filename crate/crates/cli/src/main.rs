//! `qbayes`: exact and sampled inference on Bayesian networks, plus circuit
//! inspection for the quantum rejection sampler.

mod commands;
mod error;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qbayes::{MczMode, ScheduleMode};

#[derive(Parser, Debug)]
#[command(
    name = "qbayes",
    version,
    about = "Quantum rejection sampling for Bayesian networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact P(query | evidence) by enumeration.
    Exact(Opts),
    /// Draw samples of the query nodes conditioned on the evidence.
    Sample(Opts),
    /// Gate counts of the preparation, reflection and Grover operators.
    Gatecount(Opts),
    /// Amplitudes of the prepared q-sample state.
    PrepState(Opts),
    /// Classical vs quantum cost on the built-in chain family.
    Compare(CompareOpts),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Quantum,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    #[value(name = "A_B", alias = "prep")]
    Prep,
    #[value(name = "S_e")]
    Se,
    #[value(name = "S_0")]
    S0,
    #[value(name = "G")]
    G,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Network JSON file.
    #[arg(long)]
    pub net: PathBuf,
    /// Evidence as `NAME=BIT,...`.
    #[arg(long, default_value = "")]
    pub evidence: String,
    /// Query nodes as `NAME,...`; defaults to every non-evidence node.
    #[arg(long)]
    pub query: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Quantum)]
    pub method: Method,
    #[arg(long, value_parser = parse_mcz, default_value = "primitive")]
    pub mcz: MczMode,
    #[arg(long, value_parser = parse_schedule, default_value = "paper")]
    pub schedule: ScheduleMode,
    /// Rounds before the iterate exponent resets.
    #[arg(long, default_value_t = 30)]
    pub max_rounds: u32,
    /// Evidence measurements allowed per sample.
    #[arg(long, default_value_t = 10_000)]
    pub restart_cap: u64,
    /// Ancestral draws allowed for a classical batch.
    #[arg(long, default_value_t = qbayes::bayesnet::DEFAULT_DRAW_BUDGET)]
    pub draw_budget: u64,
    /// Report format; `prep-state` defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a JSON-lines circuit dump (gatecount, prep-state).
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Operator::Prep)]
    pub dump_op: Operator,
}

#[derive(Args, Debug, Clone)]
pub struct CompareOpts {
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    #[arg(long, default_value_t = 6)]
    pub k_max: usize,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_parser = parse_schedule, default_value = "randomized")]
    pub schedule: ScheduleMode,
    /// Fixed round cap; by default it scales with the evidence size.
    #[arg(long)]
    pub max_rounds: Option<u32>,
    #[arg(long, value_parser = parse_mcz, default_value = "primitive")]
    pub mcz: MczMode,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_mcz(s: &str) -> Result<MczMode, String> {
    s.parse()
}

fn parse_schedule(s: &str) -> Result<ScheduleMode, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Exact(o) => commands::exact(o),
        Command::Sample(o) => commands::sample(o),
        Command::Gatecount(o) => commands::gatecount(o),
        Command::PrepState(o) => commands::prep_state(o),
        Command::Compare(o) => commands::compare(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
