use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod checkpoint;
mod commands;
mod config;
mod report;

use config::RunConfig;

/// Quantum graph convolutional network experiments, exactly simulated.
#[derive(Debug, Parser)]
#[command(name = "qgcn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the training seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the input graph and write the node/edge artifact plus a report.
    BuildGraph(CommonArgs),
    /// Train on a built graph artifact; writes a checkpoint and loss history.
    Train(CommonArgs),
    /// Embed every node with a trained checkpoint; writes embeddings.csv.
    Embed(CommonArgs),
    /// Evaluate exported embeddings; writes eval_report.json.
    Eval(CommonArgs),
    /// Train and evaluate both pipelines with identical seeds side by side.
    Compare(CommonArgs),
}

/// Exit codes: 0 success, 1 validation error, 2 runtime/numerical error.
fn exit_code_for(error: &CliError) -> u8 {
    match error {
        CliError::Core(e) if e.is_validation() => 1,
        CliError::Config(_) => 1,
        CliError::Core(_) | CliError::Io { .. } | CliError::Json { .. } => 2,
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(qgcn_core::Error),
    Config(String),
    Io { path: String, source: std::io::Error },
    Json { path: String, detail: String },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Io { path, source } => write!(f, "I/O error on {path}: {source}"),
            CliError::Json { path, detail } => write!(f, "JSON error in {path}: {detail}"),
        }
    }
}

impl From<qgcn_core::Error> for CliError {
    fn from(e: qgcn_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn run(command: Command) -> CliResult<()> {
    let (args, runner): (&CommonArgs, fn(&RunConfig) -> CliResult<()>) = match &command {
        Command::BuildGraph(a) => (a, commands::cmd_build_graph),
        Command::Train(a) => (a, commands::cmd_train),
        Command::Embed(a) => (a, commands::cmd_embed),
        Command::Eval(a) => (a, commands::cmd_eval),
        Command::Compare(a) => (a, commands::cmd_compare),
    };
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.train.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    config.validate()?;
    runner(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
