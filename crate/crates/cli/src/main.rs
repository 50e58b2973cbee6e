mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "erblock", version, about = "Blocking for entity resolution: AC, Dynamic and their ensemble")]
struct Cli {
    /// Flat `key = value` settings file.
    #[arg(long, global = true, env = "ERBLOCK_CONFIG")]
    config: Option<PathBuf>,

    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic corpus with duplicates and its gold standard.
    Generate(GenerateArgs),
    /// Run a blocker over a corpus and write the candidate pairs.
    Block(BlockArgs),
    /// Score a pair file against a gold standard.
    Evaluate(EvaluateArgs),
    /// Time both blockers across attribute counts and worker counts.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// febrl1, febrl2 or febrl3.
    #[arg(long)]
    pub preset: Option<String>,
    /// Number of original records.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub dup_rate: Option<f64>,
    #[arg(long)]
    pub max_dups: Option<usize>,
    /// Corruption operators applied to each duplicate.
    #[arg(long)]
    pub corruptions: Option<usize>,
    /// Operator weights, e.g. `typo=1,surname_change=0.5`. Unlisted operators get 0.
    #[arg(long)]
    pub weights: Option<String>,
    /// Probability that an original carries each non-name attribute.
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub name_skew: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for profiles.csv, gold.csv and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BlockArgs {
    #[arg(long, default_value = "ensemble", value_parser = ["ac", "dynamic", "ensemble"])]
    pub blocker: String,
    /// Purge threshold for AC and split threshold for Dynamic.
    #[arg(long)]
    pub threshold: Option<usize>,
    /// AC key mode: schema_aware or schema_agnostic.
    #[arg(long)]
    pub mode: Option<String>,
    /// Profile file (.csv or .jsonl) or a directory holding profiles.csv.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output directory; pairs go to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// A `block` output directory or a pair file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Gold standard: `id,cluster_id` or `id_a,id_b` rows.
    #[arg(long)]
    pub gold: PathBuf,
    /// Corpus size; read from the run manifest when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    /// Dataset label for the report.
    #[arg(long)]
    pub name: Option<String>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Profile file or corpus directory.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Attribute counts, two name attributes included.
    #[arg(long, value_delimiter = ',', default_value = "4,8,13,17")]
    pub attrs: Vec<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Workers for the attribute study.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Worker counts for the worker study.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub worker_counts: Vec<usize>,
    /// CSV output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Generate(a) => commands::generate(cli.config.as_deref(), a),
        Command::Block(a) => commands::block(cli.config.as_deref(), a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Bench(a) => commands::bench(cli.config.as_deref(), a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
