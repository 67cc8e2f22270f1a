mod commands;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use datahunt_core::sources::datacite::QueryMode;
use datahunt_core::sources::{CacheMode, ResourceType};

#[derive(Parser, Debug)]
#[command(name = "datahunt", version, about = "Discover, deduplicate and assess an institution's research data")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, env = "DATAHUNT_CONFIG")]
    config: Option<PathBuf>,

    /// Overrides `output_dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Query every enabled source and write raw and merged corpora.
    Harvest(HarvestArgs),
    /// Run the cleaning pipeline over a corpus.
    Clean(CleanArgs),
    /// Emit authorship, license, software, volume and repository tables.
    Assess(AssessArgs),
    /// Audits of repository metadata.
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Version removal and article consolidation over a RADS export.
    Rads(RadsArgs),
}

#[derive(Args, Debug)]
struct HarvestArgs {
    /// Comma-separated subset of datacite, crossref, openalex, ncbi, repos.
    #[arg(long, value_delimiter = ',')]
    sources: Vec<String>,
    #[arg(long)]
    mode: Option<QueryMode>,
    #[arg(long, value_delimiter = ',')]
    resource_types: Vec<ResourceType>,
    /// Keep going when an optional source fails.
    #[arg(long)]
    allow_partial: bool,
    #[arg(long)]
    cache_mode: Option<CacheMode>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CleanArgs {
    /// Corpus JSONL; defaults to `corpus.jsonl` in the output directory.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Also collapse Dataverse deposits sharing date, creators and license.
    #[arg(long)]
    enable_dataverse_consolidation: bool,
}

#[derive(Args, Debug)]
struct AssessArgs {
    /// Cleaned corpus JSONL; defaults to `cleaned.jsonl` in the output directory.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum AuditCommand {
    /// Compare DataCite publication years with repository-reported dates.
    Dates(DatesArgs),
    /// Re-fetch a seeded sample of DOIs and count lost affiliations.
    Drift(DriftArgs),
}

#[derive(Args, Debug)]
struct DatesArgs {
    /// Records JSONL as returned by DataCite.
    #[arg(long)]
    records: PathBuf,
    /// CSV with `doi` and `date` columns from the repository.
    #[arg(long)]
    repo_dates: PathBuf,
}

#[derive(Args, Debug)]
struct DriftArgs {
    /// CSV with a `doi` column and a `repository` (or `publisher`) column.
    #[arg(long)]
    dois: PathBuf,
    #[arg(long, default_value_t = 1000)]
    sample_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Institution profile TOML; defaults to the config's institution.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Resolve DOIs from a JSONL snapshot instead of DataCite.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    #[arg(long)]
    cache_mode: Option<CacheMode>,
}

#[derive(Args, Debug)]
struct RadsArgs {
    /// RADS CSV export.
    #[arg(long)]
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", exit::describe(&e));
            ExitCode::from(exit::code_for(&e))
        }
    }
}
