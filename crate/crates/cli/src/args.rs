use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "idrkit", version, about = "Interdisciplinarity analysis of a publication corpus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Parse records and assign disciplines to every reference.
    Ingest(Flags),
    /// Apply type, reference-count and coverage filters; write stage counts.
    Qualify(Flags),
    /// Per-paper scores and per-period series.
    Metrics(Flags),
    /// Disparity matrix from reference co-occurrence.
    Disparity(Flags),
    /// Per-period co-occurrence networks and communities.
    Cooccur(Flags),
    /// Community streams across periods.
    Streams(Flags),
    /// Summary tables only: stage counts, discipline distribution, series.
    Report(Flags),
    /// Every stage.
    All(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Qualify(_) => "qualify",
            Command::Metrics(_) => "metrics",
            Command::Disparity(_) => "disparity",
            Command::Cooccur(_) => "cooccur",
            Command::Streams(_) => "streams",
            Command::Report(_) => "report",
            Command::All(_) => "all",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Ingest(f)
            | Command::Qualify(f)
            | Command::Metrics(f)
            | Command::Disparity(f)
            | Command::Cooccur(f)
            | Command::Streams(f)
            | Command::Report(f)
            | Command::All(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GranularityArg {
    Year,
    Month,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TdModeArg {
    Canonical,
    PaperExample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisparityBasis {
    Global,
    PerWindow,
}

#[derive(Debug, Clone, Default, Args, PartialEq)]
pub struct Flags {
    /// TOML configuration file; relative paths inside resolve against its directory.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Records file, one JSON object per line.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Journal catalog (`journal_title,codes`).
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Abbreviation map (`abbrev,full_name`).
    #[arg(long)]
    pub abbrev_map: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub granularity: Option<GranularityArg>,
    /// First period, `YEAR` or `YEAR-MM`.
    #[arg(long)]
    pub from: Option<String>,
    /// Last period, `YEAR` or `YEAR-MM`.
    #[arg(long)]
    pub to: Option<String>,
    #[arg(long)]
    pub min_refs: Option<usize>,
    #[arg(long)]
    pub min_coverage: Option<f64>,
    /// Keyword, repeatable; a record matches if any term occurs.
    #[arg(long = "query")]
    pub query: Vec<String>,
    #[arg(long, value_enum)]
    pub td_mode: Option<TdModeArg>,
    #[arg(long, value_enum)]
    pub disparity_basis: Option<DisparityBasis>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long)]
    pub overlap_threshold: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
