mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Exaggeration labeling, tweet diffusion analysis and user profiling for
/// health news corpora. Every command writes its outputs and a manifest.json
/// into --out.
#[derive(Debug, Parser)]
#[command(name = "exagg", version, args_override_self = true)]
struct Cli {
    /// Flat `key = value` file with default flag values; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate documents (and optionally tweets and timelines) and summarize them.
    Ingest(IngestArgs),
    /// Exaggeration labels for every press release and news article.
    Label(LabelArgs),
    /// Exaggeration percentages grouped by source or discipline.
    Report(ReportArgs),
    /// Tweet retention, arrival buckets, attributes, category ratios, flags and trends.
    Diffusion(DiffusionArgs),
    /// Flag extreme categories from an existing ratios.csv.
    Flag(FlagArgs),
    /// User categories and timeline feature vectors.
    Profile(ProfileArgs),
    /// Stratified cross-validation of the classifiers on features.csv.
    TrainEval(TrainEvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleArg {
    Seven,
    Four,
    Two,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingleScaleArg {
    Seven,
    Four,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormArg {
    PerTweet,
    PerWord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupByArg {
    Source,
    Discipline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Press,
    News,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierArg {
    Nb,
    Forest,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = "exagg-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DocArgs {
    /// Documents as canonical CSV, or JSON when the extension is .json.
    #[arg(long, value_name = "FILE")]
    pub documents: PathBuf,
    /// Report unresolved references instead of failing.
    #[arg(long)]
    pub allow_dangling: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct LexiconArgs {
    /// Dictionary for category ratios and timeline features (.dic or TSV).
    #[arg(long, value_name = "FILE")]
    pub liwc: Option<PathBuf>,
    /// Opinion phrases for the diffusion trend.
    #[arg(long, value_name = "FILE")]
    pub opinion: Option<PathBuf>,
    /// Realization words for the diffusion trend.
    #[arg(long, value_name = "FILE")]
    pub realize: Option<PathBuf>,
    /// Slang terms (timeline feature).
    #[arg(long, value_name = "FILE")]
    pub slang: Option<PathBuf>,
    /// Hyperbolic terms (timeline feature).
    #[arg(long, value_name = "FILE")]
    pub hyperbolic: Option<PathBuf>,
    /// Contractions (timeline feature).
    #[arg(long, value_name = "FILE")]
    pub contraction: Option<PathBuf>,
    /// Stopwords (timeline feature).
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Common phrases (timeline feature).
    #[arg(long, value_name = "FILE")]
    pub phrases: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ThresholdArgs {
    /// A category is high when r >= hi under every scale.
    #[arg(long, default_value_t = 1.5)]
    pub hi: f64,
    /// A category is low when r <= lo under every scale (default 1/1.5).
    #[arg(long, default_value_t = 1.0 / 1.5)]
    pub lo: f64,
    /// Minimum match-bearing tweets in each early/late bucket.
    #[arg(long, default_value_t = 5)]
    pub min_support: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub docs: DocArgs,
    /// Tweets as JSON lines.
    #[arg(long, value_name = "FILE")]
    pub tweets: Option<PathBuf>,
    /// User timelines as JSON lines.
    #[arg(long, value_name = "FILE")]
    pub timelines: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct LabelArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub docs: DocArgs,
    /// Strength scale(s) used for labeling.
    #[arg(long, value_enum, default_value = "all")]
    pub scale: ScaleArg,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub docs: DocArgs,
    #[arg(long, value_enum, default_value = "source")]
    pub group_by: GroupByArg,
    /// Which documents are compared against their journal.
    #[arg(long, value_enum, default_value = "news")]
    pub kind: KindArg,
    /// Strength scale(s) used for labeling.
    #[arg(long, value_enum, default_value = "all")]
    pub scale: ScaleArg,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct DiffusionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub docs: DocArgs,
    /// Tweets as JSON lines; each must reference a news article.
    #[arg(long, value_name = "FILE")]
    pub tweets: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub lexicons: LexiconArgs,
    /// Strength scale(s) used for labeling.
    #[arg(long, value_enum, default_value = "all")]
    pub scale: ScaleArg,
    /// Divide match counts by tweets or by tokens.
    #[arg(long, value_enum, default_value = "per-tweet")]
    pub normalization: NormArg,
    /// Early bucket upper bound in days (inclusive).
    #[arg(long, default_value_t = 1)]
    pub early_days: i64,
    /// Mid bucket upper bound in days (inclusive).
    #[arg(long, default_value_t = 365)]
    pub late_days: i64,
    /// Words removed from tweet text before counting.
    #[arg(long, value_delimiter = ',', default_value = "news,bbc,telegraph")]
    pub domain_words: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct FlagArgs {
    /// ratios.csv covering all three scales.
    #[arg(long, value_name = "FILE")]
    pub ratios: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub docs: DocArgs,
    /// Article-linked tweets, also counted towards user categories.
    #[arg(long, value_name = "FILE")]
    pub tweets: Option<PathBuf>,
    /// User timelines as JSON lines; one profile per non-empty timeline.
    #[arg(long, value_name = "FILE")]
    pub timelines: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub lexicons: LexiconArgs,
    /// Strength scale used to decide which shared articles are exaggerated.
    #[arg(long, value_enum, default_value = "seven")]
    pub scale: SingleScaleArg,
    /// Divide match counts by tweets or by tokens.
    #[arg(long, value_enum, default_value = "per-tweet")]
    pub normalization: NormArg,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainEvalArgs {
    /// features.csv written by `profile`.
    #[arg(long, value_name = "FILE")]
    pub features: PathBuf,
    /// Number of stratified folds.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Seed for fold assignment and forest training (required).
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "both")]
    pub classifier: ClassifierArg,
    /// Trees per forest.
    #[arg(long, default_value_t = 100)]
    pub n_trees: usize,
    /// Maximum tree depth (default: unlimited).
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Minimum distinct training rows per leaf.
    #[arg(long, default_value_t = 1)]
    pub min_leaf: usize,
    /// Share of features tried per split (default: sqrt(d) features).
    #[arg(long)]
    pub feature_fraction: Option<f64>,
    /// Train every tree on the full training set.
    #[arg(long)]
    pub no_bootstrap: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

fn parse_cli(args: Vec<OsString>) -> std::result::Result<Cli, clap::Error> {
    let cmd = Cli::command();
    let matches = cmd.try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    match threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}"))),
        #[cfg(not(feature = "parallel"))]
        Some(n) => {
            if n > 1 {
                log::warn!("built without the parallel feature; --threads {n} ignored");
            }
            Ok(())
        }
        None => Ok(()),
    }
}

fn run(args: Vec<OsString>) -> Result<()> {
    let args = match config::find_config_path(&args) {
        Some(path) => config::apply(&Cli::command(), args, path.as_ref())?,
        None => args,
    };
    let cli = match parse_cli(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    init_threads(cli.threads)?;
    match cli.command {
        Command::Ingest(a) => commands::ingest(&a),
        Command::Label(a) => commands::label(&a),
        Command::Report(a) => commands::report(&a),
        Command::Diffusion(a) => commands::diffusion(&a),
        Command::Flag(a) => commands::flag(&a),
        Command::Profile(a) => commands::profile(&a),
        Command::TrainEval(a) => commands::train_eval(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EXAGG_LOG", "warn")).init();
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
