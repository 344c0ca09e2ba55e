//! Command-line front end: ingest → analyze → estimate → build-models → gen → simulate.
//!
//! Every command writes into `--out-dir` and leaves a `manifest.json` there
//! recording the resolved configuration, seed, input digests and outputs.

mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use crate::dataset::ColumnMapping;
use crate::error::{Error, ErrorClass, Result};
use crate::mobility::TraceFormat;
use config::GridDims;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DATA: i32 = 4;
pub const EXIT_CONTRACT: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "lbsn-mobility", version, about = "Friendship-aware mobility models from checkin data")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load checkin and friendship files into a snapshot and summarize them.
    Ingest(IngestArgs),
    /// Friendship-distance curves, pair features and a kNN friendship check.
    Analyze(AnalyzeArgs),
    /// Estimate the population size of the snapshot's graph by collision counting.
    Estimate(EstimateArgs),
    /// Build Markov mobility models for a group of users.
    BuildModels(BuildModelsArgs),
    /// Generate FMM or random waypoint traces.
    Gen(GenArgs),
    /// Run the contention simulation over traces.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Checkin file (user, time, lat, lng, location id; tab separated by default).
    #[arg(long)]
    pub checkins: PathBuf,
    /// Friendship edge file, one `user<TAB>user` pair per line.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Column layout, e.g. `user=0,timestamp=1,lat=2,lng=3,location=4`.
    #[arg(long, value_parser = parse_mapping)]
    pub mapping: Option<ColumnMapping>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub snapshot: PathBuf,
    /// Pairs sampled per class (friends and non-friends).
    #[arg(long, default_value_t = 500)]
    pub pairs: usize,
    /// Number of equal-width distance bins.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    /// Upper edge of the last distance bin, km.
    #[arg(long, default_value_t = 1300.0)]
    pub max_km: f64,
    /// Checkin match window in seconds.
    #[arg(long, default_value_t = 3600.0)]
    pub time_window: f64,
    /// Checkin match window in km.
    #[arg(long, default_value_t = 0.1)]
    pub space_window: f64,
    /// Only sample users whose checkins span at most this many km.
    #[arg(long)]
    pub max_span_km: Option<f64>,
    /// Neighbours for the kNN check.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub snapshot: PathBuf,
    /// Number of independent samples (r).
    #[arg(long, default_value_t = 30)]
    pub samples: usize,
    /// Draws per sample.
    #[arg(long, default_value_t = 50)]
    pub sample_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("selection").required(true).args(["seed_user", "users"]))]
pub struct BuildModelsArgs {
    #[arg(long)]
    pub snapshot: PathBuf,
    /// Model this user and their friends.
    #[arg(long)]
    pub seed_user: Option<String>,
    /// With --seed-user, take the whole friendship component instead of direct friends.
    #[arg(long, requires = "seed_user")]
    pub transitive: bool,
    /// Explicit comma-separated user list.
    #[arg(long, value_delimiter = ',')]
    pub users: Option<Vec<String>>,
    /// Checkins without a venue id closer than this many meters share a state.
    #[arg(long, default_value_t = crate::mobility::DEFAULT_MERGE_RADIUS_M)]
    pub merge_radius: f64,
    #[arg(long, default_value_t = 2000.0)]
    pub width: f64,
    #[arg(long, default_value_t = 2000.0)]
    pub height: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fmm,
    Rwp,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Model file from build-models (FMM only).
    #[arg(long, required_if_eq("model", "fmm"))]
    pub models: Option<PathBuf>,
    /// Parameter file (`key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    /// RWP node count.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub min_speed: Option<f64>,
    #[arg(long)]
    pub max_speed: Option<f64>,
    /// RWP pause at each destination, seconds.
    #[arg(long)]
    pub pause: Option<f64>,
    /// FMM self-transition dwell, seconds.
    #[arg(long)]
    pub dwell: Option<f64>,
    /// FMM: derive leg speeds from observed checkin gaps (clamped to min/max speed).
    #[arg(long)]
    pub temporal_speed: bool,
    /// FMM: pick start states by checkin count instead of uniformly.
    #[arg(long)]
    pub weighted_start: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_format, default_value = "ns2")]
    pub format: TraceFormat,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["traces", "compare"]))]
pub struct SimulateArgs {
    /// Trace file (ns-2 or CSV).
    #[arg(long)]
    pub traces: Option<PathBuf>,
    /// Simulate an FMM and an RWP trace file and report the backoff ratio.
    #[arg(long, num_args = 2, value_names = ["FMM", "RWP"])]
    pub compare: Option<Vec<PathBuf>>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    /// Expected node count; defaults to the number of traces.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub radio_range: Option<f64>,
    #[arg(long)]
    pub tick: Option<f64>,
    /// Congestion grid as ROWSxCOLS.
    #[arg(long)]
    pub grid: Option<GridDims>,
    /// Contend only with direct neighbours instead of whole proximity components.
    #[arg(long)]
    pub pairwise: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_mapping(s: &str) -> std::result::Result<ColumnMapping, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<TraceFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Usage => EXIT_USAGE,
        ErrorClass::Io => EXIT_IO,
        ErrorClass::Data => EXIT_DATA,
        ErrorClass::Contract => EXIT_CONTRACT,
    }
}

/// Run a parsed command; returns the lines to print on stdout.
pub fn run(cli: Cli) -> Result<Vec<String>> {
    match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::BuildModels(a) => commands::build_models(a),
        Command::Gen(a) => commands::gen(a),
        Command::Simulate(a) => commands::simulate(a),
    }
}

/// Parse arguments, run, print, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match run(cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
