//! `varroa-scan`: detection, SBM evaluation, synthesis and report merging
//! over the dataset layout.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;

pub use commands::{cmd_detect, cmd_eval, cmd_report, cmd_synth, DetectSummary, EvalOutcome};

pub const LOG_ENV: &str = "VARROA_SCAN_LOG";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

impl From<varroa_core::Error> for CliError {
    fn from(e: varroa_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "varroa-scan",
    version,
    about = "Varroa mite detection on multispectral bee captures"
)]
pub struct Cli {
    /// Worker threads for per-capture work (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the conventional detector on every capture of a dataset.
    Detect(DetectArgs),
    /// Score predicted mite masks against dataset ground truth.
    Eval(EvalArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
    /// Merge and render evaluation reports.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    /// Dataset root.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Capture id of the static background.
    #[arg(long)]
    pub background: String,
    /// Pipeline config file (flat key = value).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. --set final_threshold=20.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory for masks and region listings.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Directory of `<capture_id>.mask.png` predictions.
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth dataset root.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Minimum predicted region area in pixels.
    #[arg(long, default_value_t = 20)]
    pub min_area: usize,
    /// Where to write the report.
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Number of scenes.
    #[arg(long, short = 'n', default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// clean, noisy or crowded.
    #[arg(long, default_value = "clean")]
    pub difficulty: String,
    /// Dataset root to create.
    #[arg(long)]
    pub out: PathBuf,
    /// Write into an existing non-empty directory.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Report files to merge.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    /// Also write the merged report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            log::error!("{e}");
            let _ = writeln!(out, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Detect(a) => cmd_detect(a, out).map(|s| i32::from(!s.failures.is_empty())),
        Command::Eval(a) => cmd_eval(a, out).map(|o| i32::from(o.has_errors)),
        Command::Synth(a) => cmd_synth(a, out).map(|_| 0),
        Command::Report(a) => cmd_report(a, out).map(|_| 0),
    })
}
