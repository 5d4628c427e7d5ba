//! `kitti-safety`: safety analysis of KITTI-format tracking output.

mod commands;
mod config;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kitti_safety::report::Format;

use crate::config::Overrides;

#[derive(Debug, Parser)]
#[command(name = "kitti-safety", version, about = "Surrogate safety analysis and CLEAR MOT evaluation for KITTI tracking labels")]
struct Cli {
    /// Worker threads for per-sequence processing (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse label (and pose) files and print per-sequence statistics.
    ParseCheck(InputArgs),
    /// Build and post-process ground-plane trajectories.
    Postprocess(PipelineArgs),
    /// Run the full pipeline and write severity counts and TTC_min reports.
    Analyze(AnalyzeArgs),
    /// CLEAR MOT metrics of predictions against ground truth.
    Metrics(MetricsArgs),
    /// Merge report.json files of several runs and compare distributions.
    ExportCdf(ExportCdfArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Label file, or a directory of `<sequence>.txt` files.
    #[arg(long)]
    labels: PathBuf,
    /// Pose file, or a directory of `<sequence>.txt`/`<sequence>.json` files.
    #[arg(long)]
    poses: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[command(flatten)]
    input: InputArgs,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Method label carried into every output row.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    enable_idsplit: bool,
    #[arg(long)]
    enable_ss: bool,
    /// Comma-separated variants (`none`, `idsplit`, `ss`, `idsplit+ss`);
    /// reductions are reported against the first. Overrides the enable flags.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<String>>,
    /// Add the recording vehicle as a road user.
    #[arg(long)]
    include_ego: bool,
    #[arg(long)]
    thr_split: Option<u32>,
    #[arg(long)]
    thr_cons: Option<u32>,
    #[arg(long)]
    thr_sta: Option<f64>,
    #[arg(long)]
    fps: Option<f64>,
    #[arg(long)]
    velocity_window: Option<u32>,
    #[arg(long)]
    ttc_horizon: Option<f64>,
    #[arg(long)]
    ttc_dt: Option<f64>,
    #[arg(long)]
    format: Option<Format>,
    /// Output directory; without it the main table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl PipelineArgs {
    fn overrides(&self, reference: Option<String>, band: Option<f64>) -> Overrides {
        Overrides {
            method: self.method.clone(),
            variants: self.variants.clone(),
            enable_idsplit: self.enable_idsplit,
            enable_ss: self.enable_ss,
            include_ego: self.include_ego,
            thr_split: self.thr_split,
            thr_cons: self.thr_cons,
            thr_sta: self.thr_sta,
            fps: self.fps,
            velocity_window: self.velocity_window,
            ttc_horizon: self.ttc_horizon,
            ttc_dt: self.ttc_dt,
            reference,
            band,
        }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Include the per-frame TTC series in the interaction table.
    #[arg(long)]
    emit_series: bool,
    /// Leave out sequences without a median or D-statistic for some method.
    #[arg(long)]
    drop_undefined: bool,
    /// Method the TTC_min distributions are compared against.
    #[arg(long)]
    reference: Option<String>,
    /// Half-width of the median agreement band, seconds.
    #[arg(long)]
    band: Option<f64>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Ground-truth label file or directory.
    #[arg(long)]
    gt: PathBuf,
    /// Tracker output file or directory, matched to the ground truth by name.
    #[arg(long)]
    pred: PathBuf,
    /// Minimum IoU for a match.
    #[arg(long, default_value_t = 0.5, conflicts_with = "max_center_distance")]
    gate_iou: f64,
    /// Match on box-center distance in pixels instead of IoU.
    #[arg(long)]
    max_center_distance: Option<f64>,
    /// Evaluate frames `0..num_frames` (default: up to the last labeled frame).
    #[arg(long)]
    num_frames: Option<u32>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Output directory for `metrics.<format>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportCdfArgs {
    /// report.json files written by `analyze`.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    band: Option<f64>,
    #[arg(long)]
    drop_undefined: bool,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Output directory; without it the CDF table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let outcome = match &cli.command {
        Command::ParseCheck(a) => commands::parse_check(a),
        Command::Postprocess(a) => commands::postprocess(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Metrics(a) => commands::metrics(a),
        Command::ExportCdf(a) => commands::export_cdf(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
