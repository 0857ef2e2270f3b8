//! `textkernel`: label generation, post-processing, evaluation,
//! benchmarking and gradient checks over files on disk.

mod commands;
mod config;
mod error;
mod fsutil;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use textkernel_core::postprocess::{Connectivity, DetectConfig, OutputMode};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "textkernel", version, about = "Scene-text kernel tooling")]
struct Cli {
    /// Worker threads; overrides TEXTKERNEL_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Class, text and ignore masks from NDJSON annotations.
    Labelgen(LabelgenArgs),
    /// Detections from PMAP probability maps.
    Postprocess(PostprocessArgs),
    /// Precision, recall and F-measure of detections against annotations.
    Eval(EvalArgs),
    /// Per-image post-process latency.
    Bench(BenchArgs),
    /// Finite-difference checks of every loss gradient.
    Losscheck(LosscheckArgs),
}

#[derive(Debug, Args)]
pub struct LabelgenArgs {
    #[arg(long)]
    pub annots: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, requires = "height", conflicts_with = "size_from_manifest")]
    pub width: Option<usize>,
    #[arg(long, requires = "width")]
    pub height: Option<usize>,
    /// NDJSON lines `{"image": ID, "width": W, "height": H}`.
    #[arg(long, required_unless_present = "width")]
    pub size_from_manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 0.6)]
    pub shrink_ratio: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Polygon,
    Rect,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[arg(long, default_value_t = 0.65)]
    pub bin_thr: f64,
    #[arg(long, default_value_t = 1.5)]
    pub unclip: f64,
    #[arg(long, value_enum, default_value = "polygon")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0.6)]
    pub box_thr: f64,
    #[arg(long, default_value_t = 4)]
    pub min_area: usize,
    /// 4 or 8.
    #[arg(long, default_value = "8", value_parser = parse_connectivity)]
    pub connectivity: Connectivity,
}

impl DetectArgs {
    pub fn config(&self) -> DetectConfig {
        DetectConfig {
            bin_threshold: self.bin_thr,
            unclip_ratio: self.unclip,
            box_score_threshold: self.box_thr,
            min_area_px: self.min_area,
            connectivity: self.connectivity,
            output_mode: match self.mode {
                ModeArg::Polygon => OutputMode::Polygon,
                ModeArg::Rect => OutputMode::MinAreaRect,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct PostprocessArgs {
    #[arg(long)]
    pub probmaps: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub detect: DetectArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dets: PathBuf,
    #[arg(long)]
    pub gts: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub iou: f64,
    #[arg(long, default_value = "eval_report.json")]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub probmaps: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub repeat: usize,
    #[arg(long, default_value_t = 2)]
    pub warmup: usize,
    /// Also write the report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub detect: DetectArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    #[value(name = "32")]
    Single,
    #[value(name = "64")]
    Double,
    Both,
}

#[derive(Debug, Args)]
pub struct LosscheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixture size as HxW.
    #[arg(long, default_value = "8x8", value_parser = parse_size)]
    pub size: (usize, usize),
    #[arg(long, default_value_t = 16)]
    pub coords: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub precision: PrecisionArg,
    #[arg(long, hide = true)]
    pub corrupt_gradient: bool,
}

fn parse_connectivity(s: &str) -> Result<Connectivity, String> {
    s.parse().ok().and_then(Connectivity::from_number).ok_or_else(|| "expected 4 or 8".into())
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s.split_once(['x', 'X']).ok_or("expected HxW")?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height {h:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width {w:?}"))?;
    if h == 0 || w == 0 {
        return Err("size must be positive".into());
    }
    Ok((h, w))
}

fn worker_pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let n = match threads {
        Some(n) => n,
        None => match std::env::var("TEXTKERNEL_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("TEXTKERNEL_THREADS={v:?} is not a count")))?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn run() -> CliResult<()> {
    let args = config::merge_config(&Cli::command(), std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match cli.command {
        Command::Labelgen(a) => commands::labelgen::run(&a, &worker_pool(cli.threads)?),
        Command::Postprocess(a) => commands::postprocess::run(&a, &worker_pool(cli.threads)?),
        Command::Eval(a) => commands::eval::run(&a, &worker_pool(cli.threads)?),
        Command::Bench(a) => commands::bench::run(&a),
        Command::Losscheck(a) => commands::losscheck::run(&a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
