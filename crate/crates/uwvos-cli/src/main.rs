//! `uwvos` — benchmark toolkit CLI for underwater video object
//! segmentation datasets.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use commands::{Format, Outcome};
use config::FileConfig;
use uwvos::dataset::Split;
use uwvos::metrics::EvalStart;

#[derive(Parser)]
#[command(
    name = "uwvos",
    version,
    about = "Underwater VOS benchmark toolkit: evaluation, attributes, statistics, \
             subset sampling, and the adapter numerical kernel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PolicyFlags {
    /// Exclude the first evaluated frame (the given frame) [default: on]
    #[arg(long = "exclude-first", action = ArgAction::SetTrue, overrides_with = "no_exclude_first")]
    exclude_first: bool,
    #[arg(long = "no-exclude-first", action = ArgAction::SetTrue)]
    no_exclude_first: bool,
    /// Exclude the video's final frame [default: on]
    #[arg(long = "exclude-last", action = ArgAction::SetTrue, overrides_with = "no_exclude_last")]
    exclude_last: bool,
    #[arg(long = "no-exclude-last", action = ArgAction::SetTrue)]
    no_exclude_last: bool,
    /// Boundary matching tolerance in pixels (default: 0.008 x diagonal,
    /// floored at 1 px)
    #[arg(long = "boundary-tol")]
    boundary_tol: Option<f64>,
    /// Where evaluation windows start: first-appearance | frame0
    #[arg(long = "eval-start")]
    eval_start: Option<String>,
    /// Credit adjusted F 1.0 on frames where GT and prediction are both
    /// empty [default: on]
    #[arg(long = "fdot-empty-credit", action = ArgAction::SetTrue, overrides_with = "no_fdot_empty_credit")]
    fdot_empty_credit: bool,
    #[arg(long = "no-fdot-empty-credit", action = ArgAction::SetTrue)]
    no_fdot_empty_credit: bool,
}

#[derive(Args)]
struct CommonFlags {
    /// Output directory for report artifacts
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// JSON config file (flags > config file > defaults)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report format: json | csv | svg (svg only for stats)
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Score predicted rasters against ground truth (J, F, adjusted F).
    Evaluate {
        /// Ground-truth split root (Annotations/ + meta.json)
        #[arg(long)]
        gt: PathBuf,
        /// Prediction root mirroring the Annotations layout
        #[arg(long)]
        pred: PathBuf,
        /// Dataset split label: train | val | test | custom
        #[arg(long, default_value = "val")]
        split: String,
        #[command(flatten)]
        policy: PolicyFlags,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Check annotation consistency and report violations.
    Validate {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, default_value = "val")]
        split: String,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Derive challenge attributes, merge a sidecar, and (with --pred)
    /// break scores down per attribute.
    Attributes {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, default_value = "val")]
        split: String,
        /// Sidecar JSON with human-judged attributes
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Prediction root; enables the per-attribute breakdown
        #[arg(long)]
        pred: Option<PathBuf>,
        #[command(flatten)]
        policy: PolicyFlags,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Dataset statistics: lengths, mask sizes, categories, channel
    /// intensities.
    Stats {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, default_value = "val")]
        split: String,
        /// Class-to-superclass JSON mapping; enables category counts
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        /// Compute first-frame channel intensities (needs JPEGImages/)
        #[arg(long, action = ArgAction::SetTrue)]
        intensity: bool,
        /// Video-length bin width in frames
        #[arg(long, default_value_t = 100)]
        length_bin: u64,
        /// Mask-ratio bin width
        #[arg(long, default_value_t = 0.005)]
        ratio_bin: f64,
        /// Intensity bin width in levels
        #[arg(long, default_value_t = 10.0)]
        intensity_bin: f64,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Print the trainable-parameter reconciliation table.
    Params {
        /// Bias accounting: full | out-only | none
        #[arg(long = "bias-mode")]
        bias_mode: Option<String>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Verify analytic adapter/gate JVPs against central differences.
    Gradcheck {
        /// Random points per operation
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Central-difference step
        #[arg(long, default_value_t = 1e-6)]
        step: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Channel dimension (divisible by 16)
        #[arg(long, default_value_t = 32)]
        dim: usize,
        /// Spatial positions for the gate check
        #[arg(long, default_value_t = 6)]
        positions: usize,
        /// Maximum accepted relative error
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Sample a deterministic training subset and write its manifest.
    SampleSubset {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, default_value = "train")]
        split: String,
        /// Subset fraction in (0, 1]
        #[arg(long)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stratify by superclass (requires --taxonomy)
        #[arg(long, action = ArgAction::SetTrue)]
        stratify: bool,
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        #[command(flatten)]
        common: CommonFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("UWVOS_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n > 0 {
                // Scheduling only; outputs are order-stable by construction.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    match dispatch(cli.command) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            if outcome.findings {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(failure) => {
            eprintln!("{}", failure.to_json());
            ExitCode::from(2)
        }
    }
}

struct Failure {
    code: String,
    message: String,
}

impl Failure {
    fn to_json(&self) -> String {
        serde_json::json!({ "error": { "code": self.code, "message": self.message } }).to_string()
    }
}

impl From<uwvos::Error> for Failure {
    fn from(err: uwvos::Error) -> Self {
        Failure {
            code: err.code().to_string(),
            message: err.to_string(),
        }
    }
}

impl From<String> for Failure {
    fn from(message: String) -> Self {
        Failure {
            code: "CONFIG_ERROR".to_string(),
            message,
        }
    }
}

fn parse_split(text: &str) -> Result<Split, Failure> {
    text.parse::<Split>().map_err(Failure::from)
}

fn parse_format(text: Option<&str>, file: &FileConfig, svg_allowed: bool) -> Result<Format, Failure> {
    let chosen = text.or(file.format.as_deref()).unwrap_or("json");
    match chosen {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        "svg" if svg_allowed => Ok(Format::Svg),
        "svg" => Err(Failure::from(
            "svg output is only available for the stats command".to_string(),
        )),
        other => Err(Failure::from(format!("unknown format {other:?}"))),
    }
}

fn parse_eval_start(text: Option<&str>) -> Result<Option<EvalStart>, Failure> {
    match text {
        None => Ok(None),
        Some("first-appearance") => Ok(Some(EvalStart::FirstAppearance)),
        Some("frame0") => Ok(Some(EvalStart::FrameZero)),
        Some(other) => Err(Failure::from(format!("unknown eval start {other:?}"))),
    }
}

fn load_file_config(path: Option<&PathBuf>) -> Result<FileConfig, Failure> {
    match path {
        Some(path) => {
            require_exists(path)?;
            FileConfig::load(path).map_err(Failure::from)
        }
        None => Ok(FileConfig::default()),
    }
}

/// Referenced paths are checked eagerly so failures surface before any
/// artifact is written.
fn require_exists(path: &Path) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure {
            code: "MISSING_PATH".to_string(),
            message: format!("path does not exist: {}", path.display()),
        })
    }
}

fn build_policy(
    flags: &PolicyFlags,
    file: &FileConfig,
) -> Result<uwvos::metrics::EvalPolicy, Failure> {
    config::build_policy(
        config::tri_state(flags.exclude_first, flags.no_exclude_first),
        config::tri_state(flags.exclude_last, flags.no_exclude_last),
        flags.boundary_tol,
        parse_eval_start(flags.eval_start.as_deref())?,
        config::tri_state(flags.fdot_empty_credit, flags.no_fdot_empty_credit),
        file,
    )
    .map_err(Failure::from)
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Evaluate {
            gt,
            pred,
            split,
            policy,
            common,
        } => {
            require_exists(&gt)?;
            require_exists(&pred)?;
            let file = load_file_config(common.config.as_ref())?;
            let outcome = commands::evaluate(commands::EvaluateArgs {
                gt,
                pred,
                split: parse_split(&split)?,
                policy: build_policy(&policy, &file)?,
                format: parse_format(common.format.as_deref(), &file, false)?,
                out: common.out,
            })?;
            Ok(outcome)
        }
        Command::Validate { gt, split, common } => {
            require_exists(&gt)?;
            let _ = load_file_config(common.config.as_ref())?;
            Ok(commands::validate(gt, parse_split(&split)?, common.out)?)
        }
        Command::Attributes {
            gt,
            split,
            sidecar,
            pred,
            policy,
            common,
        } => {
            require_exists(&gt)?;
            if let Some(path) = &sidecar {
                require_exists(path)?;
            }
            if let Some(path) = &pred {
                require_exists(path)?;
            }
            let file = load_file_config(common.config.as_ref())?;
            Ok(commands::attributes(commands::AttributesArgs {
                gt,
                split: parse_split(&split)?,
                sidecar,
                pred,
                policy: build_policy(&policy, &file)?,
                out: common.out,
            })?)
        }
        Command::Stats {
            gt,
            split,
            taxonomy,
            intensity,
            length_bin,
            ratio_bin,
            intensity_bin,
            common,
        } => {
            require_exists(&gt)?;
            if let Some(path) = &taxonomy {
                require_exists(path)?;
            }
            let file = load_file_config(common.config.as_ref())?;
            Ok(commands::stats(commands::StatsArgs {
                gt,
                split: parse_split(&split)?,
                taxonomy,
                intensity,
                length_bin,
                ratio_bin,
                intensity_bin,
                format: parse_format(common.format.as_deref(), &file, true)?,
                out: common.out,
            })?)
        }
        Command::Params { bias_mode, common } => {
            let file = load_file_config(common.config.as_ref())?;
            let flag = match bias_mode.as_deref() {
                None => None,
                Some(text) => Some(text.parse::<uwvos::adapter::BiasMode>()?),
            };
            let bias = config::resolve_bias_mode(flag, &file)?;
            let format = parse_format(common.format.as_deref(), &file, false)?;
            Ok(commands::params(bias, format, common.out)?)
        }
        Command::Gradcheck {
            points,
            step,
            seed,
            dim,
            positions,
            tol,
            common,
        } => Ok(commands::gradcheck(commands::GradcheckArgs {
            points,
            step,
            seed,
            dim,
            positions,
            tol,
            out: common.out,
        })?),
        Command::SampleSubset {
            gt,
            split,
            fraction,
            seed,
            stratify,
            taxonomy,
            common,
        } => {
            require_exists(&gt)?;
            if let Some(path) = &taxonomy {
                require_exists(path)?;
            }
            Ok(commands::sample(commands::SampleArgs {
                gt,
                split: parse_split(&split)?,
                fraction,
                seed,
                stratify,
                taxonomy,
                out: common.out,
            })?)
        }
    }
}
