//! `handover`: plan robot-to-human handover configurations from the command line.

mod commands;
mod error;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use handover_core::grasp::CosineMode;
use handover_core::hand_model::Handedness;

use crate::error::{CliError, EXIT_INPUT, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "handover", version, about = "Robot-to-human handover configuration planner")]
pub struct Cli {
    /// Report errors as JSON on stderr.
    #[arg(long, global = true)]
    pub json: bool,
    /// Defaults for lambda, clearance, cosine mode and the endpoint (TOML or JSON).
    #[arg(long = "settings", global = true, env = "HANDOVER_SETTINGS", value_name = "FILE")]
    pub settings: Option<PathBuf>,
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resolve a request into a task description.
    Infer(InferArgs),
    /// Imagine the handover configuration for a task and object.
    Imagine(ImagineArgs),
    /// Carry an imagined grasp onto observed hand keypoints.
    Match(MatchArgs),
    /// Score a resolver over a labelled corpus.
    Evaluate(EvaluateArgs),
    /// Write a configuration as an OBJ scene.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct EndpointArgs {
    /// Chat endpoint base URL; selects the endpoint resolver unless --resolver is given.
    #[arg(long, value_name = "URL")]
    pub endpoint: Option<String>,
    /// Model name sent to the endpoint.
    #[arg(long, env = "HANDOVER_MODEL")]
    pub model: Option<String>,
    /// Intent resolver strategy.
    #[arg(long)]
    pub resolver: Option<String>,
    /// Tool catalog JSON; the built-in catalog when absent.
    #[arg(long, value_name = "FILE")]
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub text: String,
    /// Observed hand keypoints JSON; decides the receiving hand.
    #[arg(long, value_name = "FILE", conflicts_with = "hand")]
    pub keypoints: Option<PathBuf>,
    /// Receiving hand when no keypoints are available.
    #[arg(long)]
    pub hand: Option<Handedness>,
    /// Image forwarded to the endpoint.
    #[arg(long, value_name = "FILE")]
    pub image: Option<PathBuf>,
    #[command(flatten)]
    pub endpoint: EndpointArgs,
    /// Write the task here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectionArgs {
    /// Distance weight, 1/m.
    #[arg(long, env = "HANDOVER_LAMBDA")]
    pub lambda: Option<f64>,
    /// Required gripper-hand clearance, m.
    #[arg(long, env = "HANDOVER_CLEARANCE")]
    pub clearance: Option<f64>,
    /// signed | absolute
    #[arg(long, env = "HANDOVER_COSINE_MODE")]
    pub cosine_mode: Option<CosineMode>,
}

#[derive(Debug, Args)]
pub struct ImagineArgs {
    /// Task description JSON ({"object": ..., "hand": ...}).
    #[arg(long, value_name = "FILE")]
    pub task: PathBuf,
    /// Object cloud, `.ply` or `.json`.
    #[arg(long, value_name = "FILE")]
    pub cloud: PathBuf,
    /// Canned hand pose library.
    #[arg(long, value_name = "FILE")]
    pub poses: Option<PathBuf>,
    /// Grasp candidate list.
    #[arg(long, value_name = "FILE", conflicts_with = "sample_antipodal")]
    pub grasps: Option<PathBuf>,
    /// Sample antipodal candidates from the cloud.
    #[arg(long)]
    pub sample_antipodal: bool,
    /// Hand provider strategy (default: canned with --poses, else palm-up).
    #[arg(long)]
    pub hand_provider: Option<String>,
    /// Grasp provider strategy (default: file with --grasps, else antipodal).
    #[arg(long)]
    pub grasp_provider: Option<String>,
    /// Antipodal sampler seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of antipodal candidates.
    #[arg(long, default_value_t = 64)]
    pub count: usize,
    /// Hand model JSON; the built-in synthetic model when absent.
    #[arg(long, value_name = "FILE")]
    pub hand_model: Option<PathBuf>,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Add wall-clock timing to the output.
    #[arg(long)]
    pub timing: bool,
    /// Write the configuration here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Configuration written by `imagine`.
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub observed_keypoints: PathBuf,
    /// Add wall-clock timing to the output.
    #[arg(long)]
    pub timing: bool,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub endpoint: EndpointArgs,
    /// `.csv` for the tier table, JSON otherwise; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Hand model whose faces mesh the hand; the built-in model when absent.
    #[arg(long, value_name = "FILE")]
    pub hand_model: Option<PathBuf>,
}

fn report(err: &CliError, json: bool) {
    if json {
        eprintln!("{}", err.to_json());
    } else {
        eprintln!("error [{}]: {}", err.kind, err.message);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_OK);
        }
        Err(e) => {
            if std::env::args().any(|a| a == "--json") {
                report(&CliError::input("UsageError", e.render().to_string().trim()), true);
                return ExitCode::from(EXIT_INPUT);
            }
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_env("HANDOVER_LOG").init();

    match commands::run(&cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            report(&e, cli.json);
            ExitCode::from(e.code)
        }
    }
}
