//! `vocalfeat`: feature extraction, statistics and classification of
//! phonation pressure signals.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vocalfeat::features::HnrMargin;
use vocalfeat::LabelKind;

use commands::{ClassifyOptions, Outcome, SolverFailure, DEFAULT_GRID_RESOLUTION};
use config::{FileConfig, RunConfig, OUT_ENV};

const EXIT_INPUT: u8 = 2;
const EXIT_PARTIAL: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "vocalfeat", version, about = "Acoustic voice-quality features and their classification")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// CSV manifest: id, signal_path, pressure_pa, gc_type, symmetry
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Output directory [default: $VOCALFEAT_OUT, else ./vocalfeat-out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for fold assignment and signal synthesis [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for extraction [default: all cores]
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Sample rate of headerless signals without a sidecar, in Hz
    #[arg(long, global = true)]
    pub sample_rate: Option<f64>,
    /// Cutoff of the secondary low-pass branch, in Hz [default: 2000]
    #[arg(long, global = true)]
    pub lp_secondary: Option<f64>,
    /// Lower end of the HNR lag search: samples (300) or time (4.08ms)
    #[arg(long, global = true)]
    pub hnr_margin: Option<HnrMargin>,
    /// SVM soft-margin constant [default: 1]
    #[arg(long, global = true)]
    pub svm_c: Option<f64>,
    /// RBF kernel width [default: 1 / (dims · variance of the training data)]
    #[arg(long, global = true)]
    pub svm_gamma: Option<f64>,
    /// Number of cross-validation folds [default: 5]
    #[arg(long, global = true)]
    pub folds: Option<usize>,
    /// Fit standardisation and LDA on all samples before cross-validating
    #[arg(long, global = true)]
    pub paper_mode: bool,
    /// Feed raw features to LDA
    #[arg(long, global = true)]
    pub no_standardize: bool,
    /// Skip SVG output
    #[arg(long, global = true)]
    pub no_figures: bool,
    /// TOML file with the same keys as the long flags; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract the nine features of every manifest entry into features.csv
    Extract,
    /// Correlation map of labels and features
    Correlate {
        /// Feature table [default: <out>/features.csv]
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Per-group boxplot statistics of every feature
    Boxplot {
        /// Feature table [default: <out>/features.csv]
        #[arg(long)]
        features: Option<PathBuf>,
        /// Label to group by: pressure, gc or symmetry
        #[arg(long, default_value = "gc")]
        group_by: LabelKind,
        /// Comma-separated features to draw [default: spl_5k,hnr_2k,cpp_2k,slope_2k,hbi_5k,alpha_5k]
        #[arg(long, value_delimiter = ',')]
        panels: Vec<String>,
    },
    /// Standardise, project with LDA and classify with an RBF SVM
    Classify {
        /// Feature table [default: <out>/features.csv]
        #[arg(long)]
        features: Option<PathBuf>,
        /// Label to predict: pressure, gc or symmetry
        #[arg(long)]
        target: LabelKind,
        /// Also cross-validate a grid of (C, gamma) pairs
        #[arg(long)]
        sweep: bool,
        /// Comma-separated C values for --sweep [default: 6 log-spaced in 1e-2..1e3]
        #[arg(long, value_delimiter = ',')]
        sweep_c: Vec<f64>,
        /// Comma-separated gamma values for --sweep [default: 6 log-spaced in 1e-3..1e2]
        #[arg(long, value_delimiter = ',')]
        sweep_gamma: Vec<f64>,
        /// Decision-grid points per axis
        #[arg(long, default_value_t = DEFAULT_GRID_RESOLUTION)]
        grid_resolution: usize,
    },
    /// Write the 24-configuration synthetic surrogate dataset and its manifest
    Synth,
    /// extract, correlate, boxplot for every label and classify every target
    Run {
        /// Decision-grid points per axis
        #[arg(long, default_value_t = DEFAULT_GRID_RESOLUTION)]
        grid_resolution: usize,
    },
}

fn execute(cli: Cli) -> anyhow::Result<Outcome> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let env_out = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let rc = RunConfig::resolve(&cli.global, file, env_out)?;
    match cli.command {
        Command::Extract => commands::extract(&rc),
        Command::Correlate { features } => commands::correlate(&rc, features.as_deref()),
        Command::Boxplot {
            features,
            group_by,
            panels,
        } => commands::boxplot(&rc, features.as_deref(), group_by, &panels),
        Command::Classify {
            features,
            target,
            sweep,
            sweep_c,
            sweep_gamma,
            grid_resolution,
        } => commands::classify(
            &rc,
            features.as_deref(),
            &ClassifyOptions {
                target,
                sweep,
                sweep_c,
                sweep_gamma,
                grid_resolution,
            },
        ),
        Command::Synth => commands::synth(&rc),
        Command::Run { grid_resolution } => commands::run_all(&rc, grid_resolution),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let solver = err.chain().any(|c| {
        c.is::<SolverFailure>()
            || matches!(
                c.downcast_ref::<vocalfeat::Error>(),
                Some(vocalfeat::Error::NotConverged { .. })
            )
    });
    if solver {
        EXIT_SOLVER
    } else {
        EXIT_INPUT
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(EXIT_PARTIAL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
