use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use semdenoise::filters::{Boundary, FilterKind};
use semdenoise::pipeline::FeatureSpec;
use semdenoise::SyntheticKind;

#[derive(Debug, Parser)]
#[command(
    name = "semdenoise",
    version,
    about = "SEM image SNR estimation, noise-variance regression and NV-guided Wiener filtering"
)]
pub struct Cli {
    /// Seed for every randomized step. Overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for output files, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Horizontal autocorrelation curve of an image, as lag,value CSV.
    Acf {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        max_lag: Option<usize>,
    },
    /// Single-image SNR estimates.
    Snr(SnrArgs),
    /// Noise injection.
    #[command(subcommand)]
    Noise(NoiseCommand),
    /// Apply one filter to an image.
    Filter(FilterArgs),
    /// Labelled training data.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Fit the noise-variance regressors and save the tuned pipeline model.
    Train(TrainArgs),
    /// Estimate the noise variance of one image and filter it.
    Run(RunArgs),
    /// Benchmarks over the synthetic corpus, or over a saved table.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Paired one-tailed t-test of two numeric columns.
    Ttest(TtestArgs),
    /// MSE, PSNR, SSIM and cosine similarity between two images.
    Quality {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Write a synthetic test image.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct SnrArgs {
    #[arg(long)]
    pub image: PathBuf,
    /// nn, fol, nn-fol, nllsr, lsr or all.
    #[arg(long, default_value = "lsr")]
    pub method: String,
    #[arg(long)]
    pub max_lag: Option<usize>,
    /// First and last lag of the regression window, e.g. 1,4.
    #[arg(long, value_parser = parse_pair)]
    pub lag_window: Option<[usize; 2]>,
    /// Noise-free reference, for the actual SNR.
    #[arg(long)]
    pub clean: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum NoiseCommand {
    /// Add white Gaussian noise of a given variance.
    Add {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        nv: f64,
        #[arg(long, default_value = "noisy.pgm")]
        output: String,
        /// Output bit depth, 8 or 16.
        #[arg(long, default_value_t = 16)]
        bits: u32,
    },
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value = "wiener")]
    pub filter: FilterKind,
    #[arg(long)]
    pub window: Option<usize>,
    /// Noise variance for the Wiener filters, sigma^2 for the Gaussian.
    #[arg(long, default_value_t = 0.0)]
    pub nv: f64,
    #[arg(long)]
    pub boundary: Option<Boundary>,
    #[arg(long, default_value = "filtered.pgm")]
    pub output: String,
    #[arg(long, default_value_t = 16)]
    pub bits: u32,
    /// Clean image to score the input and output against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Generate features and noise-variance labels from the synthetic corpus.
    Gen {
        #[arg(long)]
        images: Option<usize>,
        #[arg(long)]
        side: Option<usize>,
        #[arg(long)]
        seeds_per_level: Option<usize>,
        #[arg(long)]
        features: Option<FeatureSpec>,
        #[arg(long, default_value = "dataset.csv")]
        output: String,
    },
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Objective evaluations per Bayesian search.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value = "model.json")]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub boundary: Option<Boundary>,
    #[arg(long, default_value = "filtered.pgm")]
    pub output: String,
    #[arg(long, default_value_t = 16)]
    pub bits: u32,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Actual against estimated SNR per noise level, and the LSR error t-tests.
    Snr {
        /// Existing table with columns nv,actual,nn,fol,nn_fol,lsr,nllsr.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Filter MSE per noise level for the pipeline and the baselines.
    Filters {
        #[arg(long, conflicts_with_all = ["fixed_nv", "table"])]
        model: Option<PathBuf>,
        /// Drive the NV-guided filter with a constant variance instead of a model.
        #[arg(long, conflicts_with = "table")]
        fixed_nv: Option<f64>,
        /// Existing table with columns nv,pre,post.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct TtestArgs {
    /// First sample as file[:column].
    #[arg(long)]
    pub x: String,
    /// Second sample as file[:column].
    #[arg(long)]
    pub y: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value = "bandlimited-noise")]
    pub kind: SyntheticKind,
    #[arg(long, default_value_t = 128)]
    pub width: usize,
    #[arg(long, default_value_t = 128)]
    pub height: usize,
    /// Variance of white grain added on top, as in the training corpus.
    #[arg(long, default_value_t = 0.0)]
    pub grain: f64,
    #[arg(long, default_value = "clean.pgm")]
    pub output: String,
    #[arg(long, default_value_t = 16)]
    pub bits: u32,
}

fn parse_pair(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s
        .split_once([',', ':'])
        .ok_or_else(|| format!("expected two lags like 1,4, got '{s}'"))?;
    let p = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("'{v}': {e}"));
    Ok([p(a)?, p(b)?])
}
