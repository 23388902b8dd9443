//! The end-to-end denoiser: corpus and dataset generation, training, the
//! single-image run and the benchmark harness.

pub mod bench;
pub mod config;
pub mod corpus;
pub mod dataset;
pub mod features;
pub mod model;
pub mod run;
pub mod train;

use thiserror::Error;

pub use bench::{benchmark_filters, benchmark_snr, BenchOptions, FilterTable, MseTable, SnrTable};
pub use config::{CorpusConfig, PipelineConfig};
pub use corpus::{make_corpus, noisy_instance};
pub use dataset::{generate_dataset, Dataset, DatasetOptions, DatasetRow};
pub use features::FeatureSpec;
pub use model::{FixedNv, NoiseVariancePredictor, PipelineModel};
pub use run::{run_aogprllsr, RunReport};
pub use train::{train_pipeline, TrainOptions, TrainingReport};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("noise-variance grid is empty")]
    EmptyGrid,
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("config: {0}")]
    Config(String),
    #[error("dataset line {line}: {message}")]
    DatasetFormat { line: usize, message: String },
    #[error("model: {0}")]
    Model(String),
    #[error(transparent)]
    Image(#[from] crate::image::ImageError),
    #[error(transparent)]
    Acf(#[from] crate::acf::AcfError),
    #[error(transparent)]
    Snr(#[from] crate::snr::SnrError),
    #[error(transparent)]
    Filter(#[from] crate::filters::FilterError),
    #[error(transparent)]
    Quality(#[from] crate::stats::QualityError),
    #[error(transparent)]
    TTest(#[from] crate::stats::TTestError),
    #[error(transparent)]
    Regression(#[from] crate::regression::RegressionError),
    #[error(transparent)]
    Metrics(#[from] crate::regression::MetricsError),
    #[error(transparent)]
    Tune(#[from] crate::bayes_opt::TuneError),
    #[error(transparent)]
    Table(#[from] crate::tabular::TableError),
}
