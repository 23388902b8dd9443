//! Kernels, exact GPR, epsilon-SVR, standardization and regression metrics.

pub mod gpr;
pub mod kernel;
pub mod metrics;
pub mod model;
pub mod standardize;
pub mod svr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gpr::{gpr_fit, gpr_fit_with, GprOptions, TrainedGpr};
pub use kernel::{KernelError, KernelSpec};
pub use metrics::{regression_metrics, rmse, MetricsError, RegressionMetrics};
pub use model::{ModelError, MODEL_FORMAT_VERSION};
pub use standardize::Standardizer;
pub use svr::{svr_fit, SvrParams, TrainedSvr};

#[derive(Debug, Error, PartialEq)]
pub enum RegressionError {
    #[error("no training rows")]
    Empty,
    #[error("need at least {needed} training rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("{rows} feature rows but {targets} targets")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training data contains non-finite values")]
    NotFinite,
    #[error("{name} = {value} is out of range")]
    InvalidHyperparameter { name: &'static str, value: f64 },
    #[error("Cholesky factorization failed with final jitter {jitter:e}")]
    Factorization { jitter: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Which model family and hyperparameters to fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Gpr {
        kernel: KernelSpec,
        sigma_noise: f64,
        #[serde(default)]
        options: GprOptions,
    },
    Svr {
        kernel: KernelSpec,
        params: SvrParams,
    },
}

impl ModelSpec {
    pub fn fit(&self, x: &[Vec<f64>], y: &[f64]) -> Result<TrainedRegressor, RegressionError> {
        match self {
            Self::Gpr {
                kernel,
                sigma_noise,
                options,
            } => gpr_fit_with(x, y, kernel, *sigma_noise, *options).map(TrainedRegressor::Gpr),
            Self::Svr { kernel, params } => svr_fit(x, y, kernel, *params).map(TrainedRegressor::Svr),
        }
    }

    pub fn kernel(&self) -> &KernelSpec {
        match self {
            Self::Gpr { kernel, .. } | Self::Svr { kernel, .. } => kernel,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedRegressor {
    Gpr(TrainedGpr),
    Svr(TrainedSvr),
}

impl TrainedRegressor {
    pub fn predict(&self, x: &[f64]) -> Result<f64, RegressionError> {
        match self {
            Self::Gpr(m) => m.predict_mean(x),
            Self::Svr(m) => m.predict(x),
        }
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>, RegressionError> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Gpr(m) => m.dim(),
            Self::Svr(m) => m.dim(),
        }
    }
}
