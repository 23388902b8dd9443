//! Versioned JSON form of trained regressors.
//!
//! A GPR document keeps the training inputs, kernel, noise, jitter and dual
//! weights; the Cholesky factor is rebuilt on load from exactly the same
//! matrix, so reloaded predictions match bit for bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::gpr::TrainedGpr;
use super::kernel::KernelSpec;
use super::standardize::Standardizer;
use super::svr::{SvrParams, TrainedSvr};
use super::{RegressionError, TrainedRegressor};

pub const MODEL_FORMAT: &str = "semdenoise-regressor";
pub const MODEL_FORMAT_VERSION: u32 = 1;
/// Upper bound on stored GPR training rows; the factor is `n^2` floats.
pub const MAX_GPR_ROWS: usize = 8192;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not a regressor document (format {0:?})")]
    WrongFormat(String),
    #[error("unsupported model version {0}, expected {MODEL_FORMAT_VERSION}")]
    UnsupportedVersion(u32),
    #[error("model has {0} training rows, limit is {MAX_GPR_ROWS}")]
    TooLarge(usize),
    #[error("inconsistent model: {0}")]
    Invalid(#[from] RegressionError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorDocument {
    pub format: String,
    pub version: u32,
    #[serde(flatten)]
    pub body: RegressorBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RegressorBody {
    Gpr {
        kernel: KernelSpec,
        sigma_noise: f64,
        jitter: f64,
        inputs: Vec<Vec<f64>>,
        alpha: Vec<f64>,
        standardizer: Option<Standardizer>,
        target_mean: f64,
        target_scale: f64,
    },
    Svr {
        kernel: KernelSpec,
        params: SvrParams,
        dim: usize,
        support_vectors: Vec<Vec<f64>>,
        dual_coefficients: Vec<f64>,
        bias: f64,
        standardizer: Option<Standardizer>,
    },
}

impl From<&TrainedRegressor> for RegressorDocument {
    fn from(model: &TrainedRegressor) -> Self {
        let body = match model {
            TrainedRegressor::Gpr(m) => RegressorBody::Gpr {
                kernel: m.kernel.clone(),
                sigma_noise: m.sigma_noise,
                jitter: m.jitter,
                inputs: m.inputs.clone(),
                alpha: m.alpha.clone(),
                standardizer: m.standardizer.clone(),
                target_mean: m.target_mean,
                target_scale: m.target_scale,
            },
            TrainedRegressor::Svr(m) => RegressorBody::Svr {
                kernel: m.kernel.clone(),
                params: m.params,
                dim: m.dim,
                support_vectors: m.support.clone(),
                dual_coefficients: m.coef.clone(),
                bias: m.bias,
                standardizer: m.standardizer.clone(),
            },
        };
        Self {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_FORMAT_VERSION,
            body,
        }
    }
}

impl TryFrom<RegressorDocument> for TrainedRegressor {
    type Error = ModelError;

    fn try_from(doc: RegressorDocument) -> Result<Self, ModelError> {
        if doc.format != MODEL_FORMAT {
            return Err(ModelError::WrongFormat(doc.format));
        }
        if doc.version != MODEL_FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion(doc.version));
        }
        match doc.body {
            RegressorBody::Gpr {
                kernel,
                sigma_noise,
                jitter,
                inputs,
                alpha,
                standardizer,
                target_mean,
                target_scale,
            } => {
                if inputs.len() > MAX_GPR_ROWS {
                    return Err(ModelError::TooLarge(inputs.len()));
                }
                Ok(TrainedRegressor::Gpr(TrainedGpr::from_parts(
                    inputs,
                    kernel,
                    sigma_noise,
                    jitter,
                    alpha,
                    standardizer,
                    target_mean,
                    target_scale,
                )?))
            }
            RegressorBody::Svr {
                kernel,
                params,
                dim,
                support_vectors,
                dual_coefficients,
                bias,
                standardizer,
            } => Ok(TrainedRegressor::Svr(TrainedSvr::from_parts(
                support_vectors,
                dual_coefficients,
                bias,
                kernel,
                params,
                standardizer,
                dim,
            )?)),
        }
    }
}

impl TrainedRegressor {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RegressorDocument::from(self)).expect("model values are finite")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: RegressorDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}
