use serde::{Deserialize, Serialize};

use super::features::FeatureSpec;
use super::PipelineError;
use crate::acf::{AcfCurve, DEFAULT_MAX_LAG};
use crate::regression::model::RegressorDocument;
use crate::regression::TrainedRegressor;
use crate::snr::{LagWindow, SnrEstimate, SnrMethod};

pub const PIPELINE_FORMAT: &str = "semdenoise-pipeline";
pub const PIPELINE_VERSION: u32 = 1;

/// Maps an image's ACF and LSR estimate to a noise variance.
pub trait NoiseVariancePredictor {
    fn max_lag(&self) -> usize {
        DEFAULT_MAX_LAG
    }

    fn lag_window(&self) -> LagWindow {
        LagWindow::default()
    }

    fn predict_nv(&self, acf: &AcfCurve, lsr: &SnrEstimate) -> Result<f64, PipelineError>;
}

/// Returns the same variance for every image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedNv(pub f64);

impl NoiseVariancePredictor for FixedNv {
    fn predict_nv(&self, _: &AcfCurve, _: &SnrEstimate) -> Result<f64, PipelineError> {
        Ok(self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineModel {
    pub max_lag: usize,
    pub lag_window: LagWindow,
    pub features: FeatureSpec,
    pub regressor: TrainedRegressor,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineDocument {
    format: String,
    version: u32,
    snr_method: SnrMethod,
    max_lag: usize,
    lag_window: [usize; 2],
    features: FeatureSpec,
    regressor: RegressorDocument,
}

impl PipelineModel {
    pub fn new(
        regressor: TrainedRegressor,
        features: FeatureSpec,
        max_lag: usize,
        lag_window: LagWindow,
    ) -> Result<Self, PipelineError> {
        if regressor.dim() != features.dim() {
            return Err(PipelineError::Model(format!(
                "regressor takes {} features, feature set {:?} has {}",
                regressor.dim(),
                features,
                features.dim()
            )));
        }
        if max_lag < lag_window.last().max(features.min_lag()) {
            return Err(PipelineError::Model(format!(
                "max_lag {max_lag} does not cover lag window and features"
            )));
        }
        Ok(Self {
            max_lag,
            lag_window,
            features,
            regressor,
        })
    }

    pub fn to_json(&self) -> String {
        let doc = PipelineDocument {
            format: PIPELINE_FORMAT.into(),
            version: PIPELINE_VERSION,
            snr_method: SnrMethod::Lsr,
            max_lag: self.max_lag,
            lag_window: [self.lag_window.first(), self.lag_window.last()],
            features: self.features,
            regressor: RegressorDocument::from(&self.regressor),
        };
        serde_json::to_string_pretty(&doc).expect("model values are finite")
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let doc: PipelineDocument = serde_json::from_str(text).map_err(|e| PipelineError::Model(e.to_string()))?;
        if doc.format != PIPELINE_FORMAT {
            return Err(PipelineError::Model(format!(
                "not a pipeline model (format {:?})",
                doc.format
            )));
        }
        if doc.version != PIPELINE_VERSION {
            return Err(PipelineError::Model(format!(
                "unsupported pipeline version {}, expected {PIPELINE_VERSION}",
                doc.version
            )));
        }
        if doc.snr_method != SnrMethod::Lsr {
            return Err(PipelineError::Model("the pipeline SNR method is fixed to LSR".into()));
        }
        if doc.max_lag > 4096 {
            return Err(PipelineError::Model(format!("max_lag {} is implausible", doc.max_lag)));
        }
        let window =
            LagWindow::new(doc.lag_window[0], doc.lag_window[1]).map_err(|e| PipelineError::Model(e.to_string()))?;
        let regressor = TrainedRegressor::try_from(doc.regressor).map_err(|e| PipelineError::Model(e.to_string()))?;
        Self::new(regressor, doc.features, doc.max_lag, window)
    }
}

impl NoiseVariancePredictor for PipelineModel {
    fn max_lag(&self) -> usize {
        self.max_lag
    }

    fn lag_window(&self) -> LagWindow {
        self.lag_window
    }

    fn predict_nv(&self, acf: &AcfCurve, lsr: &SnrEstimate) -> Result<f64, PipelineError> {
        let x = self.features.extract(acf, lsr);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(PipelineError::Model("non-finite feature".into()));
        }
        Ok(self.regressor.predict(&x)?)
    }
}
