//! JSON run configuration. Every field is optional; missing fields take the
//! defaults below and unknown fields are rejected.
//!
//! ```json
//! {
//!   "version": 1,
//!   "seed": 0,
//!   "corpus": { "images": 20, "side": 128, "kind": "bandlimited-noise", "grain_variance": 0.005 },
//!   "nv_grid": [0.001, 0.002, 0.003, 0.004, 0.005, 0.006, 0.007, 0.008, 0.009, 0.01],
//!   "seeds_per_level": 5,
//!   "features": "extended",
//!   "max_lag": 16,
//!   "lag_window": [1, 4],
//!   "window": 3,
//!   "boundary": "symmetric",
//!   "tuning_budget": 30,
//!   "fixed_wiener_nv": 0.005
//! }
//! ```

use serde::{Deserialize, Serialize};

use super::features::FeatureSpec;
use super::PipelineError;
use crate::acf::{DEFAULT_MAX_LAG, MIN_WIDTH};
use crate::filters::{Boundary, FilterConfig};
use crate::image::{NoiseSpec, SyntheticKind};
use crate::snr::LagWindow;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub images: usize,
    pub side: usize,
    pub kind: SyntheticKind,
    /// White texture added to every clean image; part of the ground truth.
    pub grain_variance: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            images: 20,
            side: 128,
            kind: SyntheticKind::BandlimitedNoise,
            grain_variance: 0.005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub version: u32,
    pub seed: u64,
    pub corpus: CorpusConfig,
    pub nv_grid: Vec<f64>,
    pub seeds_per_level: usize,
    pub features: FeatureSpec,
    pub max_lag: usize,
    pub lag_window: [usize; 2],
    pub window: usize,
    pub boundary: Boundary,
    pub tuning_budget: usize,
    pub fixed_wiener_nv: f64,
}

pub fn default_nv_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 1000.0).collect()
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: 0,
            corpus: CorpusConfig::default(),
            nv_grid: default_nv_grid(),
            seeds_per_level: 5,
            features: FeatureSpec::default(),
            max_lag: DEFAULT_MAX_LAG,
            lag_window: [1, 4],
            window: 3,
            boundary: Boundary::Symmetric,
            tuning_budget: 30,
            fixed_wiener_nv: 0.005,
        }
    }
}

fn bad(msg: String) -> PipelineError {
    PipelineError::Config(msg)
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config values are finite")
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.version != CONFIG_VERSION {
            return Err(bad(format!(
                "unsupported config version {}, expected {CONFIG_VERSION}",
                self.version
            )));
        }
        if self.nv_grid.is_empty() {
            return Err(PipelineError::EmptyGrid);
        }
        if let Some(v) = self
            .nv_grid
            .iter()
            .find(|v| !(0.0..=NoiseSpec::MAX_VARIANCE).contains(*v))
        {
            return Err(bad(format!(
                "noise variance {v} outside [0, {}]",
                NoiseSpec::MAX_VARIANCE
            )));
        }
        if self.seeds_per_level == 0 {
            return Err(bad("seeds_per_level must be at least 1".into()));
        }
        let c = &self.corpus;
        if c.images == 0 {
            return Err(PipelineError::EmptyCorpus);
        }
        if c.side < MIN_WIDTH || c.side > 4096 {
            return Err(bad(format!("corpus side {} outside [{MIN_WIDTH}, 4096]", c.side)));
        }
        if !(0.0..=NoiseSpec::MAX_VARIANCE).contains(&c.grain_variance) {
            return Err(bad(format!("grain_variance {} out of range", c.grain_variance)));
        }
        if self.max_lag < self.features.min_lag().max(self.lag_window[1]) || self.max_lag > c.side / 4 {
            return Err(bad(format!(
                "max_lag {} must cover the lag window and the features and be at most side/4",
                self.max_lag
            )));
        }
        self.lag_window()?;
        if self.window < 3 || self.window.is_multiple_of(2) || self.window > c.side {
            return Err(bad(format!(
                "window {} must be odd, at least 3 and fit the image",
                self.window
            )));
        }
        if !(self.fixed_wiener_nv >= 0.0 && self.fixed_wiener_nv.is_finite()) {
            return Err(bad(format!(
                "fixed_wiener_nv {} must be non-negative",
                self.fixed_wiener_nv
            )));
        }
        Ok(())
    }

    pub fn lag_window(&self) -> Result<LagWindow, PipelineError> {
        LagWindow::new(self.lag_window[0], self.lag_window[1]).map_err(|e| bad(e.to_string()))
    }

    pub fn filter_config(&self, noise_variance: f64) -> FilterConfig {
        FilterConfig {
            window: self.window,
            noise_variance,
            boundary: self.boundary,
        }
    }
}
