use serde::{Deserialize, Serialize};

use crate::acf::AcfCurve;
use crate::snr::SnrEstimate;

/// Which ACF and SNR quantities feed the noise-variance regressor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSpec {
    /// LSR SNR in dB only.
    SnrOnly,
    /// LSR SNR in dB, `h(0) - mu^2`, `h(0) - h(1)` and `h(1) - h(2)`.
    #[default]
    Extended,
}

impl FeatureSpec {
    pub fn names(self) -> &'static [&'static str] {
        match self {
            Self::SnrOnly => &["snr_db"],
            Self::Extended => &["snr_db", "acf_variance", "lag1_drop", "lag2_drop"],
        }
    }

    pub fn dim(self) -> usize {
        self.names().len()
    }

    /// Lags the ACF must reach.
    pub fn min_lag(self) -> usize {
        2
    }

    pub fn extract(self, acf: &AcfCurve, lsr: &SnrEstimate) -> Vec<f64> {
        match self {
            Self::SnrOnly => vec![lsr.snr_db],
            Self::Extended => vec![
                lsr.snr_db,
                acf.h0() - acf.mean_sq(),
                acf.h0() - acf.h(1),
                acf.h(1) - acf.h(2),
            ],
        }
    }
}

impl std::str::FromStr for FeatureSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "snr-only" => Ok(Self::SnrOnly),
            "extended" => Ok(Self::Extended),
            other => Err(format!("unknown feature set {other:?} (snr-only, extended)")),
        }
    }
}
