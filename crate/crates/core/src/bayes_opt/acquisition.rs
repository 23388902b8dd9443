//! Acquisition functions for minimization.

use serde::{Deserialize, Serialize};

use crate::stats::{normal_cdf, normal_pdf};

/// Floor applied to predicted evaluation time, seconds.
pub const TIME_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acquisition {
    #[default]
    ExpectedImprovement,
    ProbabilityOfImprovement,
    LowerConfidenceBound,
    ExpectedImprovementPerSecond,
}

impl std::str::FromStr for Acquisition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ei" | "expected-improvement" => Ok(Self::ExpectedImprovement),
            "pi" | "probability-of-improvement" => Ok(Self::ProbabilityOfImprovement),
            "lcb" | "lower-confidence-bound" => Ok(Self::LowerConfidenceBound),
            "ei-per-second" | "eips" | "expected-improvement-per-second" => Ok(Self::ExpectedImprovementPerSecond),
            other => Err(format!("unknown acquisition {other:?} (ei, pi, lcb, ei-per-second)")),
        }
    }
}

pub fn expected_improvement(mu: f64, sigma: f64, best: f64) -> f64 {
    let d = best - mu;
    if sigma <= 0.0 {
        return d.max(0.0);
    }
    let z = d / sigma;
    (d * normal_cdf(z) + sigma * normal_pdf(z)).max(0.0)
}

pub fn probability_of_improvement(mu: f64, sigma: f64, best: f64, margin: f64) -> f64 {
    let d = best - margin - mu;
    if sigma <= 0.0 {
        return if d > 0.0 { 1.0 } else { 0.0 };
    }
    normal_cdf(d / sigma)
}

/// Confidence bound `G = mu - 2 sigma`.
pub fn lower_confidence_bound(mu: f64, sigma: f64) -> f64 {
    mu - 2.0 * sigma
}

/// The value maximized when LCB is selected, `-G`.
pub fn lcb_acquisition(mu: f64, sigma: f64) -> f64 {
    2.0 * sigma - mu
}

pub fn ei_per_second(ei: f64, mu_time: f64) -> f64 {
    if ei == 0.0 {
        return 0.0;
    }
    ei / mu_time.max(TIME_FLOOR)
}

/// Combined predictive std `sqrt(sigma_f^2 + sigma_noise^2)`.
pub fn sigma_q(sigma_f: f64, sigma_noise: f64) -> f64 {
    sigma_f.hypot(sigma_noise)
}

/// True when the model-term std is too small relative to noise, meaning the
/// proposal is over-exploiting and the kernel scale should be inflated.
pub fn plus_exploration_check(sigma_f: f64, sigma_noise: f64, t_sigma: f64) -> bool {
    sigma_f < t_sigma * sigma_noise
}
