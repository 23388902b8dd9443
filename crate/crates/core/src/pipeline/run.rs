use std::time::Instant;

use serde::Serialize;

use super::model::NoiseVariancePredictor;
use super::PipelineError;
use crate::acf::compute_acf;
use crate::filters::{wiener_nv, Boundary, FilterConfig};
use crate::image::GrayImage;
use crate::snr::{lsr_line, noise_variance_from_acf, snr_lsr};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Timings {
    pub acf_ms: f64,
    pub estimate_ms: f64,
    pub filter_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    /// `None` when the LSR estimate was degenerate.
    pub snr_db: Option<f64>,
    pub peak_estimate: f64,
    pub estimated_nv: f64,
    /// The regressor was bypassed and the ACF noise variance used instead.
    pub fallback: bool,
    pub warning: Option<String>,
    #[serde(skip)]
    pub timings: Timings,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// ACF, LSR SNR, regressor, then the NV-guided Wiener filter with the
/// estimated variance floored at zero.
pub fn run_aogprllsr(
    noisy: &GrayImage,
    model: &dyn NoiseVariancePredictor,
    window: usize,
    boundary: Boundary,
) -> Result<(GrayImage, RunReport), PipelineError> {
    let t = Instant::now();
    let acf = compute_acf(noisy, model.max_lag())?;
    let acf_ms = ms(t);

    let t = Instant::now();
    let lag_window = model.lag_window();
    let lsr = snr_lsr(&acf, lag_window);
    let (alpha, _) = lsr_line(&acf, lag_window);
    let raw_peak = alpha + (acf.h0() - acf.h(1)) / 2.0;
    let fallback_nv = || noise_variance_from_acf(&acf, raw_peak, noisy.len());
    let (snr_db, peak_estimate, estimated_nv, warning) = match &lsr {
        Ok(est) => match model.predict_nv(&acf, est) {
            Ok(nv) if nv.is_finite() => (Some(est.snr_db), est.peak_estimate, nv.max(0.0), None),
            Ok(nv) => (
                Some(est.snr_db),
                est.peak_estimate,
                fallback_nv(),
                Some(format!("regressor returned {nv}; using the ACF noise variance")),
            ),
            Err(e) => (
                Some(est.snr_db),
                est.peak_estimate,
                fallback_nv(),
                Some(format!("regressor failed ({e}); using the ACF noise variance")),
            ),
        },
        Err(e) => (
            None,
            raw_peak,
            fallback_nv(),
            Some(format!("LSR estimate unusable ({e}); using the ACF noise variance")),
        ),
    };
    let estimate_ms = ms(t);

    let t = Instant::now();
    let cfg = FilterConfig {
        window,
        noise_variance: estimated_nv,
        boundary,
    };
    let filtered = wiener_nv(noisy, &cfg)?;
    let filter_ms = ms(t);

    Ok((
        filtered,
        RunReport {
            snr_db: snr_db.filter(|v| v.is_finite()),
            peak_estimate,
            estimated_nv,
            fallback: warning.is_some(),
            warning,
            timings: Timings {
                acf_ms,
                estimate_ms,
                filter_ms,
            },
        },
    ))
}
