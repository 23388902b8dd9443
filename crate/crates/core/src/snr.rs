//! SNR estimators that extrapolate the noise-free ACF peak `h(0)`.
//!
//! Every estimator returns `SNR = (peak - mu^2) / (h(0) - peak)` and differs
//! only in how `peak` is extrapolated from the lags around zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acf::AcfCurve;
use crate::image::{GrayImage, ImageError};

#[derive(Debug, Error, PartialEq)]
pub enum SnrError {
    #[error("{method}: degenerate ACF, h(0) equals the extrapolated peak")]
    DegenerateAcf { method: SnrMethod },
    #[error("{method}: needs max_lag >= {needed}, curve has {available}")]
    NotEnoughLags {
        method: SnrMethod,
        needed: usize,
        available: usize,
    },
    #[error("invalid lag window [{first}, {last}]")]
    InvalidWindow { first: usize, last: usize },
    #[error("NLLSR: ACF value {value} at lag {lag} is not positive")]
    NonPositiveAcf { lag: usize, value: f64 },
    #[error("SNR {0} must be positive to convert to decibels")]
    NonPositiveSnr(f64),
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrMethod {
    Nn,
    Fol,
    NnFol,
    Nllsr,
    Lsr,
}

impl SnrMethod {
    pub const ALL: [SnrMethod; 5] = [Self::Nn, Self::Fol, Self::NnFol, Self::Nllsr, Self::Lsr];

    pub fn label(self) -> &'static str {
        match self {
            Self::Nn => "NN",
            Self::Fol => "FOL",
            Self::NnFol => "NN+FOL",
            Self::Nllsr => "NLLSR",
            Self::Lsr => "LSR",
        }
    }
}

impl fmt::Display for SnrMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SnrMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nn" => Ok(Self::Nn),
            "fol" => Ok(Self::Fol),
            "nn-fol" | "nn+fol" | "nnfol" => Ok(Self::NnFol),
            "nllsr" => Ok(Self::Nllsr),
            "lsr" => Ok(Self::Lsr),
            other => Err(format!("unknown SNR method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrEstimate {
    pub method: SnrMethod,
    /// Extrapolated noise-free `h(0)`.
    pub peak_estimate: f64,
    pub snr_linear: f64,
    /// `20 log10(snr_linear)`, or negative infinity when `snr_linear <= 0`.
    pub snr_db: f64,
}

/// Inclusive range of lags used by the regression estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagWindow {
    first: usize,
    last: usize,
}

impl Default for LagWindow {
    fn default() -> Self {
        Self { first: 1, last: 4 }
    }
}

impl LagWindow {
    pub fn new(first: usize, last: usize) -> Result<Self, SnrError> {
        if first == 0 || last <= first {
            return Err(SnrError::InvalidWindow { first, last });
        }
        Ok(Self { first, last })
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn last(&self) -> usize {
        self.last
    }

    fn lags(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }
}

pub fn snr_to_db(snr_linear: f64) -> Result<f64, SnrError> {
    if snr_linear > 0.0 {
        Ok(20.0 * snr_linear.log10())
    } else {
        Err(SnrError::NonPositiveSnr(snr_linear))
    }
}

fn db_or_neg_inf(snr_linear: f64) -> f64 {
    snr_to_db(snr_linear).unwrap_or(f64::NEG_INFINITY)
}

fn finish(acf: &AcfCurve, method: SnrMethod, peak: f64) -> Result<SnrEstimate, SnrError> {
    let h0 = acf.h0();
    let denom = h0 - peak;
    if denom.abs() <= 1e-12 * h0.abs().max(f64::MIN_POSITIVE) {
        return Err(SnrError::DegenerateAcf { method });
    }
    let snr_linear = (peak - acf.mean_sq()) / denom;
    Ok(SnrEstimate {
        method,
        peak_estimate: peak,
        snr_linear,
        snr_db: db_or_neg_inf(snr_linear),
    })
}

fn need_lags(acf: &AcfCurve, method: SnrMethod, needed: usize) -> Result<(), SnrError> {
    if acf.max_lag() < needed {
        return Err(SnrError::NotEnoughLags {
            method,
            needed,
            available: acf.max_lag(),
        });
    }
    Ok(())
}

/// Nearest neighbour: the peak is `h(1)`.
pub fn snr_nn(acf: &AcfCurve) -> Result<SnrEstimate, SnrError> {
    need_lags(acf, SnrMethod::Nn, 1)?;
    finish(acf, SnrMethod::Nn, acf.h(1))
}

/// First-order extrapolation through `h(2)` and `h(1)`: `2 h(1) - h(2)`.
pub fn snr_fol(acf: &AcfCurve) -> Result<SnrEstimate, SnrError> {
    need_lags(acf, SnrMethod::Fol, 2)?;
    finish(acf, SnrMethod::Fol, 2.0 * acf.h(1) - acf.h(2))
}

/// Midpoint of the NN and FOL peaks: `(3 h(1) - h(2)) / 2`.
pub fn snr_nn_fol(acf: &AcfCurve) -> Result<SnrEstimate, SnrError> {
    need_lags(acf, SnrMethod::NnFol, 2)?;
    finish(acf, SnrMethod::NnFol, (3.0 * acf.h(1) - acf.h(2)) / 2.0)
}

/// Power law `ln h(k) = ln C + gamma ln(k + 1)` fitted over `window`; the
/// peak is `C`, the model at lag 0.
pub fn snr_nllsr(acf: &AcfCurve, window: LagWindow) -> Result<SnrEstimate, SnrError> {
    need_lags(acf, SnrMethod::Nllsr, window.last)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in window.lags() {
        let v = acf.values()[k];
        if v <= 0.0 {
            return Err(SnrError::NonPositiveAcf { lag: k, value: v });
        }
        xs.push(((k + 1) as f64).ln());
        ys.push(v.ln());
    }
    let (intercept, _) = ols_line(&xs, &ys);
    finish(acf, SnrMethod::Nllsr, intercept.exp())
}

/// Straight line `alpha + B k` fitted over `window`; the peak is
/// `alpha + (h(0) - h(1)) / 2`.
pub fn snr_lsr(acf: &AcfCurve, window: LagWindow) -> Result<SnrEstimate, SnrError> {
    need_lags(acf, SnrMethod::Lsr, window.last)?;
    let (alpha, _) = lsr_line(acf, window);
    let eps = (acf.h0() - acf.h(1)) / 2.0;
    finish(acf, SnrMethod::Lsr, alpha + eps)
}

/// Intercept and slope of the LSR line over `window`.
pub fn lsr_line(acf: &AcfCurve, window: LagWindow) -> (f64, f64) {
    let xs: Vec<f64> = window.lags().map(|k| k as f64).collect();
    let ys: Vec<f64> = window.lags().map(|k| acf.values()[k]).collect();
    ols_line(&xs, &ys)
}

pub fn estimate(acf: &AcfCurve, method: SnrMethod, window: LagWindow) -> Result<SnrEstimate, SnrError> {
    match method {
        SnrMethod::Nn => snr_nn(acf),
        SnrMethod::Fol => snr_fol(acf),
        SnrMethod::NnFol => snr_nn_fol(acf),
        SnrMethod::Nllsr => snr_nllsr(acf, window),
        SnrMethod::Lsr => snr_lsr(acf, window),
    }
}

/// Ordinary least squares `y = a + b x`, returned as `(a, b)`.
fn ols_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Noise variance `(h(0) - peak) / image_size`, floored at zero.
pub fn noise_variance_from_acf(acf: &AcfCurve, peak_estimate: f64, image_size: usize) -> f64 {
    assert!(image_size > 0, "image_size must be positive");
    ((acf.h0() - peak_estimate) / image_size as f64).max(0.0)
}

/// Ground-truth SNR of a synthetic pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActualSnr {
    pub signal_variance: f64,
    pub noise_variance: f64,
    /// Infinite when the images are identical.
    pub snr_linear: f64,
    pub snr_db: f64,
}

impl ActualSnr {
    pub fn is_noise_free(&self) -> bool {
        self.snr_linear.is_infinite()
    }
}

/// `var(clean) / var(noisy - clean)` with population variances.
pub fn actual_snr(clean: &GrayImage, noisy: &GrayImage) -> Result<ActualSnr, SnrError> {
    clean.same_size(noisy)?;
    let n = clean.len() as f64;
    let diff: Vec<f64> = noisy.pixels().iter().zip(clean.pixels()).map(|(a, b)| a - b).collect();
    let md = diff.iter().sum::<f64>() / n;
    let noise_variance = diff.iter().map(|d| (d - md).powi(2)).sum::<f64>() / n;
    let signal_variance = clean.variance();
    if noise_variance == 0.0 {
        return Ok(ActualSnr {
            signal_variance,
            noise_variance,
            snr_linear: f64::INFINITY,
            snr_db: f64::INFINITY,
        });
    }
    let snr_linear = signal_variance / noise_variance;
    Ok(ActualSnr {
        signal_variance,
        noise_variance,
        snr_linear,
        snr_db: db_or_neg_inf(snr_linear),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(values: &[f64], mean_sq: f64) -> AcfCurve {
        AcfCurve::from_values(values.to_vec(), mean_sq.sqrt()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn nn_examples() {
        let e = snr_nn(&curve(&[2.0, 1.5], 1.0)).unwrap();
        close(e.peak_estimate, 1.5, 0.0);
        close(e.snr_linear, 1.0, 1e-15);
        close(e.snr_db, 0.0, 1e-12);
        let zero = snr_nn(&curve(&[2.0, 1.0], 1.0)).unwrap();
        assert_eq!(zero.snr_linear, 0.0);
        assert_eq!(zero.snr_db, f64::NEG_INFINITY);
        assert_eq!(
            snr_nn(&curve(&[0.25, 0.25], 0.25)),
            Err(SnrError::DegenerateAcf { method: SnrMethod::Nn })
        );
    }

    #[test]
    fn fol_examples() {
        let e = snr_fol(&curve(&[2.0, 1.5, 1.2], 1.0)).unwrap();
        close(e.peak_estimate, 1.8, 1e-15);
        close(e.snr_linear, 4.0, 1e-12);
        let flat = snr_fol(&curve(&[2.0, 1.5, 1.5], 1.0)).unwrap();
        close(flat.peak_estimate, 1.5, 0.0);
        // linear tail a - b k recovers a
        let (a, b) = (1.9, 0.15);
        let line = snr_fol(&curve(&[2.5, a - b, a - 2.0 * b], 1.0)).unwrap();
        close(line.peak_estimate, a, 1e-15);
    }

    #[test]
    fn nn_fol_examples() {
        let c = curve(&[2.0, 1.5, 1.2], 1.0);
        let e = snr_nn_fol(&c).unwrap();
        close(e.peak_estimate, 1.65, 1e-15);
        close(e.snr_linear, 0.65 / 0.35, 1e-12);
        close(e.snr_linear, 1.857143, 1e-6);
        let mid = (snr_nn(&c).unwrap().peak_estimate + snr_fol(&c).unwrap().peak_estimate) / 2.0;
        close(e.peak_estimate, mid, 1e-15);
        let flat = curve(&[2.0, 1.4, 1.4], 1.0);
        for f in [snr_nn, snr_fol, snr_nn_fol] {
            close(f(&flat).unwrap().peak_estimate, 1.4, 1e-15);
        }
    }

    #[test]
    fn nllsr_recovers_power_law() {
        let mut h = vec![2.0];
        h.extend((1..=4).map(|k| 1.8 * ((k + 1) as f64).powf(-0.2)));
        let e = snr_nllsr(&curve(&h, 1.0), LagWindow::default()).unwrap();
        close(e.peak_estimate, 1.8, 1e-9);
        close(e.snr_linear, 4.0, 1e-8);

        let flat = snr_nllsr(&curve(&[2.0, 1.3, 1.3, 1.3, 1.3], 1.0), LagWindow::default()).unwrap();
        close(flat.peak_estimate, 1.3, 1e-12);

        // two points: gamma = ln(h2/h1)/ln(3/2), C = h1 / 2^gamma
        let (h1, h2) = (1.6, 1.44);
        let two = snr_nllsr(&curve(&[2.0, h1, h2], 1.0), LagWindow::new(1, 2).unwrap()).unwrap();
        let gamma = (h2 / h1).ln() / 1.5f64.ln();
        close(two.peak_estimate, h1 / 2f64.powf(gamma), 1e-12);
    }

    #[test]
    fn nllsr_rejects_non_positive() {
        let c = AcfCurve::from_values(vec![0.5, 0.1, 0.0, 0.1], 0.0).unwrap();
        assert_eq!(
            snr_nllsr(&c, LagWindow::new(1, 3).unwrap()),
            Err(SnrError::NonPositiveAcf { lag: 2, value: 0.0 })
        );
    }

    #[test]
    fn lsr_example() {
        let c = curve(&[2.5, 1.9, 1.8, 1.7, 1.6], 1.0);
        let (alpha, slope) = lsr_line(&c, LagWindow::default());
        close(alpha, 2.0, 1e-12);
        close(slope, -0.1, 1e-12);
        let e = snr_lsr(&c, LagWindow::default()).unwrap();
        close(e.peak_estimate, 2.3, 1e-12);
        close(e.snr_linear, 6.5, 1e-10);
        close(e.snr_db, 16.25827, 1e-5);
        let peak = alpha + (c.h0() - c.h(1)) / 2.0;
        assert_eq!(e.peak_estimate, peak);
    }

    #[test]
    fn lsr_flat_tail_is_degenerate() {
        let c = curve(&[0.3, 0.3, 0.3, 0.3, 0.3], 0.09);
        assert_eq!(
            snr_lsr(&c, LagWindow::default()),
            Err(SnrError::DegenerateAcf { method: SnrMethod::Lsr })
        );
    }

    #[test]
    fn lag_requirements() {
        let c = curve(&[2.0, 1.5], 1.0);
        assert!(matches!(snr_fol(&c), Err(SnrError::NotEnoughLags { .. })));
        assert!(matches!(
            snr_lsr(&c, LagWindow::default()),
            Err(SnrError::NotEnoughLags { .. })
        ));
        assert!(LagWindow::new(0, 3).is_err());
        assert!(LagWindow::new(2, 2).is_err());
    }

    #[test]
    fn decibels() {
        close(snr_to_db(1.0).unwrap(), 0.0, 0.0);
        close(snr_to_db(10.0).unwrap(), 20.0, 1e-12);
        close(snr_to_db(6.5).unwrap(), 16.25827, 1e-5);
        assert!(snr_to_db(0.0).is_err());
        assert!(snr_to_db(-1.0).is_err());
    }

    #[test]
    fn eq15_noise_variance() {
        let c = curve(&[2.5, 1.9], 1.0);
        close(noise_variance_from_acf(&c, 2.3, 100), 0.002, 1e-15);
        assert_eq!(noise_variance_from_acf(&c, 2.5, 100), 0.0);
        assert_eq!(noise_variance_from_acf(&c, 2.7, 100), 0.0);
    }

    #[test]
    fn actual_snr_cases() {
        let clean = GrayImage::from_fn(4, 1, |x, _| [0.2, 0.4, 0.6, 0.8][x]).unwrap();
        assert!(actual_snr(&clean, &clean).unwrap().is_noise_free());
        let n1 = GrayImage::from_fn(4, 1, |x, _| clean.get(x, 0) + [0.01, -0.01, 0.01, -0.01][x]).unwrap();
        let n2 = GrayImage::from_fn(4, 1, |x, _| {
            clean.get(x, 0) + std::f64::consts::SQRT_2 * [0.01, -0.01, 0.01, -0.01][x]
        })
        .unwrap();
        let a1 = actual_snr(&clean, &n1).unwrap();
        let a2 = actual_snr(&clean, &n2).unwrap();
        close(a1.snr_linear, 0.05 / 1e-4, 1e-6);
        close(a1.snr_db - a2.snr_db, 20.0 * 2f64.log10(), 1e-9);
        // var(clean) = 0.045 with NV 0.001 gives 45, about 33.06 dB
        close(snr_to_db(0.045 / 0.001).unwrap(), 33.0643, 1e-4);
    }
}
