//! Average, median, Gaussian and noise-variance guided Wiener filters.
//!
//! Windowed means are accumulated as `center + sum(v - center) / n`, which
//! leaves constant regions bit-exact.

use std::str::FromStr;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::GrayImage;

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("window {0} must be odd")]
    EvenWindow(usize),
    #[error("window {0} must be at least 3")]
    WindowTooSmall(usize),
    #[error("window {window} larger than the image ({width}x{height})")]
    WindowTooLarge { window: usize, width: usize, height: usize },
    #[error("noise variance {0} must be non-negative and finite")]
    InvalidNoiseVariance(f64),
    #[error("gaussian sigma^2 {0} must be positive")]
    NonPositiveSigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Mirror with the edge pixel repeated: `.. b a | a b ..`.
    #[default]
    Symmetric,
    Replicate,
}

impl FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetric" => Ok(Self::Symmetric),
            "replicate" => Ok(Self::Replicate),
            other => Err(format!("unknown boundary '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub window: usize,
    pub noise_variance: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            window: 3,
            noise_variance: 0.0,
            boundary: Boundary::Symmetric,
        }
    }
}

impl FilterConfig {
    pub fn new(window: usize, noise_variance: f64) -> Self {
        Self {
            window,
            noise_variance,
            boundary: Boundary::Symmetric,
        }
    }

    fn check_window(&self, img: &GrayImage) -> Result<(), FilterError> {
        if self.window.is_multiple_of(2) {
            return Err(FilterError::EvenWindow(self.window));
        }
        if self.window < 3 {
            return Err(FilterError::WindowTooSmall(self.window));
        }
        if self.window > img.width().min(img.height()) {
            return Err(FilterError::WindowTooLarge {
                window: self.window,
                width: img.width(),
                height: img.height(),
            });
        }
        Ok(())
    }

    fn check_nv(&self) -> Result<(), FilterError> {
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(FilterError::InvalidNoiseVariance(self.noise_variance));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterKind {
    Average,
    Median,
    Gaussian,
    Wiener,
    WienerFreq,
}

impl FromStr for FilterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "average" => Ok(Self::Average),
            "median" => Ok(Self::Median),
            "gaussian" => Ok(Self::Gaussian),
            "wiener" => Ok(Self::Wiener),
            "wiener-freq" => Ok(Self::WienerFreq),
            other => Err(format!("unknown filter '{other}'")),
        }
    }
}

impl FilterKind {
    pub fn apply(self, img: &GrayImage, cfg: &FilterConfig) -> Result<GrayImage, FilterError> {
        match self {
            Self::Average => average_filter(img, cfg),
            Self::Median => median_filter(img, cfg),
            Self::Gaussian => gaussian_filter(img, cfg),
            Self::Wiener => wiener_nv(img, cfg),
            Self::WienerFreq => {
                cfg.check_nv()?;
                Ok(wiener_frequency(img, cfg.noise_variance))
            }
        }
    }
}

#[inline]
fn pad(i: isize, n: usize, boundary: Boundary) -> usize {
    match boundary {
        Boundary::Replicate => i.clamp(0, n as isize - 1) as usize,
        Boundary::Symmetric => {
            let period = 2 * n as isize;
            let m = i.rem_euclid(period) as usize;
            if m < n {
                m
            } else {
                2 * n - 1 - m
            }
        }
    }
}

/// Runs `f(center, window_values)` for every pixel, with the window gathered
/// row-major around it.
fn map_windows(
    img: &GrayImage,
    window: usize,
    boundary: Boundary,
    f: impl Fn(f64, &mut [f64]) -> f64 + Sync,
) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let r = (window / 2) as isize;
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let mut buf = vec![0.0; window * window];
        let rows: Vec<usize> = (-r..=r).map(|d| pad(y as isize + d, h, boundary)).collect();
        for (x, o) in row.iter_mut().enumerate() {
            let mut i = 0;
            for &yy in &rows {
                for dx in -r..=r {
                    buf[i] = img.get(pad(x as isize + dx, w, boundary), yy);
                    i += 1;
                }
            }
            *o = f(img.get(x, y), &mut buf);
        }
    });
    GrayImage::from_clamped(w, h, out)
}

fn local_mean(center: f64, vals: &[f64]) -> f64 {
    center + vals.iter().map(|v| v - center).sum::<f64>() / vals.len() as f64
}

pub fn average_filter(img: &GrayImage, cfg: &FilterConfig) -> Result<GrayImage, FilterError> {
    cfg.check_window(img)?;
    Ok(map_windows(img, cfg.window, cfg.boundary, |c, vals| {
        local_mean(c, vals)
    }))
}

pub fn median_filter(img: &GrayImage, cfg: &FilterConfig) -> Result<GrayImage, FilterError> {
    cfg.check_window(img)?;
    Ok(map_windows(img, cfg.window, cfg.boundary, |_, vals| {
        let mid = vals.len() / 2;
        *vals.select_nth_unstable_by(mid, f64::total_cmp).1
    }))
}

/// Normalized 1-D Gaussian taps for `sigma`, truncated at `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    taps
}

/// Separable Gaussian blur with standard deviation `sigma` pixels.
pub fn gaussian_blur(img: &GrayImage, sigma: f64, boundary: Boundary) -> GrayImage {
    let taps = gaussian_kernel(sigma);
    let r = (taps.len() / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let src = img.pixels();
    let mut tmp = vec![0.0; w * h];
    tmp.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            let c = src[y * w + x];
            *o = c + taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * (src[y * w + pad(x as isize + k as isize - r, w, boundary)] - c))
                .sum::<f64>();
        }
    });
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            let c = tmp[y * w + x];
            *o = c + taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * (tmp[pad(y as isize + k as isize - r, h, boundary) * w + x] - c))
                .sum::<f64>();
        }
    });
    GrayImage::from_clamped(w, h, out)
}

/// Gaussian filter whose `sigma^2` is `cfg.noise_variance`.
pub fn gaussian_filter(img: &GrayImage, cfg: &FilterConfig) -> Result<GrayImage, FilterError> {
    if !(cfg.noise_variance > 0.0 && cfg.noise_variance.is_finite()) {
        return Err(FilterError::NonPositiveSigma(cfg.noise_variance));
    }
    Ok(gaussian_blur(img, cfg.noise_variance.sqrt(), cfg.boundary))
}

/// Adaptive local-statistics Wiener filter:
/// `mu + max(var - nv, 0) / max(var, nv) * (x - mu)` over each window.
pub fn wiener_nv(img: &GrayImage, cfg: &FilterConfig) -> Result<GrayImage, FilterError> {
    cfg.check_window(img)?;
    cfg.check_nv()?;
    let nv = cfg.noise_variance;
    if nv == 0.0 {
        return Ok(img.clone());
    }
    Ok(map_windows(img, cfg.window, cfg.boundary, |x, vals| {
        let mu = local_mean(x, vals);
        let var = vals.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / vals.len() as f64;
        let gain = (var - nv).max(0.0) / var.max(nv);
        mu + gain * (x - mu)
    }))
}

/// Frequency-domain Wiener filter with per-bin gain `Ps / (Ps + nv)` where
/// `Ps = max(|F|^2 / N - nv, 0)`. The image is offset by its first pixel
/// before the transform and the zero-frequency bin passes unchanged.
pub fn wiener_frequency(img: &GrayImage, noise_variance: f64) -> GrayImage {
    if noise_variance <= 0.0 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let n = (w * h) as f64;
    let offset = img.pixels()[0];
    let mut data: Vec<Complex64> = img.pixels().iter().map(|&v| Complex64::new(v - offset, 0.0)).collect();
    fft2(&mut data, w, h, false);
    for c in data.iter_mut().skip(1) {
        let ps = (c.norm_sqr() / n - noise_variance).max(0.0);
        *c *= ps / (ps + noise_variance);
    }
    fft2(&mut data, w, h, true);
    let out = data.iter().map(|c| offset + c.re / n).collect();
    GrayImage::from_clamped(w, h, out)
}

fn fft2(data: &mut [Complex64], w: usize, h: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h))
    } else {
        (planner.plan_fft_forward(w), planner.plan_fft_forward(h))
    };
    for row in data.chunks_mut(w) {
        row_fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = data[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            data[y * w + x] = col[y];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{add_awgn, NoiseSpec};

    fn patch(center: f64, other: f64) -> GrayImage {
        GrayImage::from_fn(3, 3, |x, y| if (x, y) == (1, 1) { center } else { other }).unwrap()
    }

    #[test]
    fn constant_images_are_fixed() {
        let img = GrayImage::filled(12, 9, 0.1).unwrap();
        let cfg = FilterConfig::new(3, 0.01);
        for kind in [
            FilterKind::Average,
            FilterKind::Median,
            FilterKind::Gaussian,
            FilterKind::Wiener,
            FilterKind::WienerFreq,
        ] {
            assert_eq!(kind.apply(&img, &cfg).unwrap(), img, "{kind:?}");
        }
    }

    #[test]
    fn average_center() {
        let out = average_filter(&patch(1.0, 0.2), &FilterConfig::new(3, 0.0)).unwrap();
        assert!((out.get(1, 1) - 2.6 / 9.0).abs() < 1e-14);
        assert!((out.get(1, 1) - 0.28889).abs() < 1e-5);
    }

    #[test]
    fn median_center_and_impulses() {
        let out = median_filter(&patch(0.9, 0.1), &FilterConfig::new(3, 0.0)).unwrap();
        assert_eq!(out.get(1, 1), 0.1);
        let base = GrayImage::filled(9, 9, 0.4).unwrap();
        let mut px = base.pixels().to_vec();
        for &(x, y, v) in &[(2usize, 2usize, 1.0), (6, 3, 0.0), (4, 7, 1.0)] {
            px[y * 9 + x] = v;
        }
        let noisy = GrayImage::new(9, 9, px).unwrap();
        assert_eq!(median_filter(&noisy, &FilterConfig::new(3, 0.0)).unwrap(), base);
    }

    #[test]
    fn window_validation() {
        let img = GrayImage::filled(5, 5, 0.5).unwrap();
        assert_eq!(
            average_filter(&img, &FilterConfig::new(4, 0.0)),
            Err(FilterError::EvenWindow(4))
        );
        assert_eq!(
            median_filter(&img, &FilterConfig::new(1, 0.0)),
            Err(FilterError::WindowTooSmall(1))
        );
        assert!(matches!(
            wiener_nv(&img, &FilterConfig::new(7, 0.01)),
            Err(FilterError::WindowTooLarge { .. })
        ));
        assert!(gaussian_filter(&img, &FilterConfig::new(3, 0.0)).is_err());
    }

    #[test]
    fn gaussian_kernel_shape() {
        let taps = gaussian_kernel(1.0);
        assert_eq!(taps.len(), 7);
        let c = taps[3] * taps[3];
        let corner = taps[2] * taps[2];
        assert!((c / corner - std::f64::consts::E).abs() < 1e-12);
        for s in [0.05, 0.3, 1.0, 2.7] {
            assert!((gaussian_kernel(s).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wiener_gain_cases() {
        let img = add_awgn(
            &GrayImage::filled(16, 16, 0.5).unwrap(),
            &NoiseSpec::new(0.01, 3).unwrap(),
        );
        assert_eq!(wiener_nv(&img, &FilterConfig::new(3, 0.0)).unwrap(), img);

        // window values {0.4 x4, 0.6 x4, 0.5}: mean 0.5, var 0.008
        let px = [0.4, 0.6, 0.4, 0.6, 0.5, 0.6, 0.4, 0.6, 0.4];
        let g = GrayImage::new(3, 3, px.to_vec()).unwrap();
        let var = 0.08 / 9.0;
        let full = wiener_nv(&g, &FilterConfig::new(3, var * 1.5)).unwrap();
        assert!((full.get(1, 1) - 0.5).abs() < 1e-15);

        let skew = [0.4, 0.6, 0.4, 0.6, 0.7, 0.6, 0.4, 0.6, 0.4];
        let g = GrayImage::new(3, 3, skew.to_vec()).unwrap();
        let mu = skew.iter().sum::<f64>() / 9.0;
        let var = skew.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / 9.0;
        let half = wiener_nv(&g, &FilterConfig::new(3, var / 2.0)).unwrap();
        let expected = mu + 0.5 * (0.7 - mu);
        assert!(
            (half.get(1, 1) - expected).abs() < 1e-12,
            "{} vs {expected}",
            half.get(1, 1)
        );
    }

    #[test]
    fn frequency_wiener() {
        let img = add_awgn(
            &GrayImage::filled(64, 64, 0.5).unwrap(),
            &NoiseSpec::new(0.01, 8).unwrap(),
        );
        let same = wiener_frequency(&img, 0.0);
        assert_eq!(same, img);
        let out = wiener_frequency(&img, 0.01);
        let power = |g: &GrayImage| {
            let m = g.mean();
            g.pixels().iter().map(|v| (v - m).powi(2)).sum::<f64>()
        };
        let ratio = power(&out) / power(&img);
        assert!(ratio < 0.3, "off-DC power ratio {ratio}");
    }

    #[test]
    fn padding_modes() {
        assert_eq!(pad(-1, 5, Boundary::Symmetric), 0);
        assert_eq!(pad(-2, 5, Boundary::Symmetric), 1);
        assert_eq!(pad(5, 5, Boundary::Symmetric), 4);
        assert_eq!(pad(6, 5, Boundary::Symmetric), 3);
        assert_eq!(pad(-3, 5, Boundary::Replicate), 0);
        assert_eq!(pad(9, 5, Boundary::Replicate), 4);
        assert_eq!(pad(-1, 1, Boundary::Symmetric), 0);
    }
}
