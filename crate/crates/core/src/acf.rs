//! Raw horizontal autocorrelation of an image, averaged over rows.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::image::GrayImage;

pub const DEFAULT_MAX_LAG: usize = 16;
pub const MIN_WIDTH: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum AcfError {
    #[error("max_lag must be at least 1")]
    ZeroLag,
    #[error("max_lag {max_lag} exceeds the limit {limit} for this width")]
    MaxLagTooLarge { max_lag: usize, limit: usize },
    #[error("image width {0} is below the minimum of {MIN_WIDTH}")]
    TooNarrow(usize),
    #[error("autocorrelation curve needs at least one value")]
    Empty,
    #[error("autocorrelation value at lag {lag} is not finite")]
    NotFinite { lag: usize },
    #[error("mean {0} outside [0, 1]")]
    MeanOutOfRange(f64),
    #[error("h(0) = {h0} is below the squared mean {mean_sq}")]
    BelowMeanSquare { h0: f64, mean_sq: f64 },
}

/// Autocorrelation values by lag plus the image mean. `h(-k)` is read as
/// `h(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfCurve {
    values: Vec<f64>,
    mean: f64,
    mean_sq: f64,
}

impl AcfCurve {
    /// Builds a curve from explicit values, e.g. for hand-made fixtures.
    pub fn from_values(values: Vec<f64>, mean: f64) -> Result<Self, AcfError> {
        if values.is_empty() {
            return Err(AcfError::Empty);
        }
        if let Some(lag) = values.iter().position(|v| !v.is_finite()) {
            return Err(AcfError::NotFinite { lag });
        }
        if !(0.0..=1.0).contains(&mean) {
            return Err(AcfError::MeanOutOfRange(mean));
        }
        let mean_sq = mean * mean;
        if values[0] < mean_sq * (1.0 - 1e-12) {
            return Err(AcfError::BelowMeanSquare { h0: values[0], mean_sq });
        }
        Ok(Self { values, mean, mean_sq })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `h(k)`; `k` may be negative.
    pub fn h(&self, k: isize) -> f64 {
        self.values[k.unsigned_abs()]
    }

    pub fn h0(&self) -> f64 {
        self.values[0]
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn mean_sq(&self) -> f64 {
        self.mean_sq
    }

    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// `lag,value` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,value\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}

/// ACF with `1 <= max_lag <= width / 4` on an image at least 8 pixels wide.
pub fn compute_acf(img: &GrayImage, max_lag: usize) -> Result<AcfCurve, AcfError> {
    if img.width() < MIN_WIDTH {
        return Err(AcfError::TooNarrow(img.width()));
    }
    if max_lag == 0 {
        return Err(AcfError::ZeroLag);
    }
    let limit = img.width() / 4;
    if max_lag > limit {
        return Err(AcfError::MaxLagTooLarge { max_lag, limit });
    }
    Ok(acf_unchecked(img, max_lag))
}

/// Same estimator with only `max_lag < width` required. Useful for very
/// small fixtures.
pub fn row_autocorrelation(img: &GrayImage, max_lag: usize) -> Result<AcfCurve, AcfError> {
    if max_lag >= img.width() {
        return Err(AcfError::MaxLagTooLarge {
            max_lag,
            limit: img.width() - 1,
        });
    }
    Ok(acf_unchecked(img, max_lag))
}

fn acf_unchecked(img: &GrayImage, max_lag: usize) -> AcfCurve {
    let w = img.width();
    let per_row: Vec<Vec<f64>> = img
        .pixels()
        .par_chunks(w)
        .map(|row| {
            (0..=max_lag)
                .map(|k| {
                    let s: f64 = row[..w - k].iter().zip(&row[k..]).map(|(a, b)| a * b).sum();
                    s / (w - k) as f64
                })
                .collect()
        })
        .collect();
    let h = img.height() as f64;
    let values = (0..=max_lag)
        .map(|k| {
            let col: Vec<f64> = per_row.iter().map(|r| r[k]).collect();
            pairwise_sum(&col) / h
        })
        .collect();
    let row_means: Vec<f64> = img.rows().map(|r| r.iter().sum::<f64>()).collect();
    let mean = (pairwise_sum(&row_means) / img.len() as f64).clamp(0.0, 1.0);
    AcfCurve {
        values,
        mean,
        mean_sq: mean * mean,
    }
}

pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
