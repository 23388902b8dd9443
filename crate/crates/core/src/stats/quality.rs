//! MSE, PSNR, SSIM and cosine similarity.

use thiserror::Error;

use crate::image::{GrayImage, ImageError};

#[derive(Debug, Error, PartialEq)]
pub enum QualityError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("image side {0} is smaller than the {SSIM_WINDOW}-pixel SSIM window")]
    TooSmall(usize),
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("vectors are empty")]
    Empty,
    #[error("zero-norm vector")]
    ZeroNorm,
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64, QualityError> {
    a.same_size(b)?;
    let s: f64 = a.pixels().iter().zip(b.pixels()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(s / a.len() as f64)
}

/// `10 log10(peak^2 / mse)`; infinite when `mse` is zero.
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

pub fn psnr(a: &GrayImage, b: &GrayImage, peak: f64) -> Result<f64, QualityError> {
    Ok(psnr_from_mse(mse(a, b)?, peak))
}

fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut taps = [0.0; SSIM_WINDOW];
    for (i, t) in taps.iter_mut().enumerate() {
        let d = i as f64 - r;
        *t = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    taps
}

/// Gaussian-weighted sums over every fully contained window.
fn windowed(src: &[f64], w: usize, h: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let (ow, oh) = (w - k + 1, h - k + 1);
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            tmp[y * ow + x] = taps.iter().zip(&row[x..x + k]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps.iter().enumerate().map(|(i, t)| t * tmp[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Mean single-scale SSIM with peak 1.
pub fn ssim(a: &GrayImage, b: &GrayImage) -> Result<f64, QualityError> {
    a.same_size(b)?;
    let (w, h) = (a.width(), a.height());
    if w.min(h) < SSIM_WINDOW {
        return Err(QualityError::TooSmall(w.min(h)));
    }
    let taps = gaussian_taps();
    let pa = a.pixels();
    let pb = b.pixels();
    let aa: Vec<f64> = pa.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = pb.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| x * y).collect();
    let mu_a = windowed(pa, w, h, &taps);
    let mu_b = windowed(pb, w, h, &taps);
    let e_aa = windowed(&aa, w, h, &taps);
    let e_bb = windowed(&bb, w, h, &taps);
    let e_ab = windowed(&ab, w, h, &taps);
    let c1 = K1 * K1;
    let c2 = K2 * K2;
    let n = mu_a.len();
    let mut total = 0.0;
    for i in 0..n {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = e_aa[i] - ma * ma;
        let vb = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    Ok(total / n as f64)
}

pub fn cosine_similarity(x: &[f64], y: &[f64]) -> Result<f64, QualityError> {
    if x.len() != y.len() {
        return Err(QualityError::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(QualityError::Empty);
    }
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(QualityError::ZeroNorm);
    }
    Ok(dot / (nx * ny))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{make_synthetic, SyntheticKind};

    #[test]
    fn mse_examples() {
        let a = GrayImage::new(2, 1, vec![0.0, 0.0]).unwrap();
        let b = GrayImage::new(2, 1, vec![1.0, 1.0]).unwrap();
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        assert_eq!(mse(&a, &b).unwrap(), 1.0);
        let c = GrayImage::new(2, 1, vec![0.1, 0.2]).unwrap();
        let d = GrayImage::new(2, 1, vec![0.2, 0.4]).unwrap();
        assert!((mse(&c, &d).unwrap() - 0.025).abs() < 1e-15);
        assert!(mse(&a, &GrayImage::filled(1, 2, 0.0).unwrap()).is_err());
    }

    #[test]
    fn psnr_examples() {
        assert_eq!(psnr_from_mse(0.0, 1.0), f64::INFINITY);
        assert!((psnr_from_mse(0.01, 1.0) - 20.0).abs() < 1e-12);
        assert!((psnr_from_mse(0.001, 1.0) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn ssim_identity_and_constants() {
        let img = make_synthetic(SyntheticKind::Blobs, 32, 24, 3).unwrap();
        assert_eq!(ssim(&img, &img).unwrap(), 1.0);
        let a = GrayImage::filled(16, 16, 0.3).unwrap();
        let b = GrayImage::filled(16, 16, 0.7).unwrap();
        let c1 = 1e-4;
        let expected = (2.0 * 0.3 * 0.7 + c1) / (0.09 + 0.49 + c1);
        let got = ssim(&a, &b).unwrap();
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
        assert!((got - 0.7241855).abs() < 1e-7);
    }

    #[test]
    fn ssim_negative_for_inverted_texture() {
        let img = GrayImage::from_fn(32, 32, |x, y| {
            0.5 + 0.4 * ((x as f64 * 0.7).sin() * (y as f64 * 0.4).cos())
        })
        .unwrap();
        let neg = GrayImage::from_fn(32, 32, |x, y| 1.0 - img.get(x, y)).unwrap();
        assert!(ssim(&img, &neg).unwrap() < 0.0);
        assert_eq!(ssim(&img, &neg).unwrap(), ssim(&neg, &img).unwrap());
        let small = GrayImage::filled(10, 40, 0.5).unwrap();
        assert_eq!(ssim(&small, &small), Err(QualityError::TooSmall(10)));
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine_similarity(&[0.3, 0.4], &[0.3, 0.4]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 2.0]).unwrap(), 0.0);
        let v = cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cosine_similarity(&[0.0], &[1.0]), Err(QualityError::ZeroNorm));
        assert_eq!(cosine_similarity(&[], &[]), Err(QualityError::Empty));
    }
}
