//! Grayscale image container, additive white Gaussian noise and synthetic
//! textures.

use thiserror::Error;

use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum ImageError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("pixel buffer has {actual} samples, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("pixel {index} has intensity {value}, outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("image sizes differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("noise variance {0} outside [0, 0.25]")]
    InvalidVariance(f64),
}

/// Row-major grid of intensities normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(ImageError::ZeroDimension { width, height })?;
        if pixels.len() != expected {
            return Err(ImageError::LengthMismatch {
                expected,
                actual: pixels.len(),
            });
        }
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(ImageError::OutOfRange { index, value });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, ImageError> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    /// Builds an image from arbitrary values, clamping each into `[0, 1]`.
    /// NaN maps to 0.
    pub(crate) fn from_clamped(width: usize, height: usize, mut pixels: Vec<f64>) -> Self {
        debug_assert_eq!(pixels.len(), width * height);
        for v in &mut pixels {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
        Self { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn rows(&self) -> std::slice::Chunks<'_, f64> {
        self.pixels.chunks(self.width)
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.pixels.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.len() as f64
    }

    pub fn same_size(&self, other: &GrayImage) -> Result<(), ImageError> {
        if self.width != other.width || self.height != other.height {
            return Err(ImageError::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}

/// Injected white Gaussian noise level and the seed of its random stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    variance: f64,
    seed: u64,
    stream: u64,
}

impl NoiseSpec {
    pub const MAX_VARIANCE: f64 = 0.25;

    pub fn new(variance: f64, seed: u64) -> Result<Self, ImageError> {
        if !(0.0..=Self::MAX_VARIANCE).contains(&variance) {
            return Err(ImageError::InvalidVariance(variance));
        }
        Ok(Self {
            variance,
            seed,
            stream: 0,
        })
    }

    /// Selects an independent random stream, normally the image index.
    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

/// Adds zero-mean Gaussian noise of the given variance and clamps to `[0, 1]`.
pub fn add_awgn(img: &GrayImage, spec: &NoiseSpec) -> GrayImage {
    if spec.variance == 0.0 {
        return img.clone();
    }
    let sd = spec.variance.sqrt();
    let mut rng = SplitMix64::stream(spec.seed, spec.stream);
    let pixels = img.pixels.iter().map(|&v| v + sd * rng.next_normal()).collect();
    GrayImage::from_clamped(img.width, img.height, pixels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    /// Row-major linear ramp from 0 to 1.
    Gradient,
    /// Sum of large Gaussian blobs of random sign.
    Blobs,
    /// White noise low-passed by a Gaussian with a seed-dependent width.
    BandlimitedNoise,
}

impl std::str::FromStr for SyntheticKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gradient" => Ok(Self::Gradient),
            "blobs" => Ok(Self::Blobs),
            "bandlimited-noise" | "bandlimited" => Ok(Self::BandlimitedNoise),
            other => Err(format!("unknown synthetic kind '{other}'")),
        }
    }
}

const SYNTH_LO: f64 = 0.05;
const SYNTH_HI: f64 = 0.95;

/// Deterministic spatially correlated test image. Textured kinds are rescaled
/// so their extremes land on 0.05 and 0.95.
pub fn make_synthetic(kind: SyntheticKind, width: usize, height: usize, seed: u64) -> Result<GrayImage, ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::ZeroDimension { width, height });
    }
    let n = width * height;
    let field = match kind {
        SyntheticKind::Gradient => {
            let denom = (n - 1).max(1) as f64;
            return GrayImage::new(width, height, (0..n).map(|i| i as f64 / denom).collect());
        }
        SyntheticKind::Blobs => blob_field(width, height, seed),
        SyntheticKind::BandlimitedNoise => bandlimited_field(width, height, seed),
    };
    Ok(GrayImage::from_clamped(
        width,
        height,
        rescale(&field, SYNTH_LO, SYNTH_HI),
    ))
}

fn rescale(values: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span <= 0.0 {
        return vec![0.5 * (lo + hi); values.len()];
    }
    values.iter().map(|v| lo + (hi - lo) * (v - min) / span).collect()
}

fn blob_field(width: usize, height: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    let side = width.min(height) as f64;
    let count = 24;
    let blobs: Vec<(f64, f64, f64, f64)> = (0..count)
        .map(|_| {
            let cx = rng.uniform(0.0, width as f64);
            let cy = rng.uniform(0.0, height as f64);
            let radius = rng.uniform(side / 12.0, side / 5.0).max(0.5);
            let magnitude = rng.uniform(0.5, 1.0);
            let amp = if rng.next_u64() & 1 == 0 { magnitude } else { -magnitude };
            (cx, cy, radius, amp)
        })
        .collect();
    let mut field = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            field[y * width + x] = blobs
                .iter()
                .map(|&(cx, cy, r, a)| {
                    let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                    a * (-d2 / (2.0 * r * r)).exp()
                })
                .sum();
        }
    }
    field
}

fn bandlimited_field(width: usize, height: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    let sigma = (width.min(height) as f64 / 16.0 * rng.uniform(1.0, 1.5)).max(0.5);
    let white: Vec<f64> = (0..width * height).map(|_| rng.next_normal()).collect();
    blur_wrapped(&white, width, height, sigma)
}

/// Separable Gaussian blur with periodic boundaries.
fn blur_wrapped(src: &[f64], width: usize, height: usize, sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);

    let wrap = |i: isize, n: usize| i.rem_euclid(n as isize) as usize;
    let mut tmp = vec![0.0; src.len()];
    for y in 0..height {
        for x in 0..width {
            tmp[y * width + x] = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * src[y * width + wrap(x as isize + k as isize - radius, width)])
                .sum();
        }
    }
    let mut out = vec![0.0; src.len()];
    for y in 0..height {
        for x in 0..width {
            out[y * width + x] = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * tmp[wrap(y as isize + k as isize - radius, height) * width + x])
                .sum();
        }
    }
    out
}
