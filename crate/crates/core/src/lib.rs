//! Single-image SNR estimation, noise-variance regression and NV-guided
//! Wiener filtering for scanning electron microscope images.
//!
//! The usual flow is [`acf::compute_acf`] on a noisy image, an SNR estimate
//! from [`snr::snr_lsr`], a trained regressor mapping SNR features to noise
//! variance, and [`filters::wiener_nv`] driven by that variance. The
//! [`pipeline`] module wires these together and hosts the benchmark harness.

pub mod acf;
pub mod bayes_opt;
pub mod filters;
pub mod image;
pub mod linalg;
pub mod pgm;
pub mod pipeline;
pub mod regression;
pub mod rng;
pub mod snr;
pub mod stats;
pub mod tabular;

pub use acf::{compute_acf, AcfCurve};
pub use image::{add_awgn, make_synthetic, GrayImage, NoiseSpec, SyntheticKind};
pub use pgm::{decode_pgm, encode_pgm, load_pgm, save_pgm};
pub use rng::SplitMix64;
pub use snr::{LagWindow, SnrEstimate, SnrMethod};
