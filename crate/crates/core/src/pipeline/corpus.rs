use rayon::prelude::*;

use super::config::CorpusConfig;
use crate::image::{add_awgn, make_synthetic, GrayImage, ImageError, NoiseSpec};
use crate::rng::SplitMix64;

const GRAIN_STREAM: u64 = 0x6772_6169_6e00_0000;

/// Deterministic clean corpus: smooth synthetic structure plus a fixed level
/// of white grain, image `i` drawn from its own seed.
pub fn make_corpus(cfg: &CorpusConfig, seed: u64) -> Result<Vec<GrayImage>, ImageError> {
    let grain = NoiseSpec::new(cfg.grain_variance, seed)?;
    (0..cfg.images)
        .into_par_iter()
        .map(|i| {
            let base = make_synthetic(
                cfg.kind,
                cfg.side,
                cfg.side,
                SplitMix64::stream(seed, i as u64).next_u64(),
            )?;
            Ok(add_awgn(&base, &grain.with_stream(GRAIN_STREAM + i as u64)))
        })
        .collect()
}

/// Stream id of the noise realisation for `(image, level, rep)`.
pub fn noise_stream(image: usize, level: usize, rep: usize) -> u64 {
    ((image as u64) << 32) | ((level as u64) << 16) | rep as u64
}

/// The noisy copy used for `(image, level, rep)` throughout the harness.
pub fn noisy_instance(
    clean: &GrayImage,
    nv: f64,
    seed: u64,
    image: usize,
    level: usize,
    rep: usize,
) -> Result<GrayImage, ImageError> {
    let spec = NoiseSpec::new(nv, seed)?.with_stream(noise_stream(image, level, rep));
    Ok(add_awgn(clean, &spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_distinct() {
        let cfg = CorpusConfig {
            images: 3,
            side: 32,
            ..CorpusConfig::default()
        };
        let a = make_corpus(&cfg, 1).unwrap();
        assert_eq!(a, make_corpus(&cfg, 1).unwrap());
        assert_ne!(a[0], a[1]);
        assert_ne!(a[0], make_corpus(&cfg, 2).unwrap()[0]);
        assert!(a.iter().all(|im| im.width() == 32 && im.height() == 32));
    }

    #[test]
    fn streams_do_not_collide() {
        assert_ne!(noise_stream(1, 0, 0), noise_stream(0, 1, 0));
        assert_ne!(noise_stream(0, 1, 0), noise_stream(0, 0, 1));
    }
}
