#![no_main]

use libfuzzer_sys::fuzz_target;
use semdenoise::{decode_pgm, encode_pgm};

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = decode_pgm(data) {
        assert!(img.pixels().iter().all(|v| (0.0..=1.0).contains(v)));
        let again = decode_pgm(&encode_pgm(&img, 65535).unwrap()).unwrap();
        assert_eq!((again.width(), again.height()), (img.width(), img.height()));
    }
});
