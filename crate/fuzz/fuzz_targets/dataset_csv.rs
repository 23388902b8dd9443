#![no_main]

use libfuzzer_sys::fuzz_target;
use semdenoise::pipeline::Dataset;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = Dataset::from_csv(text) {
        let again = Dataset::from_csv(&d.to_csv()).unwrap();
        assert_eq!(again.len(), d.len());
    }
});
