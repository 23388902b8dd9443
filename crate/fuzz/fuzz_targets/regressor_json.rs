#![no_main]

use libfuzzer_sys::fuzz_target;
use semdenoise::regression::TrainedRegressor;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = TrainedRegressor::from_json(text) {
        let back = TrainedRegressor::from_json(&m.to_json()).unwrap();
        assert_eq!(back.to_json(), m.to_json());
    }
});
