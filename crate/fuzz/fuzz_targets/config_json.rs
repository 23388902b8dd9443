#![no_main]

use libfuzzer_sys::fuzz_target;
use semdenoise::pipeline::PipelineConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = PipelineConfig::from_json(text) {
        assert_eq!(PipelineConfig::from_json(&c.to_json()).unwrap(), c);
        c.lag_window().unwrap();
    }
});
