#![no_main]

use libfuzzer_sys::fuzz_target;
use semdenoise::pipeline::PipelineModel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = PipelineModel::from_json(text) {
        PipelineModel::from_json(&m.to_json()).unwrap();
    }
});
