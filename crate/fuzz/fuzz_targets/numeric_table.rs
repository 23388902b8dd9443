#![no_main]

use libfuzzer_sys::fuzz_target;
use semdenoise::pipeline::{MseTable, SnrTable};
use semdenoise::tabular::NumericTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = NumericTable::parse(text) {
        for h in t.headers() {
            assert_eq!(t.column(h).unwrap().len(), t.n_rows());
        }
        if let Ok(m) = MseTable::from_table(&t) {
            let _ = m.t_test();
        }
        if let Ok(s) = SnrTable::from_table(&t) {
            let _ = s.error_tests();
        }
    }
});
