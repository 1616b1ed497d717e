#![no_main]

use eg_core::table::{parse_eg_csv, write_eg_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_eg_csv(text) {
        let out = write_eg_csv(&rows);
        let back = parse_eg_csv(&out).expect("written table parses");
        assert_eq!(write_eg_csv(&back), out);
    }
});
