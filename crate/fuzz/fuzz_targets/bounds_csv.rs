#![no_main]

use eg_core::table::{parse_bounds_csv, write_bounds_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_bounds_csv(text) {
        let out = write_bounds_csv(&rows);
        let back = parse_bounds_csv(&out).expect("written table parses");
        assert_eq!(write_bounds_csv(&back), out);
    }
});
