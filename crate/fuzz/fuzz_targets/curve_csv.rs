#![no_main]

use eg_core::table::{parse_curve_csv, write_curve_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_curve_csv(text) {
        let out = write_curve_csv(&rows);
        let back = parse_curve_csv(&out).expect("written table parses");
        assert_eq!(write_curve_csv(&back), out);
    }
});
