#![no_main]

use eg_core::Distribution;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = Distribution::from_json(text) {
        let out = d.to_json();
        let back = Distribution::from_json(&out).expect("serialized distribution parses");
        assert_eq!(back, d);
        assert_eq!(back.to_json(), out);
    }
});
