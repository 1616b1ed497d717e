#![no_main]

use eg_core::lab::EgEstimate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(est) = EgEstimate::from_json(text) {
        let out = est.to_json();
        let back = EgEstimate::from_json(&out).expect("serialized estimate parses");
        assert_eq!(back.to_json(), out);
    }
});
