#![no_main]

use eg_core::{LossId, LossSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(id) = text.parse::<LossId>() {
        assert_eq!(id.as_str().parse::<LossId>(), Ok(id));
    }
    if let Ok(loss) = LossSpec::parse(text, Some(0.5)) {
        if let Some(g) = loss.gamma() {
            assert!(g > 0.0);
        }
        let _ = loss.eval(0.0);
    }
});
