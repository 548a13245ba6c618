#![no_main]

use irsqr::experiment::{Sweep, MAX_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = text.parse::<Sweep>() {
            assert!(!s.is_empty() && s.len() <= MAX_POINTS);
            assert!(s.values().windows(2).all(|w| w[0] < w[1]));
        }
    }
});
