#![no_main]

use irsqr::experiment::SweepConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = SweepConfig::from_json(text) {
            let _ = cfg.validate();
            let back = SweepConfig::from_json(&cfg.to_json().unwrap()).unwrap();
            assert_eq!(back.scenario, cfg.scenario);
        }
    }
});
