#![no_main]

use irsqr::modem::ModuleMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = ModuleMatrix::from_pbm(text) {
            assert_eq!(ModuleMatrix::from_pbm(&m.to_pbm()).unwrap(), m);
        }
    }
});
