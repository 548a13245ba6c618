#![no_main]

use irsqr::modem::ModuleMatrix;
use irsqr::qrcodec::qr_decode;
use libfuzzer_sys::fuzz_target;

// First byte picks the border, the rest is a PBM image.
fuzz_target!(|data: &[u8]| {
    let Some((&border, rest)) = data.split_first() else {
        return;
    };
    if let Ok(text) = std::str::from_utf8(rest) {
        if let Ok(m) = ModuleMatrix::from_pbm(text) {
            let _ = qr_decode(&m, usize::from(border % 8));
        }
    }
});
