#![no_main]

use irsqr::qrcodec::{rs_decode, rs_encode};
use libfuzzer_sys::fuzz_target;

// First byte is the parity count, the rest a received block.
fuzz_target!(|data: &[u8]| {
    let Some((&ec, block)) = data.split_first() else {
        return;
    };
    let ec = usize::from(ec);
    if let Ok((data, corrected)) = rs_decode(block, ec) {
        assert!(corrected <= ec / 2);
        let mut codeword = data.clone();
        codeword.extend(rs_encode(&data, ec).unwrap());
        let differing = codeword.iter().zip(block).filter(|(a, b)| a != b).count();
        assert_eq!(differing, corrected);
    }
});
