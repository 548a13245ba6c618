#![no_main]

use irsqr::experiment::{read_results_csv, read_results_jsonl};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_results_csv(data);
    let _ = read_results_jsonl(data);
});
