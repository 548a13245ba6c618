//! Replays the checked-in fuzz seeds through the parser entry points.

use std::path::PathBuf;

use irsqr::experiment::{read_results_csv, read_results_jsonl, Sweep, SweepConfig};
use irsqr::modem::ModuleMatrix;
use irsqr::qrcodec::{qr_decode, rs_decode};

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<Vec<u8>> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| std::fs::read(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn pbm_seeds_parse() {
    for s in seeds("pbm_parse") {
        let m = ModuleMatrix::from_pbm(std::str::from_utf8(&s).unwrap()).unwrap();
        assert_eq!(ModuleMatrix::from_pbm(&m.to_pbm()).unwrap(), m);
    }
}

#[test]
fn qr_seeds_decode() {
    for s in seeds("qr_decode") {
        let m = ModuleMatrix::from_pbm(std::str::from_utf8(&s[1..]).unwrap()).unwrap();
        assert!(qr_decode(&m, usize::from(s[0])).is_ok());
    }
}

#[test]
fn rs_seeds_decode() {
    for s in seeds("rs_decode") {
        let (data, _) = rs_decode(&s[1..], usize::from(s[0])).unwrap();
        assert_eq!(data.len(), s.len() - 1 - usize::from(s[0]));
    }
}

#[test]
fn config_and_sweep_seeds_parse() {
    for s in seeds("sweep_config") {
        SweepConfig::from_json(std::str::from_utf8(&s).unwrap()).unwrap().validate().unwrap();
    }
    for s in seeds("sweep_range") {
        std::str::from_utf8(&s).unwrap().parse::<Sweep>().unwrap();
    }
}

#[test]
fn results_seeds_parse() {
    let parsed: Vec<usize> = seeds("results_csv")
        .iter()
        .map(|s| {
            read_results_jsonl(&s[..])
                .map(|r| r.len())
                .or_else(|_| read_results_csv(&s[..]).map(|r| r.len()))
                .unwrap()
        })
        .collect();
    assert!(parsed.iter().all(|&n| n == 1));
}
