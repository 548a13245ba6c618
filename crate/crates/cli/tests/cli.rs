use std::path::Path;
use std::process::{Command, Output};

fn irsqr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irsqr"))
        .args(args)
        .env_remove("IRSQR_THREADS")
        .output()
        .expect("spawn irsqr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_ABEP: &[&str] = &[
    "abep", "--elements", "16", "--nrx", "16", "--ntx", "4", "--mod", "2,4", "--snr-db", "0:10:5", "--trials", "5",
    "--min-bits", "2000",
];

#[test]
fn abep_writes_csv_to_stdout() {
    let o = irsqr(SMALL_ABEP);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scenario,x,M,metric,value,trials,seed"));
    assert_eq!(lines.count(), 3 * 2 * 3);
    assert!(text.contains("abep_snr,5.0,4,abep_sim,"));
}

#[test]
fn output_file_and_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let mut args = SMALL_ABEP.to_vec();
    args.extend(["--format", "jsonl", "--out", out.to_str().unwrap()]);
    let o = irsqr(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 18);
    assert!(text.lines().all(|l| l.starts_with('{') && l.contains("\"M\":")));
}

#[test]
fn thread_cap_does_not_change_output() {
    let base = irsqr(SMALL_ABEP);
    let capped = Command::new(env!("CARGO_BIN_EXE_irsqr"))
        .args(SMALL_ABEP)
        .env("IRSQR_THREADS", "1")
        .output()
        .unwrap();
    assert!(capped.status.success());
    assert_eq!(base.stdout, capped.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_irsqr"))
        .args(SMALL_ABEP)
        .env("IRSQR_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(stderr(&bad).contains("IRSQR_THREADS"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"scenario":"abep_kappa","elements":16,"rx":16,"trials":7,"kappa":[0,1]}"#).unwrap();
    let o = irsqr(&["abep", "--config", cfg.to_str().unwrap(), "--trials", "3", "--print-config"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("\"scenario\": \"abep_kappa\""), "{text}");
    assert!(text.contains("\"trials\": 3"));
    assert!(text.contains("\"elements\": 16"));
}

#[test]
fn field_errors_are_reported() {
    let o = irsqr(&["abep", "--mod", "3"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("modulations"), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"trails":3}"#).unwrap();
    let o = irsqr(&["abep", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("trails"), "{}", stderr(&o));

    let o = irsqr(&["abep", "--scenario", "qr_snr"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("`qr`"));

    let o = irsqr(&["abep", "--snr-db", "5:1:1"]);
    assert!(!o.status.success());
}

#[test]
fn qr_sweep_writes_bitmaps() {
    let dir = tempfile::tempdir().unwrap();
    let maps = dir.path().join("maps");
    let o = irsqr(&[
        "qr",
        "--scenario",
        "qr_obstruction",
        "--mod",
        "16",
        "--trials",
        "2",
        "--obstruction",
        "0,5",
        "--bitmaps",
        maps.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("qr_obstruction,0.0,16,recovery_prob,"));
    assert!(text.contains("qr_obstruction,5.0,16,recognition_prob,"));
    let mut names: Vec<String> = std::fs::read_dir(&maps)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4);
    assert_eq!(names[0], "qr_obstruction_x0_M16_original.pbm");
}

fn encode_to(path: &Path, payload: &str) {
    let o = irsqr(&["encode", "--payload", payload, "--version", "2", "--ec", "Q", "--border", "4", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pbm = dir.path().join("q.pbm");
    encode_to(&pbm, "hello surface");
    let text = std::fs::read_to_string(&pbm).unwrap();
    assert!(text.starts_with("P1\n33 33\n"));
    let o = irsqr(&["decode", pbm.to_str().unwrap(), "--border", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "hello surface");

    let o = irsqr(&["decode", pbm.to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn decode_rejects_bad_pbm() {
    let dir = tempfile::tempdir().unwrap();
    let pbm = dir.path().join("bad.pbm");
    std::fs::write(&pbm, "P1\n2 2\n01x0\n").unwrap();
    let o = irsqr(&["decode", pbm.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("PBM"), "{}", stderr(&o));

    let o = irsqr(&["encode", "--payload", &"x".repeat(500)]);
    assert!(!o.status.success());
}
