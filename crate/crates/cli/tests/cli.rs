use std::fs;
use std::process::{Command, Output};

use aes_eqclass::class_algebra::logical_class;
use aes_eqclass::{ShiftPhase, State};
use aes_eqclass_cli::formats::read_counts_csv;
use serde_json::Value;

const ZERO: &str = "00000000000000000000000000000000";
const C1_KEY: &str = "000102030405060708090a0b0c0d0e0f";
const C1_PT: &str = "00112233445566778899aabbccddeeff";
const C1_CT: &str = "69c4e0d86a7b0430d8cdb78070b4c55a";
const FIPS_KEY: &str = "2b7e151628aed2a6abf7158809cf4f3c";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aes-eqclass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn encrypt_decrypt_known_answer() {
    let o = run(&["encrypt", "--key", C1_KEY, "--block", C1_PT]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), C1_CT);
    let o = run(&["decrypt", "--key", C1_KEY, "--block", C1_CT]);
    assert_eq!(stdout(&o).trim(), C1_PT);
}

#[test]
fn encrypt_zero_is_stable() {
    let a = run(&["encrypt", "--key", ZERO, "--block", ZERO]);
    let b = run(&["encrypt", "--key", ZERO, "--block", ZERO]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).trim(), "66e94bd4ef8a2c3b884cfa59ca342b2e");
}

#[test]
fn malformed_hex_is_a_usage_error() {
    for args in [
        &["encrypt", "--key", "abc", "--block", ZERO][..],
        &[
            "decrypt",
            "--key",
            ZERO,
            "--block",
            "g0000000000000000000000000000000",
        ],
        &["trace", "--key", ZERO, "--plaintext", "00"],
        &["keysched", "--key", "0000"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains("malformed hex"));
    }
}

#[test]
fn trace_linearized_zero_inputs_match() {
    let o = run(&[
        "trace",
        "--key",
        ZERO,
        "--plaintext",
        ZERO,
        "--linearized",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let rows: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["match"] == true));
    assert_eq!(rows[9]["stage"], "shift_rows");
}

#[test]
fn trace_linearized_random_rounds() {
    let o = run(&[
        "trace",
        "--key",
        FIPS_KEY,
        "--plaintext",
        "3243f6a8885a308d313198a2e0370734",
        "--linearized",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11);
    assert_eq!(
        text.lines().skip(1).filter(|l| l.ends_with("yes")).count(),
        10
    );

    let o = run(&[
        "trace",
        "--key",
        ZERO,
        "--plaintext",
        ZERO,
        "--linearized",
        "--rounds",
        "4",
        "--format",
        "csv",
    ]);
    let text = stdout(&o);
    assert_eq!(
        text.lines().next(),
        Some("round,stage,phase,class,predicted,match")
    );
    assert_eq!(text.lines().count(), 5);

    let o = run(&[
        "trace",
        "--key",
        ZERO,
        "--plaintext",
        ZERO,
        "--linearized",
        "--rounds",
        "11",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trace_full_ends_at_ciphertext_classes() {
    let o = run(&[
        "trace",
        "--key",
        C1_KEY,
        "--plaintext",
        C1_PT,
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let rows: Value = serde_json::from_slice(&o.stdout).unwrap();
    let last = rows.as_array().unwrap().last().unwrap();
    assert_eq!(last["state"], C1_CT);
    assert_eq!(last["phase"], 2);

    let mut ct = [0u8; 16];
    hex::decode_to_slice(C1_CT, &mut ct).unwrap();
    let folded = logical_class(&State::from_block(ct), ShiftPhase::new(2).unwrap());
    assert_eq!(last["class"], folded.to_string());
}

#[test]
fn keysched_audits() {
    for key in [ZERO, FIPS_KEY] {
        let o = run(&["keysched", "--key", key]);
        assert!(o.status.success());
        let j: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(j["all_pass"], true);
        let t = j["audits"][0]["transitions"].as_array().unwrap();
        assert_eq!(t.len(), 10);
        assert!(t.iter().all(|t| t["pass"] == true));
    }
    let o = run(&["keysched", "--key", ZERO]);
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        j["audits"][0]["transitions"][0]["predicted"],
        serde_json::json!(["01", "01", "01", "01"])
    );

    let o = run(&["keysched", "--random", "100", "--seed", "5"]);
    assert!(o.status.success());
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["audits"].as_array().unwrap().len(), 100);

    let o = run(&["keysched"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_properties_default_passes() {
    let o = run(&["verify-properties", "--trials", "2000", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["pass"], true);
    assert_eq!(j["seed"], 3);
    let props = j["properties"].as_array().unwrap();
    assert!(props
        .iter()
        .any(|p| p["name"] == "forward_step_k2" && p["passed"] == 2000));
}

#[test]
fn verify_properties_zero_trials_warns() {
    let o = run(&["verify-properties", "--trials", "0"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn verify_properties_negative_control() {
    let o = run(&["verify-properties", "--trials", "100", "--corrupt-matrix"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("counterexample: property=forward_step_k0"),
        "{err}"
    );
    assert!(err.contains("state=") && err.contains("phase=0"));
    assert!(err.contains("expected=") && err.contains("actual="));
}

#[test]
fn sbox_dist_fast_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["sbox-dist", "--mode", "fast", "--out", out]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("P_counts[0][0] = 198136 (expected 198136): PASS"));
    assert!(text.contains("P_counts == InvP_counts^T: PASS"));
    assert!(!text.contains("FAIL"));

    let p = read_counts_csv(&fs::read(dir.path().join("p_counts.csv")).unwrap()[..]).unwrap();
    let invp = read_counts_csv(&fs::read(dir.path().join("invp_counts.csv")).unwrap()[..]).unwrap();
    assert_eq!(p.get(0, 0), 198_136);
    assert_eq!(p.transpose(), invp);

    let stats: Value =
        serde_json::from_slice(&fs::read(dir.path().join("p_counts_stats.json")).unwrap()).unwrap();
    assert_eq!(
        stats["global"],
        serde_json::json!({"total": 4294967296u64, "expected_cell": 65536})
    );
    assert_eq!(
        stats["rows"][0],
        serde_json::json!({"row": 0, "max": 198136, "argmax": 0, "min": 65016, "argmin": stats["rows"][0]["argmin"]})
    );
}

#[test]
fn sbox_dist_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(run(&["sbox-dist", "--out", out, "--csv-header"])
        .status
        .success());
    let text = fs::read_to_string(dir.path().join("p_counts.csv")).unwrap();
    assert!(text.starts_with("y0,y1,"));
    assert_eq!(text.lines().count(), 257);

    assert!(run(&["sbox-dist", "--out", out, "--format", "json"])
        .status
        .success());
    let rows: Vec<Vec<u64>> =
        serde_json::from_slice(&fs::read(dir.path().join("invp_counts.json")).unwrap()).unwrap();
    assert_eq!(rows.len(), 256);
    assert_eq!(rows[0][0], 198_136);
}

#[test]
fn bad_threads_value() {
    let o = run(&["sbox-dist", "--threads", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
