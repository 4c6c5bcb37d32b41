//! End-to-end checks of the command-line binary against the corpus:
//! exit codes, JSON reports, and determinism under a fixed seed.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fintopos"))
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
}

#[test]
fn check_proof_accepts_the_shipped_lemmas() {
    let out = bin()
        .arg("check-proof")
        .arg(corpus("lemmas.proof"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("overall: pass"));
}

#[test]
fn colimit_both_modes_agree_on_the_pushout() {
    let json = std::env::temp_dir().join("fintopos-cli-pushout.json");
    let out = bin()
        .arg("colimit")
        .arg(corpus("pushout.diagram"))
        .args(["--mode", "both"])
        .arg("--json")
        .arg(&json)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
    let agreement = report["items"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["id"] == "agreement")
        .expect("agreement item");
    assert_eq!(agreement["status"], "pass");
    std::fs::remove_file(json).ok();
}

#[test]
fn malformed_input_reports_position_and_fails() {
    let path = std::env::temp_dir().join("fintopos-cli-bad.sexp");
    std::fs::write(&path, "(and true").unwrap();
    let out = bin().arg("parse").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("1:"), "position missing: {stderr}");
    std::fs::remove_file(path).ok();
}

#[test]
fn verify_is_deterministic_for_a_fixed_seed() {
    let run = || {
        let json =
            std::env::temp_dir().join(format!("fintopos-cli-verify-{}.json", std::process::id()));
        let out = bin()
            .args([
                "verify",
                "substitution-lemma",
                "--seed",
                "7",
                "--cases",
                "20",
            ])
            .arg("--json")
            .arg(&json)
            .output()
            .unwrap();
        assert!(out.status.success());
        let mut report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        std::fs::remove_file(json).ok();
        // timings vary between runs; everything else must not
        for item in report["items"].as_array_mut().unwrap() {
            item["millis"] = 0.into();
        }
        report
    };
    assert_eq!(run(), run());
}
