use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn locc() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_locc"));
    cmd.env_remove("LOCC_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    locc().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_check_and_synthesize() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--family", "orthogonal", "--d", "2", "--seed", "5"]);
    assert!(out.status.success());
    let pair = write(dir.path(), "pair.json", std::str::from_utf8(&out.stdout).unwrap());

    let check = run(&["check-pair", s(&pair)]);
    assert_eq!(check.status.code(), Some(0));
    let report = json(&check);
    assert_eq!(report["copyable"], true);
    assert_eq!(report["orthogonality"], "orthogonal");
    assert_eq!(report["spectrum"]["detected_m"], 2);

    let syn = run(&["synthesize", s(&pair)]);
    assert_eq!(syn.status.code(), Some(0));
    let protocol = write(dir.path(), "protocol.json", std::str::from_utf8(&syn.stdout).unwrap());

    let doc = json(&out);
    for key in ["psi1", "psi2"] {
        let state = write(dir.path(), &format!("{key}.json"), &doc[key].to_string());
        let sim = run(&["simulate", s(&protocol), s(&state)]);
        assert_eq!(sim.status.code(), Some(0));
        assert!(json(&sim)["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
    }
}

#[test]
fn two_state_files_match_pair_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--family", "copyable", "--d", "6", "--m", "3", "--seed", "8"]);
    let doc = json(&out);
    let pair = write(dir.path(), "pair.json", &doc.to_string());
    let a = write(dir.path(), "a.json", &doc["psi1"].to_string());
    let b = write(dir.path(), "b.json", &doc["psi2"].to_string());
    let from_pair = json(&run(&["check-pair", s(&pair)]));
    let from_states = json(&run(&["check-pair", s(&a), s(&b)]));
    assert_eq!(from_pair, from_states);
    assert_eq!(from_pair["spectrum"]["detected_m"], 3);
}

#[test]
fn generate_is_deterministic_and_reads_seed_from_env() {
    let args = ["generate", "--family", "orthogonal", "--d", "4"];
    let a = locc().args(args).env("LOCC_SEED", "17").output().unwrap();
    let b = run(&[&args[..], &["--seed", "17"]].concat());
    let c = run(&[&args[..], &["--seed", "18"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn nonprime_pair_is_rejected_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--family", "nonprime", "--d", "4", "--seed", "2"]);
    let pair = write(dir.path(), "pair.json", std::str::from_utf8(&out.stdout).unwrap());
    let check = run(&["check-pair", s(&pair)]);
    assert_eq!(check.status.code(), Some(1));
    assert_eq!(json(&check)["orthogonality"], "orthogonal");
    assert_eq!(run(&["synthesize", s(&pair)]).status.code(), Some(1));
}

#[test]
fn catalysis_and_majorize_on_the_d5_pair() {
    let dir = tempfile::tempdir().unwrap();
    let psi = write(dir.path(), "psi.json", r#"{"probs":[0.39,0.26,0.18,0.17,0.0]}"#);
    let blank = write(dir.path(), "b.json", r#"{"probs":[0.32,0.28,0.24,0.085,0.075]}"#);
    let cat = run(&["catalysis", s(&psi), s(&blank)]);
    assert_eq!(cat.status.code(), Some(0));
    let report = json(&cat);
    assert_eq!(report["verdict"], "catalytic");
    assert_eq!(report["direct"]["first_violation"], 3);

    let maj = run(&["majorize", s(&blank), s(&psi)]);
    assert_eq!(maj.status.code(), Some(1));
    assert_eq!(json(&maj)["transformable"], false);
    assert_eq!(run(&["majorize", s(&psi), s(&blank)]).status.code(), Some(1));
}

#[test]
fn stdin_is_accepted() {
    let gen = run(&["generate", "--family", "orthogonal", "--d", "3", "--seed", "1"]);
    let mut child = locc().args(["check-pair", "-"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(&gen.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["spectrum"]["detected_m"], 3);
}

#[test]
fn malformed_json_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"d\": 2,\n \"amplitudes\": [[1, 0],, ]}");
    let out = run(&["check-pair", s(&bad), s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    let unnormalized = write(dir.path(), "u.json", r#"{"d":1,"amplitudes":[[2,0]]}"#);
    assert_eq!(run(&["check-pair", s(&unnormalized), s(&unnormalized)]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--family", "nonprime", "--d", "5"]).status.code(), Some(2));
}

#[test]
fn survey_table_is_ordered_and_reproducible() {
    let args = ["survey", "--d", "2,3,4", "--samples", "30", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    let rows = doc["rows"].as_array().unwrap();
    let ds: Vec<u64> = rows.iter().map(|r| r["d"].as_u64().unwrap()).collect();
    assert_eq!(ds, [2, 3, 4]);
    assert_eq!(rows[0]["fraction_copyable"], 1.0);
    assert_eq!(rows[1]["fraction_copyable"], 1.0);

    let np = json(&run(&["survey", "--d", "4", "--family", "nonprime", "--samples", "20"]));
    assert_eq!(np["rows"][0]["copyable"], 0);
    assert_eq!(np["rows"][0]["orthogonal"], 20);
}

#[test]
fn tolerance_flags_are_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--family", "orthogonal", "--d", "2", "--seed", "3"]);
    let pair = write(dir.path(), "pair.json", std::str::from_utf8(&out.stdout).unwrap());
    // Both gaps are π, inside (tol, 2·tol] for this tolerance.
    let wide = run(&["check-pair", s(&pair), "--phase-tol", "2.0"]);
    assert_eq!(wide.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&wide.stderr).contains("ambiguous"));
}
