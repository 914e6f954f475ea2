use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn gdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn gdc_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gdc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_artifact(dir: &Path) -> PathBuf {
    let path = dir.join("code.json");
    let out = gdc(&[
        "gen",
        "--alpha",
        "2",
        "--beta",
        "3",
        "--k",
        "3",
        "--t",
        "2",
        "--seed",
        "0",
        "-o",
        s(&path),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

#[test]
fn bound_prints_all_three() {
    let out = gdc(&[
        "bound", "--alpha", "4", "--beta", "6", "--k", "6", "--t", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&out),
        serde_json::json!({"gdc": 11, "lrc": 11, "singleton": 13})
    );
}

#[test]
fn bad_parameters_exit_two() {
    let out = gdc(&[
        "bound", "--alpha", "5", "--beta", "4", "--k", "6", "--t", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha must be < min(k, beta)"));
    let out = gdc(&["bound", "--alpha", "2", "--beta", "3", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--t"));
    let out = gdc(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn design_emits_supports() {
    let out = gdc(&[
        "design", "--alpha", "4", "--beta", "6", "--k", "6", "--t", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(
        v["S"],
        serde_json::json!([[1, 2, 3, 4], [1, 2, 5, 6], [3, 4, 5, 6]])
    );
    assert_eq!(v["M0"].as_array().unwrap().len(), 6);
}

#[test]
fn gen_then_verify() {
    let dir = scratch("gen_then_verify");
    let path = small_artifact(&dir);
    for level in ["structural", "full"] {
        let out = gdc(&["verify", s(&path), "--level", level]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["status"], "pass");
    }
    for method in ["rank_subsets", "enumerate_codewords"] {
        let out = gdc(&["distance", s(&path), "--method", method]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["d"], 3);
    }
}

#[test]
fn gen_is_deterministic() {
    let dir = scratch("gen_is_deterministic");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for p in [&a, &b] {
        let out = gdc(&[
            "gen",
            "--alpha",
            "2",
            "--beta",
            "4",
            "--k",
            "4",
            "--t",
            "3",
            "--seed",
            "9",
            "-o",
            s(p),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let out = gdc(&["verify", s(&a)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tampered_artifact_exits_one() {
    let dir = scratch("tampered");
    let path = small_artifact(&dir);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    v["claimed_d"] = 4.into();
    let bad = dir.join("bad_d.json");
    fs::write(&bad, v.to_string()).unwrap();
    let out = gdc(&["verify", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    // d = 4 exceeds the bound, so the field-free covering check already fails
    assert_eq!(json(&out)["check"], "condition2");
    let out = gdc(&["verify", s(&bad), "--level", "structural"]);
    assert_eq!(out.status.code(), Some(1));

    let mut v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    // bucket 1 reads symbols 1 and 3 only, so row 2 must be zero there
    v["G"][1][0] = "1".into();
    let bad = dir.join("bad_support.json");
    fs::write(&bad, v.to_string()).unwrap();
    let out = gdc(&["verify", s(&bad), "--level", "structural"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["check"], "support");
}

#[test]
fn encode_repair_decode() {
    let dir = scratch("codec");
    let path = small_artifact(&dir);
    let out = gdc_stdin(&["encode", s(&path)], b"1 2 3\n");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let full = json(&out);
    let mut partial = full.clone();
    partial["buckets"][0][0] = Value::Null;
    partial["buckets"][1][2] = Value::Null;
    let cw = dir.join("partial.json");
    fs::write(&cw, partial.to_string()).unwrap();

    let out = gdc(&["repair", s(&path), s(&cw)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), full);

    let out = gdc(&["decode", s(&path), s(&cw)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["message"], "1 2 3");

    // one full bucket only: rank 2 < k = 3
    let mut thin = full.clone();
    for j in 0..3 {
        thin["buckets"][1][j] = Value::Null;
    }
    fs::write(&cw, thin.to_string()).unwrap();
    let out = gdc(&["decode", s(&path), s(&cw)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn raw_mode_needs_byte_field() {
    let dir = scratch("raw");
    let path = small_artifact(&dir);
    let input = dir.join("in.bin");
    fs::write(&input, b"hello").unwrap();
    let out = gdc(&["encode", s(&path), "--raw", "-i", s(&input)]);
    assert_eq!(out.status.code(), Some(2));

    let path8 = dir.join("code8.json");
    let out = gdc(&[
        "gen",
        "--alpha",
        "2",
        "--beta",
        "3",
        "--k",
        "3",
        "--t",
        "2",
        "--field-degree",
        "8",
        "-o",
        s(&path8),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = gdc(&["encode", s(&path8), "--raw", "-i", s(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let mut striped = json(&out);
    assert_eq!(striped["stripes"].as_array().unwrap().len(), 2);
    striped["stripes"][0]["buckets"][0][1] = Value::Null;
    striped["stripes"][1]["buckets"][1][0] = Value::Null;
    let enc = dir.join("striped.json");
    fs::write(&enc, striped.to_string()).unwrap();
    let back = dir.join("out.bin");
    let out = gdc(&["decode", s(&path8), s(&enc), "--raw", "-o", s(&back)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(fs::read(&back).unwrap(), b"hello");
}

#[test]
fn simulate_scenario() {
    let dir = scratch("simulate");
    small_artifact(&dir);
    let sc = dir.join("scenario.json");
    fs::write(
        &sc,
        r#"{"code": "code.json", "patterns": [[2], [1, 2], [1, 2, 3]]}"#,
    )
    .unwrap();
    let out = gdc(&["simulate", s(&sc)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v[0]["local_repairs"], 1);
    assert_eq!(v[0]["helpers_contacted"], serde_json::json!([2]));
    assert_eq!(v[0]["symbols_transferred"], 2);
    assert_eq!(v[1]["global_repairs"], 2);
    assert_eq!(v[1]["unrecoverable"], serde_json::json!([]));
    assert_eq!(v[2]["unrecoverable"], serde_json::json!([1, 2, 3]));
}
