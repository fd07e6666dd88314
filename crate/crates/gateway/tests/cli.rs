use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use orbitplan_gateway::cli::run;
use serde_json::Value;

const START: &str = "2024-03-20T00:00:00Z";

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("orbitplan").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn iss_args<'a>(extra: &[&'a str], tle: &'a str) -> Vec<&'a str> {
    let mut v = vec!["--tle-file", tle, "--start", START, "--offline"];
    v.extend_from_slice(extra);
    v
}

#[test]
fn plan_json() {
    let tle = fixture("iss.tle");
    let mut args = vec![
        "plan",
        "--norad",
        "25544",
        "--workload",
        "ml-inference",
        "--format",
        "json",
    ];
    args.extend(iss_args(&[], &tle));
    let (code, out, err) = cli(&args);
    assert_eq!(code, 0, "{err}");
    let plan: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(plan["metrics"]["step_count"], 5);
    assert_eq!(plan["metrics"]["payload_downlink"], 10.5);
    assert_eq!(plan["satellite"]["catalog_number"], 25544);

    let (_, again, _) = cli(&args);
    assert_eq!(out, again);
}

#[test]
fn plan_table() {
    let tle = fixture("sso.tle");
    let mut args = vec!["plan", "--workload", "eo-qa", "--format", "table"];
    args.extend(iss_args(&[], &tle));
    let (code, out, err) = cli(&args);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("satellite     90097 (SSO-REF)"));
    assert!(out.contains("xfer-encrypt-ingest"));
}

#[test]
fn presets() {
    let (code, out, _) = cli(&["presets"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
    let (_, json, _) = cli(&["presets", "--format", "json"]);
    let list: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(list.as_array().unwrap().len(), 5);
}

#[test]
fn missing_workload_is_usage_error() {
    let tle = fixture("iss.tle");
    let mut args = vec!["plan", "--norad", "25544"];
    args.extend(iss_args(&[], &tle));
    let (code, _, err) = cli(&args);
    assert_eq!(code, 1);
    assert!(err.contains("--workload"), "{err}");
}

#[test]
fn input_errors() {
    let tle = fixture("iss.tle");
    // offline without a file
    let (code, _, err) = cli(&[
        "plan",
        "--norad",
        "25544",
        "--workload",
        "eo-qa",
        "--offline",
    ]);
    assert_eq!(code, 1, "{err}");
    // catalog number disagrees with the file
    let mut args = vec!["plan", "--norad", "1", "--workload", "eo-qa"];
    args.extend(iss_args(&[], &tle));
    assert_eq!(cli(&args).0, 1);
    // horizon out of range
    let mut args = vec!["plan", "--workload", "eo-qa"];
    args.extend(iss_args(&["--horizon", "200"], &tle));
    let (code, _, err) = cli(&args);
    assert_eq!(code, 1);
    assert!(err.contains("INVALID_CONFIG"), "{err}");
    // unknown preset
    let mut args = vec!["plan", "--workload", "nope"];
    args.extend(iss_args(&[], &tle));
    let (code, _, err) = cli(&args);
    assert_eq!(code, 1);
    assert!(err.contains("UNKNOWN_PRESET"), "{err}");
}

#[test]
fn cyclic_workload_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cycle.json");
    let doc = serde_json::json!({
        "name": "loop",
        "steps": [
            {"id": "a", "location": "onboard", "duration": 10.0},
            {"id": "b", "location": "onboard", "duration": 10.0}
        ],
        "edges": [["a", "b"], ["b", "a"]]
    });
    std::fs::write(&path, doc.to_string()).unwrap();
    let tle = fixture("iss.tle");
    let p = path.display().to_string();
    let mut args = vec!["plan", "--workload-file", &p];
    args.extend(iss_args(&[], &tle));
    let (code, _, err) = cli(&args);
    assert_eq!(code, 1);
    assert!(err.contains("WORKLOAD_CYCLE"), "{err}");
}

#[test]
fn infeasible_plan_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("huge.json");
    let doc = serde_json::json!({
        "name": "huge",
        "steps": [{"id": "forever", "location": "onboard", "duration": 100000.0}],
        "deadline_orbits": 2
    });
    std::fs::write(&path, doc.to_string()).unwrap();
    let tle = fixture("iss.tle");
    let p = path.display().to_string();
    let mut args = vec!["plan", "--workload-file", &p];
    args.extend(iss_args(&[], &tle));
    let (code, _, err) = cli(&args);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("DEADLINE_EXCEEDED"), "{err}");
}

#[test]
fn windows_and_passes() {
    let tle = fixture("iss.tle");
    let mut args = vec!["windows"];
    args.extend(iss_args(&[], &tle));
    let (code, out, err) = cli(&args);
    assert_eq!(code, 0, "{err}");
    let windows: Value = serde_json::from_str(&out).unwrap();
    assert!(windows
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w["kind"] == "pass"));

    let mut args = vec!["passes"];
    args.extend(iss_args(&[], &tle));
    let (code, out, _) = cli(&args);
    assert_eq!(code, 0);
    let by_station: Value = serde_json::from_str(&out).unwrap();
    assert!(!by_station.as_object().unwrap().is_empty());

    let mut args = vec!["passes", "--format", "table"];
    args.extend(iss_args(&[], &tle));
    assert!(cli(&args).1.starts_with("STATION"));
}

#[test]
fn config_file_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    // no ground stations at all: a downlink has nowhere to go
    std::fs::write(&path, r#"{"stations": []}"#).unwrap();
    let tle = fixture("iss.tle");
    let p = path.display().to_string();
    let mut args = vec!["plan", "--workload", "ml-inference", "--config", &p];
    args.extend(iss_args(&[], &tle));
    let (code, _, err) = cli(&args);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("NO_PASS_CAPACITY"), "{err}");
}

/// Runs the binary with the provider pointed at a listener that counts
/// connections; offline mode must never connect.
#[test]
fn offline_mode_makes_no_network_calls() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = Arc::clone(&hits);
    std::thread::spawn(move || {
        for mut s in listener.incoming().flatten() {
            counter.fetch_add(1, Ordering::SeqCst);
            let mut buf = [0u8; 1024];
            let _ = s.set_read_timeout(Some(Duration::from_millis(200)));
            let _ = s.read(&mut buf);
            let _ = s.write_all(b"HTTP/1.1 500 Internal Server Error\r\ncontent-length: 0\r\n\r\n");
        }
    });
    let url = format!("http://{addr}/gp?CATNR={{norad}}");
    let tle = fixture("iss.tle");
    let out = Command::new(env!("CARGO_BIN_EXE_orbitplan"))
        .args([
            "plan",
            "--workload",
            "ml-inference",
            "--tle-file",
            &tle,
            "--start",
            START,
            "--offline",
        ])
        .env("ORBITPLAN_TLE_URL", &url)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(hits.load(Ordering::SeqCst), 0);

    // the same listener does see traffic when the remote source is used
    let out = Command::new(env!("CARGO_BIN_EXE_orbitplan"))
        .args([
            "plan",
            "--norad",
            "25544",
            "--workload",
            "ml-inference",
            "--start",
            START,
        ])
        .env("ORBITPLAN_TLE_URL", &url)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(hits.load(Ordering::SeqCst) >= 1);
}
