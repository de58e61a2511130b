use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcap")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qcap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn report_p41_separates() {
    let out = qcap(&["report", "--family", "G", "--p", "41"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["separation"], true);
    assert_eq!(r["n"], 163);
    assert_eq!(r["hadamard"]["construction"], "paley(163)");

    let r = json(&qcap(&["report", "--family", "h", "--p", "3"]));
    assert_eq!(r["separation"], false);
    assert_eq!(r["theta_upper"]["value"], "67");
}

#[test]
fn pipeline_h11() {
    let out = qcap(&["pipeline", "--family", "H", "--n", "11", "--trials", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["certificate"]["M"], 8);
    assert_eq!(r["certificate"]["verification"]["passed"], true);
    assert!(r["haemers"]["rank"].as_u64().unwrap() <= 67);
    assert_eq!(r["haemers"]["fits"], true);
    assert_eq!(r["protocol"]["trials"]["failures"], 0);
    assert_eq!(r["report"]["evidence"]["theta_upper"], "certified");
}

#[test]
fn alpha_of_pentagon_square() {
    let out = qcap(&["alpha", "--graph", "C5", "--power", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!((r["lower"].as_u64(), r["upper"].as_u64()), (Some(5), Some(5)));
    assert_eq!(r["exact"], true);
    assert_eq!(r["witness"].as_array().unwrap().len(), 5);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(qcap(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(qcap(&["alpha", "--graph", "Q7"]).status.code(), Some(1));
    assert_eq!(qcap(&["clique", "--graph", "C5"]).status.code(), Some(1));
    assert_eq!(qcap(&["--help"]).status.code(), Some(0));
}

#[test]
fn tampered_certificate_exits_2() {
    let good = scratch("c5.json");
    let out = qcap(&["cert", "--graph", "C5", "--output", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let ok = qcap(&["verify-cert", "--cert", good.to_str().unwrap(), "--graph", "C5"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["passed"], true);

    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    let entry = &mut cert["ops"][0]["matrix"][0][0];
    *entry = Value::from(entry.as_i64().unwrap() + 1);
    let bad = scratch("c5-bad.json");
    std::fs::write(&bad, cert.to_string()).unwrap();
    let out = qcap(&["verify-cert", "--cert", bad.to_str().unwrap(), "--graph", "C5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn hadamard_and_channel() {
    let out = qcap(&["hadamard", "--paley", "7", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verified"], true);
    assert_eq!(qcap(&["hadamard", "--paley", "5"]).status.code(), Some(1));

    let out = qcap(&["channel-sim", "--graph", "pentagon", "--trials", "100", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["summary"]["failures"], 0);
}
