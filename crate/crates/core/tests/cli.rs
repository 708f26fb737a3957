//! End-to-end checks of the binary: outputs, exit codes and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mixdisc::adisc::DiscriminantArtifact;
use serde_json::Value;

const SQUARE: &str = r#"{"dim": 2, "points": [[0, 0], [1, 0], [0, 1], [1, 1]]}"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixdisc")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mixdisc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn disc_json_round_trips() {
    let cfg = scratch("square.json", SQUARE);
    let o = bin(&["disc", path(&cfg), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let a = DiscriminantArtifact::from_json_str(&stdout(&o)).unwrap();
    assert_eq!(a.poly.to_string(), "c_0*c_3 - c_1*c_2");
    assert_eq!(DiscriminantArtifact::from_json_str(&a.to_json_string()).unwrap(), a);
    let human = stdout(&bin(&["disc", path(&cfg)]));
    assert!(human.contains("# naming:") && human.contains("c_0*c_3 - c_1*c_2"));
}

#[test]
fn polygon_input_is_accepted() {
    let p = scratch("triangle.json", r#"{"vertices": [[0, 0], [2, 0], [0, 2]]}"#);
    let o = bin(&["disc", path(&p), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["degree"], 3);
}

#[test]
fn exit_codes() {
    let seg = scratch("segment.json", r#"{"dim": 1, "points": [[0], [1]]}"#);
    assert_eq!(bin(&["disc", path(&seg)]).status.code(), Some(2));
    let cfg = scratch("square-x.json", SQUARE);
    assert_eq!(bin(&["disc", path(&cfg), "--method", "interpolate", "--degree", "4"]).status.code(), Some(3));
    let tangent = scratch("tangent.json", r#"{"systems": [["1", "1", "-2", "-1"], ["1", "1", "-3", "-2"]]}"#);
    let transverse = scratch("transverse.json", r#"{"systems": [["3", "-1", "4", "1"], ["-5", "9", "2", "6"]]}"#);
    assert_eq!(bin(&["certify", path(&cfg), path(&tangent)]).status.code(), Some(4));
    let o = bin(&["certify", path(&cfg), path(&transverse), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("smooth"));
    let bad = scratch("bad.json", "{");
    assert_eq!(bin(&["disc", path(&bad)]).status.code(), Some(1));
}

#[test]
fn iterate_mixed_divide_and_match() {
    let cfg = scratch("square-y.json", SQUARE);
    let dir = cfg.parent().unwrap().to_path_buf();
    let id = dir.join("id.json");
    let md = dir.join("md.json");
    assert_eq!(bin(&["iterate", path(&cfg), "--out", path(&id)]).status.code(), Some(0));
    assert_eq!(bin(&["mixed", path(&cfg), "--out", path(&md)]).status.code(), Some(0));
    let o = bin(&["divide", "--num", path(&id), "--den", path(&md), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["quotient_degree"], 0);
    let o = bin(&["factor-match", "--quotient", path(&id), "--candidate", path(&md), "--mu", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let tangent = scratch("tangent-at.json", r#"{"systems": [["1", "1", "-2", "-1"], ["1", "1", "-3", "-2"]]}"#);
    let o = bin(&["iterate", path(&cfg), "--at", path(&tangent), "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "0");
}

#[test]
fn degree_commands() {
    let o = bin(&["degrees", "md-simplex", "--n", "3", "--d", "2", "--json"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["deg_md"], "24");
    let o = bin(&["degrees", "segre-veronese", "--d", "1,1,1", "--k", "1,1,1", "--json"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["deg_md"], "24");
    let o = bin(&["degrees", "plane", "--vertices", "0,0;1,0;1,1;0,1"]);
    assert!(stdout(&o).contains("equal"));
    let o = bin(&["scan", "--hits-only", "--json"]);
    assert_eq!(stdout(&o).lines().count(), 10);
    let o = bin(&["polygon", "--search", "--amax", "10", "--json"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn verify_paper_and_determinism() {
    let o = bin(&["verify-paper", "--filter", "katz", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let again = bin(&["verify-paper", "--filter", "katz", "--json"]);
    let strip = |s: String| -> Vec<Value> {
        s.lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                v["millis"] = Value::Null;
                v
            })
            .collect()
    };
    assert_eq!(strip(stdout(&o)), strip(stdout(&again)));
    let cfg = scratch("conic.json", r#"{"vertices": [[0, 0], [2, 0], [0, 2]]}"#);
    let a = bin(&["disc", path(&cfg), "--method", "interpolate", "--degree", "3", "--seed", "7", "--json"]);
    let b = bin(&["disc", path(&cfg), "--method", "interpolate", "--degree", "3", "--seed", "7", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}
