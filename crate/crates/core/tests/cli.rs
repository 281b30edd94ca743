use std::path::PathBuf;
use std::process::{Command, Output};

use pfiber::curves::library;
use pfiber::fibercheck::{check, CheckOptions};
use serde_json::Value;

fn pfiber(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfiber")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// A fresh path in the system temp directory, unique per test and process.
fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("pfiber-cli-{}-{name}", std::process::id()))
}

#[test]
fn check_hopf_is_a_thin_wrapper() {
    let out = pfiber(&["check", "hopf"]);
    assert_eq!(out.status.code(), Some(0));
    let direct = check(&library("hopf").unwrap(), &CheckOptions::default()).unwrap().to_json();
    assert_eq!(stdout(&out).trim_end(), direct);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["branches"][0]["min"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn reports_are_reproducible() {
    let args = ["--grid", "2048", "check", "figure8"];
    let (a, b) = (pfiber(&args), pfiber(&args));
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
    let threaded = Command::new(env!("CARGO_BIN_EXE_pfiber")).args(args).env("PFIBER_THREADS", "1").output().unwrap();
    assert_eq!(threaded.stdout, a.stdout);
}

#[test]
fn check_reads_braid_files_and_fails_unfibered_ones() {
    let spec = scratch("ex2-r1.json");
    std::fs::write(&spec, r#"{"pattern":"figure8","companions":["sigma1_2strand"],"eps":0.01,"powers":[1]}"#).unwrap();
    let out = pfiber(&["satellite", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "fail");

    let braid = scratch("ex2-r1-braid.json");
    std::fs::write(&braid, serde_json::to_string(&v["braid"]).unwrap()).unwrap();
    assert_eq!(pfiber(&["check", braid.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn satellite_specs() {
    let ok = scratch("ex2-r9.json");
    std::fs::write(&ok, r#"{"pattern":"figure8","companions":["sigma1_2strand"],"eps":"auto","powers":[9]}"#).unwrap();
    let out = pfiber(&["satellite", ok.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["eps"], 0.1);
    assert_eq!(v["word"].as_str().unwrap().split_whitespace().count(), 25);

    let auto = scratch("ex2-auto.json");
    std::fs::write(&auto, r#"{"pattern":"figure8","companions":["sigma1_2strand"],"eps":"auto","powers":"auto"}"#)
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&pfiber(&["satellite", auto.to_str().unwrap()]))).unwrap();
    assert_eq!(v["powers"], serde_json::json!([9]));

    let bad = scratch("mismatch.json");
    std::fs::write(&bad, r#"{"pattern":"hopf","companions":["trefoil_neg","hopf"],"eps":0.1,"powers":[1,1]}"#).unwrap();
    let out = pfiber(&["satellite", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn errors_exit_with_two() {
    let bad = scratch("malformed.json");
    std::fs::write(&bad, "{\"components\": [").unwrap();
    assert_eq!(pfiber(&["check", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(pfiber(&["check", "no_such_braid"]).status.code(), Some(2));
    assert_eq!(pfiber(&["--grid", "32", "check", "hopf"]).status.code(), Some(2));
    assert_eq!(pfiber(&["--margin", "-1", "check", "hopf"]).status.code(), Some(2));
    assert_eq!(pfiber(&["homogenize", "4", "3"]).status.code(), Some(2));
    assert_eq!(pfiber(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn word_commands() {
    assert_eq!(stdout(&pfiber(&["twistbound", "-1", "2"])).trim(), "1 1");
    assert_eq!(stdout(&pfiber(&["homogenize", "1", "2"])).trim(), "1 -2 1 3 -2");
    let v: Value = serde_json::from_str(&stdout(&pfiber(&["--format", "json", "homogenize", "1 -2", "3"]))).unwrap();
    assert_eq!(v["strands"], 6);
    let plan: Value = serde_json::from_str(&stdout(&pfiber(&["twistplan", "1 -2 1 -2", "3"]))).unwrap();
    assert_eq!(plan["required_twists"], 1);
    let suite = pfiber(&["--seed", "11", "homogenize-suite", "--count", "50"]);
    assert_eq!(suite.status.code(), Some(0));
}

#[test]
fn braid_outputs() {
    let v: Value = serde_json::from_str(&stdout(&pfiber(&["library", "figure8"]))).unwrap();
    let terms = v["components"][0]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 4);
    assert!(terms.iter().all(|t| t["freq_den"] == 3));

    let csv = stdout(&pfiber(&["--grid", "256", "tracks", "figure8"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,branch,re_c,im_c,re_v,im_v,phase,dphase_dt"));
    assert!(lines.count() >= 2 * 257);

    assert_eq!(stdout(&pfiber(&["extract", "sigma1_2strand"])).trim(), "1");
    let events = stdout(&pfiber(&["--format", "csv", "extract", "trefoil_neg"]));
    assert_eq!(events.lines().count(), 5);

    let target = scratch("hopf.json");
    assert_eq!(pfiber(&["--out", target.to_str().unwrap(), "library", "hopf"]).status.code(), Some(0));
    assert!(pfiber::curves::ParamBraid::from_json(&std::fs::read_to_string(&target).unwrap()).is_ok());
}
