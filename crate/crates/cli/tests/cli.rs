use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tropdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropdeg")).args(args).output().expect("binary runs")
}

fn tropdeg_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropdeg")).args(args).env(key, value).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn k3_check_simple_counts_24() {
    let out = tropdeg(&["check-simple", "--example", "kp1-2", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_of(&out);
    assert_eq!(r["focus_focus_total"], 24);
    assert_eq!(r["simple"], true);
    assert_eq!(r["violations"], 0);
}

#[test]
fn ring_of_two_segments() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "two-segments.json", r#"{"points": [[0], [1], [2]], "cells": [[0, 1], [1, 2]]}"#);
    let out = tropdeg(&["ring", "--complex", &f, "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["hilbert_counts"], serde_json::json!([1, 3, 5]));
}

#[test]
fn quintic_embedding_is_surjective() {
    let out = tropdeg(&["embed-check", "--example", "quintic", "--i", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_of(&out);
    assert_eq!(r["integrally_surjective"], true);
    assert_eq!(r["central_fibre_matches"], true);
}

#[test]
fn rescaled_hypercube_fails_the_check() {
    let out = tropdeg(&["embed-check", "--example", "hypercube", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json_of(&out);
    assert_eq!(r["rescaled"], true);
    assert_eq!(r["integrally_surjective"], false);
}

#[test]
fn render_marks_every_discriminant_point() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("k3.svg");
    let out = tropdeg(&["render", "--example", "kp1-2", "--k", "2", "--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary = json_of(&out);
    let text = std::fs::read_to_string(&svg).unwrap();
    let marks = text.matches(r#"class="discriminant""#).count();
    assert_eq!(marks, 24);
    assert_eq!(summary["discriminant_marks"], marks);
    assert!(text.starts_with("<?xml"));
}

#[test]
fn render_rejects_three_dimensional_spaces() {
    let out = tropdeg(&["render", "--example", "kp1-2", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_is_an_input_error_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\"points\": [[0], [1]],\n \"cells\": [[0, 1]");
    let out = tropdeg(&["ring", "--complex", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    let f = write(dir.path(), "badcell.json", r#"{"points": [[0], [1]], "cells": [[0, 7]]}"#);
    let out = tropdeg(&["tropicalize", "--complex", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cells[0]"));
}

#[test]
fn unknown_verb_and_bad_parameters_exit_2() {
    assert_eq!(tropdeg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(tropdeg(&["example", "--example", "quintic", "--i", "9"]).status.code(), Some(2));
    assert_eq!(tropdeg(&["example", "--example", "nonsense"]).status.code(), Some(2));
    assert_eq!(tropdeg(&["check-simple"]).status.code(), Some(2));
}

#[test]
fn dimension_cap_from_environment() {
    let out = tropdeg_env(&["tropicalize", "--example", "kp1-2", "--k", "2"], "TROPDEG_MAX_DIM", "2");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds limit 2"));
    let out = tropdeg_env(&["tropicalize", "--example", "kp1-2", "--k", "2"], "TROPDEG_MAX_DIM", "3");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &["example", "--example", "kp1-2", "--k", "2"][..],
        &["check-simple", "--example", "kp1-2", "--k", "2"][..],
        &["lg-truncate", "--example", "quintic", "--i", "4"][..],
    ] {
        let a = tropdeg(args);
        let b = tropdeg(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let out = tropdeg(&["tropicalize", "--example", "kp1-2", "--k", "1", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["source"]["name"], "kp1-2");
}
