mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use bratteli::diagram::BratteliSequence;
use bratteli::format::serialize;

use common::{paths, single_path};

fn bratteli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bratteli")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let u2 = write(dir.path(), "u2.brat", &serialize(&BratteliSequence::uhf(2)));
    let one = write(dir.path(), "one.brat", &serialize(&single_path()));
    let two = write(dir.path(), "two.brat", &serialize(&paths([1, 1])));
    let bad = write(dir.path(), "bad.brat", "bratteli v1\nsizes: 1 2\nunit: 0\n");
    let missing = dir.path().join("missing.brat").to_string_lossy().into_owned();

    let cases: [(&[&str], i32); 9] = [
        (&["--help"], 0),
        (&["--version"], 0),
        (&["validate", &u2], 0),
        (&["validate", &bad], 65),
        (&["validate", &missing], 66),
        (&["frobnicate"], 64),
        (&["telescope", &u2, "--keep", "2,3"], 64),
        (&["equiv", &one, &two], 1),
        (&["equiv", &u2, &u2, "--depth", "0"], 0),
    ];
    for (args, code) in cases {
        assert_eq!(bratteli(args).status.code(), Some(code), "{args:?}");
    }
}

#[test]
fn parse_errors_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.brat", "bratteli v1\nsizes: 1 1\nunit: 1\nmap 1: 2*1\n");
    let out = bratteli(&["validate", &bad]);
    assert_eq!(out.status.code(), Some(65));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("4:"), "{err}");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let u2 = write(dir.path(), "u2.brat", &serialize(&BratteliSequence::uhf(2)));
    let u3 = write(dir.path(), "u3.brat", &serialize(&BratteliSequence::uhf(3)));
    for args in [
        vec!["equiv", &u2, &u3],
        vec!["--sequential", "equiv", &u2, &u3],
        vec!["unit-change", &u2, "--unit", "3"],
        vec!["states", &u3, "--level", "1", "--depth", "4", "--decimal"],
        vec!["canon", &u3],
        vec!["tensorq", &u2, "--n", "3^inf", "--depth", "3"],
        vec!["arch-check", "--samples", "5", "--seed", "9"],
    ] {
        let first = bratteli(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        assert_eq!(first.stdout, bratteli(&args).stdout, "{args:?}");
    }
    let par = bratteli(&["equiv", &u2, &u3]).stdout;
    assert_eq!(par, bratteli(&["--sequential", "equiv", &u2, &u3]).stdout);
}

#[test]
fn certificates_round_trip_and_tampering_fails() {
    let dir = tempfile::tempdir().unwrap();
    let u2 = write(dir.path(), "u2.brat", &serialize(&BratteliSequence::uhf(2)));
    let u3 = write(dir.path(), "u3.brat", &serialize(&BratteliSequence::uhf(3)));

    let equiv = bratteli(&["equiv", &u2, &u3]).stdout;
    let cert = write(dir.path(), "equiv.json", std::str::from_utf8(&equiv).unwrap());
    assert_eq!(bratteli(&["equiv", "--verify", &cert]).status.code(), Some(0));
    let mut doc: Value = serde_json::from_slice(&equiv).unwrap();
    doc["certificate"]["canon_b"]["diagonals"][1][0] = Value::from("1/5");
    let tampered = write(dir.path(), "equiv-bad.json", &doc.to_string());
    assert_eq!(bratteli(&["equiv", "--verify", &tampered]).status.code(), Some(1));

    let ladder = bratteli(&["unit-change", &u2, "--unit", "3"]).stdout;
    let cert = write(dir.path(), "ladder.json", std::str::from_utf8(&ladder).unwrap());
    assert_eq!(bratteli(&["unit-change", "--verify", &cert]).status.code(), Some(0));
    let mut doc: Value = serde_json::from_slice(&ladder).unwrap();
    doc["scalars"][0] = Value::from("4");
    let tampered = write(dir.path(), "ladder-bad.json", &doc.to_string());
    assert_eq!(bratteli(&["unit-change", "--verify", &tampered]).status.code(), Some(1));
}
