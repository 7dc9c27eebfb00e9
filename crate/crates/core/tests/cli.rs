use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn chung(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chung"))
        .args(args)
        .env_remove("CHUNG_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.csv"));
    std::fs::read_to_string(p).unwrap()
}

/// Column value from a CSV row, by header name.
fn column(text: &str, row: usize, name: &str) -> String {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).expect(name);
    rdr.records().nth(row).unwrap().unwrap()[idx].to_string()
}

#[test]
fn goldens_are_stable() {
    let cases: &[(&str, &[&str])] = &[
        ("smallball_x1", &["smallball", "--x", "1.0"]),
        ("constants_t1", &["constants", "--theorem", "1", "--a", "0", "--b", "0", "--tau", "0"]),
        ("constants_t2", &["constants", "--theorem", "2", "--b", "0"]),
        ("series_integral", &["series", "--a", "0", "--b", "0", "--eps", "0.999", "--mode", "integral"]),
        (
            "integral_test_c09",
            &["integral-test", "--family", "c-loglog", "--c", "0.9", "--a", "0", "--b", "0", "--nmax", "1e6"],
        ),
        ("truncate_rademacher", &["truncate", "--dist", "rademacher", "--n", "100", "--p", "0.25", "--seed", "5"]),
        ("condition_atoms", &["condition", "--dist", "atoms", "--c", "1.0", "--kgrid", "5..30"]),
        ("condition_normal", &["condition", "--dist", "normal", "--tgrid", "10,100,1000"]),
        (
            "mc_rademacher",
            &["mc", "--dist", "rademacher", "--n", "1000", "--eps", "1.0", "--reps", "5000", "--seed", "42"],
        ),
    ];
    for (name, args) in cases {
        assert_eq!(stdout(&chung(args)), golden(name), "golden {name}");
    }
}

#[test]
fn header_is_versioned() {
    let text = golden("constants_t1");
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("param.quantity,"));
    assert!(header.ends_with(",value,stderr,reference,deviation,seed,version"));
    assert_eq!(column(&text, 0, "version"), chung_lil::VERSION_TAG);
}

#[test]
fn documented_values() {
    let t = stdout(&chung(&["smallball", "--x", "1.0"]));
    let v: f64 = column(&t, 0, "value").parse().unwrap();
    assert!((v - 0.37078).abs() < 1e-5);
    let t = stdout(&chung(&["smallball", "--x", "3.0"]));
    assert_eq!(column(&t, 0, "param.representation"), "reflection-series");

    let t = stdout(&chung(&["constants", "--theorem", "2", "--b", "0"]));
    let v: f64 = column(&t, 0, "value").parse().unwrap();
    assert!((v - 1.233_700_550_136_17).abs() < 1e-12);

    let t = stdout(&chung(&["series", "--a", "0", "--b", "0", "--eps", "0.999", "--mode", "integral"]));
    let dev: f64 = column(&t, 1, "deviation").parse().unwrap();
    assert!(dev.abs() < 0.005);

    let t = stdout(&chung(&["series", "--a", "0", "--b", "0", "--eps", "0.5", "--mode", "direct", "--nmax", "1e6"]));
    let lo: f64 = column(&t, 2, "value").parse().unwrap();
    let hi: f64 = column(&t, 3, "value").parse().unwrap();
    let integral: f64 = column(&t, 4, "value").parse().unwrap();
    assert!(lo <= integral && integral <= hi);

    for (c, verdict) in [("0.9", "Converges"), ("1.1", "Diverges"), ("1.0", "Diverges")] {
        let t = stdout(&chung(&["integral-test", "--family", "c-loglog", "--c", c, "--nmax", "1e5"]));
        let last = t.lines().count() - 2;
        assert_eq!(column(&t, last - 1, "param.verdict"), verdict, "c = {c}");
        if c == "1.0" {
            assert!(column(&t, last - 1, "param.note").contains("boundary"));
        }
    }

    let t = stdout(&chung(&["truncate", "--dist", "normal", "--n", "1000000", "--p", "0.25", "--reps", "2"]));
    let ratio: f64 = column(&t, 2, "value").parse().unwrap();
    assert!((ratio - 1.0).abs() < 1e-12);

    let t = stdout(&chung(&["condition", "--dist", "rademacher", "--tgrid", "2"]));
    assert_eq!(column(&t, 0, "value"), "0");

    let t = stdout(&chung(&["sweep", "--dist", "rademacher", "--eps", "0.8", "--ngrid", "1e2,1e3,1e4,1e5", "--reps", "2000"]));
    assert_eq!(column(&t, 4, "reference"), "-1.5625");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| chung(args).status.code().unwrap();
    let out = chung(&["smallball", "--x", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x > 0"));
    assert_eq!(code(&["constants", "--theorem", "1", "--a", "-1", "--b", "0"]), 2);
    assert_eq!(code(&["series", "--eps", "1.0", "--a", "0", "--mode", "integral"]), 2);
    assert_eq!(code(&["truncate", "--dist", "rademacher", "--n", "100", "--p", "0.6"]), 2);
    assert_eq!(code(&["sweep", "--dist", "rademacher", "--eps", "1", "--ngrid", "1e3,1e4,1e5"]), 2);
    assert_eq!(code(&["mc", "--dist", "atoms", "--c", "1.0", "--kmax", "7", "--n", "100", "--eps", "1"]), 3);
    assert_eq!(
        code(&["sweep", "--dist", "rademacher", "--eps", "0.3", "--ngrid", "1e2,1e3,1e4,1e5", "--reps", "200"]),
        4
    );
    assert_eq!(code(&["mc", "--n", "100"]), 2);
    assert_eq!(code(&[]), 2);
}

#[test]
fn json_record_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let args = ["mc", "--dist", "normal", "--n", "5000", "--eps", "1.2", "--tau", "0.3", "--reps", "3000", "--seed", "0x2a"];
    let out = chung(&[&args[..], &["--format", "json", "--output", first.to_str().unwrap()]].concat());
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    assert_eq!(doc["config"]["seed"], 42);
    assert_eq!(doc["config"]["command"]["name"], "mc");
    assert_eq!(doc["records"][0]["param.quantity"], "p_hat");

    // rerun from the record alone, on a different thread count
    let again = stdout(&chung(&["--config", first.to_str().unwrap(), "--threads", "3"]));
    let redo: Value = serde_json::from_str(&again).unwrap();
    assert_eq!(redo["records"], doc["records"]);

    // flags override the file
    let csv = stdout(&chung(&["--config", first.to_str().unwrap(), "--format", "csv", "mc", "--reps", "1000"]));
    assert_eq!(column(&csv, 0, "param.reps"), "1000");
    assert_eq!(column(&csv, 0, "param.eps"), "1.2");
    assert_eq!(column(&csv, 0, "seed"), "42");
}

#[test]
fn analytic_record_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rec.json");
    let out = chung(&["smallball", "--x", "0.7", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let redo: Value = serde_json::from_str(&stdout(&chung(&["--config", path.to_str().unwrap()]))).unwrap();
    assert_eq!(redo["records"], doc["records"]);
}

#[test]
fn env_threads_only_when_flag_absent() {
    let run = |env: &str, extra: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_chung"))
            .args(["mc", "--n", "2000", "--eps", "1.0", "--reps", "2000", "--format", "json"])
            .args(extra)
            .env("CHUNG_THREADS", env)
            .output()
            .unwrap();
        (out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned())
    };
    let (code, text) = run("2", &[]);
    assert_eq!(code, Some(0));
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["config"]["threads"], 2);
    let (_, text) = run("2", &["--threads", "1"]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["config"]["threads"], 1);
    assert_eq!(run("zero", &[]).0, Some(2));
    assert_eq!(run("zero", &["--threads", "4"]).0, Some(0));
}

#[test]
fn mismatched_config_command_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"command": {"name": "smallball", "x": 0.5}, "seed": 3}"#).unwrap();
    let t = stdout(&chung(&["--config", path.to_str().unwrap()]));
    assert_eq!(column(&t, 0, "param.x"), "0.5");
    assert_eq!(column(&t, 0, "seed"), "3");
    assert_eq!(chung(&["--config", path.to_str().unwrap(), "constants"]).status.code(), Some(2));
}
