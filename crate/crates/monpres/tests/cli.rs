use std::path::PathBuf;
use std::process::{Command, Output};

use monpres::{read_records, Record};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str], files: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monpres"))
        .args(args)
        .args(files.iter().map(|f| fixture(f)))
        .env_remove("MONPRES_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL: [&str; 2] = ["--bound", "20000"];

#[test]
fn verdict_lines_and_exit_codes() {
    let cases = [
        ("gessel_sat.mp", "sat x=169", 0),
        ("square_not_fourth.mp", "sat x=4", 0),
        ("pell_pair.mp", "sat x=144", 0),
        ("residue_empty.mp", "unsat", 1),
        ("divisor_pair.mp", "unsat", 1),
        ("contradiction.mp", "unsat", 1),
        ("interval.mp", "unsat", 1),
        ("forall_squares.mp", "sat", 0),
    ];
    for (file, line, code) in cases {
        let o = run(&SMALL, &[file]);
        assert_eq!(stdout(&o).trim(), line, "{file}");
        assert_eq!(o.status.code(), Some(code), "{file}");
    }
    for file in ["catalan.mp", "fermat.mp", "fibonacci_cube.mp"] {
        let o = run(&SMALL, &[file]);
        assert!(stdout(&o).starts_with("unknown ("), "{file}: {}", stdout(&o));
        assert!(stdout(&o).trim_end().ends_with("bound=20000)"));
        assert_eq!(o.status.code(), Some(2));
    }
}

#[test]
fn malformed_input_exits_64_with_position() {
    let o = run(&[], &["malformed.mp"]);
    assert_eq!(o.status.code(), Some(64));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("malformed.mp:2:8:"), "{err}");
}

#[test]
fn exit_codes_match_records_on_corpus() {
    let files = ["catalan.mp", "contradiction.mp", "divisor_pair.mp", "fermat.mp", "fibonacci_cube.mp", "forall_squares.mp", "gessel_sat.mp", "interval.mp", "multi.mp", "pell_pair.mp", "residue_empty.mp", "square_not_fourth.mp"];
    for f in files {
        let o = run(&["--bound", "20000", "--multi", "--format", "json-lines"], &[f]);
        let recs = read_records(&stdout(&o)).unwrap();
        assert!(!recs.is_empty());
        let worst = recs.iter().map(Record::exit_code).max().unwrap();
        assert_eq!(o.status.code(), Some(worst), "{f}");
    }
}

#[test]
fn json_lines_round_trip_and_are_deterministic() {
    let files = ["gessel_sat.mp", "residue_empty.mp", "catalan.mp", "multi.mp"];
    let a = run(&["--bound", "20000", "--multi", "--format", "json-lines", "--trace"], &files);
    let b = run(&["--bound", "20000", "--multi", "--format", "json-lines", "--trace"], &files);
    let (ra, rb) = (read_records(&stdout(&a)).unwrap(), read_records(&stdout(&b)).unwrap());
    assert_eq!(ra.len(), 5);
    // input order is kept even though files run concurrently
    let order: Vec<_> = ra.iter().map(|r| (r.file.rsplit('/').next().unwrap().to_string(), r.index)).collect();
    assert_eq!(order, [("gessel_sat.mp".into(), 0), ("residue_empty.mp".into(), 0), ("catalan.mp".into(), 0), ("multi.mp".into(), 0), ("multi.mp".into(), 1)]);
    let strip = |rs: &[Record]| -> Vec<Record> {
        rs.iter()
            .cloned()
            .map(|mut r| {
                r.timings_ms = monpres::Timings { parse: 0.0, solve: 0.0 };
                r
            })
            .collect()
    };
    assert_eq!(strip(&ra), strip(&rb));
    for r in &ra {
        let line = serde_json::to_string(r).unwrap();
        assert_eq!(&read_records(&line).unwrap()[0], r);
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        for key in ["verdict", "witness", "case_trace", "timings_ms", "log"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
    assert_eq!(ra[0].witness.as_deref(), Some("169"));
    assert_eq!(a.status.code(), Some(2));
}

#[test]
fn env_overrides_flags() {
    let o = Command::new(env!("CARGO_BIN_EXE_monpres"))
        .arg(fixture("catalan.mp"))
        .env("MONPRES_FORMAT", "json-lines")
        .env("MONPRES_BOUND", "777")
        .output()
        .unwrap();
    let recs = read_records(&stdout(&o)).unwrap();
    assert_eq!(recs[0].bound, Some(777));
    let bad = Command::new(env!("CARGO_BIN_EXE_monpres")).arg(fixture("catalan.mp")).env("MONPRES_BOUND", "0").output().unwrap();
    assert_ne!(bad.status.code(), Some(0));
}

#[test]
fn encode_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("h.poly");
    std::fs::write(&p, "(- (* x1 x2) 6)").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_monpres")).args(["encode", "--check", "6"]).arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("(exists t0 "));
    assert!(text.contains("(pow 2 "));
    std::fs::write(&p, "(* x1 y)").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_monpres")).arg("encode").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(64));
}
