use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fdcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdcalc")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn fracsum_of_ones() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ones.csv", "t,value\n0,1\n1,1\n2,1\n");
    let out = dir.path().join("out.csv");
    let o = fdcalc(&[
        "compute", "--op", "fracsum", "--nu", "1/2", "--a", "0", "--input", &input, "--backend", "exact", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&out).unwrap(), "t,value\n1/2,1\n3/2,3/2\n5/2,15/8\n");
}

#[test]
fn compute_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let o = fdcalc(&[
        "compute", "--op", "caputo", "--mu", "3/2", "--family", "random:9", "--length", "12", "--seed", "5",
        "--out", first.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let second = dir.path().join("second.csv");
    let o = fdcalc(&[
        "compute", "--op", "fracsum", "--nu", "1/3", "--input", first.to_str().unwrap(), "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(second).unwrap();
    assert!(text.starts_with("t,value\n5/6,"), "{text}");
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn float_backend_accepts_decimals() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "f.csv", "t,value\n0,0.5\n1,1.25\n2,2\n");
    let o = fdcalc(&["compute", "--op", "rl", "--mu", "0.5", "--input", &input, "--backend", "f64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = fdcalc(&["compute", "--op", "rl", "--mu", "0.5", "--input", &input, "--backend", "exact"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output() {
    let o = fdcalc(&["compute", "--op", "diff", "--m", "2", "--family", "fixed:0;0;1", "--length", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    assert_eq!(v["points"][0]["value"], "2");
}

#[test]
fn integer_order_is_rejected() {
    let o = fdcalc(&["compute", "--op", "caputo", "--mu", "2", "--family", "random:3", "--length", "6"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("μ must be non-integer"), "{e}");
    assert_eq!(e.trim_end().lines().count(), 1);
}

#[test]
fn short_input_names_required_length() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "short.csv", "t,value\n0,1\n1,2\n");
    let o = fdcalc(&["compute", "--op", "caputo", "--mu", "5/2", "--input", &input]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("need at least 4 samples, got 2"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fdcalc(&["compute", "--op", "fracsum", "--nu", "1/2"]).status.code(), Some(2));
    assert_eq!(fdcalc(&["compute", "--op", "fracsum", "--family", "random:3"]).status.code(), Some(2));
    assert_eq!(fdcalc(&["compute", "--op", "fracsum", "--nu", "1/2", "--family", "bogus"]).status.code(), Some(2));
    assert_eq!(fdcalc(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(fdcalc(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "f.csv", "t,value\n1,1\n2,1\n");
    let o = fdcalc(&["compute", "--op", "fracsum", "--nu", "1/2", "--a", "0", "--input", &input]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_all_passes_and_report_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let o = fdcalc(&[
        "verify", "--suite", "all", "--backend", "exact", "--seed", "42", "--report", report.to_str().unwrap(),
        "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["config"]["seed"], 42);
    assert!(v["prng"].as_str().unwrap().contains("ChaCha8"));
    let rows = fs::read_to_string(&csv).unwrap().lines().count();
    assert_eq!(rows, v["cases"].as_array().unwrap().len() + 1);

    let o = fdcalc(&["report", "--input", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("suite all: pass"));
    let o = fdcalc(&["report", "--input", report.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), rows);
}

#[test]
fn verify_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, jobs) in [(&a, "1"), (&b, "3")] {
        let o = fdcalc(&[
            "verify", "--suite", "identities", "--backend", "f64", "--seed", "7", "--identity-cases", "20", "--jobs",
            jobs, "--report", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn perturbed_kernel_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("bad.json");
    let o = fdcalc(&[
        "verify", "--suite", "taylor", "--perturb-kernel", "1", "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = fdcalc(&["report", "--input", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn report_rejects_non_reports() {
    let dir = tempfile::tempdir().unwrap();
    let junk = write(dir.path(), "x.json", "{\"a\": 1}");
    assert_eq!(fdcalc(&["report", "--input", &junk]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(fdcalc(&["report", "--input", missing.to_str().unwrap()]).status.code(), Some(2));
}
