use std::path::Path;
use std::process::{Command, Output};

fn tns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tns")).args(args).output().unwrap()
}

fn write_config(dir: &Path, ic: &str) -> String {
    let out = dir.join("run");
    let text = format!(
        "[solver]\nresolution = 12\nnu = 0.1\ndt = 0.01\nt_end = 0.2\nsample_every = 2\n\n\
         [initial_condition]\nkind = \"{ic}\"\nseed = 5\nband = [1.0, 3.0]\namplitude = 1.0\n\n\
         [output]\ndir = \"{}\"\n",
        out.display()
    );
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn lattice_prints_counts_and_constants() {
    let o = tns(&["lattice", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,count,tail,tail_remainder_bound,m_tail,count_over_m3");
    assert!(lines[1].starts_with("1,7,"));
    assert!(lines[2].starts_with("2,33,"));
    assert!(lines[3].starts_with("c1 1.48949440734935"));
    assert!(lines[4].starts_with("c2 7.0"));
}

#[test]
fn taylor_green_run_then_verify_reproduces_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "taylor_green");
    let o = tns(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let run = tmp.path().join("run");
    let report = std::fs::read_to_string(run.join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["notes"].as_array().unwrap().len(), 0);
    assert_eq!(json["intervals"][0]["case_label"], "low_dominant");

    let v = tns(&[
        "verify",
        run.join("trajectory.csv").to_str().unwrap(),
        run.join("checkpoints").to_str().unwrap(),
    ]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(String::from_utf8(v.stdout).unwrap(), report);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "random_band");
    let mut seen = Vec::new();
    for _ in 0..2 {
        let o = tns(&["run", &cfg]);
        assert!(matches!(o.status.code(), Some(0 | 4)));
        let run = tmp.path().join("run");
        seen.push((
            std::fs::read(run.join("trajectory.csv")).unwrap(),
            std::fs::read(run.join("report.json")).unwrap(),
        ));
    }
    assert!(seen[0] == seen[1]);
}

#[test]
fn missing_checkpoints_are_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "taylor_green");
    assert_eq!(tns(&["run", &cfg]).status.code(), Some(0));
    let run = tmp.path().join("run");
    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let traj = run.join("trajectory.csv");
    for dir in [empty.clone(), tmp.path().join("absent")] {
        let o = tns(&["verify", traj.to_str().unwrap(), dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2));
    }
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(tns(&["run", "--bogus"]).status.code(), Some(2));
    assert_eq!(tns(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(tns(&["run", "/nonexistent/exp.toml"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "[solver]\nresolution = 12\nnu = -1.0\nt_end = 1.0\n").unwrap();
    assert_eq!(tns(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "[solver]\nunknown_key = 1\n").unwrap();
    assert_eq!(tns(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
}
