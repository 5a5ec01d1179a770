use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use simplex_forecast::synthetic::{generate, SyntheticConfig};
use simplex_forecast::ArrivalLog;

fn write_dataset(dir: &Path) -> PathBuf {
    let f = generate(&SyntheticConfig::star_family(20, 42)).unwrap();
    let arrivals = (0..f.num_slices())
        .flat_map(|t| f.arrivals(t).iter().map(move |s| (t as i64, s.clone())))
        .collect();
    let (nverts, simplices, times) = ArrivalLog::new(arrivals).to_three_files();
    let prefix = dir.join("stars");
    for (suffix, body) in [("nverts", nverts), ("simplices", simplices), ("times", times)] {
        std::fs::write(dir.join(format!("stars-{suffix}.txt")), body).unwrap();
    }
    prefix
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simplex-forecast"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn evaluate_prints_one_row_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = write_dataset(dir.path());
    let out = run(&[
        "evaluate",
        "--data",
        prefix.to_str().unwrap(),
        "--T",
        "20",
        "--repeats",
        "2",
        "--n-per-class",
        "5",
        "--method",
        "all",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "{text}");
    assert!(lines[0].starts_with("method\tauc"));
    for (line, m) in lines[1..].iter().zip(["ours", "aa", "jc", "pa"]) {
        assert!(line.starts_with(m), "{line}");
    }
}

#[test]
fn evaluate_json_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = write_dataset(dir.path());
    let config = dir.path().join("exp.cfg");
    std::fs::write(
        &config,
        format!(
            "# toy\ndata={}\nT=20\nrepeats=1\nn-per-class=5\nbeta=0.5\n",
            prefix.display()
        ),
    )
    .unwrap();
    let out = run(&[
        "evaluate",
        "--config",
        config.to_str().unwrap(),
        "--json",
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["beta_selected"], 0.5);
    assert_eq!(v["repeats"], 1);
}

#[test]
fn predict_ranks_candidates_with_intervals() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path());
    let out = run(&[
        "predict",
        "--data",
        dir.path().to_str().unwrap(),
        "--T",
        "20",
        "--beta",
        "1",
        "--top",
        "5",
        "--interval",
        "0.9",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 5);
    let probs: Vec<f64> = rows.iter().map(|r| r["probability"].as_f64().unwrap()).collect();
    assert!(probs.windows(2).all(|w| w[0] >= w[1]));
    for r in &rows {
        let (lo, hi) = (r["interval"][0].as_f64().unwrap(), r["interval"][1].as_f64().unwrap());
        let p = r["probability"].as_f64().unwrap();
        assert!(lo <= p && p <= hi);
    }

    let sigma: Vec<u32> = serde_json::from_value(rows[0]["simplex"].clone()).unwrap();
    let s = sigma.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    let out = run(&[
        "predict",
        "--data",
        dir.path().to_str().unwrap(),
        "--T",
        "20",
        "--beta",
        "1",
        "--simplex",
        &s,
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["simplex"], serde_json::json!(sigma));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = write_dataset(dir.path());
    let p = prefix.to_str().unwrap();
    assert_eq!(run(&["evaluate", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["evaluate", "--data", p, "--method", "nope"]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("absent");
    assert_eq!(
        run(&["evaluate", "--data", missing.to_str().unwrap()]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["evaluate", "--data", p, "--T", "100000"]).status.code(), Some(4));
    assert_eq!(
        run(&[
            "evaluate",
            "--data",
            p,
            "--T",
            "20",
            "--n-per-class",
            "100000",
            "--beta",
            "1"
        ])
        .status
        .code(),
        Some(4)
    );
}

#[test]
fn consistency_csv() {
    let out = run(&[
        "validate",
        "consistency",
        "--T-grid",
        "10,20",
        "--replicates",
        "2",
        "--jobs",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("T,mean_abs_error"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn normality_csv() {
    let out = run(&["validate", "normality", "--T", "30", "--replicates", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 21);
    assert!(String::from_utf8_lossy(&out.stderr).contains("p-value"));
}
