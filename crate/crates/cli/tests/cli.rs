//! End-to-end tests of the `thinning` binary: file contracts, exit codes,
//! and full-run determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thinning"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn thinning binary")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn gen_is_deterministic_and_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_ok(&run(
        &[
            "gen", "--n", "50", "--d", "2", "--seed", "9", "--out", "a.csv",
        ],
        d,
    ));
    assert_ok(&run(
        &[
            "gen", "--n", "50", "--d", "2", "--seed", "9", "--out", "b.csv",
        ],
        d,
    ));
    let a = fs::read(d.join("a.csv")).unwrap();
    let b = fs::read(d.join("b.csv")).unwrap();
    assert_eq!(a, b, "same seed must give byte-identical files");

    let body = String::from_utf8(a).unwrap();
    let rows: Vec<&str> = body.lines().collect();
    assert_eq!(rows.len(), 50);
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 2);
        assert!(cols.iter().all(|x| (0.0..1.0).contains(x)));
    }

    assert_ok(&run(
        &[
            "gen", "--n", "10", "--d", "1", "--seed", "1", "--out", "c.csv", "--header",
        ],
        d,
    ));
    let c = fs::read_to_string(d.join("c.csv")).unwrap();
    assert!(c.starts_with("x0\n"));
    assert_eq!(c.lines().count(), 11);
}

#[test]
fn gen_accepts_model_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("models.json"),
        r#"[{"kind":"gaussian","mean":5.0,"stddev":0.1}]"#,
    )
    .unwrap();
    assert_ok(&run(
        &[
            "gen",
            "--n",
            "200",
            "--d",
            "1",
            "--seed",
            "4",
            "--dist",
            "models.json",
            "--out",
            "g.csv",
        ],
        d,
    ));
    let body = fs::read_to_string(d.join("g.csv")).unwrap();
    let mean: f64 = body.lines().map(|l| l.parse::<f64>().unwrap()).sum::<f64>() / 200.0;
    assert!((mean - 5.0).abs() < 0.1);

    fs::write(
        d.join("bad.json"),
        r#"[{"kind":"gaussian","mean":0,"stddev":-1}]"#,
    )
    .unwrap();
    let out = run(
        &[
            "gen", "--n", "5", "--d", "1", "--seed", "4", "--dist", "bad.json", "--out", "h.csv",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).expect("stderr must be JSON");
    assert!(err["error"].as_str().unwrap().contains("stddev"));
}

#[test]
fn thin_writes_the_contracted_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_ok(&run(
        &[
            "gen", "--n", "300", "--d", "1", "--seed", "1", "--out", "x.csv",
        ],
        d,
    ));
    assert_ok(&run(
        &[
            "gen", "--n", "300", "--d", "1", "--seed", "2", "--out", "y.csv",
        ],
        d,
    ));
    assert_ok(&run(
        &[
            "thin", "--x", "x.csv", "--y", "y.csv", "--t", "2", "--seed", "7", "--out", "kept",
        ],
        d,
    ));
    for f in [
        "kept_x.csv",
        "kept_y.csv",
        "kept_stream.csv",
        "decisions.csv",
        "report.json",
    ] {
        assert!(d.join("kept").join(f).exists(), "missing {f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("kept/report.json")).unwrap()).unwrap();
    assert_eq!(report["n"], 300);
    assert_eq!(report["T"], 2.0);
    let kept_x = fs::read_to_string(d.join("kept/kept_x.csv")).unwrap();
    assert_eq!(
        kept_x.lines().count() as u64,
        report["kept_x"].as_u64().unwrap()
    );
    let n = 300u64;
    let accounted = report["kept_x"].as_u64().unwrap()
        + report["kept_y"].as_u64().unwrap()
        + report["discarded_x"].as_u64().unwrap()
        + report["discarded_y"].as_u64().unwrap()
        + report["unprocessed"].as_u64().unwrap();
    assert_eq!(accounted, 2 * n);

    // Kept points must be a subset of the inputs (exact float round-trip).
    let inputs: std::collections::HashSet<String> = fs::read_to_string(d.join("x.csv"))
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    for line in kept_x.lines() {
        assert!(inputs.contains(line), "kept point {line} not in input");
    }

    // JSON output format variant.
    assert_ok(&run(
        &[
            "thin", "--x", "x.csv", "--y", "y.csv", "--t", "2", "--seed", "7", "--out", "kj",
            "--format", "json",
        ],
        d,
    ));
    let kept_json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("kj/kept_x.json")).unwrap()).unwrap();
    assert_eq!(
        kept_json.as_array().unwrap().len(),
        kept_x.lines().count(),
        "json and csv runs share the seed, so kept sets must match"
    );
}

#[test]
fn thin_respects_the_dyadic_budget_via_measure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_ok(&run(
        &[
            "gen", "--n", "256", "--d", "1", "--seed", "3", "--out", "x.csv",
        ],
        d,
    ));
    assert_ok(&run(
        &[
            "gen", "--n", "256", "--d", "1", "--seed", "4", "--out", "y.csv",
        ],
        d,
    ));
    assert_ok(&run(
        &[
            "thin", "--x", "x.csv", "--y", "y.csv", "--t", "2", "--l", "8", "--seed", "5", "--out",
            "kept",
        ],
        d,
    ));
    let out = run(
        &["measure", "--dyadic", "kept/kept_stream.csv", "--l", "8"],
        d,
    );
    assert_ok(&out);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("kept/report.json")).unwrap()).unwrap();
    assert_eq!(v["value"], report["dyadic_max"]);
    assert!(v["value"].as_u64().unwrap() <= 2 * 8);
}

#[test]
fn measure_two_sample_prints_result_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("x.csv"), "0.1\n0.2\n").unwrap();
    fs::write(d.join("y.csv"), "0.9\n0.95\n").unwrap();
    let out = run(&["measure", "--two-sample", "x.csv", "y.csv"], d);
    assert_ok(&out);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], 2.0);
    assert_eq!(v["witness"]["corner"][0], 0.2);

    let out = run(&["measure", "--star", "x.csv"], d);
    assert_ok(&out);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);

    // Missing --l for dyadic is a config error, not a crash.
    fs::write(d.join("s.csv"), "0.5,1\n").unwrap();
    let out = run(&["measure", "--dyadic", "s.csv"], d);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "config");
}

#[test]
fn balance_emits_aligned_signs_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("vecs.txt"), "0:1\n1:0.5 2:0.5\n\n0:1\n").unwrap();
    assert_ok(&run(
        &[
            "balance",
            "--vectors",
            "vecs.txt",
            "--l1-bound",
            "1",
            "--seed",
            "3",
            "--out",
            "bal",
        ],
        d,
    ));
    let signs = fs::read_to_string(d.join("bal/signs.csv")).unwrap();
    let rows: Vec<&str> = signs.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| *r == "1" || *r == "-1"));
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("bal/stats.json")).unwrap()).unwrap();
    assert!(stats["rounds_used"].as_u64().unwrap() >= 1);
    assert!(
        stats["prefix_linf_max"].as_f64().unwrap() <= 2.0 * stats["rounds_used"].as_f64().unwrap()
    );
}

#[test]
fn experiment_is_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("cfg.json"),
        r#"{"mode":"sweep","n":128,"d":1,"t":[2,4],"trials":5,"seed":21,"workers":2}"#,
    )
    .unwrap();
    assert_ok(&run(
        &["experiment", "--config", "cfg.json", "--out", "run1"],
        d,
    ));
    assert_ok(&run(
        &["experiment", "--config", "cfg.json", "--out", "run2"],
        d,
    ));
    assert_eq!(
        fs::read(d.join("run1/records.csv")).unwrap(),
        fs::read(d.join("run2/records.csv")).unwrap()
    );
    assert_eq!(
        fs::read(d.join("run1/summary.json")).unwrap(),
        fs::read(d.join("run2/summary.json")).unwrap()
    );

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("run1/summary.json")).unwrap()).unwrap();
    let groups = summary["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 2);
    // Larger T discards less.
    let discards: Vec<f64> = groups
        .iter()
        .map(|g| g["mean_total_discarded"].as_f64().unwrap())
        .collect();
    assert!(discards[0] > discards[1]);

    let records = fs::read_to_string(d.join("run1/records.csv")).unwrap();
    assert_eq!(records.lines().count(), 1 + 2 * 5);
}

#[test]
fn experiment_balance_mode_records_round_stats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("cfg.json"),
        r#"{"mode":"balance","n":200,"d":1,"trials":3,"seed":5}"#,
    )
    .unwrap();
    assert_ok(&run(
        &["experiment", "--config", "cfg.json", "--out", "run"],
        d,
    ));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("run/summary.json")).unwrap()).unwrap();
    let g = &summary["groups"][0];
    assert!(g["mean_rounds_used"].as_f64().unwrap() >= 1.0);
    assert!(g["mean_prefix_linf_max"].as_f64().unwrap() > 0.0);
}

#[test]
fn experiment_measure_mode_tracks_sqrt_n_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (name, n) in [("a", 1024usize), ("b", 4096)] {
        fs::write(
            d.join(format!("{name}.json")),
            format!(r#"{{"mode":"measure","n":{n},"d":1,"trials":10,"seed":13}}"#),
        )
        .unwrap();
        assert_ok(&run(
            &[
                "experiment",
                "--config",
                &format!("{name}.json"),
                "--out",
                name,
            ],
            d,
        ));
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(d.join(name).join("summary.json")).unwrap())
                .unwrap();
        let ratio = summary["groups"][0]["mean_disc_before_over_sqrt_n"]
            .as_f64()
            .unwrap();
        assert!(
            (0.3..=3.0).contains(&ratio),
            "n={n}: disc/sqrt(n) = {ratio} outside [0.3, 3]"
        );
    }
}

#[test]
fn unknown_flags_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["measure", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn size_mismatch_reports_core_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("x.csv"), "0.1\n0.2\n").unwrap();
    fs::write(d.join("y.csv"), "0.9\n").unwrap();
    let out = run(
        &[
            "thin", "--x", "x.csv", "--y", "y.csv", "--t", "2", "--seed", "1", "--out", "kept",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(1));
    // Warnings may precede the error; the final stderr line is the JSON.
    let stderr = String::from_utf8(out.stderr).unwrap();
    let last = stderr.lines().rev().find(|l| !l.trim().is_empty()).unwrap();
    let err: serde_json::Value = serde_json::from_str(last).unwrap();
    assert_eq!(err["kind"], "core");
    assert!(err["error"].as_str().unwrap().contains("mismatch"));
}
