use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fairfrontier"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_threads(args: &[&str], threads: &str) -> Output {
    bin()
        .env("FAIRFRONTIER_THREADS", threads)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn small_run(out: &Path, extra: &[&str]) -> Output {
    let out = out.to_str().unwrap();
    let mut args = vec![
        "run",
        "--scenario",
        "example3",
        "--resolution",
        "201",
        "--decompose",
        "--out",
        out,
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn run_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let names: Vec<String> = artifacts(dir.path()).into_iter().map(|(n, _)| n).collect();
    for f in [
        "sweep.csv",
        "frontier.csv",
        "decomposition.csv",
        "report.txt",
        "theorems.txt",
        "theorems.json",
        "frontier_curve.svg",
        "sweep_curve.svg",
        "decomposition_curve.svg",
    ] {
        assert!(names.iter().any(|n| n == f), "missing {f} in {names:?}");
    }
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("family: shared_threshold"));
    assert!(report.contains("0.017 for this scenario is not reproduced"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("theorems.json")).unwrap())
            .unwrap();
    assert!(json.as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn frontier_csv_round_trips_reals() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(dir.path(), &["--analyses", "frontier"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("frontier.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "fairness");
    assert_eq!(&headers[1], "accuracy");
    let mut last = f64::NEG_INFINITY;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let f: f64 = rec[0].parse().unwrap();
        let fu: f64 = rec[2].parse().unwrap();
        assert!(f > last);
        assert!((f + fu - 1.0).abs() < 1e-15);
        assert_eq!(format!("{f:.16e}"), &rec[0]);
        last = f;
    }
}

#[test]
fn repeated_runs_are_byte_identical_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| {
        vec![
            "run".to_owned(),
            "--scenario".into(),
            "example1".into(),
            "--family".into(),
            "per-group-threshold".into(),
            "--resolution".into(),
            "61".into(),
            "--decompose".into(),
            "--out".into(),
            d.to_str().unwrap().into(),
        ]
    };
    let ra: Vec<String> = args(a.path());
    let rb: Vec<String> = args(b.path());
    let oa = run_with_threads(&ra.iter().map(String::as_str).collect::<Vec<_>>(), "1");
    let ob = run_with_threads(&rb.iter().map(String::as_str).collect::<Vec<_>>(), "4");
    assert_eq!(oa.status.code(), Some(0), "{}", stderr(&oa));
    assert_eq!(ob.status.code(), Some(0), "{}", stderr(&ob));
    assert_eq!(artifacts(a.path()), artifacts(b.path()));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            "scenario = \"example4_nonidentical\"\nresolution = 101\nanalyses = \"frontier\"\nout = \"{}\"\n",
            out.display()
        ),
    )
    .unwrap();
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--resolution",
        "51",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("scenario: example4_nonidentical"));
    assert!(report.contains("resolution=51"));
    assert!(!out.join("theorems.txt").exists());
}

#[test]
fn written_presets_load_as_scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["scenarios", "--write", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let listing = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(listing.contains("example4_identical"));
    let file = dir.path().join("example1.toml");
    let a = dir.path().join("from_file");
    let b = dir.path().join("from_preset");
    let common = ["--resolution", "101", "--analyses", "frontier,theorems"];
    let oa = run(&[
        &[
            "run",
            "--scenario",
            file.to_str().unwrap(),
            "--out",
            a.to_str().unwrap(),
        ][..],
        &common,
    ]
    .concat());
    let ob = run(&[
        &[
            "run",
            "--scenario",
            "example1",
            "--out",
            b.to_str().unwrap(),
        ][..],
        &common,
    ]
    .concat());
    assert_eq!(oa.status.code(), Some(0), "{}", stderr(&oa));
    assert_eq!(ob.status.code(), Some(0), "{}", stderr(&ob));
    for f in ["frontier.csv", "sweep.csv", "theorems.txt"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn malformed_scenario_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        "label = \"bad\"\n[joint]\na0y0 = 0.25\na0y1 = 0.25\na1y0 = 0.25\na1y1 = 0.25\n\
         [dist.a0y0]\nkind = \"triangular\"\nlower = 0.0\nupper = 1.0\nmode = 3.0\n",
    )
    .unwrap();
    let o = run(&[
        "run",
        "--scenario",
        bad.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("line"), "{e}");
}

#[test]
fn invalid_settings_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["run", "--resolution", "2", "--out", out],
        vec!["run", "--omega1", "0.9", "--out", out],
        vec!["run", "--family", "forest", "--out", out],
        vec!["run", "--scenario", "example9", "--out", out],
        vec!["oracle", "--draws", "10"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(
            stderr(&o).lines().any(|l| l.starts_with("error:")),
            "{args:?}"
        );
    }
}

#[test]
fn oversized_sweep_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--family",
        "per-group-threshold",
        "--resolution",
        "4001",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("resolution"));
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(&[
        "run",
        "--resolution",
        "51",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn sweep_csv_limit_skips_large_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(
        dir.path(),
        &["--analyses", "frontier", "--sweep-csv-limit", "100"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!dir.path().join("sweep.csv").exists());
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("sweep.csv not written"));
}

#[test]
fn check_reports_failed_conclusions_with_exit_1() {
    let o = run(&["check", "--scenario", "example1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(out.contains("== example1"));
    assert!(out.contains("[sharp_decline_conditions]"));
    assert!(out.contains("conclusion: FAILS"));
}

#[test]
fn oracle_agrees_on_a_preset() {
    let o = run(&[
        "oracle",
        "--scenario",
        "example4_identical",
        "--draws",
        "200000",
        "--seed",
        "9",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        stderr(&o)
    );
}
