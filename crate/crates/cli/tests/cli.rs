//! End-to-end behaviour of the `fxcast` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fxcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fxcast"))
        .args(args)
        .env_remove("FXCAST_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn synth(dir: &Path, kind: &str, n: usize) -> PathBuf {
    let path = dir.join(format!("{kind}.csv"));
    let n = n.to_string();
    let out = fxcast(&[
        "synth",
        "--kind",
        kind,
        "--n",
        &n,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    path
}

const SMALL_GRID: &[&str] = &[
    "--inputs",
    "1..2",
    "--hidden",
    "2,3",
    "--restarts",
    "2",
    "--max-epochs",
    "100",
    "--test-len",
    "20",
    "--horizons",
    "1m:4,5m:20",
];

#[test]
fn ingest_summarises_series() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("s.csv");
    fs::write(
        &path,
        "date,value\n2020-01-03,1.5\n2020-01-10,2.5\n2020-01-17,0.5\n",
    )
    .unwrap();
    let out = fxcast(&["ingest", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3 observations"), "{text}");
    assert!(text.contains("2020-01-03..2020-01-17"), "{text}");
    assert!(
        text.contains("min 0.5") && text.contains("max 2.5"),
        "{text}"
    );
}

#[test]
fn ingest_reports_decreasing_date_row() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("s.csv");
    fs::write(&path, "date,value\n2020-01-10,1\n2020-01-03,2\n").unwrap();
    let out = fxcast(&["ingest", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("row 3"), "{}", stderr(&out));
}

#[test]
fn custom_columns_and_delimiter() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("s.txt");
    fs::write(&path, "x;03/01/2020;1\nx;10/01/2020;2\n").unwrap();
    let p = path.to_str().unwrap();
    let out = fxcast(&[
        "ingest",
        p,
        "--delimiter",
        ";",
        "--date-col",
        "1",
        "--value-col",
        "2",
        "--header",
        "no",
        "--date-format",
        "%d/%m/%Y",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("2 observations"));
}

#[test]
fn missing_file_is_io_error() {
    let out = fxcast(&["ingest", "/nonexistent/series.csv"]);
    assert_eq!(code(&out), 5);
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let data = synth(dir.path(), "sine", 120);
    let d = data.to_str().unwrap();
    for args in [
        vec!["grid", d, "--inputs", "0"],
        vec!["grid", d, "--inputs", "3..1"],
        vec!["grid", d, "--workers", "0"],
        vec!["train", d, "--inputs", "0", "--hidden", "2"],
        vec![
            "train",
            d,
            "--inputs",
            "2",
            "--hidden",
            "2",
            "--train-len",
            "500",
        ],
        vec![
            "train",
            d,
            "--inputs",
            "2",
            "--hidden",
            "2",
            "--learning-rate",
            "-1",
        ],
        vec!["synth", "--kind", "sine", "--n", "10", "--r", "3"],
        vec!["report", d, "--view", "sideways"],
        vec!["frobnicate"],
    ] {
        let out = fxcast(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn train_prints_metrics_and_saves_model() {
    let dir = TempDir::new().unwrap();
    let data = synth(dir.path(), "sine", 150);
    let model = dir.path().join("model.json");
    let out = fxcast(&[
        "train",
        data.to_str().unwrap(),
        "--inputs",
        "3",
        "--hidden",
        "4",
        "--restarts",
        "2",
        "--max-epochs",
        "200",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    for label in ["in ", "1m ", "6m ", "12m "] {
        assert!(
            text.lines().any(|l| l.starts_with(label)),
            "{label}: {text}"
        );
    }
    let (net, scaler) = fxcast::Mlp::load(fs::File::open(&model).unwrap()).unwrap();
    assert_eq!(net.arch().inputs, 3);
    assert_eq!(net.arch().hidden, 4);
    assert!(scaler.is_some());
}

#[test]
fn grid_is_deterministic_and_seed_sensitive() {
    let dir = TempDir::new().unwrap();
    let data = synth(dir.path(), "logistic_map", 120);
    let d = data.to_str().unwrap();
    let run = |name: &str, seed: Option<&str>, env_seed: Option<&str>| {
        let path = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fxcast"));
        cmd.args(["grid", d, "--out", path.to_str().unwrap()])
            .args(SMALL_GRID);
        cmd.env_remove("FXCAST_SEED");
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        if let Some(s) = env_seed {
            cmd.env("FXCAST_SEED", s);
        }
        let out = cmd.output().unwrap();
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        fs::read(path).unwrap()
    };
    let a = run("a.jsonl", Some("7"), None);
    let b = run("b.jsonl", Some("7"), None);
    let from_env = run("c.jsonl", None, Some("7"));
    let overridden = run("d.jsonl", Some("7"), Some("8"));
    let other = run("e.jsonl", Some("8"), None);
    assert_eq!(a, b);
    assert_eq!(a, from_env);
    assert_eq!(a, overridden);
    assert_ne!(a, other);
}

#[test]
fn report_views_render_saved_sweep() {
    let dir = TempDir::new().unwrap();
    let data = synth(dir.path(), "sine", 120);
    let report = dir.path().join("r.jsonl");
    let r = report.to_str().unwrap();
    let mut args = vec!["grid", data.to_str().unwrap(), "--out", r];
    args.extend_from_slice(SMALL_GRID);
    assert_eq!(code(&fxcast(&args)), 0);

    let in_sample = fxcast(&["report", r, "--view", "in_sample"]);
    assert_eq!(code(&in_sample), 0);
    let text = String::from_utf8(in_sample.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 + 2);

    let out_sample = fxcast(&["report", r, "--view", "out_sample"]);
    let text = String::from_utf8(out_sample.stdout).unwrap();
    let last = text.lines().rfind(|l| !l.trim().is_empty()).unwrap();
    assert!(last.starts_with("RW "), "{text}");

    assert_eq!(code(&fxcast(&["report", r, "--view", "hidden_effect"])), 0);
}

#[test]
fn corrupt_and_truncated_reports_are_data_errors() {
    let dir = TempDir::new().unwrap();
    let data = synth(dir.path(), "sine", 120);
    let report = dir.path().join("r.jsonl");
    let mut args = vec![
        "grid",
        data.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ];
    args.extend_from_slice(SMALL_GRID);
    assert_eq!(code(&fxcast(&args)), 0);
    let text = fs::read_to_string(&report).unwrap();

    let truncated = dir.path().join("t.jsonl");
    let keep: Vec<&str> = text.lines().take(3).collect();
    fs::write(&truncated, keep.join("\n")).unwrap();
    let out = fxcast(&["report", truncated.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("truncated"), "{}", stderr(&out));

    let garbage = dir.path().join("g.jsonl");
    fs::write(&garbage, "not json\n").unwrap();
    assert_eq!(code(&fxcast(&["report", garbage.to_str().unwrap()])), 3);

    let newer = dir.path().join("v.jsonl");
    fs::write(&newer, text.replacen("\"version\":1", "\"version\":99", 1)).unwrap();
    let out = fxcast(&["report", newer.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("99"), "{}", stderr(&out));
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = TempDir::new().unwrap();
    let data = synth(dir.path(), "sine", 120);
    let mut args = vec![
        "grid",
        data.to_str().unwrap(),
        "--out",
        "/nonexistent/dir/r.jsonl",
    ];
    args.extend_from_slice(SMALL_GRID);
    assert_eq!(code(&fxcast(&args)), 5);
}

#[test]
fn all_cells_diverging_is_divergence_error() {
    let dir = TempDir::new().unwrap();
    let data = synth(dir.path(), "sine", 120);
    let mut args = vec![
        "grid",
        data.to_str().unwrap(),
        "--learning-rate",
        "1e300",
        "--sum-step",
    ];
    args.extend_from_slice(SMALL_GRID);
    let out = fxcast(&args);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn synth_writes_to_stdout() {
    let out = fxcast(&["synth", "--kind", "logistic_map", "--n", "3", "--x0", "0.5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "date,value\n2000-01-07,0.5\n2000-01-14,1\n2000-01-21,0\n"
    );
}
