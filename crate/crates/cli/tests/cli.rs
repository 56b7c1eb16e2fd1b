use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};

use uaf_cli::experiment::{Summary, SUMMARY_KEYS};
use uaf_core::problems::QUADRATIC_DEFAULT_HOLDER;
use uaf_core::trace::{read_csv, CSV_HEADER};

fn uaf(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_uaf"));
    cmd.args(args).env_remove("UAF_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("UAF_CACHE_DIR", dir);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_dataset_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let summary = dir.path().join("s.json");
    let out = uaf(
        &[
            "run",
            "--problem",
            "logistic",
            "--dataset",
            "/nonexistent/data.svm",
            "--trace",
            s(&trace),
            "--summary",
            s(&summary),
        ],
        None,
    );
    assert_eq!(code(&out), 2);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn unknown_keys_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "problem = quadratic\nlearning_speed = 3\n").unwrap();
    assert_eq!(code(&uaf(&["run", "--config", s(&cfg)], None)), 2);
    assert_eq!(code(&uaf(&["run", "--learning_speed", "3"], None)), 2);
    assert_eq!(code(&uaf(&["run", "--q", "abc"], None)), 2);
}

#[test]
fn solver_failure_exits_1() {
    let out = uaf(
        &["run", "--problem", "logistic", "--samples", "50", "--dim", "4", "--solver", "svrg", "--lr", "1e6"],
        None,
    );
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn cubic_run_trace_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let summary = dir.path().join("s.json");
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# cubic regime on the default quadratic\nproblem = quadratic\ndim = 12\ncond = 50\nq = 3\nmax_iter = 60\n",
    )
    .unwrap();
    let out = uaf(
        &["run", "--config", s(&cfg), "--trace", s(&trace), "--summary", s(&summary)],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&trace).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = read_csv(BufReader::new(text.as_bytes())).unwrap();
    assert!(!rows.is_empty());
    // A_k >= (θ₁ c_q γ / L)(k/3)³ with θ₁ = 1, c_q = γ = 1/2
    for r in &rows {
        let bound = 0.25 / QUADRATIC_DEFAULT_HOLDER * (r.iter as f64 / 3.0).powi(3);
        assert!(r.a_total >= bound * (1.0 - 1e-10), "{r:?}");
    }
    assert!(rows.windows(2).all(|w| w[1].iter > w[0].iter && w[1].a_total > w[0].a_total));

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    let mut keys: Vec<&str> = json.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    keys.sort();
    let mut expected = SUMMARY_KEYS.to_vec();
    expected.sort();
    assert_eq!(keys, expected);
    let parsed: Summary = serde_json::from_value(json).unwrap();
    assert_eq!(parsed.certificate_violations, Some(0));

    let check = uaf(&["check-certificate", "--trace", s(&trace), "--summary", s(&summary)], None);
    assert_eq!(code(&check), 0);

    // inflate one gap far above any bound
    let tampered = dir.path().join("bad.csv");
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let cols: Vec<&str> = lines[2].split(',').collect();
    let mut cols: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
    cols[2] = "1e300".into();
    lines[2] = cols.join(",");
    fs::write(&tampered, lines.join("\n")).unwrap();
    let check = uaf(&["check-certificate", "--trace", s(&tampered), "--summary", s(&summary)], None);
    assert_eq!(code(&check), 1);

    let garbage = dir.path().join("garbage.csv");
    fs::write(&garbage, "not,a,trace\n").unwrap();
    assert_eq!(code(&uaf(&["check-certificate", "--trace", s(&garbage), "--h_ref", "1"], None)), 2);
}

#[test]
fn matrix_slopes_steepen_as_q_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = uaf(
        &[
            "matrix",
            "--problem",
            "logistic",
            "--q_grid",
            "2,2.5,3",
            "--L_grid",
            "0.001",
            "--strategy",
            "heuristic",
            "--max_iter",
            "200",
            "--fit_shrink",
            "true",
            "--out_dir",
            s(dir.path()),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let slope = |q: &str| {
        let p = dir.path().join(format!("summary_q{q}_L1e-3.json"));
        let sm: Summary = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(sm.certificate_violations, Some(0));
        sm.slope.unwrap()
    };
    let (s2, s25, s3) = (slope("2"), slope("2.5"), slope("3"));
    assert!(s2 <= s25 && s25 <= s3, "slopes {s2} {s25} {s3}");
    let matrix = fs::read_to_string(dir.path().join("matrix.csv")).unwrap();
    assert_eq!(matrix.lines().count(), 4);
}

#[test]
fn integrate_reports_residual() {
    let out = uaf(
        &["integrate", "--problem", "quadratic", "--dim", "3", "--cond", "2", "--dt", "1e-3", "--horizon", "4"],
        None,
    );
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let residual: f64 = text.rsplit('=').next().unwrap().trim().parse().unwrap();
    assert!(residual < 1e-3, "{text}");
}

#[test]
fn reference_cache_is_reused() {
    let cache = tempfile::tempdir().unwrap();
    let args = ["run", "--problem", "logistic", "--samples", "120", "--dim", "6", "--max_iter", "10"];
    let first = uaf(&args, Some(cache.path()));
    assert_eq!(code(&first), 0);
    let entries: Vec<_> = fs::read_dir(cache.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    let bytes = fs::read(&entries[0]).unwrap();
    let second = uaf(&args, Some(cache.path()));
    assert_eq!(first.stdout.len(), second.stdout.len());
    assert_eq!(fs::read(&entries[0]).unwrap(), bytes);
    assert_eq!(fs::read_dir(cache.path()).unwrap().count(), 1);
}
