//! End-to-end runs of the `obcs` binary on files in a temporary directory.

use std::path::Path;
use std::process::{Command, Output};

fn obcs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obcs")).current_dir(dir).args(args).output().expect("spawn obcs")
}

fn gen(dir: &Path, m: &str, n: &str, s: &str, seed: &str) {
    let out = obcs(
        dir,
        &[
            "gen", "--m", m, "--n", n, "--s", s, "--seed", seed, "--matrix", "a.txt", "--signs", "y.txt", "--signal",
            "x.txt",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_then_recover_reports_metrics() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "300", "60", "3", "4");
    for algo in ["strmp", "strmp-l1", "biht"] {
        let out =
            obcs(dir.path(), &["recover", "--algo", algo, "--matrix", "a.txt", "--signs", "y.txt", "--truth", "x.txt"]);
        assert!(out.status.success(), "{algo}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["algorithm"], algo);
        assert_eq!(v["x_unit"].as_array().unwrap().len(), 60);
        assert!(v["support"].as_array().unwrap().len() <= 3);
        assert!(v["metrics"]["snr_db"].is_number() || v["metrics"]["snr_db"].is_null());
        assert!(v["certificate"]["sparsity_ok"].as_bool().unwrap());
    }
}

#[test]
fn recover_is_repeatable_and_respects_c0() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "200", "40", "2", "9");
    let run = |c0: &str, out: &str| {
        let o = obcs(
            dir.path(),
            &[
                "recover", "--algo", "strmp", "--matrix", "a.txt", "--signs", "y.txt", "--s", "2", "--c0", c0, "--out",
                out,
            ],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(dir.path().join(out)).unwrap();
        serde_json::from_str::<serde_json::Value>(&text).unwrap()
    };
    let (a, b, c) = (run("1", "r1.json"), run("1", "r2.json"), run("5", "r5.json"));
    assert_eq!(a["x_raw"], b["x_raw"]);
    assert!(a["wall_time"].as_f64().is_some());
    if c["converged"].as_bool().unwrap() {
        assert!((c["certificate"]["l1_of_ax"].as_f64().unwrap() - 5.0).abs() < 1e-6);
    }
    assert_eq!(a["support"], c["support"]);
}

#[test]
fn malformed_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.txt"), "obcs-matrix v1 2 2\n1 2\n3\n").unwrap();
    std::fs::write(dir.path().join("y.txt"), "obcs-signs v1 2\n1\n-1\n").unwrap();
    let out = obcs(dir.path(), &["recover", "--algo", "strmp", "--matrix", "a.txt", "--signs", "y.txt", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = obcs(dir.path(), &["recover", "--algo", "omp", "--matrix", "a.txt", "--signs", "y.txt", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out =
        obcs(dir.path(), &["recover", "--algo", "strmp", "--matrix", "missing.txt", "--signs", "y.txt", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_measurements_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.txt"), "obcs-matrix v1 2 2\n0 0\n0 0\n").unwrap();
    std::fs::write(dir.path().join("y.txt"), "obcs-signs v1 2\n1\n-1\n").unwrap();
    let out = obcs(dir.path(), &["recover", "--algo", "strmp", "--matrix", "a.txt", "--signs", "y.txt", "--s", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn first_index_and_expectation_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = obcs(
        dir.path(),
        &["first-index", "--n", "100", "--s", "3", "--m-list", "5,200", "--trials", "30", "--seed", "1"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,trials,successes,rate");
    assert!(lines[2].starts_with("200,30,"));

    let out = obcs(dir.path(), &["expectation-check", "--trials", "20000", "--seed", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["deviation"].as_f64().unwrap().abs() < 5.0 * v["std_error"].as_f64().unwrap());
}

#[test]
fn bench_writes_companion_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.txt"),
        "# tiny sparsity sweep\nn = 30\nsweep = sparsity\nsweep_values = 1, 2\nm = 60\ntrials = 3\nbase_seed = 5\nalgorithms = strmp, biht\noutput = out.csv\nworkers = 2\n",
    )
    .unwrap();
    let out = obcs(dir.path(), &["bench", "consistency", "--config", "cfg.txt"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 3 * 2);
    let agg = std::fs::read_to_string(dir.path().join("out.aggregate.csv")).unwrap();
    assert_eq!(agg.lines().count(), 1 + 2 * 2);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["study"], "consistency");
    assert_eq!(meta["timing_recorded"], false);

    let out = obcs(dir.path(), &["bench", "latency", "--config", "cfg.txt"]);
    assert_eq!(out.status.code(), Some(2));
}
