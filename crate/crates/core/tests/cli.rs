//! End-to-end runs of the `qdunkl` binary.

use std::fs;
use std::process::{Command, Output};

use qdunkl::cli::RunConfig;
use qdunkl::operators::{moment_T1, StancuParams};
use qdunkl::qcore::QContext;

fn qdunkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdunkl"))
        .args(args)
        .env_remove("QDUNKL_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// `(x, lhs)` of every data row with the given quantity.
fn column(csv: &str, quantity: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("n,"))
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[3] == quantity)
        .map(|f| (f[2].parse().unwrap(), f[4].parse().unwrap()))
        .collect()
}

#[test]
fn help_lists_every_config_key() {
    let full = RunConfig {
        q: Some(0.5),
        qn_scheme: Some(String::new()),
        mu: Some(1.0),
        n: Some(1),
        n_list: Some(vec![1]),
        alpha: Some(0.0),
        beta: Some(0.0),
        f: Some(String::new()),
        p: Some(1),
        c: Some(1.0),
        x0: Some(1.0),
        nu: Some(1.0),
        grid: Some(String::new()),
        weighted_grid: Some(String::new()),
        tol: Some(1.0),
        fine_factor: Some(1),
        domain_margin: Some(1.0),
        out: Some("x".into()),
        format: Some(String::new()),
        threads: Some(1),
        seed: Some(1),
        moments: Some(true),
        with_d: Some(true),
    };
    let keys = serde_json::to_value(&full).unwrap();
    let help = stdout(&qdunkl(&["--help"]));
    for key in keys.as_object().unwrap().keys() {
        let flag = format!("--{}", key.replace('_', "-"));
        assert!(help.contains(&flag), "help lacks {flag}");
    }
    assert!(help.contains("--config"));
    for sub in ["eval", "verify", "experiment"] {
        assert!(help.contains(sub));
    }
}

#[test]
fn eval_constant_is_one() {
    let o = qdunkl(&["eval", "--f", "const", "--n", "10", "--grid", "0:1.5:16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = column(&stdout(&o), "T_f");
    assert_eq!(rows.len(), 16);
    for (_, v) in rows {
        assert!((v - 1.0).abs() < 1e-12);
    }
}

#[test]
fn eval_identity_matches_first_moment() {
    let o = qdunkl(&[
        "eval",
        "--f",
        "monomial",
        "--p",
        "1",
        "--q",
        "0.9",
        "--n",
        "20",
        "--alpha",
        "0",
        "--beta",
        "0",
        "--grid",
        "0:1:11",
        "--moments",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let params = StancuParams::new(QContext::new(0.9, 1.0).unwrap(), 20, 0.0, 0.0).unwrap();
    let t = column(&out, "T_f");
    let m = column(&out, "moment_T1");
    assert_eq!(t.len(), 11);
    for ((x, v), (_, m1)) in t.iter().zip(&m) {
        assert!((v - m1).abs() <= 1e-9 * (1.0 + x));
        assert!((m1 - moment_T1(*x, &params)).abs() < 1e-14);
    }
    assert_eq!(column(&out, "phi_n").len(), 11);
    assert_eq!(column(&out, "lambda_n").len(), 11);
}

#[test]
fn malformed_config_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    let out = dir.path().join("out.csv");
    fs::write(&cfg, "{\"q\": 0.9,").unwrap();
    let o = qdunkl(&[
        "eval",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    fs::write(&cfg, "{\"q\": 0.9, \"colour\": 1}").unwrap();
    let o = qdunkl(&["eval", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn config_errors_name_the_parameter() {
    for (args, word) in [
        (vec!["eval", "--q", "1.2"], "q"),
        (vec!["eval", "--mu", "-0.7"], "mu"),
        (vec!["eval", "--f", "cosine"], "cosine"),
        (vec!["eval", "--f", "sine", "--p", "2"], "p"),
        (vec!["eval", "--grid", "3:1:5"], "grid"),
        (vec!["verify", "everything"], "everything"),
        (vec!["experiment", "fastest"], "fastest"),
    ] {
        let o = qdunkl(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(word), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"q": 0.8, "n": 5, "f": "exp_decay", "c": 2.0, "grid": "0:1:3"}"#,
    )
    .unwrap();
    let o = qdunkl(&[
        "eval",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "7",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["n_list"], "7");
    assert_eq!(v["config"]["f"], "exp_decay(2)");
    assert_eq!(v["config"]["scheme"], "fixed(0.8)");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_suites_pass() {
    for suite in ["gamma", "integrals", "moduli"] {
        let o = qdunkl(&["verify", suite]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stderr(&o));
        assert!(stdout(&o).contains("# summary.all_pass=true"));
    }
    let o = qdunkl(&["verify", "moments", "--q", "0.9", "--n", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn moments_suite_near_the_mu_threshold() {
    let o = qdunkl(&["verify", "moments", "--mu", "0.6", "--q", "0.9", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = qdunkl(&["verify", "moments", "--mu", "0.4", "--q", "0.9", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: mu <= 1/2"));
}

#[test]
fn experiments_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("weighted.json");
    let o = qdunkl(&[
        "experiment",
        "weighted",
        "--f",
        "abs_shift(1)",
        "--n-list",
        "10,50",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["rows"].as_array().unwrap().iter().any(|r| r["quantity"] == "C_star"));

    let o = qdunkl(&[
        "experiment",
        "lipschitz",
        "--f",
        "holder_cusp(0.5)",
        "--n-list",
        "10,50",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = qdunkl(&["experiment", "korovkin", "--n-list", "200,10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fail"));
}

#[test]
fn numeric_failure_exit_code() {
    let o = qdunkl(&[
        "eval",
        "--q",
        "0.5",
        "--n",
        "1",
        "--f",
        "const",
        "--domain-margin",
        "0.99999999999",
        "--grid",
        "0:1.99999999998:2",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["experiment", "smooth", "--f", "exp_decay(1)", "--n-list", "10,25"];
    let o = qdunkl(&[&args[..], &["--out", a.to_str().unwrap(), "--threads", "1"]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = qdunkl(&[&args[..], &["--out", b.to_str().unwrap(), "--threads", "3"]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
