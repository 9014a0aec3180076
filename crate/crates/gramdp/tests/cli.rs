mod common;

use common::*;

fn adult() -> String {
    fixture("adult10.csv").display().to_string()
}

#[test]
fn run_prints_one_json_document() {
    let data = adult();
    let out = gramdp(&[
        "run",
        "--data",
        &data,
        "--column",
        "age",
        "--query",
        "mean",
        "--epsilon",
        "0.5",
        "--lower",
        "18",
        "--upper",
        "90",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stderr.is_empty());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["query"], "mean");
    assert_eq!(v["epsilon_spent"], 0.5);
    assert!(v.get("privacy_level").is_none());
    assert!(v.get("seed").is_none());
    let x = v["value"].as_f64().unwrap();
    assert!((18.0..=90.0).contains(&x));
}

#[test]
fn env_seed_matches_flag() {
    let data = adult();
    let args = [
        "run", "--data", &data, "--column", "age", "--query", "sum", "--level", "low", "--lower",
        "0", "--upper", "100",
    ];
    let mut with_flag = args.to_vec();
    with_flag.extend(["--seed", "11"]);
    let a = gramdp(&with_flag);
    let b = gramdp_env(&args, &[("GRAMDP_SEED", "11")]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let bad = gramdp_env(&args, &[("GRAMDP_SEED", "eleven")]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn inferred_bounds_warn_on_stderr() {
    let data = adult();
    let out = gramdp(&[
        "run", "--data", &data, "--column", "age", "--query", "mean", "--level", "low", "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("warning: bounds were inferred"));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bounds_were_inferred"], true);
    assert_eq!(v["bounds_used"]["lower"], 28.0);
}

#[test]
fn usage_errors_exit_2() {
    let data = adult();
    let cases: Vec<Vec<&str>> = vec![
        vec![],
        vec!["frobnicate"],
        vec!["run", "--data", &data, "--column", "age", "--query", "mean"],
        vec![
            "run",
            "--data",
            &data,
            "--column",
            "age",
            "--query",
            "mean",
            "--epsilon",
            "1",
            "--level",
            "low",
        ],
        vec![
            "run",
            "--data",
            &data,
            "--column",
            "age",
            "--query",
            "mean",
            "--epsilon",
            "1",
            "--lower",
            "0",
        ],
        vec![
            "run",
            "--data",
            &data,
            "--column",
            "age",
            "--query",
            "median",
            "--epsilon",
            "1",
        ],
        vec![
            "run",
            "--data",
            &data,
            "--column",
            "age",
            "--query",
            "mean",
            "--epsilon",
            "-1",
        ],
        vec![
            "run", "--data", &data, "--column", "age", "--query", "mean", "--level", "extreme",
        ],
        vec![
            "run",
            "--data",
            &data,
            "--column",
            "age",
            "--query",
            "mean",
            "--epsilon",
            "1",
            "--verbose",
        ],
        vec![
            "sweep",
            "--data",
            &data,
            "--column",
            "age",
            "--query",
            "mean",
            "--eps-step",
            "0",
            "--out",
            "x.csv",
        ],
    ];
    for args in cases {
        let out = gramdp(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert_eq!(stderr_json(&out)["exit_code"], 2);
    }
}

#[test]
fn data_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "a,b\n1,2\n3\n").unwrap();
    let empty_cell = dir.path().join("empty.csv");
    std::fs::write(&empty_cell, "a\n1\n\"\"\n").unwrap();
    let ragged = ragged.display().to_string();
    let empty_cell = empty_cell.display().to_string();
    let data = adult();

    let cases: Vec<(Vec<&str>, &str)> = vec![
        (
            vec!["--data", "/no/such/file.csv", "--column", "age"],
            "file_not_found",
        ),
        (
            vec!["--data", &data, "--column", "height"],
            "no_such_column",
        ),
        (
            vec!["--data", &data, "--column", "occupation"],
            "non_numeric_cell",
        ),
        (vec!["--data", &ragged, "--column", "a"], "ragged_row"),
        (vec!["--data", &empty_cell, "--column", "a"], "empty_cell"),
    ];
    for (extra, kind) in cases {
        let mut args = vec!["run", "--query", "mean", "--epsilon", "1", "--seed", "1"];
        args.extend(extra);
        let out = gramdp(&args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(out.stdout.is_empty());
        let v = stderr_json(&out);
        assert_eq!(v["error"], kind);
        assert_eq!(v["exit_code"], 1);
    }
}

#[test]
fn budget_flow() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("budget.jsonl").display().to_string();
    let data = adult();

    assert_eq!(
        code(&gramdp(&[
            "budget", "init", "--total", "1.0", "--file", &ledger
        ])),
        0
    );
    assert_eq!(
        code(&gramdp(&[
            "budget", "init", "--total", "1.0", "--file", &ledger
        ])),
        1
    );

    let status = |expect_remaining: f64, expect_charges: u64| {
        let out = gramdp(&["budget", "status", "--file", &ledger]);
        assert_eq!(code(&out), 0);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!((v["remaining"].as_f64().unwrap() - expect_remaining).abs() < 1e-12);
        assert_eq!(v["charges"], expect_charges);
        assert!(v["spent"].as_f64().unwrap().is_sign_positive());
    };
    status(1.0, 0);

    let run = |eps: &str| {
        gramdp(&[
            "run",
            "--data",
            &data,
            "--column",
            "age",
            "--query",
            "mean",
            "--epsilon",
            eps,
            "--lower",
            "18",
            "--upper",
            "90",
            "--seed",
            "2",
            "--budget-file",
            &ledger,
        ])
    };
    let ok = run("0.3");
    assert_eq!(code(&ok), 0);
    status(0.7, 1);

    let before = std::fs::read(&ledger).unwrap();
    let over = run("0.8");
    assert_eq!(code(&over), 1);
    assert!(over.stdout.is_empty());
    assert_eq!(stderr_json(&over)["error"], "budget_exhausted");
    assert_eq!(std::fs::read(&ledger).unwrap(), before);
    status(0.7, 1);

    assert_eq!(code(&run("0.7")), 0);
    status(0.0, 2);

    let missing = dir.path().join("none.jsonl").display().to_string();
    assert_eq!(code(&gramdp(&["budget", "status", "--file", &missing])), 1);
}

#[test]
fn levels_table() {
    let out = gramdp(&["levels"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<(&str, f64)> = text
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace();
            (it.next().unwrap(), it.next().unwrap().parse().unwrap())
        })
        .collect();
    assert_eq!(
        rows,
        [
            ("very_high", 0.01),
            ("high", 0.1),
            ("moderate", 0.5),
            ("low", 1.0),
            ("very_low", 5.0)
        ]
    );
}

#[test]
fn sweep_files_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let data = adult();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name).display().to_string();
        let out = gramdp(&[
            "sweep",
            "--data",
            &data,
            "--column",
            "hours_per_week",
            "--query",
            "var",
            "--seed",
            "5",
            "--iterations",
            "30",
            "--out",
            &path,
        ]);
        assert_eq!(code(&out), 0);
        outputs.push(std::fs::read_to_string(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0].lines().count(), 26);
    assert_eq!(
        outputs[0].lines().next().unwrap(),
        "epsilon,mean_dp,mean_scaled_error,mse,rmspe_percent,iterations"
    );
}

#[test]
fn sweep_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = adult();
    let path = dir.path().join("r.json");
    let out = gramdp_env(
        &[
            "sweep",
            "--data",
            &data,
            "--column",
            "age",
            "--query",
            "count",
            "--seed",
            "5",
            "--iterations",
            "5",
            "--format",
            "json",
            "--out",
            &path.display().to_string(),
        ],
        &[("SOURCE_DATE_EPOCH", "86400")],
    );
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let report = gramdp::report::report_from_json(&text).unwrap();
    assert_eq!(report.timestamp.as_deref(), Some("1970-01-02T00:00:00Z"));
    assert_eq!(report.records.len(), 25);
    assert_eq!(
        gramdp::report::report_to_json(&report).unwrap() + "\n",
        text
    );
}
