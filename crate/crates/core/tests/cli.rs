use std::process::{Command, Output};

use poissonsym::cli::{run_scenario, Report, ScenarioConfig, CSV_HEADER, SCENARIOS};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_poissonsym"));
    c.env_remove("POISSONSYM_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn list_names_every_scenario() {
    let o = run(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for s in SCENARIOS {
        assert!(text.contains(s.name), "{} missing", s.name);
        assert!(!s.anchors.is_empty());
    }
}

#[test]
fn unknown_scenario_lists_available() {
    let o = run(&["scenario", "no-such-thing"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("no-such-thing") && err.contains("simplex") && err.contains("basic-forms"), "{err}");
}

#[test]
fn csv_header_and_determinism() {
    let args = ["scenario", "dirac-submanifold", "--format", "csv", "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert!(text.lines().skip(1).all(|l| l.starts_with("dirac-submanifold,") && l.ends_with(",0e0")));
    let other = run(&["scenario", "dirac-submanifold", "--format", "csv", "--no-timing", "--seed", "7"]);
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn json_report_round_trips() {
    let o = run(&["scenario", "fixed-points", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let rep = Report::from_json(&stdout(&o)).unwrap();
    assert!(!rep.records.is_empty() && rep.all_pass());
    assert_eq!(rep.to_json(), stdout(&o));
}

#[test]
fn out_dir_from_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["scenario", "basic-forms", "--format", "csv", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(dir.path().join("basic-forms.csv")).unwrap().starts_with(CSV_HEADER));
    let env_dir = dir.path().join("from-env");
    let o = bin().args(["scenario", "basic-forms"]).env("POISSONSYM_OUT", &env_dir).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.join("basic-forms.json").exists());
}

#[test]
fn failing_check_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.json");
    std::fs::write(&cfg, r#"{ "scenario": "basic-forms", "tolerances": { "closure": -1.0 } }"#).unwrap();
    let o = run(&["scenario", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL basic-forms/closure"));
}

#[test]
fn config_errors_carry_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"seed\": 1,\n  \"grid\": { \"stepz\": 10 }\n}\n").unwrap();
    let o = run(&["scenario", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("grid.stepz") && err.contains("line 3"), "{err}");

    let e = ScenarioConfig::from_json_str(
        r#"{ "manifold": { "type": "zero", "dim": 2 }, "paths": [ { "type": "covector", "x0": [0, 0], "covector": ["(+ x0", "1"] } ] }"#,
    )
    .unwrap()
    .resolve()
    .unwrap_err();
    assert!(e.to_string().contains("paths[0].covector[0]"), "{e}");
    let e = ScenarioConfig::from_json_str(r#"{ "action": { "type": "c2-circle" }, "momentum_map": ["x0", "x1"] }"#)
        .unwrap()
        .resolve()
        .unwrap_err();
    assert!(e.to_string().contains("momentum_map"), "{e}");
    let e = ScenarioConfig::from_json_str(r#"{ "manifold": { "type": "torus" }, "action": { "type": "c2-circle" } }"#)
        .unwrap()
        .resolve()
        .unwrap_err();
    assert!(e.to_string().contains("action"), "{e}");
}

const C2_CONFIG: &str = r#"{
  "seed": 7,
  "grid": { "steps": 100 },
  "action": { "type": "c2-circle" },
  "momentum_map": ["(* 0.5 (- (+ (^ x2 2) (^ x3 2)) (+ (^ x0 2) (^ x1 2))))"],
  "paths": [
    { "type": "covector", "x0": [1, 0.5, -0.3, 0.8], "covector": ["1", "t", "0", "x0"] },
    { "type": "waypoints", "covectors": [[0, 1, 0, 0], [1, 0, 0, 0], [0.5, 0.5, 0, 1]] }
  ],
  "invariants": {
    "generators": ["(* 2 (- (* x0 x2) (* x1 x3)))", "(* -2 (+ (* x0 x3) (* x1 x2)))", "(- (+ (^ x0 2) (^ x1 2)) (+ (^ x2 2) (^ x3 2)))"],
    "claimed": [
      ["0", "(* 4 (sqrt (+ (^ x0 2) (^ x1 2) (^ x2 2))))", "0"],
      ["(* -4 (sqrt (+ (^ x0 2) (^ x1 2) (^ x2 2))))", "0", "0"],
      ["0", "0", "0"]
    ]
  }
}"#;

#[test]
fn custom_config_runs_and_round_trips() {
    let cfg = ScenarioConfig::from_json_str(C2_CONFIG).unwrap();
    assert_eq!(ScenarioConfig::from_json_str(&cfg.to_json()).unwrap(), cfg);
    let rep = run_scenario(None, &cfg).unwrap();
    let checks: Vec<&str> = rep.records.iter().map(|r| r.check.as_str()).collect();
    for c in ["jacobi", "endpoint-identity", "momentum-cocycle", "exactness", "quotient-bracket"] {
        assert!(checks.contains(&c), "{c} missing from {checks:?}");
    }
    assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
}

#[test]
fn plot_data_samples_integrands() {
    // Zero bracket: the base stays at x0 and ⟨a, X⟩ = ⟨(1, 0), (−x1, x0)⟩ = 1.2.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("plot.json");
    std::fs::write(
        &cfg,
        r#"{
          "grid": { "steps": 10 },
          "manifold": { "type": "zero", "dim": 2 },
          "action": { "type": "generators", "algebra": { "type": "abelian", "dim": 1 },
                      "fields": [["(- 0 x1)", "x0"]], "sign": "anti" },
          "paths": [ { "type": "covector", "x0": [0.4, -1.2], "covector": ["1", "0"] } ]
        }"#,
    )
    .unwrap();
    let o = run(&["plot-data", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path,series,t,value"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 11);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[1], "X_e0");
        assert!((r[2].parse::<f64>().unwrap() - i as f64 / 10.0).abs() < 1e-15);
        assert!((r[3].parse::<f64>().unwrap() - 1.2).abs() < 1e-12);
    }
}
