use std::path::{Path, PathBuf};

use mincontrol_cli::{run_with_env, Outcome, EXIT_INPUT, EXIT_OK, EXIT_UNSOLVED};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn eq7() -> String {
    data("eq7.json").display().to_string()
}

fn no_env(_: &str) -> Option<String> {
    None
}

fn cli(args: &[&str]) -> Outcome {
    let argv = std::iter::once("mincontrol").chain(args.iter().copied());
    run_with_env(argv, no_env)
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--json", "--no-timings"]);
    let out = cli(&all);
    let v = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    (out.code, v)
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn solve_mcp_exact_on_worked_example() {
    let (code, r) = json(&["solve-mcp", "--mode", "exact", &eq7()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["cover"]["indices"], serde_json::json!([2, 3, 4]));
    assert_eq!(r["pattern"], "0***0");
    assert_eq!(r["verification"]["kalman"]["rank"], 5);
    assert_eq!(
        r["instance"]["sets"],
        serde_json::json!([[1, 5], [1, 4], [2, 5], [3, 5], [1, 2]])
    );
}

#[test]
fn golden_report() {
    let out = cli(&["solve-mcp", "--mode", "exact", &eq7(), "--json", "--no-timings"]);
    assert_eq!(out.code, EXIT_OK);
    let golden = data("eq7_solve_mcp.golden.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &out.stdout).unwrap();
    }
    let expected = std::fs::read_to_string(&golden).expect("golden file; regenerate with UPDATE_GOLDEN=1");
    assert_eq!(out.stdout, expected);
}

#[test]
fn json_is_byte_identical_across_runs() {
    for args in [
        vec!["solve-mcp", "--mode", "greedy"],
        vec!["compare"],
        vec!["oracle"],
        vec!["solve-mcp", "--perturb", "1e-10", "--seed", "7"],
    ] {
        let mut a = args.clone();
        let path = eq7();
        a.extend([path.as_str(), "--json", "--no-timings"]);
        assert_eq!(cli(&a), cli(&a), "{args:?}");
    }
}

#[test]
fn reports_match_schema() {
    let schema = validator();
    let dir = tempfile::tempdir().unwrap();
    let no_loops = write_temp(&dir, "z.txt", "1 1\n0 0\n");
    let cases: Vec<Vec<String>> = vec![
        vec!["solve-mcp".into(), eq7()],
        vec!["solve-mcp".into(), "--mode".into(), "greedy".into(), eq7()],
        vec!["solve-mcp".into(), "--perturb".into(), "1e-10".into(), "--seed".into(), "1".into(), eq7()],
        vec!["solve-mscp".into(), eq7()],
        vec!["verify".into(), eq7(), "--b".into(), "0,1,1,1,0".into()],
        vec!["verify".into(), eq7(), "--b".into(), "0,1,0,0,0".into(), "--method".into(), "pbh-vec".into()],
        vec!["oracle".into(), eq7()],
        vec!["compare".into(), eq7()],
        vec!["eig".into(), eq7()],
        vec!["solve-mscp".into(), no_loops],
        vec!["eig".into(), "/nonexistent/file.json".into()],
    ];
    for case in cases {
        for timings in [true, false] {
            let mut args: Vec<&str> = case.iter().map(String::as_str).collect();
            args.push("--json");
            if !timings {
                args.push("--no-timings");
            }
            let out = cli(&args);
            let v: Value = serde_json::from_str(&out.stdout).unwrap();
            let errors: Vec<String> = schema.iter_errors(&v).map(|e| e.to_string()).collect();
            assert!(errors.is_empty(), "{args:?}: {errors:?}");
        }
    }
    // The schema is not vacuous.
    let (_, mut v) = json(&["solve-mcp", &eq7()]);
    v["cover"]["indices"] = serde_json::json!([0]);
    assert!(!schema.is_valid(&v));
}

#[test]
fn compare_reports_dominance() {
    let (code, r) = json(&["compare", &eq7()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["mcp"]["size"], 3);
    assert_eq!(r["mscp"]["size"], 2);
    assert_eq!(r["mscp"]["pattern"], "0*0*0");
    assert_eq!(r["dominance"], true);
    assert_eq!(r["extra_states"], 1);
}

#[test]
fn solve_mscp_on_worked_example() {
    let (code, r) = json(&["solve-mscp", &eq7()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["pattern"], "0*0*0");
    assert_eq!(r["non_top_linked"], 2);
    let ntl: Vec<&Value> = r["components"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["top_linked"] == false)
        .map(|c| &c["states"])
        .collect();
    assert_eq!(ntl, vec![&serde_json::json!([2]), &serde_json::json!([4])]);
}

#[test]
fn missing_self_loop_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "a.txt", "# zero at (2,2)\n1 0.5\n0.25 0\n");
    let out = cli(&["solve-mscp", &p]);
    assert_eq!(out.code, EXIT_UNSOLVED);
    assert!(out.stderr.contains("diagonal entry (2, 2) is zero"), "{}", out.stderr);
}

#[test]
fn perturbation_reaches_structural_support() {
    let (code, r) = json(&["solve-mcp", "--perturb", "1e-10", "--seed", "11", &eq7()]);
    assert!(code == EXIT_OK || code == EXIT_UNSOLVED);
    assert_eq!(r["cover"]["indices"], serde_json::json!([2, 4]));
    assert_eq!(r["input"]["perturbation"]["seed"], 11);
    // The same seed without noise on zeros leaves the input digest alone.
    let (_, plain) = json(&["solve-mcp", &eq7()]);
    assert_eq!(r["input"]["sha256"], plain["input"]["sha256"]);
}

#[test]
fn verify_methods() {
    for method in ["pbh-eig", "pbh-vec", "kalman", "all"] {
        let (code, r) = json(&["verify", &eq7(), "--b", "0,1,1,1,0", "--method", method]);
        assert_eq!(code, EXIT_OK, "{method}");
        assert_eq!(r["verification"]["controllable"], true);
        let (code, r) = json(&["verify", &eq7(), "--b", "0,1,0,0,0", "--method", method]);
        assert_eq!(code, EXIT_UNSOLVED, "{method}");
        assert_eq!(r["status"], "uncontrollable");
    }
    let (_, r) = json(&["verify", &eq7(), "--b", "0,1,0,0,0", "--method", "pbh-vec"]);
    assert_eq!(r["verification"]["pbh_eigenvector"]["violator"], 2);
    assert!(r["verification"].get("kalman").is_none());
}

#[test]
fn verify_accepts_complex_entries() {
    let (code, r) = json(&["verify", &eq7(), "--b", "0, 1:1, 1, -1:0.5, 0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["b"][1], serde_json::json!([1.0, 1.0]));
    assert_eq!(r["b"][3], serde_json::json!([-1.0, 0.5]));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let short_basis = write_temp(
        &dir,
        "b.json",
        r#"{"n": 2, "matrix": [[1, 0], [0, 2]],
            "eigenbasis": {"eigenvalues": [1], "eigenvectors": [[1, 0]]}}"#,
    );
    let bad_json = write_temp(&dir, "c.json", "{\"n\": 2, \"matrix\": [[1, 0], [0]]}");
    let garbage = write_temp(&dir, "d.json", "{ not json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["eig", "/nonexistent/file.json"],
        vec!["eig", &short_basis],
        vec!["eig", &bad_json],
        vec!["eig", &garbage],
        vec!["verify", &bad_json, "--b", "1,0"],
        vec!["solve-mcp", "--mode", "fastest"],
        vec!["frobnicate"],
        vec!["eig", "--zero-tol", "-1"],
    ];
    let e7 = eq7();
    let more: Vec<Vec<&str>> = vec![
        vec!["verify", &e7, "--b", "1,2"],
        vec!["verify", &e7, "--b", "1,x,0,0,0"],
        vec!["eig", &e7, "--zero-tol", "-1"],
        vec!["eig", &e7, "--tau", "nan"],
    ];
    for args in cases.iter().chain(&more) {
        let out = cli(args);
        assert_eq!(out.code, EXIT_INPUT, "{args:?}: {}", out.stderr);
        assert!(!out.stderr.is_empty());
    }
    let out = cli(&["eig", &short_basis]);
    assert!(out.stderr.contains("eigen"), "{}", out.stderr);
}

#[test]
fn help_and_version_exit_0() {
    let out = cli(&["--help"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("solve-mcp"));
    assert_eq!(cli(&["--version"]).code, EXIT_OK);
}

#[test]
fn tolerance_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let with_tol = write_temp(
        &dir,
        "t.json",
        &std::fs::read_to_string(data("eq7.json"))
            .unwrap()
            .replacen('{', "{\n  \"tolerances\": {\"tau\": 1e-7},", 1),
    );
    let env = |k: &str| match k {
        "MINCONTROL_TOL_TAU" => Some("1e-6".to_string()),
        "MINCONTROL_TOL_ZERO" => Some("1e-11".to_string()),
        _ => None,
    };
    let run = |args: &[&str]| {
        let argv: Vec<&str> = std::iter::once("mincontrol").chain(args.iter().copied()).collect();
        let out = run_with_env(argv, env);
        serde_json::from_str::<Value>(&out.stdout).unwrap()
    };
    let plain = run(&["eig", &eq7(), "--json"]);
    assert_eq!(plain["tolerances"]["tau"], 1e-6);
    assert_eq!(plain["tolerances"]["zero_tol"], 1e-11);
    let file = run(&["eig", &with_tol, "--json"]);
    assert_eq!(file["tolerances"]["tau"], 1e-7);
    assert_eq!(file["tolerances"]["zero_tol"], 1e-11);
    let flag = run(&["eig", &with_tol, "--json", "--tau", "1e-8"]);
    assert_eq!(flag["tolerances"]["tau"], 1e-8);

    let bad_env = run_with_env(["mincontrol", "eig", &eq7()], |k: &str| {
        (k == "MINCONTROL_TOL_GAP").then(|| "tiny".to_string())
    });
    assert_eq!(bad_env.code, EXIT_INPUT);
    assert!(bad_env.stderr.contains("MINCONTROL_TOL_GAP"));
}

#[test]
fn zero_tolerance_changes_the_perturbed_answer() {
    // Perturbation-induced entries sit near 1e-11 relative; a coarse zero
    // threshold hides them and recovers the unperturbed cover.
    let (_, fine) = json(&["solve-mcp", "--perturb", "1e-10", "--seed", "2", &eq7()]);
    let (_, coarse) = json(&["solve-mcp", "--perturb", "1e-10", "--seed", "2", "--zero-tol", "1e-6", &eq7()]);
    assert_eq!(fine["cover"]["size"], 2);
    assert_eq!(coarse["cover"]["indices"], serde_json::json!([2, 3, 4]));
}

#[test]
fn supplied_eigenbasis_skips_the_eigensolve() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(
        &dir,
        "diag.json",
        r#"{"n": 3, "matrix": [[1, 0, 0], [0, 2, 0], [0, 0, 3]],
            "eigenbasis": {"eigenvalues": [[3, 0], [2, 0], [1, 0]],
                           "eigenvectors": [[0, 0, 1], [0, 1, 0], [1, 0, 0]]}}"#,
    );
    let (code, r) = json(&["solve-mcp", &p]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["input"]["eigenbasis"], "supplied");
    assert_eq!(r["eigenvalues"][0], serde_json::json!([3.0, 0.0]));
    assert_eq!(r["pattern"], "***");
    let out = cli(&["solve-mcp", "--perturb", "1e-3", &p]);
    assert_eq!(out.code, EXIT_INPUT);
}

#[test]
fn not_simple_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "i.txt", "1 0\n0 1\n");
    let (code, r) = json(&["solve-mcp", &p]);
    assert_eq!(code, EXIT_UNSOLVED);
    assert_eq!(r["error"]["kind"], "not_simple");
}

#[test]
fn text_output_and_text_matrix_input() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<String> = mincontrol::fixtures::WORKED_EXAMPLE
        .iter()
        .map(|r| r.iter().map(f64::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    let p = write_temp(&dir, "eq7.txt", &rows.join("\n"));
    let out = cli(&["solve-mcp", &p]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("S1={1,5} S2={1,4} S3={2,5} S4={3,5} S5={1,2}"), "{}", out.stdout);
    assert!(out.stdout.contains("cover         {2,3,4} (size 3, optimal)"));
    assert!(out.stdout.contains("pattern       0***0"));
    assert!(out.stdout.contains("time"));
    assert!(!cli(&["solve-mcp", &p, "--no-timings"]).stdout.contains("time"));
}

#[test]
fn greedy_and_oracle() {
    let (code, r) = json(&["solve-mcp", "--mode", "greedy", &eq7()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["cover"]["size"], 4);
    assert_eq!(r["cover"]["exact"], false);
    let (code, r) = json(&["oracle", &eq7()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["min_support_size"], 3);
    assert!(r["optimal_supports"].as_array().unwrap().contains(&serde_json::json!([2, 3, 4])));
    let (code, r) = json(&["oracle", "--n-limit", "4", &eq7()]);
    assert_eq!(code, EXIT_UNSOLVED);
    assert_eq!(r["error"]["kind"], "too_large");
}
