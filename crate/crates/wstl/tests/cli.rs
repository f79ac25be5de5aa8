//! End-to-end tests of the command line front end, including exit codes
//! and output file stability.

use std::fs;
use std::path::Path;

use wstl::cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["wstl".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

#[test]
fn monitor_reports_discounted_robustness() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s5.csv");
    write(&csv, "s\n1\n0.5\n0\n0\n");
    let (code, out, _) = run(&[
        "monitor",
        "F[0,3]{disc 0.5}(s >= 0)",
        csv.to_str().unwrap(),
        "--engine",
        "weighted-agm",
    ]);
    assert_eq!(out, "0.666667\nYes\n");
    assert_eq!(code, 0);
}

#[test]
fn monitor_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    write(&csv, "s\n-1\n-1\n");
    let (code, out, _) = run(&["monitor", "G[0,1] (s >= 0)", csv.to_str().unwrap()]);
    assert!(out.ends_with("No\n"));
    assert_eq!(code, 1);

    write(&csv, "s\n0\n0\n");
    let (code, out, _) = run(&["monitor", "G[0,1] (s >= 0)", csv.to_str().unwrap()]);
    assert!(out.ends_with("Inconclusive\n"));
    assert_eq!(code, 2);
}

#[test]
fn monitor_rejects_short_signals_with_exit_65() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    write(&csv, "s\n1\n1\n");
    let (code, _, err) = run(&["monitor", "G[0,7] (F[0,3] (s >= 0))", csv.to_str().unwrap()]);
    assert_eq!(code, 65);
    assert!(err.contains("needs samples up to index 10"), "stderr: {err}");
}

#[test]
fn usage_errors_exit_64() {
    let (code, _, _) = run(&["monitor"]);
    assert_eq!(code, 64);
    let (code, _, _) = run(&["zap"]);
    assert_eq!(code, 64);
}

#[test]
fn compare_ranks_the_minimally_violating_trajectory_first() {
    let dir = tempfile::tempdir().unwrap();
    let c1 = dir.path().join("c1.csv");
    let c2 = dir.path().join("c2.csv");
    let mut c1_text = String::from("x,y\n");
    let mut c2_text = String::from("x,y\n");
    for t in 0..8 {
        let x = t as f64 + 0.5;
        c1_text.push_str(&format!("{x},1\n"));
        let y = if t == 3 || t == 4 { 3 } else { 1 };
        c2_text.push_str(&format!("{x},{y}\n"));
    }
    write(&c1, &c1_text);
    write(&c2, &c2_text);

    let formula = dir.path().join("car.wstl");
    write(
        &formula,
        "# reach the goal, avoid the blockage, keep the lane\n\
         (F[0,7] ((x - 7 >= 0 {bool 1}) && (8 - x >= 0 {bool 1}) && (y >= 0 {bool 1}) \
          && (2 - y >= 0 {bool 1})))\n\
         &&[1,2,1]\n\
         (G[0,7] !((x - 3 >= 0 {bool 1}) && (5 - x >= 0 {bool 1}) && (y >= 0 {bool 1}) \
          && (2 - y >= 0 {bool 1})))\n\
         && (G[0,7] (2 - y >= 0 {bool 1}))\n",
    );

    let (code, out, _) = run(&[
        "compare",
        formula.to_str().unwrap(),
        c1.to_str().unwrap(),
        c2.to_str().unwrap(),
        "--engine",
        "weighted-agm",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("c2.csv"), "ranking: {out}");
    assert!(lines[0].contains("-0.0625000"));
    assert!(lines[1].contains("c1.csv"));
    assert!(lines[1].contains("-0.125000"));
    // both violate: exit reflects the top verdict
    assert_eq!(code, 1);
}

#[test]
fn parse_echoes_canonical_form() {
    let (code, out, _) = run(&["parse", "(F[4,6](s <= 1)) ||[10,1] (F[3,6](s >= 2))"]);
    assert_eq!(code, 0);
    assert_eq!(out, "(F[4,6] (-s + 1 >= 0)) ||[10,1] (F[3,6] (s - 2 >= 0))\n");

    // canonical form is a fixed point
    let (code, again, _) = run(&["parse", out.trim_end()]);
    assert_eq!(code, 0);
    assert_eq!(again, out);

    let (code, out, _) = run(&["parse", "a && b || c"]);
    assert_eq!(code, 65);
    assert!(out.is_empty());

    let (code, out, _) = run(&["parse", "--print-ast", "s >= 1"]);
    assert_eq!(code, 0);
    assert!(out.contains("Predicate"));
}

#[test]
fn monitor_trace_dumps_per_node_values() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    write(&csv, "s\n1\n2\n");
    let trace = dir.path().join("trace.json");
    let (code, _, _) = run(&[
        "monitor",
        "G[0,1] (s >= 0)",
        csv.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    // weighted default engine: a satisfied step counts with the hold-out
    // weight 1/2, so the root is min(0.5 * 1, 0.5 * 2)
    assert_eq!(parsed["root"]["0"], 0.5);
    assert_eq!(parsed["root.0"]["1"], 2.0);
}

const TINY_CONFIG: &str = r#"{
  "system": {"type": "unicycle"},
  "q0": [1.0, 1.0, 0.7853981633974483],
  "T": 6,
  "formula": "F[1,6] ((x - 3 >= 0) && (y - 1 >= 0))",
  "lambda": 0.05,
  "beta": 10.0,
  "epsilon": 0.0,
  "optimizer": {"restarts": 3, "max_iters": 120, "seed": 7}
}
"#;

#[test]
fn synthesize_writes_stable_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("problem.json");
    write(&config, TINY_CONFIG);

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let (code, stdout, _) = run(&[
        "synthesize",
        config.to_str().unwrap(),
        "--out-dir",
        out_a.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("satisfied\tYes"));
    let (code, _, _) = run(&[
        "synthesize",
        config.to_str().unwrap(),
        "--out-dir",
        out_b.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let csv_a = fs::read_to_string(out_a.join("trajectory.csv")).unwrap();
    let csv_b = fs::read_to_string(out_b.join("trajectory.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "trajectory output must be reproducible");
    assert!(csv_a.starts_with("t,x,y,θ,v,w\n"));
    assert_eq!(csv_a.lines().count(), 8);
    // final row has state only, no input cells
    assert!(csv_a.lines().last().unwrap().ends_with(",,"));

    let summary_a: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_a.join("summary.json")).unwrap()).unwrap();
    let summary_b: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_b.join("summary.json")).unwrap()).unwrap();
    for field in [
        "objective",
        "robustness_smooth",
        "robustness_exact",
        "satisfied",
        "iterations",
    ] {
        assert_eq!(summary_a[field], summary_b[field], "field {field}");
    }
    assert_eq!(summary_a["satisfied"], "Yes");
    assert!(summary_a["robustness_exact"].as_f64().unwrap() > 0.0);
    assert!(summary_a["wall_time_ms"].is_u64());
}

#[test]
fn synthesize_requires_the_smooth_engine() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("problem.json");
    write(
        &config,
        &TINY_CONFIG.replace("\"beta\": 10.0,", "\"engine\": \"weighted-agm\",\n  \"beta\": 10.0,"),
    );
    let (code, _, err) = run(&[
        "synthesize",
        config.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code, 65);
    assert!(err.contains("weighted-smooth"));
}

#[test]
fn gradcheck_reports_small_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("problem.json");
    write(&config, TINY_CONFIG);
    let (code, out, _) = run(&["gradcheck", config.to_str().unwrap()]);
    assert_eq!(code, 0);
    let value: f64 = out
        .trim()
        .rsplit('\t')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(value < 1e-4, "deviation {value}");
}

#[test]
fn formula_arguments_accept_files_with_comments() {
    let dir = tempfile::tempdir().unwrap();
    let formula = dir.path().join("spec.wstl");
    write(&formula, "# always nonnegative\nG[0,1] (s >= 0)\n");
    let csv = dir.path().join("s.csv");
    write(&csv, "s\n1\n1\n");
    let (code, out, _) = run(&["monitor", formula.to_str().unwrap(), csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.ends_with("Yes\n"));
}
