use std::path::Path;
use std::process::{Command, Output};

use harmonic_core::growth::growth_report_to;
use harmonic_core::inequalities::SearchOutcome;
use harmonic_core::io::{growth_report_from_json, growth_report_to_json, lattice_function_from_json, verdict_from_json, verdict_to_json};
use harmonic_core::rational::{binomial_rational, ratio};
use serde_json::Value;

fn harm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harm")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

const XY: &str = r#"{"d":2,"terms":[{"alpha":[1,1],"coeff":"1"}]}"#;
const X_1D: &str = r#"{"d":1,"terms":[{"alpha":[1],"coeff":"1"}]}"#;

#[test]
fn version_and_help() {
    let v = harm(&["--version"]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).contains(&format!("schema version {}", harmonic_core::SCHEMA_VERSION)));
    assert_eq!(code(&harm(&["--help"])), 0);
    assert_eq!(code(&harm(&["check", "--help"])), 0);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(code(&harm(&[])), 3);
    assert_eq!(code(&harm(&["frobnicate"])), 3);
    // malformed and non-finite decimals
    assert_eq!(code(&harm(&["check", "binomial", "--n", "100", "--k", "3", "--P", "2", "--eps", "1/0"])), 3);
    assert_eq!(code(&harm(&["check", "binomial", "--n", "100", "--k", "3", "--P", "2", "--eps", "0.1.2"])), 3);
    let o = harm(&["check", "three-circles", "--n", "20", "--eps", "1/10"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("required"));
}

#[test]
fn decimal_parameters_are_exact() {
    let a = stdout(&harm(&["check", "binomial", "--n", "100", "--k", "4", "--P", "1.5", "--eps", "0.1"]));
    let b = stdout(&harm(&["check", "binomial", "--n", "100", "--k", "4", "--P", "3/2", "--eps", "1/10"]));
    assert_eq!(a, b);
}

#[test]
fn continuous_single_term() {
    let o = harm(&["check", "continuous", "--poly", X_1D, "--t", "3"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "holds");
    assert_eq!(v["lhs"], "6");
    assert!(v["main"]["lo"].is_string() && v["error_term"]["hi"].is_string() && v["margin"].is_string());
}

#[test]
fn growth_matches_golden_file() {
    let o = harm(&["growth", "--function", &data("xy_r6.json"), "--n-max", "6", "--newton"]);
    assert_eq!(code(&o), 0);
    let golden = std::fs::read_to_string(data("xy_r6_growth.json")).unwrap();
    assert_eq!(stdout(&o).trim(), golden.trim());
    let report = growth_report_from_json(&golden).unwrap();
    // Q_{xy}(n) = (1/2) binom(n, 2)
    for n in 0..=6u64 {
        assert_eq!(report.values[n as usize], ratio(1, 2) * binomial_rational(n, 2));
    }
    let f = lattice_function_from_json(&std::fs::read_to_string(data("xy_r6.json")).unwrap(), false).unwrap();
    assert_eq!(report, growth_report_to(&f, 6).unwrap());
}

#[test]
fn growth_csv_and_poly_input() {
    let o = harm(&["growth", "--poly", XY, "--n-max", "4", "--format", "csv", "--diffs", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "n,Q,d1,d2\n0,0,0,1/2\n1,0,1/2,1/2\n2,1/2,1,1/2\n3,3/2,3/2,\n4,3,,\n");
    assert_eq!(code(&harm(&["growth", "--poly", XY])), 3);
}

#[test]
fn sparse_flag_controls_omission() {
    let f = r#"{"d":1,"R":2,"entries":[[1,"1"],[2,"2"]]}"#;
    assert_eq!(code(&harm(&["growth", "--function", f])), 3);
    let o = harm(&["growth", "--function", f, "--sparse"]);
    assert_eq!(code(&o), 0);
    let r = growth_report_from_json(&stdout(&o)).unwrap();
    // walks from 0: Q(1) = (0 + 1)/2 with u(-1) = 0
    assert_eq!(r.values[1], ratio(1, 2));
}

#[test]
fn json_round_trips() {
    let outputs = [
        harm(&["check", "three-circles", "--poly", XY, "--n", "20", "--eps", "1/10"]),
        harm(&["check", "ratio-125", "--poly", XY, "--n", "5", "--delta", "1/8"]),
        harm(&["check", "aspect", "--poly", XY, "--n", "16", "--p", "2", "--P", "2", "--eps", "1/4", "--derive-alpha"]),
        harm(&["check", "no-error", "--poly", XY, "--n", "20", "--eps", "0"]),
    ];
    for o in &outputs {
        assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(o);
        let v = verdict_from_json(&text).unwrap();
        assert_eq!(verdict_to_json(&v), text.trim());
        // hypothesis status accompanies every verdict
        assert!(String::from_utf8_lossy(&o.stderr).contains("hypotheses"));
    }
    let g = stdout(&harm(&["growth", "--poly", XY, "--n-max", "5"]));
    assert_eq!(growth_report_to_json(&growth_report_from_json(&g).unwrap()), g.trim());
    let s = stdout(&harm(&["search", "counterexample", "--C", "1000000", "--eps", "1/10", "--k-max", "8"]));
    let outcome: SearchOutcome = serde_json::from_str(&s).unwrap();
    assert_eq!(serde_json::to_string(&outcome).unwrap(), s.trim());
}

#[test]
fn explore_gate() {
    let gated = harm(&["check", "three-circles", "--poly", XY, "--n", "5", "--eps", "1/10"]);
    assert_eq!(code(&gated), 3);
    assert!(String::from_utf8_lossy(&gated.stderr).contains("n > 16: NOT met"));
    let explored = harm(&["check", "three-circles", "--poly", XY, "--n", "5", "--eps", "1/10", "--explore"]);
    assert_eq!(code(&explored), 0);
    let v = verdict_from_json(&stdout(&explored)).unwrap();
    assert!(!v.within_hypotheses);
    // not harmonic
    let x2 = r#"{"d":2,"terms":[{"alpha":[2,0],"coeff":"1"}]}"#;
    assert_eq!(code(&harm(&["check", "three-circles", "--poly", x2, "--n", "20", "--eps", "0"])), 3);
}

#[test]
fn search_finds_violation() {
    let o = harm(&["search", "counterexample", "--C", "1", "--eps", "1/5", "--k-max", "25", "--n0", "100"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"], "found");
    assert_eq!(v["certificate"]["violation_certified"], true);
    let none = harm(&["search", "counterexample", "--C", "1000000", "--eps", "1/10", "--k-max", "8"]);
    assert_eq!(code(&none), 0);
    assert_eq!(code(&harm(&["search", "counterexample", "--C", "1", "--eps", "1/5", "--k-max", "5", "--window", "sideways"])), 3);
    let ranged = harm(&["search", "counterexample", "--C", "1000000", "--eps", "1/10", "--k-max", "4", "--window", "range:5:9"]);
    assert_eq!(code(&ranged), 0);
}

#[test]
fn sharp_error_and_binomial() {
    let o = harm(&["check", "binomial", "--n", "100", "--k", "10", "--P", "2", "--eps", "1/10"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["plain"]["status"], "holds");
    assert_eq!(v["max_form"]["check"], "binomial-max");
    let s = harm(&["check", "sharp-error", "--poly", XY, "--n", "10", "--C", "1", "--eps", "1/10"]);
    assert!(matches!(code(&s), 0 | 1));
}

#[test]
fn seeded_outputs_are_reproducible() {
    let a = harm(&["random-harmonic", "--d", "3", "--degree", "4", "--seed", "7"]);
    let b = harm(&["random-harmonic", "--d", "3", "--degree", "4", "--seed", "7"]);
    let c = harm(&["random-harmonic", "--d", "3", "--degree", "4", "--seed", "8"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let mc = |threads: &str| {
        stdout(&harm(&["--threads", threads, "monte-carlo", "--poly", XY, "--n", "8", "--samples", "20000", "--seed", "3"]))
    };
    let one = mc("1");
    assert_eq!(one, mc("4"));
    let v: Value = serde_json::from_str(&one).unwrap();
    // exact Q(8) = 14; generous bound for 20000 samples
    assert!((v["mean"].as_f64().unwrap() - 14.0).abs() < 6.0 * v["stderr"].as_f64().unwrap());
}

#[test]
fn conjecture_scan_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = harm(&[
        "--threads", "2", "conjecture", "scan", "--k", "2", "--C", "1", "--eps", "1/10", "--n-from", "3", "--n-to", "6", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(matches!(code(&o), 0..=2));
    let json: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 4);
    let csv_text = std::fs::read_to_string(&path).unwrap();
    assert!(csv_text.starts_with("n,Q_n,Q_2n,Q_4n,ratio_num,ratio_den,residual_lo,residual_hi,bound_lo,bound_hi,violation\n"));
    assert_eq!(csv_text.lines().count(), 5);
    let single = harm(&["conjecture", "scan", "--k", "2", "--C", "1", "--eps", "1/10", "--n-from", "3", "--n-to", "6", "--format", "csv"]);
    assert_eq!(stdout(&single), csv_text);
    let empty = harm(&["conjecture", "scan", "--k", "2", "--C", "1", "--eps", "1/10", "--n-from", "9", "--n-to", "3"]);
    assert_eq!(code(&empty), 0);
    assert!(String::from_utf8_lossy(&empty.stderr).contains("no data"));
}

#[test]
fn liouville_commands() {
    let o = harm(&["liouville", "degree-bound", "--poly", XY]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bound"], 3);
    let zero = harm(&["liouville", "vanishing", "--poly", r#"{"d":2,"terms":[]}"#]);
    assert_eq!(code(&zero), 0);
    let s3 = r#"{"d":2,"terms":[{"alpha":[3,0],"coeff":"1"},{"alpha":[1,2],"coeff":"-3"}]}"#;
    let w = harm(&["liouville", "vanishing", "--poly", s3]);
    assert_eq!(code(&w), 1);
    let v: Value = serde_json::from_str(&stdout(&w)).unwrap();
    assert_eq!(v["witness"].as_array().unwrap().len(), 2);
}

#[test]
fn monotonicity_command() {
    let o = harm(&["check", "monotonicity", "--function", &data("xy_r6.json")]);
    assert_eq!(code(&o), 0);
    // u = 1 at the origin only is not harmonic, and Q(1) < Q(0)
    let spike = r#"{"d":1,"R":2,"entries":[[0,"1"]]}"#;
    let o = harm(&["check", "monotonicity", "--function", spike, "--sparse"]);
    assert_eq!(code(&o), 1);
}
