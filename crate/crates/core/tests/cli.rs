use std::path::PathBuf;

use isotropy::cli::{run, Outcome};

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    root.join(format!("{name}.json")).to_string_lossy().into_owned()
}

fn isotropy(args: &[&str]) -> Outcome {
    run(std::iter::once("isotropy").chain(args.iter().copied()))
}

fn temp_scenario(tag: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("isotropy-{tag}-{}.json", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn theorem_on_f1() {
    let out = isotropy(&["check-theorem", &fixture("f1")]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("PASS  pullback-omega = 0"));
}

#[test]
fn omega_and_lambda_values() {
    let out = isotropy(&["--format", "json", "omega", &fixture("f1")]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["checks"][0]["value"], "-1");
    let out = isotropy(&["check-cartan", &fixture("f1")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("cartan = -1"));
}

#[test]
fn exit_codes() {
    let f1 = std::fs::read_to_string(fixture("f1")).unwrap();
    let bad_rational = temp_scenario("parse", &f1.replace("\"alpha\": \"-1\"", "\"alpha\": \"3//4\""));
    let out = isotropy(&["validate", &bad_rational]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("curve.alpha, column 3"), "{}", out.stderr);

    let zero_alpha = temp_scenario("zero", &f1.replace("\"alpha\": \"-1\"", "\"alpha\": \"z\""));
    let out = isotropy(&["--format", "json", "validate", &zero_alpha]);
    assert_eq!(out.code, 3);
    assert!(out.stdout.contains("vanishes at 0"));

    let missing = isotropy(&["validate", "/nonexistent/scenario.json"]);
    assert_eq!(missing.code, 2);
    assert_eq!(isotropy(&["no-such-command"]).code, 2);
    assert_eq!(isotropy(&["--help"]).code, 0);
}

#[test]
fn failing_check_exits_one() {
    // 1/z has residue 1 at 0 and -1 at inf; a form with a pole off the
    // split field is rejected, which is also a failed check
    let f1 = std::fs::read_to_string(fixture("f1")).unwrap();
    let text = f1.replacen("\"name\": \"f1\",", "\"name\": \"f1\",\n  \"form\": \"1/(z^2-2)\",", 1);
    let out = isotropy(&["residue-sum", &temp_scenario("irrational", &text)]);
    assert_eq!(out.code, 1, "{}", out.stdout);
    assert!(out.stdout.contains("does not split"));
}

#[test]
fn residue_sum_lists_every_pole() {
    let f1 = std::fs::read_to_string(fixture("f1")).unwrap();
    let text = f1.replacen("\"name\": \"f1\",", "\"name\": \"f1\",\n  \"form\": \"1/(z^2+1)\",", 1);
    let out = isotropy(&["--format", "json", "residue-sum", &temp_scenario("split", &text)]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let r = &v["checks"][0]["details"]["residues"];
    assert_eq!(r["i"], "-1/2*i");
    assert_eq!(r["-i"], "1/2*i");
    assert_eq!(r["inf"], "0");
}

#[test]
fn suites_are_reproducible() {
    let args = ["--format", "json", "random-suite", "--seed", "7", "--trials", "6", &fixture("f2")];
    let a = isotropy(&args);
    let b = isotropy(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let c = isotropy(&["corrupt-suite", "--seed", "7", "--trials", "5", &fixture("f1")]);
    assert_eq!(c.code, 0, "{}", c.stdout);
    assert!(c.stdout.contains("all-detected = 5/5"));
}
