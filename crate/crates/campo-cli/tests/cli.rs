//! End-to-end tests of the `campo` binary: exit codes, text output, and the
//! stability of the JSON report layout.

use std::io::Write;
use std::process::{Command, Output};

fn campo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_campo"))
        .args(args)
        .output()
        .expect("the campo binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("the process exits normally")
}

fn json_report(args: &[&str]) -> (serde_json::Value, i32) {
    let mut with_json = vec!["--json"];
    with_json.extend_from_slice(args);
    let out = campo(&with_json);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out))
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", stdout(&out)));
    (doc, code(&out))
}

fn verdict(doc: &serde_json::Value, name: &str) -> serde_json::Value {
    doc["verdicts"]
        .as_array()
        .expect("verdicts is an array")
        .iter()
        .find(|v| v["name"] == name)
        .unwrap_or_else(|| panic!("no verdict named {name} in {doc}"))["value"]
        .clone()
}

#[test]
fn first_integral_verifies_the_product_example() {
    let out = campo(&["first-integral", "--field", "x:x, y:1", "--fn", "x*exp(-y)"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("is_first_integral: true"));
}

#[test]
fn first_integral_falsifies_with_the_lie_derivative_shown() {
    let out = campo(&["first-integral", "--field", "x:x, y:1", "--fn", "x*y"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("is_first_integral: false"));
    assert!(stdout(&out).contains("lie(X, g)"));
}

#[test]
fn parse_errors_exit_two() {
    let out = campo(&["first-integral", "--field", "x:x, y:1", "--fn", "x*exp(-y"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("syntax error"));

    let out = campo(&["validate-family", "--tag", "S4", "--lambda", "z", "--m", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("needs the integer parameter"));

    let out = campo(&["no-such-command"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn validate_family_accepts_and_rejects_the_pinned_shapes() {
    let accept = campo(&[
        "validate-family", "--tag", "BIII", "--m", "1", "--n", "1", "--l", "1",
        "--p", "1", "--a", "1", "--lambda", "1+z",
    ]);
    assert_eq!(code(&accept), 0, "stderr: {}", stderr(&accept));
    assert!(stdout(&accept).contains("accepted: true"));
    assert!(stdout(&accept).contains("star_condition"));

    let reject = campo(&[
        "validate-family", "--tag", "BIII", "--m", "1", "--n", "1", "--l", "1",
        "--p", "1", "--a", "1", "--lambda", "2+z",
    ]);
    assert_eq!(code(&reject), 1);
    assert!(stdout(&reject).contains("accepted: false"));
}

#[test]
fn the_json_report_layout_is_stable() {
    let (doc, exit) = json_report(&["first-integral", "--field", "x:x, y:1", "--fn", "x*exp(-y)"]);
    assert_eq!(exit, 0);
    let obj = doc.as_object().expect("report is an object");
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["certificates", "command", "diagnostics", "inputs", "schema", "verdicts"]
    );
    assert_eq!(doc["schema"], "campo.report.v1");
    assert_eq!(doc["command"], "first-integral");
    for v in doc["verdicts"].as_array().unwrap() {
        assert!(v["name"].is_string());
        assert!(v["value"].is_boolean() || v["value"].is_string());
    }
}

#[test]
fn darboux_reports_the_invariant_curves() {
    let (doc, exit) = json_report(&[
        "darboux", "--field", "x:x^2, y:-(2*x*y + 1)", "--lmax", "1",
    ]);
    assert_eq!(exit, 0);
    assert_eq!(verdict(&doc, "found"), true);
    let curves = doc["certificates"]["invariant_curves"].as_array().unwrap();
    let names: Vec<&str> = curves.iter().map(|c| c["curve"].as_str().unwrap()).collect();
    assert!(names.contains(&"x"));
    assert!(names.contains(&"x*y + 1"));
}

#[test]
fn rational_integral_recovers_the_pinned_answer() {
    let (doc, exit) = json_report(&[
        "rational-integral", "--field", "x:x^2, y:-(2*x*y + 1)", "--lmax", "1",
    ]);
    assert_eq!(exit, 0);
    assert_eq!(verdict(&doc, "integral"), "x^2*y + x");
    assert_eq!(verdict(&doc, "verified_exactly"), true);

    let (doc, exit) = json_report(&["rational-integral", "--field", "x:2*x, y:-3*y", "--lmax", "0"]);
    assert_eq!(exit, 0);
    assert_eq!(verdict(&doc, "integral"), "x^3*y^2");
}

#[test]
fn uv_form_extracts_and_cross_checks_the_exponent() {
    let (doc, exit) = json_report(&[
        "uv-form", "--field", "x:x^2, y:1 - x*y", "--m", "1", "--n", "1",
    ]);
    assert_eq!(exit, 0);
    assert_eq!(verdict(&doc, "riccati_shape"), true);
    assert_eq!(doc["certificates"]["k"], 1);
    let notes = doc["diagnostics"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("agrees")));
}

#[test]
fn uv_form_falsifies_a_field_that_does_not_descend() {
    let out = campo(&["uv-form", "--field", "x:y, y:x", "--m", "1", "--n", "2"]);
    assert_eq!(code(&out), 1, "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("riccati_shape: false"));
}

#[test]
fn eta_factors_and_reports_the_vanishing_case() {
    let (doc, exit) = json_report(&["eta", "--field", "x:x, y:2*y", "--m", "1", "--n", "1"]);
    assert_eq!(exit, 0);
    assert_eq!(verdict(&doc, "factored"), true);
    assert_eq!(doc["certificates"]["contraction"], "3*x*y");

    let out = campo(&["eta", "--field", "x:2*x, y:-3*y", "--m", "3", "--n", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("rational first integral"));
}

#[test]
fn time_form_contracts_to_one_with_a_transcendental_factor() {
    let out = campo(&[
        "time-form", "--field", "x:x, y:2*y", "--f", "exp(x^2*y)", "--m", "1", "--n", "1",
    ]);
    assert_eq!(code(&out), 0, "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("contraction_is_one: true"));
}

#[test]
fn decompose_reports_the_chart_data_of_the_product_family() {
    let (doc, exit) = json_report(&[
        "decompose", "--family",
        r#"{"tag":"B","f":"exp(-x*y)","m":1,"n":1,"l":0,"p":"0","c":"1","a":"1"}"#,
    ]);
    assert_eq!(exit, 0);
    assert_eq!(verdict(&doc, "reassembles"), true);
    assert_eq!(verdict(&doc, "scaling_relation"), true);
    assert_eq!(doc["certificates"]["omega"], "1");
    assert_eq!(doc["certificates"]["j"], 0);
    assert_eq!(doc["certificates"]["r"], "v");
}

#[test]
fn decompose_rejects_a_family_without_the_split() {
    let out = campo(&["decompose", "--family", r#"{"tag":"S1","a":"z","b":"1"}"#]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not one of the decomposition forms"));
}

#[test]
fn flow_cross_validates_the_closed_form() {
    let (doc, exit) = json_report(&[
        "flow", "--family",
        r#"{"tag":"B","f":"exp(-x*y)","m":1,"n":1,"c":"1","a":"1"}"#,
        "--z0", "1,1", "--t", "1+i", "--exact", "--conserved", "x*exp(-x*y)",
    ]);
    assert_eq!(exit, 0);
    assert_eq!(verdict(&doc, "completed"), true);
    assert_eq!(verdict(&doc, "exact_matches_numeric"), true);
    let dev = doc["certificates"]["exact_deviation"].as_f64().unwrap();
    assert!(dev < 1e-9, "deviation {dev}");
    let drift = doc["certificates"]["conserved_drift"].as_f64().unwrap();
    assert!(drift < 1e-8, "drift {drift}");
}

#[test]
fn flow_detects_blow_up_and_exits_one() {
    let out = campo(&["flow", "--field", "x:x^2, y:0", "--z0", "1,0", "--t", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("completed: false"));
    assert!(stdout(&out).contains("blowup"));
}

#[test]
fn flow_trace_emits_parseable_json_lines() {
    let out = campo(&[
        "flow", "--field", "x:x, y:1", "--z0", "1,0", "--t", "2", "--trace",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() > 2);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).expect("each line is JSON");
        assert!(v.get("t").is_some() || v.get("status").is_some());
    }
    let last: serde_json::Value = serde_json::from_str(lines.last().unwrap()).unwrap();
    assert_eq!(last["status"], "completed");
}

#[test]
fn probe_flags_the_quadratic_blow_up_and_clears_a_complete_field() {
    let (doc, exit) = json_report(&[
        "probe", "--field", "x:x^2, y:0", "--z0", "1,0", "--rmax", "5", "--rays", "8",
    ]);
    assert_eq!(exit, 1);
    assert_eq!(verdict(&doc, "blowup_detected"), true);
    let rays = doc["certificates"]["rays"].as_array().unwrap();
    let reached = rays[0]["reached"].as_f64().unwrap();
    assert!((0.9..=1.1).contains(&reached), "radius {reached}");

    let (doc, exit) = json_report(&[
        "probe", "--family", r#"{"tag":"S2","lambda":"1","mu":"-2"}"#,
        "--z0", "1,1", "--rmax", "3", "--rays", "4",
    ]);
    assert_eq!(exit, 0);
    assert_eq!(verdict(&doc, "all_rays_completed"), true);
    assert_eq!(verdict(&doc, "blowup_detected"), false);
}

#[test]
fn probe_tracks_the_canonical_integral_of_a_monomial_family() {
    let (doc, exit) = json_report(&[
        "probe", "--family", r#"{"tag":"S4","lambda":"z","m":1,"n":1}"#,
        "--z0", "1,2", "--rmax", "2", "--rays", "4",
    ]);
    assert_eq!(exit, 0, "{doc}");
    assert!(doc["inputs"]["conserved"].as_str().unwrap().contains("canonical"));
    let drift: f64 = verdict(&doc, "max_conserved_drift")
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!(drift < 1e-8, "drift {drift}");
}

#[test]
fn field_files_round_trip() {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    write!(
        file,
        r#"{{"vars": ["x", "y"], "P": "x^2*exp(-y)", "Q": "x*exp(-y)"}}"#
    )
    .unwrap();
    let path = file.path().to_str().unwrap();
    let out = campo(&["first-integral", "--field-file", path, "--fn", "x*exp(-y)"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let out = campo(&["second-integral", "--field-file", path, "--fn", "x*exp(-y)"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn second_integral_recovers_the_affine_split() {
    let (doc, exit) = json_report(&[
        "second-integral", "--field", "x:x, y:1", "--fn", "y*x*exp(-y)",
    ]);
    assert_eq!(exit, 0);
    assert_eq!(verdict(&doc, "is_first_integral"), false);
    assert_eq!(verdict(&doc, "is_second_integral"), true);
    assert_eq!(doc["certificates"]["affine_split"]["h_part"], "x*exp(-y)");
    assert_eq!(doc["certificates"]["affine_split"]["g_part"], "0");
}

#[test]
fn family_flags_and_json_agree() {
    let flags = campo(&[
        "--json", "validate-family", "--tag", "S5", "--lambda", "z^2", "--m", "1",
        "--n", "2", "--l", "2", "--p", "1 + x",
    ]);
    let json = campo(&[
        "--json", "validate-family", "--family",
        r#"{"tag":"S5","lambda":"z^2","m":1,"n":2,"l":2,"p":"1 + x"}"#,
    ]);
    assert_eq!(code(&flags), 0, "stderr: {}", stderr(&flags));
    assert_eq!(stdout(&flags), stdout(&json));
}

#[test]
fn inapplicable_parameters_are_rejected() {
    let out = campo(&[
        "validate-family", "--tag", "S4", "--lambda", "z", "--m", "1", "--n", "1",
        "--mu", "3",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("do not apply"));
}
