use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ifs-hide"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ifs-hide-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn template_then_verify() {
    let t = scratch("t3.json");
    assert_eq!(run(&["template", "--n", "3", "--out", s(&t)]).status.code(), Some(0));
    let out = run(&["verify", "--in", s(&t)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"passed\": true"));
    // the stored points are the ones from iterating x -> (2/3)x down from 3
    let doc = std::fs::read_to_string(&t).unwrap();
    for p in ["\"8/9\"", "\"1\"", "\"4/3\"", "\"2\"", "\"3\""] {
        assert!(doc.contains(p), "missing {}", p);
    }
}

#[test]
fn inadmissible_leap_exits_2() {
    let out = run(&["leap", "--omega", "3", "--r", "7/5", "--r2", "4/3", "--json-errors"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "inadmissible");
    // 7/5 - 4/3 = 1/15 and the smaller denominator is 3, so 5 slots per circle
    assert_eq!(err["details"]["tau"], 5);
    assert_eq!(err["details"]["step"], "1/15");
}

#[test]
fn round_trip_is_byte_identical() {
    let a = scratch("rt_a.json");
    let b = scratch("rt_b.json");
    assert!(run(&["gallery", "example2", "--eps", "1/20", "--out", s(&a)]).status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    // a copied file loads and plots to the same bytes
    std::fs::write(&b, &text).unwrap();
    let p1 = run(&["plot", "--in", s(&a)]);
    let p2 = run(&["plot", "--in", s(&b)]);
    assert!(p1.status.success());
    assert_eq!(p1.stdout, p2.stdout);
    let t1 = scratch("rt_t1.json");
    let t2 = scratch("rt_t2.json");
    run(&["template", "--n", "4", "--out", s(&t1)]);
    run(&["template", "--n", "4", "--out", s(&t2)]);
    assert_eq!(std::fs::read(&t1).unwrap(), std::fs::read(&t2).unwrap());
}

#[test]
fn overlapping_region_fails_to_load() {
    let f = scratch("bad_region.json");
    std::fs::write(
        &f,
        r#"{"format":"ifs-hide/1","kind":"region","payload":{"components":[["0","1/2"],["1/3","1"]]}}"#,
    )
    .unwrap();
    let out = run(&["verify", "--in", s(&f), "--json-errors"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "parse");
    let unreduced = scratch("unreduced.json");
    std::fs::write(
        &unreduced,
        r#"{"format":"ifs-hide/1","kind":"region","payload":{"components":[["0","2/4"]]}}"#,
    )
    .unwrap();
    assert_eq!(run(&["verify", "--in", s(&unreduced)]).status.code(), Some(2));
}

#[test]
fn svg_is_deterministic() {
    let t = scratch("svg_t.json");
    run(&["template", "--n", "3", "--out", s(&t)]);
    let a = run(&["plot", "--in", s(&t)]).stdout;
    let b = run(&["plot", "--in", s(&t)]).stdout;
    assert_eq!(a, b);
    let svg = String::from_utf8(a).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("class=\"band\"").count(), 4);
}

#[test]
fn gallery_piece_verifies_and_orbits() {
    let f = scratch("e2.json");
    assert!(run(&["gallery", "example2", "--eps", "0", "--out", s(&f)]).status.success());
    assert_eq!(run(&["verify", "--in", s(&f), "--strong"]).status.code(), Some(0));
    let o = run(&["orbit", "--in", s(&f), "--seed", "0", "--depth", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"all_outside\": true"));
    let svg = String::from_utf8(run(&["plot", "--in", s(&f)]).stdout).unwrap();
    assert!(svg.contains("graph-f") && svg.contains("graph-g") && svg.contains("class=\"region\""));
}

#[test]
fn tampered_piece_fails_verification() {
    let f = scratch("e2_bad.json");
    assert!(run(&["gallery", "example2", "--eps", "1/10", "--out", s(&f)]).status.success());
    let text = std::fs::read_to_string(&f).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    // widen K to all of [0, 1]: 0 and 1 then sit in K
    v["payload"]["k"]["core"] = serde_json::json!([["0", "1"]]);
    v["payload"]["k"]["window"] = serde_json::json!(["0", "1"]);
    std::fs::write(&f, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(run(&["verify", "--in", s(&f)]).status.code(), Some(1));
}

#[test]
fn smooth_from_file() {
    let f = scratch("e2s.json");
    let c = scratch("e2c1.json");
    assert!(run(&["gallery", "example2", "--eps", "1/10", "--out", s(&f)]).status.success());
    let out = run(&["smooth", "--in", s(&f), "--out", s(&c)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&c).unwrap().contains("\"pieces\""));
    assert_eq!(run(&["verify", "--in", s(&c)]).status.code(), Some(0));
}

#[test]
fn runway_and_connector_documents() {
    let r = scratch("runway.json");
    assert!(run(&["runway", "--omega", "3", "--out", s(&r)]).status.success());
    assert_eq!(run(&["verify", "--in", s(&r)]).status.code(), Some(0));
    let c = scratch("conn.json");
    let out = run(&["connector", "--omega", "3", "--r", "3/2", "--out", s(&c)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(run(&["verify", "--in", s(&c)]).status.code(), Some(0));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(run(&["template", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["leap", "--r", "x"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--in", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["assemble", "--n0", "many"]).status.code(), Some(2));
}

#[test]
fn assemble_over_budget_exits_1() {
    let out = run(&["assemble", "--omega", "3", "--demo", "--json-errors"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "budget");
    assert!(err["message"].as_str().unwrap().contains("n0 209"));
}
