use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thickfoam")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn corpus_files() -> Vec<String> {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus"].iter().collect();
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json") && p.file_stem().unwrap() != "manifest")
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn core_circle_homology_is_one_copy_of_z() {
    let out = run(&["--format", "json", "homology", &corpus("annulus_core.json")]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "homology");
    let groups = v["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0]["i"], 0);
    assert_eq!(groups[0]["j"], 0);
    assert_eq!(groups[0]["sector"], "[(1)]");
    assert_eq!(groups[0]["group"], "Z");
}

#[test]
fn positive_kink_invariance_passes() {
    for theory in [&["--theory", "simple"][..], &["--theory", "k", "--k", "1"][..]] {
        let file = corpus("annulus_core.json");
        let mut args = vec!["--format", "json", "invariance", file.as_str()];
        args.extend(["--move", "r1+", "--edge", "e0"]);
        args.extend(theory);
        let out = run(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
        let v = json_of(&out);
        assert_eq!(v["pass"], true);
        assert_eq!(v["shift"], serde_json::json!([1, 3]));
    }
}

#[test]
fn negative_kink_shift_is_flagged_derived() {
    let out = run(&["--format", "json", "invariance", &corpus("annulus_core.json"), "--move", "r1-", "--edge", "e0"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["shift"], serde_json::json!([-1, -3]));
    assert_eq!(v["shift_derived"], true);
}

#[test]
fn k_infinity_d_squared_vanishes_on_corpus() {
    let files = corpus_files();
    let mut args = vec!["check-d2", "--theory", "k", "--k", "inf"];
    args.extend(files.iter().map(String::as_str));
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), files.len());
}

#[test]
fn simple_d_squared_failure_exits_one() {
    let out = run(&["--format", "json", "check-d2", &corpus("annulus_cores_clasp.json")]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["results"][0]["pass"], false);
    assert_eq!(v["results"][0]["violation"]["coefficient"].as_i64().map(i64::abs), Some(2));
}

#[test]
fn bad_input_exits_two() {
    let out = run(&["homology", &corpus("annulus_core.json"), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["homology", "/nonexistent/diagram.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["move", &corpus("annulus_core.json"), "--move", "r1+", "--edge", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn crossing_cap_exits_three() {
    let out = run(&["--cap", "2", "homology", &corpus("trefoil_shadow_planar0.json")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn move_output_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let dst = dir.path().join("clasped.json");
    let dst = dst.to_str().unwrap();
    let out = run(&["move", &corpus("annulus_two_cores.json"), "--move", "r2", "--a", "l0", "--b", "l1", "--output", dst]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["--format", "json", "validate", dst]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["results"][0]["valid"], true);
    let out = run(&["--format", "json", "states", dst]);
    assert_eq!(json_of(&out)["states"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_deterministic() {
    let args = ["--format", "json", "complex", "--theory", "k", &corpus("trefoil_shadow_core_clasp.json")];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sector_filter_restricts_output() {
    let out = run(&["--format", "json", "homology", "--theory", "k", "--k", "1", "--sector", "[+(1)]", &corpus("annulus_core.json")]);
    let v = json_of(&out);
    let groups = v["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0]["sector"], "[+(1)]");
}
