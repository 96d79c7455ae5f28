use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn giroux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_giroux")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = giroux(&full);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    assert_eq!(v["version"], 1);
    (o.status.code().unwrap(), v)
}

#[test]
fn criterion_on_the_intro_pair_vanishes() {
    let f = data("intro_xy.json");
    let o = giroux(&["criterion", &f, "--left", "a", "--right", "b"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("fundamental class nonzero: x\u{302} ↦ 2"), "{}", stdout(&o));

    let (code, v) = json(&["criterion", &f, "--left", "a", "--right", "b"]);
    assert_eq!(code, 3);
    assert_eq!(v["command"], "criterion");
    assert_eq!(v["report"]["nonvanishing"], false);
    assert_eq!(v["report"]["witness"]["fundamental"]["value"], "2");
    assert_eq!(v["report"]["witness"]["fundamental"]["class"]["x^"], "1");
}

#[test]
fn criterion_on_equal_augmentations_is_nonvanishing() {
    let f = data("intro_xy.json");
    let (code, v) = json(&["criterion", &f, "--left", "b", "--right", "b", "--word-bound", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["nonvanishing"], true);
    assert!(v["report"]["witness"]["homotopy"].is_object());
    assert!(v["report"]["witness"]["augmentation"].is_object());
    assert_eq!(v["report"]["word_bound"], 2);
}

#[test]
fn augmentation_given_as_a_path() {
    let dir = std::env::temp_dir().join(format!("giroux-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let aug = dir.join("minus.json");
    std::fs::write(&aug, r#"{"x": "-1"}"#).unwrap();
    let o = giroux(&["criterion", &data("intro_xy.json"), "--left", "a", "--right", aug.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"x": "2"}"#).unwrap();
    let (code, v) = json(&["criterion", &data("intro_xy.json"), "--left", "a", "--right", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "invalid-augmentation");
    let (code, v) = json(&["criterion", &data("intro_xy.json"), "--left", "a", "--right", "nope"]);
    assert_eq!(code, 1);
    assert!(v["error"]["message"].as_str().unwrap().contains("a, b"));
}

#[test]
fn sphere_with_one_circle_is_tight() {
    let o = giroux(&["surface", &data("sphere_one_circle.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("tight; CH = Λ(γ^1..γ^3)"));
    let o = giroux(&["surface", &data("sphere_one_circle.json"), "--covers", "2"]);
    assert_eq!(stdout(&o).lines().next(), Some("tight; CH = Λ(γ^1..γ^2)"));
    let (code, v) = json(&["surface", &data("sphere_two_circles.json")]);
    assert_eq!(code, 3);
    assert_eq!(v["report"]["tight"], false);
}

#[test]
fn garbage_reports_a_pointer() {
    let o = giroux(&["validate", &data("garbage.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/generators/1/degree"));
    let (code, v) = json(&["validate", &data("garbage.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["pointer"], "/generators/1/degree");
    let (code, v) = json(&["validate", "/nonexistent/file.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "io");
}

#[test]
fn validate_flags_bad_augmentations() {
    let (code, v) = json(&["validate", &data("intro_xy.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["augmentations"]["a"]["valid"], true);
    let (code, v) = json(&["validate", &data("intro_no_aug.json")]);
    assert_eq!((code, &v["report"]["valid"]), (0, &Value::Bool(true)));
}

#[test]
fn bilinearized_package_round_trips() {
    let (code, v) = json(&["bilinearize", &data("intro_xy.json"), "--left", "a", "--right", "b"]);
    assert_eq!(code, 0);
    let pkg = &v["report"]["package"];
    assert_eq!(pkg["d0"]["x^"], "2");
    let (alg, d0) = giroux_core::io::parse_package(pkg).unwrap();
    let again = serde_json::json!({"presentation": giroux_core::io::presentation_to_json(&alg), "d0": pkg["d0"]});
    assert_eq!(&again, pkg);
    assert_eq!(d0.len(), 2);
}

#[test]
fn homology_needs_an_augmentation_when_zero_fails() {
    let (code, v) = json(&["homology", &data("intro_xy.json")]);
    assert_eq!(code, 1);
    assert!(v["error"]["message"].as_str().unwrap().contains("--linearize"));
    let (code, v) = json(&["homology", &data("intro_xy.json"), "--linearize", "a"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["dims"], serde_json::json!({}));
}

#[test]
fn no_augmentation_on_the_intro_grid() {
    let (code, v) = json(&["augmentations", &data("intro_no_aug.json"), "--grid", "16", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["augmentations"], serde_json::json!([]));
    let (_, v) = json(&["augmentations", &data("intro_xy.json"), "--grid", "2", "1"]);
    assert_eq!(v["report"]["augmentations"], serde_json::json!([{"x": "-1"}, {"x": "1"}]));
}

#[test]
fn glue_agrees() {
    let (code, v) = json(&["glue", &data("inventory_pair.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["agrees"], true);
    assert_eq!(v["report"]["counted"]["g^"], serde_json::json!([{"coeff": "1", "word": ["g2^"]}]));
}

#[test]
fn cz_with_spectrum() {
    let (code, v) = json(&["cz", &data("orbit_hyp.json"), "--eps-tau", "2", "--eps-sigma", "1/2", "--cutoff", "1", "--small-eps"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["n"], 3);
    assert_eq!(v["report"]["parity"]["holds"], true);
    assert_eq!(v["report"]["spectrum"]["distinguished"], serde_json::json!(["-1/2", "2"]));
    assert_eq!(v["report"]["spectrum"]["window"].as_array().unwrap().len(), 1);
    let (code, _) = json(&["cz", &data("orbit_hyp.json"), "--eps-tau", "2", "--eps-sigma", "3", "--cutoff", "1", "--small-eps"]);
    assert_eq!(code, 1);
}

#[test]
fn double_of_a_filling() {
    let (code, v) = json(&["double", &data("intro_xy.json"), "--aug", "a"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["verdict"]["nonvanishing"], true);
}

#[test]
fn output_is_deterministic() {
    let a = giroux(&["--format", "json", "selftest", "--quick", "--seed", "3"]);
    let b = giroux(&["--format", "json", "selftest", "--quick", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_str(&stdout(o)).unwrap();
        for c in v["report"]["checks"].as_array_mut().unwrap() {
            c.as_object_mut().unwrap().remove("seconds");
        }
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn bad_arguments_exit_with_input_error() {
    let o = giroux(&["criterion", &data("intro_xy.json"), "--left", "a", "--right", "b", "--word-bound", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(giroux(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(giroux(&["--help"]).status.code(), Some(0));
}
