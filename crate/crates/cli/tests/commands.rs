use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_convexgeo"));
    cmd.args(args).env_remove("CONVEXGEO_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn distance_envelope_echoes_parameters_and_version() {
    let cube = fixture("cube.off");
    let o = run(&["distance", "--mesh", &cube, "--from", "v:0", "--to", "v:6"]);
    assert_eq!(code(&o), 0);
    let d = json(&o);
    assert_eq!(d["tool"], "convexgeo");
    assert_eq!(d["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(d["command"], "distance");
    assert_eq!(d["params"]["from"], "v:0");
    assert_eq!(d["pass"], true);
    let len = d["result"]["length"].as_f64().unwrap();
    assert!((len - 5f64.sqrt()).abs() < 1e-9, "{len}");
}

#[test]
fn point_grammar_variants() {
    let cube = fixture("cube.off");
    let o = run(&["distance", "--mesh", &cube, "--from", "xyz:0.5,0.5,0", "--to", "xyz:0.5,0.5,1"]);
    assert_eq!(code(&o), 0);
    let len = json(&o)["result"]["length"].as_f64().unwrap();
    assert!((len - 2.0).abs() < 1e-9, "{len}");

    let o = run(&["distance", "--mesh", &cube, "--from", "f:0:1,0,0", "--to", "v:0"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn exit_codes() {
    let cube = fixture("cube.off");
    // Usage errors.
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["distance", "--mesh", &cube, "--from", "v:0"])), 2);
    assert_eq!(code(&run(&["distance", "--mesh", &cube, "--from", "q:1", "--to", "v:0"])), 2);
    assert_eq!(code(&run(&["distance", "--mesh", &cube, "--from", "v:0", "--to", "v:6", "--tau", "2"])), 2);
    assert_eq!(
        code(&run_env(&["distance", "--mesh", &cube, "--from", "v:0", "--to", "v:6"], &[("CONVEXGEO_THREADS", "zero")])),
        2
    );
    // Input errors.
    assert_eq!(code(&run(&["distance", "--mesh", "/nonexistent.off", "--from", "v:0", "--to", "v:1"])), 3);
    assert_eq!(code(&run(&["distance", "--mesh", &cube, "--from", "v:0", "--to", "v:99"])), 3);
    // Check failure and success.
    let fail = run(&["dc-check", "--check", "second-diff", "--fa", "1", "--fb", "3", "--fmid", "1.5"]);
    assert_eq!(code(&fail), 1);
    assert_eq!(json(&fail)["pass"], false);
    let ok = run(&["dc-check", "--check", "second-diff", "--fa", "1", "--fb", "3", "--fmid", "2.5"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn malformed_and_non_convex_meshes_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.off");
    std::fs::write(&bad, "OFF\n3 1 0\n0 0 0\n1 0\n").unwrap();
    let o = run(&["check-convex", "--mesh", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["error"]["code"], 3);

    // Octahedron with one apex pushed inward.
    let dent = dir.path().join("dent.off");
    std::fs::write(
        &dent,
        "OFF\n6 8 0\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 -0.2\n0 0 -1\n\
         3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n",
    )
    .unwrap();
    let o = run(&["distance", "--mesh", dent.to_str().unwrap(), "--from", "v:0", "--to", "v:1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn report_fields_and_witness() {
    let cube = fixture("cube.off");
    let o = run(&["dc-check", "--mesh", &cube, "--check", "chart-c", "--function", "sqnorm", "--c", "1", "--grid", "48"]);
    assert_eq!(code(&o), 1);
    let r = &json(&o)["result"];
    for k in ["check", "params", "n_tested", "n_skipped", "max_violation", "tolerance", "witness", "pass"] {
        assert!(r.get(k).is_some(), "missing {k}");
    }
    assert!(!r["witness"].is_null());
    assert!(r["max_violation"].as_f64().unwrap() > r["tolerance"].as_f64().unwrap());
}

#[test]
fn identical_configs_give_identical_bytes_across_thread_counts() {
    let cube = fixture("cube.off");
    let args = ["dc-check", "--mesh", &cube, "--check", "midpoint-4c", "--pairs", "40", "--seed", "3"];
    let a = run_env(&args, &[("CONVEXGEO_THREADS", "1")]);
    let b = run_env(&args, &[("CONVEXGEO_THREADS", "4")]);
    let c = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn out_file_and_svg() {
    let cube = fixture("cube.off");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ls.json");
    let svg = dir.path().join("ls.svg");
    let o = run(&[
        "levelset", "--mesh", &cube, "--source", "v:0", "--r", "0.5",
        "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(d["result"]["topology"]["n_components"], 1);
    let s = std::fs::read_to_string(&svg).unwrap();
    assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
}

#[test]
fn remaining_commands_run() {
    let cube = fixture("cube.off");
    let tetra = fixture("tetra.off");
    let sphere = fixture("sphere.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["check-convex", "--mesh", &tetra],
        vec!["chart", "--mesh", &cube, "--at", "v:6"],
        vec!["diameter", "--mesh", &tetra],
        vec!["approx", "--body", &sphere, "--k", "60"],
        vec!["converge", "--body", &sphere, "--ks", "30,60", "--pairs", "1"],
        vec!["field", "--mesh", &cube, "--source", "v:0", "--source", "v:6"],
        vec!["scan", "--mesh", &cube, "--source", "v:0", "--steps", "5"],
        vec!["exoskeleton", "--mesh", &cube, "--source", "v:0", "--density", "20"],
        vec!["dc-check", "--mesh", &cube, "--check", "diagonal", "--pairs", "5", "--candidates", "20"],
        vec!["dc-check", "--mesh", &cube, "--check", "modifier", "--grid", "24"],
        vec!["dc-check", "--mesh", &cube, "--check", "field-dc", "--grid", "24"],
        vec!["dc-check", "--mesh", &cube, "--check", "displacement", "--at", "xyz:0.5,0,0", "--dirs", "20"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(json(&o)["pass"], true, "{args:?}");
    }
}
