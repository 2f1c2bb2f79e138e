use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use hiconvex::run::Envelope;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hiconvex"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hiconvex-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const X4: &str = r#"{"kind":"catalog","name":"x4"}"#;

#[test]
fn verify_bp_reports_the_two_point_bounds() {
    let out = run(&["verify", "--ineq", "bp", "--model", X4, "--interval", "0", "1", "--no-meta"]);
    assert_eq!(out.status.code(), Some(0));
    let e: Envelope = serde_json::from_slice(&out.stdout).unwrap();
    assert!(e.verdict);
    assert!((e.report.witness["condensation"] - 4.0 / 27.0).abs() < 1e-12);
    assert!((e.report.witness["dispersion"] - 7.0 / 27.0).abs() < 1e-12);
}

#[test]
fn reports_round_trip_bit_exactly() {
    let out = run(&["verify", "--ineq", "chain", "--model", r#"{"kind":"catalog","name":"exp"}"#, "--interval", "0", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let e: Envelope = serde_json::from_str(&text).unwrap();
    let again: Envelope = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
    assert_eq!(e, again);
    assert_eq!(e.report.margin.to_bits(), again.report.margin.to_bits());
    for (t, u) in e.report.terms.iter().zip(&again.report.terms) {
        assert_eq!(t.margin.to_bits(), u.margin.to_bits());
    }
    assert!(e.meta.is_some());
}

#[test]
fn no_meta_output_is_byte_identical_across_thread_counts() {
    let nu = r#"{"atoms":[{"x":0.0,"w":0.25},{"x":0.6666666666666666,"w":0.75}]}"#;
    let mu = r#"{"atoms":[{"x":0.3333333333333333,"w":0.75},{"x":1.0,"w":0.25}]}"#;
    let args = ["order", "--measure-nu", nu, "--measure-mu", mu, "--trials", "3000", "--seed", "4", "--no-meta"];
    let one = bin().args(args).env("HICONVEX_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("HICONVEX_THREADS", "4").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let e: Envelope = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(e.seed, 4);
    assert!(e.report.cases.contains(&"oracle agrees".to_string()));
}

#[test]
fn falsify_echoes_the_seed_and_finds_both_signs() {
    let out = run(&["falsify", "freudenthal", "--seed", "1", "--trials", "10000", "--no-meta"]);
    assert_eq!(out.status.code(), Some(0));
    let e: Envelope = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(e.seed, 1);
    let detail = e.detail.unwrap();
    assert!(detail["positive"]["value"].as_f64().unwrap() > 0.0);
    assert!(detail["negative"]["value"].as_f64().unwrap() < 0.0);
}

#[test]
fn failing_inequality_exits_with_one() {
    let out = run(&["verify", "--ineq", "res", "--model", r#"{"kind":"catalog","name":"x3"}"#, "--point", "1", "1", "-1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_inputs_exit_with_two() {
    let empty = scratch("empty.json");
    fs::write(&empty, "").unwrap();
    let out = run(&["run", "--config", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("empty.json:1:0"), "{err}");

    let out = run(&["verify", "--ineq", "bp", "--model", r#"{"kind":"catalog","name":"nope"}"#, "--interval", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--ineq", "bp", "--model", "/no/such/model.json", "--interval", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("/no/such/model.json"));
}

#[test]
fn csv_dump_of_a_cubic_is_three_convex() {
    let path = scratch("cubic.csv");
    let mut text = String::from("x,f\n");
    for i in 0..1000 {
        let x = -2.0 + 4.0 * i as f64 / 999.0;
        text.push_str(&format!("{x},{}\n", x * x * x));
    }
    fs::write(&path, text).unwrap();
    let out = run(&["check", "--samples", path.to_str().unwrap(), "--k", "3", "--no-meta"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let bad = scratch("unsorted.csv");
    fs::write(&bad, "x,f\n0,0\n1,1\n0.5,2\n").unwrap();
    let out = run(&["check", "--samples", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains(":4:"));
}

#[test]
fn config_batches_resolve_paths_and_write_output() {
    let model = scratch("model.json");
    fs::write(&model, r#"{"kind":"catalog","name":"log1p"}"#).unwrap();
    let config = scratch("batch.json");
    fs::write(
        &config,
        r#"[
            {"command": "verify", "ineq": "slope", "model": "model.json", "interval": [0, 1]},
            {"command": "verify", "ineq": "res", "model": "model.json", "point": [0.5, -0.25, 1.0]},
            {"command": "matrix", "matrices": [{"n":1,"rows":[[2.0]]}], "exp": [0.5, -1.0, 2.0]}
        ]"#,
    )
    .unwrap();
    let out_path = scratch("batch-out.json");
    let out = run(&["run", "--config", config.to_str().unwrap(), "--out", out_path.to_str().unwrap(), "--no-meta"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let all: Vec<Envelope> = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(all.len(), 3);
    assert!(all.iter().all(|e| e.verdict && e.meta.is_none()));
}

#[test]
fn matrix_command_checks_commuting_triples() {
    let family = r#"[{"n":2,"rows":[[1.0,0.0],[0.0,-0.5]]},{"n":2,"rows":[[0.5,0.0],[0.0,2.0]]},{"n":2,"rows":[[-1.0,0.0],[0.0,0.25]]}]"#;
    let out = run(&["matrix", "--model", r#"{"kind":"catalog","name":"sqrt"}"#, "--matrices", family, "--no-meta"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let e: Envelope = serde_json::from_slice(&out.stdout).unwrap();
    assert!(e.report.term("loewner").is_some());
}
