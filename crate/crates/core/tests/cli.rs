use std::path::PathBuf;
use std::process::Command;

use ncample::cli::{run, RunReport, EXIT_INVALID, EXIT_OK, EXIT_UNDETERMINED, EXIT_USAGE};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn ncample(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ncample").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> (i32, RunReport) {
    let mut full = args.to_vec();
    full.push("--json");
    let (code, out, _) = ncample(&full);
    (code, serde_json::from_str(&out).expect("json report"))
}

const UNDETERMINED_AT_4: &str = r#"{
  "name": "P1xP1", "dim": 2, "rho": 2,
  "euler": [
    {"coeff": "1", "exponents": [1, 1]}, {"coeff": "1", "exponents": [1, 0]},
    {"coeff": "1", "exponents": [0, 1]}, {"coeff": "1", "exponents": [0, 0]}
  ],
  "ample_cone": [[1, 0], [0, 1]],
  "bimodules": [{"divisor": [-5, 1], "matrix": [[1, 1], [0, 1]]}]
}"#;

#[test]
fn verdicts_on_sample_documents() {
    let (code, r) = report(&["verdict", &data("builtin-pair.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.payload["kind"], "NCAmple");
    assert_eq!(r.payload["m0"], serde_json::json!([1, 1]));

    let (code, r) = report(&["verdict", &data("p1-L-Linv.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.payload["kind"], "EventualAmplenessFail");
    assert_eq!(r.payload["witness"]["direction"], serde_json::json!([1, 2]));

    let (_, r) = report(&["verdict", &data("fibonacci.json")]);
    assert_eq!(r.payload["kind"], "QuasiUnipotentFail");
    assert_eq!(r.payload["index"], 1);

    let (_, r) = report(&["verdict", &data("swap.json")]);
    assert_eq!(r.payload["m0"], serde_json::json!([2]));
    assert_eq!(r.payload["sigma"]["kind"], "SigmaAmple");
}

#[test]
fn gk_certificates() {
    for (file, expected) in [("p1-O1.json", 2), ("builtin-pair.json", 4), ("swap.json", 3)] {
        let (code, r) = report(&["gk", &data(file)]);
        assert_eq!(code, EXIT_OK, "{file}");
        assert_eq!(r.payload["gk"], expected, "{file}");
        assert_eq!(r.payload["within_bounds"], true);
    }
    let (code, out, _) = ncample(&["gk", &data("p1-L-Linv.json")]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.contains("not NC-ample"), "{out}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let slow = dir.path().join("slow.json");
    std::fs::write(&slow, UNDETERMINED_AT_4).unwrap();
    let slow = slow.to_str().unwrap();
    assert_eq!(ncample(&["verdict", slow, "--bound", "4"]).0, EXIT_UNDETERMINED);
    assert_eq!(ncample(&["verdict", slow]).0, EXIT_OK);
    assert_eq!(ncample(&["verdict", "--scheme", slow]).0, EXIT_OK);

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"name\": 3").unwrap();
    assert_eq!(ncample(&["validate", broken.to_str().unwrap()]).0, EXIT_INVALID);
    assert_eq!(ncample(&["validate", "/nonexistent/file.json"]).0, EXIT_INVALID);
    assert_eq!(ncample(&["validate", "builtin:Nope"]).0, EXIT_INVALID);
    assert_eq!(ncample(&["verdict", "builtin:P2"]).0, EXIT_INVALID);

    assert_eq!(ncample(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(ncample(&["verdict"]).0, EXIT_USAGE);
    assert_eq!(ncample(&["verdict", slow, "--bound", "0"]).0, EXIT_USAGE);
    assert_eq!(ncample(&["class", slow, "--at", "x"]).0, EXIT_USAGE);

    let (code, out, _) = ncample(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verdict"));
    assert_eq!(ncample(&["--version"]).0, EXIT_OK);
}

#[test]
fn validate_builtins() {
    for name in ["P1", "P2", "P1xP1", "AbelianSurfaceHyperbolic"] {
        let (code, out, _) = ncample(&["validate", &format!("builtin:{name}")]);
        assert_eq!(code, EXIT_OK, "{name}: {out}");
    }
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["verdict", &data("diagonal-twists.json")];
    let (_, a) = report(&args);
    let (_, b) = report(&args);
    assert_eq!(a.without_timing(), b.without_timing());
    assert!(a.input_digest.starts_with("sha256:"));
    assert_eq!(a.command[0], "verdict");

    let (_, out, _) = ncample(&["class", &data("builtin-pair.json"), "--at", "2,3", "--json"]);
    let last = out.trim_end().lines().rev().nth(1).unwrap();
    assert!(last.trim_start().starts_with("\"timing_ms\""), "{last}");
}

#[test]
fn class_values() {
    let (code, r) = report(&["class", &data("builtin-pair.json"), "--at", "2,3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.payload["class"], serde_json::json!([2, 3]));
    assert_eq!(r.payload["chi"], 12);
    assert_eq!(r.payload["ample"], true);
    assert_eq!(ncample(&["class", &data("builtin-pair.json"), "--at", "2"]).0, EXIT_INVALID);
}

#[test]
fn emit_pipelines_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let dual = dir.path().join("dual.json");
    let back = dir.path().join("back.json");
    let swap = data("swap.json");
    assert_eq!(ncample(&["dual", &swap, "--emit", dual.to_str().unwrap()]).0, EXIT_OK);
    assert_eq!(ncample(&["dual", dual.to_str().unwrap(), "--emit", back.to_str().unwrap()]).0, EXIT_OK);
    let (_, a) = report(&["verdict", &swap]);
    let (_, b) = report(&["verdict", back.to_str().unwrap()]);
    assert_eq!(a.payload, b.payload);

    let ver = dir.path().join("ver.json");
    assert_eq!(ncample(&["veronese", &swap, "--n", "2", "--emit", ver.to_str().unwrap()]).0, EXIT_OK);
    let (_, r) = report(&["class", ver.to_str().unwrap(), "--at", "3"]);
    let (_, direct) = report(&["class", &swap, "--at", "6"]);
    assert_eq!(r.payload["class"], direct.payload["class"]);

    let (code, out, _) = ncample(&["rees", &data("p1-O1.json")]);
    assert_eq!(code, EXIT_OK);
    let rees = dir.path().join("rees.json");
    std::fs::write(&rees, out).unwrap();
    let (_, r) = report(&["gk", rees.to_str().unwrap()]);
    assert_eq!(r.payload["gk"], 3);

    let prod = dir.path().join("prod.json");
    let (code, out, _) = ncample(&["tensor", &data("p1-O1.json"), &swap, "--emit", prod.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("wrote "));
    let (_, r) = report(&["gk", prod.to_str().unwrap()]);
    assert_eq!(r.payload["gk"], 5);
}

#[test]
fn oracle_compare_passes() {
    for file in ["builtin-pair.json", "swap.json", "parabolic-p1.json", "diagonal-twists.json"] {
        let (code, r) = report(&["oracle", "compare", &data(file), "--samples", "40"]);
        assert_eq!(code, EXIT_OK, "{file}");
        assert_eq!(r.payload["passed"], true, "{file}");
    }
    assert_eq!(ncample(&["oracle", "compare", &data("fibonacci.json")]).0, EXIT_INVALID);
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_ncample"))
        .args(["verdict", &data("builtin-pair.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&out.stdout).contains("NCAmple"));
    let out = Command::new(env!("CARGO_BIN_EXE_ncample")).arg("nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}
