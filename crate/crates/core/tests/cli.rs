use mtlab::cli_io::{parse_curve_file, run_command, EXIT_OK, EXIT_USAGE};
use mtlab::theta::{ThetaElement, ThetaJson};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mtlab").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn theta_matches_golden_file() {
    let (code, out, _) = run(&["theta", "--curve", "11a1", "--S", "5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, include_str!("golden/theta_11a1_S5.json"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["theta", "--curve", "37a1", "--S", "21"][..],
        &["verify", "--curve", "37a1", "--family-bound", "13", "--format", "csv"][..],
        &["lvalue", "--curve", "37a1", "--modulus", "7", "--chi", "1"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.0, EXIT_OK, "{args:?}: {}", a.2);
        assert_eq!(a.1, b.1);
    }
}

#[test]
fn theta_json_round_trip() {
    let (_, out, _) = run(&["theta", "--curve", "37a1", "--S", "35"]);
    let j: ThetaJson = serde_json::from_str(&out).unwrap();
    let t = ThetaElement::from_json(&j).unwrap();
    assert_eq!(t.to_json(), j);
    assert_eq!(serde_json::to_string_pretty(&t.to_json()).unwrap() + "\n", out);
}

#[test]
fn ord_reports_vanishing() {
    let (code, out, _) = run(&["ord", "--curve", "37a1", "--S", "5"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert!(v["ord_found"].as_u64().unwrap() >= 1);
    assert!(v["per_prime"].is_object());
    assert_eq!(v["augmentation"], "0");
}

#[test]
fn space_dimensions() {
    let (_, out, _) = run(&["space", "--level", "11"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["dim_cuspidal"], 2);
    assert_eq!(v["genus"], 1);
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = run(&["theta", "--curve", "11a1", "--S", "5", "--bogus"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("Usage"));
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    assert_eq!(run(&[]).0, EXIT_USAGE);
}

#[test]
fn runtime_errors_exit_three() {
    let (code, _, err) = run(&["theta", "--curve", "99z9", "--S", "5"]);
    assert_eq!(code, 3);
    assert!(err.contains("99z9"));
}

#[test]
fn curve_file_and_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("curves.txt");
    std::fs::write(&db, "11a1 | 0 -1 1 -10 -20 | 11 | 0 | 5 | | 11:5 | 5\n").unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir(&cache).unwrap();
    let args = [
        "--curves",
        db.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
        "theta",
        "--curve",
        "11a1",
        "--S",
        "5",
    ];
    let first = run(&args);
    assert_eq!(first.0, EXIT_OK, "{}", first.2);
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
    assert_eq!(run(&args).1, first.1);
    assert_eq!(first.1, include_str!("golden/theta_11a1_S5.json"));

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    assert!(parse_curve_file(&empty).unwrap().is_empty());
}

#[test]
fn derive_operator_coefficients() {
    let (code, out, _) = run(&["derive", "--n", "5", "--k", "2"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!(["0", "0", "1", "3", "6"]));
}
