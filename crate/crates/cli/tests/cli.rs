use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ratmvc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratmvc"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn ratmvc")
}

fn result(out: &Output) -> Value {
    let doc: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert!(doc["manifest"]["timestamp"].is_string());
    doc["result"].clone()
}

#[test]
fn smale_on_fixtures_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = ratmvc(&["smale", "--fixture", "p0:4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert!((r["S"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(r["bound_holds"], true);

    // z^2 at x = 1: one critical point, S = |p(0) - p(1)| / |1 * p'(1)| = 1/2.
    let poly = dir.path().join("sq.json");
    fs::write(&poly, "[[0,0],[0,0],[1,0]]").unwrap();
    let out = ratmvc(&["smale", "--input", "sq.json", "--x", "1,0"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["result"]["S"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let input = &doc["manifest"]["inputs"][0];
    assert_eq!(input["path"], "sq.json");
    assert_eq!(input["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn bad_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let critical = ratmvc(&["smale", "--fixture", "p0:4", "--x", "1"], dir.path());
    assert_eq!(critical.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&critical.stderr).contains("critical"));

    assert_eq!(
        ratmvc(&["smale", "--fixture", "nope:3"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ratmvc(&["smale", "--input", "missing.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
    fs::write(dir.path().join("junk.json"), "{ not json").unwrap();
    assert_eq!(
        ratmvc(&["index", "--input", "junk.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"degree": 3, "objective": "smale_max", "extra": 1}"#,
    )
    .unwrap();
    assert_eq!(
        ratmvc(&["search", "--config", "cfg.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"degree": 1, "objective": "smale_max"}"#,
    )
    .unwrap();
    assert_eq!(
        ratmvc(&["search", "--config", "cfg.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ratmvc(&["verify", "thm1", "--degree", "1"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(ratmvc(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn verify_suites_write_csv_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();
    for (theorem, degrees) in [
        ("smale", "2-4"),
        ("thm1", "2-3"),
        ("thm2", "2-3"),
        ("index-sum", "2-4"),
    ] {
        let out = ratmvc(
            &[
                "verify", theorem, "--degree", degrees, "--trials", "12", "--seed", "7", "--out", o,
            ],
            dir.path(),
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{theorem}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(result(&out)["violations"], 0);
    }
    let csv = fs::read_to_string(out_dir.join("verify-smale.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# manifest {"));
    assert_eq!(lines.next().unwrap(), "trial,seed,degree,value,ok");
    assert_eq!(lines.count(), 12);

    let out = ratmvc(
        &["verify", "forbidden", "--max-iterate", "2", "--out", o],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(result(&out)["fixtures"].as_array().unwrap().len(), 10);
}

#[test]
fn newton_build_and_characterize() {
    let dir = tempfile::tempdir().unwrap();
    let out = ratmvc(&["newton", "build", "--fixture", "quartic"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert_eq!(r["h_condition"]["holds"], true);
    let num: Vec<f64> = r["map"]["num"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c[0].as_f64().unwrap())
        .collect();
    let den: Vec<f64> = r["map"]["den"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c[0].as_f64().unwrap())
        .collect();
    // (3z^4 + 4z^3 + 6z^2 - 4) / (4z^3 + 6z^2 + 12z + 5), up to a common scale.
    let s = num[4] / 3.0;
    for (got, want) in num.iter().zip([-4.0, 0.0, 6.0, 4.0, 3.0]) {
        assert!((got / s - want).abs() < 1e-12);
    }
    for (got, want) in den.iter().zip([5.0, 12.0, 6.0, 4.0]) {
        assert!((got / s - want).abs() < 1e-12);
    }

    fs::write(
        dir.path().join("map.json"),
        serde_json::to_string(&r["map"]).unwrap(),
    )
    .unwrap();
    let out = ratmvc(
        &["newton", "characterize", "--input", "map.json"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let ch = result(&out);
    assert!(ch.to_string().contains("\"is_newton\":true"), "{ch}");
}

#[test]
fn index_reports_sum_and_disc() {
    let dir = tempfile::tempdir().unwrap();
    let out = ratmvc(
        &["index", "--fixture", "p0:3", "--max-iterate", "2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert!(r["index_sum"]["deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["forbidden"]["violations"].as_array().unwrap().len(), 0);

    // A generic map has no disc report but still sums to one.
    fs::write(
        dir.path().join("m.json"),
        r#"{"num": [[0,0],[1,0],[1,0]], "den": [[1,0],[0.5,0.25]]}"#,
    )
    .unwrap();
    let out = ratmvc(&["index", "--input", "m.json"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = result(&out);
    assert!(r["forbidden"].is_null());
}

#[test]
fn search_is_reproducible_and_archives_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"degree": 3, "objective": "smale_max", "restarts": 3, "max_evals": 600}"#,
    )
    .unwrap();
    let run = |sub: &str| {
        let out = ratmvc(
            &[
                "search", "--config", "cfg.json", "--seed", "11", "--jobs", "2", "--out", sub,
            ],
            dir.path(),
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        result(&out)
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    assert_eq!(a["config"]["seed"], 11);
    assert!(a["best_value"].as_f64().unwrap() <= 4.0);

    let witness: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("a/search-witness.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(witness["value"], a["best_value"]);
    let trace = fs::read_to_string(dir.path().join("a/search.csv")).unwrap();
    assert!(trace.lines().nth(1).unwrap().starts_with("restart,"));
}

#[test]
fn fixtures_listing() {
    let dir = tempfile::tempdir().unwrap();
    let out = ratmvc(&["fixtures"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        result(&out)["all_critical_fixed"].as_array().unwrap().len(),
        10
    );
    let out = ratmvc(&["fixtures", "power:3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(result(&out)["name"], "power:3");
}
