use serde_json::Value;
use toric_cli::{render_text, run_args};

fn run(args: &[&str]) -> Vec<Value> {
    let mut full = vec!["toric"];
    full.extend_from_slice(args);
    let out = run_args(full).unwrap();
    assert!(out.success);
    out.output.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn one(args: &[&str]) -> Value {
    let mut v = run(args);
    assert_eq!(v.len(), 1);
    v.remove(0)
}

#[test]
fn polytope_info_examples() {
    let r = one(&["polytope", "info", "--lawrence", "1,2,3"]);
    assert_eq!(r["is_degree_one"], true);
    assert_eq!(r["codim"], 5);
    assert_eq!(r["normalized_volume"], 6);

    let r = one(&["polytope", "info", "--delta2"]);
    assert_eq!(
        (r["codim"].as_u64(), r["normalized_volume"].as_u64()),
        (Some(3), Some(4))
    );

    let r = one(&["polytope", "info", "--vertices", "0,0;2,0;0,2;2,2"]);
    assert_eq!(r["is_degree_one"], false);
    assert_eq!(r["lattice_points"].as_array().unwrap().len(), 9);
}

#[test]
fn code_params_examples() {
    let r = one(&["code", "params", "--lawrence", "1,2,3", "--q", "7"]);
    assert_eq!(
        (r["n"].as_u64(), r["k"].as_u64(), r["dmin_formula"].as_u64()),
        (Some(216), Some(9), Some(108))
    );
    assert!(r["dmin_bruteforce"].is_null());

    let r = one(&["code", "params", "--delta2", "--q", "5", "--brute-force"]);
    assert_eq!(
        (r["dmin_formula"].as_u64(), r["dmin_bruteforce"].as_u64()),
        (Some(8), Some(8))
    );
    assert_eq!(r["match"], true);

    let r = one(&["code", "params", "--lawrence", "2,2", "--q", "5", "--brute-force"]);
    assert_eq!(
        (r["dmin_formula"].as_u64(), r["dmin_bruteforce"].as_u64()),
        (Some(6), Some(6))
    );
    assert_eq!(r["match"], true);
}

#[test]
fn code_params_fit_and_budget() {
    // [0,4] fits GF(5) as exponents but not the degree-one formulas
    let r = one(&["code", "params", "--interval", "3", "--q", "5"]);
    assert_eq!(r["k"], 4);
    assert!(r["dmin_formula"].is_null());
    assert!(r["formula_note"].as_str().unwrap().contains("q - 2"));

    let err = run_args(["toric", "code", "params", "--interval", "4", "--q", "5"]).unwrap_err();
    assert!(err.to_string().contains("does not fit"), "{err}");

    let err = run_args([
        "toric",
        "code",
        "params",
        "--delta2",
        "--q",
        "7",
        "--brute-force",
        "--budget",
        "10",
    ]);
    assert!(err.unwrap_err().to_string().contains("budget"));
}

#[test]
fn dual_dmin_examples() {
    assert_eq!(one(&["code", "dual-dmin", "--lawrence", "1,1", "--q", "5"])["dmin"], 3);
    assert_eq!(one(&["code", "dual-dmin", "--delta2", "--q", "7"])["dmin"], 4);
    assert_eq!(one(&["code", "dual-dmin", "--interval", "2", "--q", "7"])["dmin"], 5);
    let r = one(&["code", "dual-dmin", "--interval", "2", "--q", "7", "--cap", "4"]);
    assert_eq!(r["above_cap"], true);
    assert!(r["dmin"].is_null());
}

#[test]
fn stats_mode_examples() {
    let r = one(&["stats", "mode", "--lawrence", "1,1", "--q", "7", "--s", "2"]);
    assert_eq!(r["mode"], 4);
    assert_eq!(r["sample_count"], 630);
    assert_eq!(r["histogram"]["4"], 450);

    let args = [
        "stats",
        "mode",
        "--delta2",
        "--q",
        "7",
        "--s",
        "4",
        "--samples",
        "300",
        "--seed",
        "9",
    ];
    let first = run_args(std::iter::once("toric").chain(args)).unwrap();
    let again = run_args(std::iter::once("toric").chain(args)).unwrap();
    assert_eq!(first, again);
    let r: Value = serde_json::from_str(first.output.trim()).unwrap();
    assert_eq!(r["exhaustive"], false);
    assert_eq!(r["sample_count"], 300);
    assert_eq!(r["mode"], 6);

    let r = one(&[
        "stats",
        "mode",
        "--lawrence",
        "1,1",
        "--q",
        "4",
        "--s",
        "2",
        "--ext-degree",
        "2",
    ]);
    assert_eq!(r["base_size"], 9);
    assert_eq!(r["base_field"]["e"], 2);
}

#[test]
fn generic_fraction_command() {
    let r = one(&["stats", "generic-fraction", "--interval", "1", "--q", "7"]);
    assert_eq!(
        (r["numerator"].as_u64(), r["denominator"].as_u64()),
        (Some(30), Some(36))
    );
    assert_eq!(r["exhaustive"], true);
}

#[test]
fn verify_commands() {
    let rows = run(&["verify", "--table1"]);
    assert_eq!(rows.len(), 8);
    assert!(rows[..7].iter().all(|r| r["match"] == true));
    assert_eq!(rows.iter().filter(|r| r["n_discrepancy"] == true).count(), 2);
    assert_eq!(rows[7]["failed"], 0);

    let rows = run(&["verify", "--formulas", "5", "6", "--m-max", "2"]);
    assert!(rows.len() > 5);
    assert_eq!(rows.last().unwrap()["failed"], 0);

    let rows = run(&["verify", "--moebius"]);
    assert!(rows.len() > 50);
    assert_eq!(rows.last().unwrap()["failed"], 0);

    assert!(run_args(["toric", "verify"]).is_err());
    assert!(run_args(["toric", "verify", "--table1", "--moebius"]).is_err());
}

#[test]
fn polytope_sources() {
    let dir = std::env::temp_dir().join(format!("toric-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, r#"{"constructor": "delta2", "pyramids": 1}"#).unwrap();
    let r = one(&["polytope", "info", "--spec", good.to_str().unwrap()]);
    assert_eq!(r["polytope"], "pyr(Delta2)");
    assert_eq!(r["m"], 3);

    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"constructor\": \"lawrence\",\n  \"a\": [1, 2,]}").unwrap();
    let err = run_args(["toric", "polytope", "info", "--spec", bad.to_str().unwrap()]).unwrap_err();
    assert!(format!("{err:#}").contains("line 2 column"), "{err:#}");

    let vertices = dir.join("v.json");
    std::fs::write(&vertices, r#"{"vertices": [[0,0],[1,0],[0,1],[1,1]]}"#).unwrap();
    let r = one(&["polytope", "info", "--spec", vertices.to_str().unwrap()]);
    assert_eq!(r["normalized_volume"], 2);

    assert!(run_args(["toric", "polytope", "info", "--delta2", "--lawrence", "1"]).is_err());
    assert!(run_args(["toric", "polytope", "info"]).is_err());
    assert!(run_args(["toric", "polytope", "info", "--interval", "2", "--pyramids", "1"]).is_err());
    assert!(run_args(["toric", "polytope", "info", "--lawrence", "2,1"]).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_format_and_threads() {
    let out = run_args(["toric", "--format", "text", "polytope", "info", "--delta2"]).unwrap();
    assert!(out
        .output
        .lines()
        .any(|l| l.starts_with("normalized_volume") && l.ends_with('4')));

    let out = run_args(["toric", "verify", "--table1", "--format", "text", "--threads", "2"]).unwrap();
    let lines: Vec<&str> = out.output.lines().collect();
    assert!(lines[0].starts_with('a') && lines[0].contains("dmin_formula"));
    assert_eq!(lines.iter().filter(|l| l.starts_with('[')).count(), 7);

    assert!(run_args(["toric", "--threads", "0", "polytope", "info", "--delta2"]).is_err());
    assert_eq!(render_text(&[]), "");
}
