use std::process::{Command, Output};

use casimir_core::dfs::DecompositionJson;
use casimir_core::invariants::InvariantJson;
use casimir_core::su_basis::TensorJson;
use serde_json::Value;

fn casimir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn basis_pauli_and_csv() {
    let out = casimir(&["basis", "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let gens = v["generators"].as_array().unwrap();
    assert_eq!(gens.len(), 3);
    // σ_y = [[0, -i], [i, 0]]
    assert_eq!(gens[1]["im"][0][1], -1.0);
    assert_eq!(gens[1]["im"][1][0], 1.0);

    let out = casimir(&["basis", "--d", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,row,col,re,im"));
    assert_eq!(lines.count(), 8 * 9);
}

#[test]
fn invalid_input_exits_2() {
    let out = casimir(&["basis", "--d", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d must be ≥ 2"));

    for args in [
        &["invariants", "--d", "2", "--n", "2", "--kinds", "I3:0,1,2"][..],
        &["dfs", "--d", "2", "--n", "13"],
        &["verify", "--d", "3", "--tol", "-1"],
        &["exchange", "--d", "2", "--n", "2", "--alpha", "1", "--beta", "1"],
        &["compat", "--d", "2", "--n", "2", "--op", "xbar"],
        &["invariants", "--d", "2", "--kinds", "Q9"],
        &["basis"],
    ] {
        assert_eq!(casimir(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verification_failure_exits_1() {
    let out = casimir(&["verify", "--d", "5", "--tol", "1e-20"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("product_relation"));

    let out = casimir(&["compat", "--d", "2", "--n", "3", "--op", "local:0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["compatible"], false);
}

#[test]
fn ambiguous_clustering_exits_3() {
    let out = casimir(&["dfs", "--d", "2", "--n", "2", "--cluster-tol", "0.2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("J2 spectrum"));
}

#[test]
fn verify_d2_reports_trivial_dd_contraction() {
    let out = casimir(&["verify", "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 11);
    let dd = reports.iter().find(|r| r["identity"] == "dd_contraction").unwrap();
    assert_eq!(dd["passed"], true);
    assert_eq!(dd["max_lhs"], 0.0);
}

#[test]
fn structure_output_shape() {
    let out = casimir(&["structure", "--d", "2", "--tensor", "f"]);
    let t: Vec<TensorJson> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t[0].entries, vec![(0, 1, 2, 1.0)]);
    let out = casimir(&["structure", "--d", "2", "--tensor", "f", "--full"]);
    let t: Vec<TensorJson> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(t[0].entries.len(), 6);
}

#[test]
fn invariants_output_shape() {
    let out = casimir(&["invariants", "--d", "3", "--n", "3", "--kinds", "I4:0,1,2", "J2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let invs: Vec<InvariantJson> = serde_json::from_value(v["invariants"].clone()).unwrap();
    assert_eq!(invs.len(), 2);
    assert_eq!(invs[0].spectrum.len(), 27);
    assert_eq!(invs[0].normalization, "unit-contraction");
    assert!(invs.iter().all(|i| i.centrality_residual <= 1e-10));
    assert_eq!(v["invariants"][1]["f_contraction_factor"], -3.0);
}

#[test]
fn dfs_output_shape() {
    let out = casimir(&["dfs", "--d", "2", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let dec: DecompositionJson = serde_json::from_slice(&out.stdout).unwrap();
    let shape: Vec<_> = dec.blocks.iter().map(|b| (b.irrep_dim, b.multiplicity)).collect();
    assert_eq!(shape, vec![(3, 1), (1, 1)]);
    let singlet = &dec.blocks[1].basis[0];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expected = [[0.0, 0.0], [h, 0.0], [-h, 0.0], [0.0, 0.0]];
    for (got, want) in singlet.iter().zip(expected) {
        assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
    }

    let out = casimir(&["dfs", "--d", "2", "--n", "3"]);
    let v = stdout_json(&out);
    assert!(v["logical"]["closure"].as_array().unwrap().len() == 3);
    assert!(v["exchange"]["entries"].as_array().unwrap().len() == 4);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("casimir-cli-test-{}.csv", std::process::id()));
    let out = casimir(&[
        "exchange",
        "--d",
        "2",
        "--n",
        "2",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(text.lines().count(), 5);
}
