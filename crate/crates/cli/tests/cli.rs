use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gkrein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkrein"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_diagonal() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.csv", "3,0,0\n0,2,0\n0,0,1\n");
    let out = gkrein(&["analyze", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["lambda1"], 3.0);
    assert_eq!(r["lambda2"], 2.0);
    assert_eq!(r["classification"], "second_eigenvalue_found");
}

#[test]
fn analyze_tridiagonal_json_input() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.json", r#"{"data": [[2,1,0],[1,2,1],[0,1,2]]}"#);
    let r = json(&gkrein(&["analyze", s(&f)]));
    let l1 = r["lambda1"].as_f64().unwrap();
    assert!((l1 - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    assert!((r["lambda2"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn analyze_reports_violated_hypotheses_with_exit_zero() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.csv", "0,1,0\n0,0,1\n1,0,0\n");
    let out = gkrein(&["analyze", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["classification"], "complex_pair_on_circle");
    assert_eq!(r["hypotheses_hold"], false);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "e.csv", "");
    let ragged = write(&dir, "r.csv", "1,2\n3\n");
    for f in [&empty, &ragged] {
        let out = gkrein(&["analyze", s(f)]);
        assert_eq!(out.status.code(), Some(2));
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(
        gkrein(&["analyze", "/nonexistent/m.csv"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gkrein(&["--tol", "-1", "analyze", s(&empty)]).status.code(),
        Some(2)
    );
    assert_eq!(
        gkrein(&["kernel", "--name", "bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gkrein(&["verify", "--theorem", "2", "--n", "4", "--trials", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gkrein(&["verify", "--theorem", "3", "--n", "4"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn compound_of_identity_is_identity_csv() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "i.csv", "1,0,0\n0,1,0\n0,0,1\n");
    let out = gkrein(&["--format", "text", "compound", s(&f), "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "1.0,0.0,0.0\n0.0,1.0,0.0\n0.0,0.0,1.0\n"
    );
}

#[test]
fn compound_cap_and_force() {
    let dir = TempDir::new().unwrap();
    let rows: Vec<String> = (0..40)
        .map(|i| {
            (0..40)
                .map(|j| if i == j { "1" } else { "0" })
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let f = write(&dir, "big.csv", &(rows.join("\n") + "\n"));
    // C(40, 2)^2 = 608400 entries fits; order 3 gives 9880^2 and does not.
    assert_eq!(
        gkrein(&["compound", s(&f), "--order", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gkrein(&["compound", s(&f), "--order", "2"]).status.code(),
        Some(0)
    );
}

#[test]
fn tn_check_permutation_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p.csv", "0,1\n1,0\n");
    let out = gkrein(&["tn-check", s(&f), "--order", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["verdict"], false);
    assert_eq!(r["witness"]["value"], -1.0);
    assert_eq!(r["witness"]["rows"], serde_json::json!([0, 1]));
}

#[test]
fn generate_then_tn_check_round_trip() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("o.csv");
    let g = gkrein(&[
        "--format",
        "text",
        "--out",
        s(&out_path),
        "generate",
        "--n",
        "5",
        "--seed",
        "42",
        "--oscillatory",
    ]);
    assert_eq!(g.status.code(), Some(0));
    assert!(g.stdout.is_empty());
    let t = gkrein(&["tn-check", s(&out_path), "--order", "5"]);
    assert_eq!(t.status.code(), Some(0));
    assert_eq!(json(&t)["verdict"], true);
}

#[test]
fn generated_csv_reparses_bitwise() {
    let dir = TempDir::new().unwrap();
    for (extra, seed) in [
        (vec![], "3"),
        (vec!["--general"], "4"),
        (vec!["--factors", "17"], "5"),
    ] {
        let mut args = vec!["--format", "text", "generate", "--n", "6", "--seed", seed];
        args.extend(extra);
        let csv = gkrein(&args).stdout;
        let mut jargs = args.clone();
        jargs[1] = "json";
        let data = json(&gkrein(&jargs));
        let path = write(&dir, "g.csv", std::str::from_utf8(&csv).unwrap());
        let back = json(&gkrein(&["compound", s(&path), "--order", "1"]));
        assert_eq!(back["data"], data["data"]);
        // the text rows parse to exactly the JSON numbers
        for (line, row) in std::str::from_utf8(&csv)
            .unwrap()
            .lines()
            .zip(data["data"].as_array().unwrap())
        {
            for (field, v) in line.split(',').zip(row.as_array().unwrap()) {
                assert_eq!(
                    field.parse::<f64>().unwrap().to_bits(),
                    v.as_f64().unwrap().to_bits()
                );
            }
        }
    }
}

#[test]
fn verify_batches() {
    let t2 = gkrein(&[
        "verify",
        "--theorem",
        "2",
        "--n",
        "6",
        "--trials",
        "100",
        "--seed",
        "1",
    ]);
    assert_eq!(t2.status.code(), Some(0));
    let r = json(&t2);
    assert_eq!(r["all_matched"], true);
    assert!(r["worst_residual"].as_f64().unwrap() < 1e-8);
    let t1 = gkrein(&[
        "verify",
        "--theorem",
        "1",
        "--n",
        "4",
        "--trials",
        "100",
        "--seed",
        "1",
    ]);
    assert_eq!(t1.status.code(), Some(0));
    assert_eq!(json(&t1)["matched"], 100);
}

#[test]
fn green_string_kernel() {
    let out = gkrein(&["kernel", "--name", "green_string", "--grid", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let a = &r["analysis"];
    let l1 = a["lambda1"].as_f64().unwrap();
    let l2 = a["lambda2"].as_f64().unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((l1 - 1.0 / pi2).abs() / (1.0 / pi2) < 1e-3);
    assert!((l2 / l1 - 0.25).abs() < 1e-3);
    assert_eq!(r["determinants_order2"]["verdict"], true);
}

#[test]
fn tabulated_constant_kernel_is_rank_one() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "k.csv", "1,1,1,1\n1,1,1,1\n1,1,1,1\n1,1,1,1\n");
    let r = json(&gkrein(&["kernel", "--file", s(&f)]));
    let a = &r["analysis"];
    assert!((a["lambda1"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(a["rho_wedge"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(r["grid"], 4);
}

#[test]
fn text_and_json_carry_the_same_numbers() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.csv", "2,1,0\n1,2,1\n0,1,2\n");
    let j = json(&gkrein(&["analyze", s(&f)]));
    let t = String::from_utf8(gkrein(&["--format", "text", "analyze", s(&f)]).stdout).unwrap();
    for key in ["lambda1", "lambda2", "rho_wedge", "residual_theorem3"] {
        let line = t
            .lines()
            .find(|l| l.starts_with(&format!("{key}: ")))
            .unwrap();
        assert_eq!(line, format!("{key}: {}", j[key]));
    }
}
