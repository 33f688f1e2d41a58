use std::path::{Path, PathBuf};
use std::process::Command;

use gme::cli::{run, RunManifest, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};
use serde_json::Value;

fn gme(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["gme"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    let text = std::fs::read_to_string(path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let validator = schema(schema_name);
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}\n{doc:#}");
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn out_path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn eval_text_output() {
    let (code, out, _) = gme(&["eval", "--coeffs", "0.5,0.5,0.5,0.5"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("SharedDiagonal"));
    assert!(out.contains("lambda_max_sq      0.5"));
}

#[test]
fn eval_json_examples() {
    let cases = [
        (
            "0.577350,0.577350,0.577350,0",
            true,
            4.0 / 9.0,
            "ConvexQuadrangle",
        ),
        ("0.5,0.5,0.5,0.5", false, 0.5, "SharedDiagonal"),
        ("1,0,0,0", false, 1.0, "LargestCoefficient"),
    ];
    for (coeffs, renormalize, expected, regime) in cases {
        let mut args = vec!["eval", "--coeffs", coeffs, "--json"];
        if renormalize {
            args.push("--renormalize");
        }
        let (code, out, _) = gme(&args);
        assert_eq!(code, EXIT_OK, "{out}");
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_valid("eval.schema.json", &doc);
        let value = doc["lambda_max_sq"].as_f64().unwrap();
        assert!((value - expected).abs() < 1e-12, "{coeffs}: {value}");
        assert_eq!(doc["regime"], regime);
        assert!(doc["overlap_residual"].as_f64().unwrap() < 1e-10);
        let eg = doc["geometric_measure"].as_f64().unwrap();
        assert_eq!(eg, 1.0 - value);
    }
}

#[test]
fn eval_product_has_zero_measure() {
    let (_, out, _) = gme(&["eval", "--coeffs", "1,0,0,0", "--json"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["geometric_measure"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["lagrange"], Value::Null);
}

#[test]
fn eval_rejects_bad_coefficients() {
    for coeffs in ["0.5,0.5,0.5,0.6", "-0.5,0.5,0.5,0.5", "0,0,0,0"] {
        let (code, out, _) = gme(&["eval", "--coeffs", coeffs, "--json"]);
        assert_eq!(code, EXIT_USAGE, "{coeffs}");
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_valid("error.schema.json", &doc);
        assert_eq!(doc["error"]["kind"], "input");
    }
    let (code, _, err) = gme(&["eval", "--coeffs", "0.5,0.5,0.5,0.6"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("squared norm"));
}

#[test]
fn usage_errors_exit_two() {
    let (code, out, _) = gme(&["eval", "--coeffs", "1,2", "--json"]);
    assert_eq!(code, EXIT_USAGE);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_valid("error.schema.json", &doc);
    assert_eq!(doc["error"]["kind"], "usage");
    assert!(doc["error"]["message"].as_str().unwrap().contains("coeffs"));

    assert_eq!(gme(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(gme(&["validate", "--samples", "0"]).0, EXIT_USAGE);
    assert_eq!(
        gme(&[
            "surface",
            "--which",
            "r1",
            "--samples",
            "3",
            "--out",
            "x.csv"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(gme(&["--help"]).0, EXIT_OK);
}

#[test]
fn sweep_equal_triple_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "curve.csv");
    let (code, stdout, _) = gme(&[
        "sweep",
        "--family",
        "a=b=c",
        "--param",
        "d",
        "--range",
        "0:1",
        "--steps",
        "101",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("101 rows"));
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header,
        [
            "param",
            "a",
            "b",
            "c",
            "d",
            "lambda_max_sq",
            "regime",
            "transition"
        ]
    );
    assert_eq!(rows.len(), 101);
    let value = |i: usize| rows[i][5].parse::<f64>().unwrap();
    assert!((value(0) - 4.0 / 9.0).abs() < 1e-12);
    assert!((value(50) - 0.5).abs() < 1e-12);
    assert!((value(100) - 1.0).abs() < 1e-12);
    assert_eq!(rows[50][6], "SharedDiagonal");
    let flagged: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][7] == "1").collect();
    assert_eq!(flagged, [50, 51, 76]);
    // 17 significant digits round-trip exactly
    assert_eq!(rows[1][0].parse::<f64>().unwrap(), 0.01);

    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(RunManifest::path_for(&out)).unwrap())
            .unwrap();
    assert_valid("manifest.schema.json", &manifest);
    assert_eq!(manifest["command"], "sweep");
    assert_eq!(manifest["rows"], 101);
    assert_eq!(manifest["options"]["family"], "a=b=c");
}

#[test]
fn sweep_single_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "one.csv");
    let code = gme(&[
        "sweep",
        "--family",
        "a=b=c",
        "--param",
        "d",
        "--range",
        "0.3:0.9",
        "--steps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ])
    .0;
    assert_eq!(code, EXIT_OK);
    let (_, rows) = read_csv(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.3);
}

/// Circumradius of the triangle with sides x, y, z: R = xyz / (4K).
fn triangle_lambda(x: f64, y: f64, z: f64) -> f64 {
    let s = (x + y + z) / 2.0;
    let k2 = s * (s - x) * (s - y) * (s - z);
    4.0 * (x * y * z).powi(2) / (16.0 * k2)
}

#[test]
fn sweep_triangle_special_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "tri.csv");
    let code = gme(&[
        "sweep",
        "--family",
        "b=c,d=0",
        "--param",
        "a",
        "--range",
        "0.05:0.95",
        "--steps",
        "37",
        "--out",
        out.to_str().unwrap(),
    ])
    .0;
    assert_eq!(code, EXIT_OK);
    let (_, rows) = read_csv(&out);
    let mut convex_rows = 0;
    for row in &rows {
        let f: Vec<f64> = row[..6].iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[4], 0.0);
        if row[6] == "ConvexQuadrangle" {
            convex_rows += 1;
            let expected = triangle_lambda(f[1], f[2], f[3]);
            assert!((f[5] - expected).abs() < 1e-12, "{row:?} vs {expected}");
        }
    }
    assert!(convex_rows > 10);
}

#[test]
fn sweep_with_oracle_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "oracle.csv");
    let code = gme(&[
        "sweep",
        "--family",
        "a=b=c",
        "--param",
        "d",
        "--range",
        "0:1",
        "--steps",
        "11",
        "--out",
        out.to_str().unwrap(),
        "--with-oracle",
        "--seed",
        "4",
    ])
    .0;
    assert_eq!(code, EXIT_OK);
    let (header, rows) = read_csv(&out);
    assert_eq!(header.last().unwrap(), "oracle");
    for row in rows {
        let analytic: f64 = row[5].parse().unwrap();
        let oracle: f64 = row[8].parse().unwrap();
        assert!((analytic - oracle).abs() < 1e-8, "{row:?}");
    }
}

#[test]
fn sweep_bad_spec_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "bad.csv");
    for spec in ["a=b=c=d", "a=e", "a=b,c=d"] {
        let (code, _, err) = gme(&[
            "sweep",
            "--family",
            spec,
            "--param",
            "a",
            "--range",
            "0:1",
            "--steps",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_USAGE, "{spec}");
        assert!(err.contains("family"), "{err}");
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run_surface = |name: &str| {
        let out = out_path(&dir, name);
        let code = gme(&[
            "surface",
            "--which",
            "shared",
            "--samples",
            "200",
            "--seed",
            "12",
            "--out",
            out.to_str().unwrap(),
        ])
        .0;
        assert_eq!(code, EXIT_OK);
        let mut manifest: Value =
            serde_json::from_str(&std::fs::read_to_string(RunManifest::path_for(&out)).unwrap())
                .unwrap();
        assert_valid("manifest.schema.json", &manifest);
        manifest.as_object_mut().unwrap().remove("timestamp");
        manifest["options"].as_object_mut().unwrap().remove("out");
        (std::fs::read(&out).unwrap(), manifest)
    };
    let (csv1, m1) = run_surface("s1.csv");
    let (csv2, m2) = run_surface("s2.csv");
    assert_eq!(csv1, csv2);
    assert_eq!(m1, m2);
    assert_eq!(m1["skipped"], 0);
}

#[test]
fn surface_r0_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "r0.csv");
    assert_eq!(
        gme(&[
            "surface",
            "--which",
            "r0",
            "--samples",
            "300",
            "--seed",
            "1",
            "--out",
            out.to_str().unwrap()
        ])
        .0,
        EXIT_OK
    );
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["a", "b", "c", "d", "lambda_max_sq", "regime"]);
    assert_eq!(rows.len(), 300);
    for row in rows {
        assert!((row[4].parse::<f64>().unwrap() - 0.5).abs() <= 1e-9);
    }
}

#[test]
fn validate_passes_and_matches_schema() {
    let (code, out, _) = gme(&[
        "validate",
        "--samples",
        "50",
        "--seed",
        "7",
        "--tol",
        "1e-8",
        "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_valid("validate.schema.json", &doc);
    assert_eq!(doc["exceedances"], 0);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["worst"].as_array().unwrap().len(), 5);
}

#[test]
fn validate_product_basis_state() {
    let (code, out, _) = gme(&[
        "validate",
        "--samples",
        "1",
        "--coeffs",
        "0,0,1,0",
        "--tol",
        "1e-12",
        "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert!(doc["max_deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn validate_absurd_tolerance_fails() {
    let (code, out, _) = gme(&[
        "validate",
        "--samples",
        "40",
        "--seed",
        "3",
        "--tol",
        "1e-16",
    ]);
    assert_eq!(code, EXIT_VALIDATION);
    assert!(out.contains("FAIL"));
    let exceed: usize = out
        .lines()
        .find(|l| l.starts_with("exceedances"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    assert!(exceed > 0);
}

#[test]
fn binary_uses_seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_gme");
    let run_with = |name: &str, env_seed: &str, flag: Option<&str>| {
        let out = out_path(&dir, name);
        let mut cmd = Command::new(bin);
        cmd.args([
            "surface",
            "--which",
            "r0",
            "--samples",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        if let Some(seed) = flag {
            cmd.args(["--seed", seed]);
        }
        let output = cmd.env("GME_SEED", env_seed).output().unwrap();
        assert!(output.status.success());
        let manifest: Value =
            serde_json::from_str(&std::fs::read_to_string(RunManifest::path_for(&out)).unwrap())
                .unwrap();
        manifest["rng_seed"].as_u64().unwrap()
    };
    assert_eq!(run_with("env.csv", "31", None), 31);
    assert_eq!(run_with("flag.csv", "31", Some("5")), 5);

    let output = Command::new(bin)
        .args(["eval", "--coeffs", "2,0,0,0"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&output.stderr).contains("squared norm"));
}
