use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

use symcanon::blocks::p_block;
use symcanon::io::{matrix_to_json, pair_to_json, to_pretty};
use symcanon::random::{random_symplectic, random_unimodular, rng};
use symcanon::verify::{names, Constructors};
use symcanon::{Matrix, MatrixPair, Rational};
use symcanon_cli::{exit, run_verify_suite};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

fn symcanon(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_symcanon"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    write(dir, name, &to_pretty(v)).display().to_string()
}

fn p1() -> Matrix<Rational> {
    p_block::<Rational>(1)
}

#[test]
fn gen_q1_is_diagonal() {
    let r = symcanon(&[
        "gen", "--block", "Q", "--n", "1", "--c", "2", "--field", "rational",
    ]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["field"], "rational");
    assert_eq!(v["rows"], serde_json::json!([["2", "0"], ["0", "2"]]));
}

#[test]
fn gen_parameters_and_fields() {
    let r = symcanon(&[
        "gen", "--block", "J", "--n", "2", "--a", "1/3", "--field", "real",
    ]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    assert_eq!(r.json()["rows"][0][0].to_string(), "3.3333333333333331e-1");

    let r = symcanon(&["gen", "--block", "P", "--n", "1", "--sign", "-1"]);
    assert_eq!(
        r.json()["rows"],
        serde_json::json!([["-1", "0"], ["0", "0"]])
    );

    let r = symcanon(&["gen", "--block", "F", "--n", "1", "--poly", "[1, 0, 1]"]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    assert_eq!(r.json()["rows"].as_array().unwrap().len(), 2);

    let r = symcanon(&[
        "gen", "--block", "J", "--n", "1", "--a", "[1, 2]", "--field", "gaussian",
    ]);
    assert_eq!(r.json()["rows"], serde_json::json!([[["1", "2"]]]));
}

#[test]
fn gen_errors() {
    assert_eq!(
        symcanon(&["gen", "--block", "X", "--n", "1"]).code,
        exit::MALFORMED
    );
    assert_eq!(
        symcanon(&["gen", "--block", "Q", "--n", "1", "--c", "abc"]).code,
        exit::MALFORMED
    );
    assert_eq!(
        symcanon(&["gen", "--block", "Q", "--n", "1", "--c", "-1"]).code,
        exit::PRECONDITION
    );
    assert_eq!(
        symcanon(&["gen", "--block", "Q", "--n", "1"]).code,
        exit::PRECONDITION
    );
    assert_eq!(
        symcanon(&["gen", "--block", "P", "--n", "0"]).code,
        exit::PRECONDITION
    );
    assert_eq!(
        symcanon(&["gen", "--block", "P", "--n", "1", "--sign", "2"]).code,
        exit::PRECONDITION
    );
    assert_eq!(
        symcanon(&["gen", "--block", "F", "--n", "1", "--poly", "[-1, 0, 1]"]).code,
        exit::PRECONDITION
    );
}

#[test]
fn williamson_of_identity() {
    let dir = TempDir::new().unwrap();
    let path = write_json(
        dir.path(),
        "identity4.json",
        &matrix_to_json(&Matrix::<Rational>::identity(4)),
    );
    let r = symcanon(&["williamson", &path]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    let v = r.json();
    let result = &v["result"];
    let identity = |k: usize| matrix_to_json(&Matrix::<f64>::identity(k));
    assert_eq!(result["d"], identity(2));
    assert_eq!(result["s"], identity(4));
    assert_eq!(result["residual_form"].as_f64(), Some(0.0));
    assert_eq!(result["residual_symplectic"].as_f64(), Some(0.0));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn williamson_preconditions() {
    let dir = TempDir::new().unwrap();
    let indefinite = write(
        dir.path(),
        "indef.json",
        r#"{"field": "real", "rows": [[1, 0], [0, -1]]}"#,
    );
    assert_eq!(
        symcanon(&["williamson", indefinite.to_str().unwrap()]).code,
        exit::PRECONDITION
    );
    let complex = write(
        dir.path(),
        "c.json",
        r#"{"field": "complex", "rows": [[1, 0], [0, 1]]}"#,
    );
    assert_eq!(
        symcanon(&["williamson", complex.to_str().unwrap()]).code,
        exit::PRECONDITION
    );
    let odd = write(
        dir.path(),
        "odd.json",
        r#"{"field": "real", "rows": [[1]]}"#,
    );
    assert_eq!(
        symcanon(&["williamson", odd.to_str().unwrap()]).code,
        exit::PRECONDITION
    );
}

#[test]
fn p1_is_congruent_to_its_symplectic_conjugate() {
    let dir = TempDir::new().unwrap();
    let s: Matrix<Rational> = random_symplectic(&mut rng(7), 1);
    let original = MatrixPair::with_omega(p1()).unwrap();
    let conjugate = MatrixPair::new(p1().congruent(&s).unwrap(), Matrix::omega(1)).unwrap();
    let a = write_json(dir.path(), "p1.json", &pair_to_json(&original));
    let b = write_json(dir.path(), "p2.json", &pair_to_json(&conjugate));
    let r = symcanon(&["check-congruent", &a, &b]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    assert_eq!(r.json()["result"]["congruent"], true);
    assert_eq!(r.json()["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn congruence_with_a_general_skew_part() {
    let dir = TempDir::new().unwrap();
    let t: Matrix<Rational> = random_unimodular(&mut rng(11), 2);
    let moved = symcanon::congruence(&t, &MatrixPair::with_omega(p1()).unwrap()).unwrap();
    let a = write_json(dir.path(), "p.json", &matrix_to_json(&p1()));
    let b = write_json(dir.path(), "moved.json", &pair_to_json(&moved));
    assert_eq!(
        symcanon(&["check-congruent", &a, &b]).json()["result"]["congruent"],
        true
    );
    let neg = write_json(dir.path(), "neg.json", &matrix_to_json(&-p1()));
    assert_eq!(
        symcanon(&["check-congruent", &a, &neg]).json()["result"]["congruent"],
        false
    );
    let big = write_json(
        dir.path(),
        "big.json",
        &matrix_to_json(&Matrix::<Rational>::identity(4)),
    );
    assert_eq!(
        symcanon(&["check-congruent", &a, &big]).code,
        exit::PRECONDITION
    );
}

#[test]
fn symplectic_similarity_sees_signs() {
    let dir = TempDir::new().unwrap();
    let h = write(
        dir.path(),
        "h.json",
        r#"{"field": "real", "rows": [[0, 1], [-1, 0]]}"#,
    );
    let minus = write(
        dir.path(),
        "minus.json",
        r#"{"field": "real", "rows": [[0, -1], [1, 0]]}"#,
    );
    let r = symcanon(&[
        "check-sympl-similar",
        h.to_str().unwrap(),
        minus.to_str().unwrap(),
    ]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    assert_eq!(r.json()["result"]["symplectically_similar"], false);
    let r = symcanon(&[
        "check-sympl-similar",
        "--field",
        "complex",
        h.to_str().unwrap(),
        minus.to_str().unwrap(),
    ]);
    assert_eq!(r.json()["result"]["symplectically_similar"], true);
    let not_ham = write(
        dir.path(),
        "nh.json",
        r#"{"field": "real", "rows": [[1, 0], [0, 1]]}"#,
    );
    assert_eq!(
        symcanon(&[
            "check-sympl-similar",
            h.to_str().unwrap(),
            not_ham.to_str().unwrap()
        ])
        .code,
        exit::PRECONDITION
    );
}

#[test]
fn hamiltonian_canonical_form() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.json", r#"{"rows": [[3, 0], [0, -3]]}"#);
    let r = symcanon(&["ham-canon", "--certificate", h.to_str().unwrap()]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    let result = &r.json()["result"];
    assert_eq!(result["form"], "hamiltonian");
    assert_eq!(result["summands"][0]["type"], "hyperbolic");
    assert_eq!(result["summands"][0]["params"]["a"], "3");
    assert!(result.get("certificate").is_some());
    assert_eq!(result["residual"].as_f64(), Some(0.0));
}

#[test]
fn canon_reports_sorted_summands_and_optional_certificate() {
    let dir = TempDir::new().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        r#"{"field": "rational", "rows": [[-1, 0, 0, 0], [0, 5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 5]]}"#,
    );
    let plain = symcanon(&["canon", a.to_str().unwrap()]);
    assert_eq!(plain.code, exit::OK, "{}", plain.stderr);
    let result = &plain.json()["result"];
    let types: Vec<&str> = result["summands"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["type"].as_str().unwrap())
        .collect();
    assert_eq!(types, ["P", "Q"]);
    assert_eq!(result["summands"][0]["sign"], -1);
    assert!(result.get("certificate").is_none());
    let again = symcanon(&["canon", a.to_str().unwrap()]);
    assert_eq!(plain.stdout, again.stdout, "output must be byte-stable");
}

#[test]
fn real_output_has_seventeen_significant_digits() {
    let dir = TempDir::new().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        r#"{"field": "real", "rows": [[0.1, 0], [0, 0.1]]}"#,
    );
    let r = symcanon(&["canon", "--certificate", a.to_str().unwrap()]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    let c = r.json()["result"]["summands"][0]["params"]["c"].to_string();
    let mantissa = c.split('e').next().unwrap();
    assert_eq!(
        mantissa.chars().filter(char::is_ascii_digit).count(),
        17,
        "{c}"
    );
    assert!((c.parse::<f64>().unwrap() - 0.1).abs() < 1e-15);
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"rows\": [[1, 2]");
    assert_eq!(
        symcanon(&["canon", broken.to_str().unwrap()]).code,
        exit::MALFORMED
    );
    let ragged = write(dir.path(), "ragged.json", r#"{"rows": [[1, 2], [3]]}"#);
    assert_eq!(
        symcanon(&["canon", ragged.to_str().unwrap()]).code,
        exit::MALFORMED
    );
    let word = write(dir.path(), "word.json", r#"{"rows": [["x", 0], [0, 1]]}"#);
    assert_eq!(
        symcanon(&["canon", word.to_str().unwrap()]).code,
        exit::MALFORMED
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        symcanon(&["canon", missing.to_str().unwrap()]).code,
        exit::MALFORMED
    );
    assert_eq!(symcanon(&["canon"]).code, exit::MALFORMED);
    assert_eq!(symcanon(&["frobnicate"]).code, exit::MALFORMED);
    let fine = write(dir.path(), "fine.json", r#"{"rows": [[1, 0], [0, 1]]}"#);
    assert_eq!(
        symcanon(&["canon", "--tol", "1e-6", fine.to_str().unwrap()]).code,
        exit::MALFORMED
    );
    assert_eq!(
        symcanon(&[
            "canon",
            "--field",
            "real",
            "--tol",
            "-1",
            fine.to_str().unwrap()
        ])
        .code,
        exit::MALFORMED
    );
}

#[test]
fn precondition_violations_exit_two() {
    let dir = TempDir::new().unwrap();
    let skew = write(dir.path(), "skew.json", r#"{"rows": [[0, 1], [2, 0]]}"#);
    let r = symcanon(&["canon", skew.to_str().unwrap()]);
    assert_eq!(r.code, exit::PRECONDITION);
    assert!(r.stderr.contains("not symmetric"), "{}", r.stderr);
    let singular = write(
        dir.path(),
        "singular.json",
        r#"{"a": {"rows": [[1, 0], [0, 1]]}, "b": {"rows": [[0, 0], [0, 0]]}}"#,
    );
    assert_eq!(
        symcanon(&["canon", singular.to_str().unwrap()]).code,
        exit::PRECONDITION
    );
}

#[test]
fn help_and_version_exit_zero() {
    let r = symcanon(&["--help"]);
    assert_eq!(r.code, exit::OK);
    assert!(r.stdout.contains("verify-suite"));
    assert_eq!(symcanon(&["--version"]).code, exit::OK);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let r = symcanon(&[
        "verify-suite",
        "--bound",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["result"]["all_passed"], true);
}

#[test]
fn verify_suite_passes_up_to_three() {
    let r = symcanon(&["verify-suite", "--bound", "3"]);
    assert_eq!(r.code, exit::OK, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["result"]["all_passed"], true);
    assert_eq!(v["result"]["failing_identities"], serde_json::json!([]));
    assert!(v["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["identity"] == names::REMARK));
    assert_eq!(
        symcanon(&["verify-suite", "--bound", "11"]).code,
        exit::PRECONDITION
    );
    assert_eq!(
        symcanon(&["verify-suite", "--bound", "0"]).code,
        exit::PRECONDITION
    );
}

fn tampered_p(n: usize) -> Matrix<Rational> {
    let mut m = p_block::<Rational>(n);
    m[(2 * n - 1, n)] = Rational::from_integer(1.into());
    m
}

#[test]
fn tampered_p_constructor_exits_four_naming_the_rank_identity() {
    let ctor = Constructors {
        p: tampered_p,
        ..Constructors::default()
    };
    let outcome = run_verify_suite(2, &ctor, None);
    assert_eq!(outcome.code, exit::VERIFY_FAILED);
    assert!(outcome.stderr.contains(names::RANK_P), "{}", outcome.stderr);
    let v: Value = serde_json::from_str(&outcome.stdout).unwrap();
    assert_eq!(v["result"]["failing_identities"][0], names::RANK_P);
}

#[test]
fn batch_reports_each_file() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "a_good.json",
        r#"{"field": "real", "rows": [[2, 0], [0, 8]]}"#,
    );
    write(
        dir.path(),
        "b_indefinite.json",
        r#"{"field": "real", "rows": [[1, 0], [0, -1]]}"#,
    );
    write(dir.path(), "c_broken.json", "not json");
    write(dir.path(), "ignored.txt", "not considered");
    let r = symcanon(&["williamson", "--batch", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, exit::PRECONDITION, "{}", r.stdout);
    let v = r.json();
    let files = v["result"]["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    assert_eq!(v["result"]["failed"], 2);
    assert_eq!(files[0]["exit_code"], exit::OK);
    let alpha = files[0]["result"]["symplectic_eigenvalues"][0]
        .as_f64()
        .unwrap();
    assert!((alpha - 4.0).abs() < 1e-12, "{alpha}");
    assert_eq!(files[1]["exit_code"], exit::PRECONDITION);
    assert_eq!(files[1]["error"]["kind"], "precondition");
    assert_eq!(files[2]["exit_code"], exit::MALFORMED);
    assert!(files[2].get("sha256").is_none());

    let r = symcanon(&[
        "check-congruent",
        "--batch",
        dir.path().to_str().unwrap(),
        "x",
        "y",
    ]);
    assert_eq!(r.code, exit::MALFORMED);
}

#[test]
fn batch_canon_all_good() {
    let dir = TempDir::new().unwrap();
    for k in 1..=3 {
        write_json(
            dir.path(),
            &format!("q{k}.json"),
            &matrix_to_json(&Matrix::<Rational>::identity(2 * k)),
        );
    }
    let r = symcanon(&["canon", "--batch", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, exit::OK, "{}", r.stdout);
    let v = r.json();
    let files = v["result"]["files"].as_array().unwrap();
    for (k, f) in files.iter().enumerate() {
        assert_eq!(f["result"]["summands"].as_array().unwrap().len(), k + 1);
    }
}

#[test]
fn borderline_float_input_exits_three() {
    let dir = TempDir::new().unwrap();
    let a = write(
        dir.path(),
        "borderline.json",
        r#"{"field": "real", "rows": [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1e-9, 0], [0, 0, 0, -1e-9]]}"#,
    );
    let r = symcanon(&["canon", a.to_str().unwrap()]);
    assert_eq!(r.code, exit::INDETERMINATE, "{}", r.stdout);
    assert!(r.stderr.contains("indeterminate"), "{}", r.stderr);
}
