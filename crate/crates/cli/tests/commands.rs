use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modular")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn modobj_identity_gives_identity_delta() {
    let o = run(&["modobj", "--input", &data("identity.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = lines(&o);
    assert_eq!(out[0]["delta_identity_residual"], 0.0);
    assert_eq!(out[0]["delta_eigenvalues"], serde_json::json!([1.0, 1.0, 1.0, 1.0]));
    assert!(out[1..].iter().all(|c| c["pass"] == true));
}

#[test]
fn modobj_reads_csv() {
    let o = run(&["modobj", "--input", &data("complex.csv")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn modobj_antidiagonal_polar_factor() {
    let o = run(&["modobj", "--input", &data("antidiagonal.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = lines(&o);
    let h0 = &out[0]["h0"]["entries"];
    assert_eq!(h0[0][0][0], 4.0);
    assert_eq!(h0[1][1][0], 1.0);
}

#[test]
fn verify_singular_matrix_fails() {
    let o = run(&["verify", "--input", &data("singular.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("SingularInput"));
}

#[test]
fn verify_random_vector_passes_and_is_deterministic() {
    let a = run(&["verify", "--n", "4", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let out = lines(&a);
    assert_eq!(out.len(), 12);
    for key in ["invariant", "residual", "tolerance", "pass"] {
        assert!(out.iter().all(|c| c.get(key).is_some()));
    }
    let b = run(&["verify", "--n", "4", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["verify", "--n", "4", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_failed_check_exits_one() {
    // Thresholds scale with --tol; at 1e-17 the rounding-level residuals exceed them.
    let o = run(&["verify", "--input", &data("complex.csv"), "--tol", "1e-17"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("FAIL") && err.contains("residual"), "{err}");
    assert!(lines(&o).iter().any(|c| c["pass"] == false));
}

#[test]
fn verify_rejected_computation_exits_one() {
    let o = run(&["verify", "--n", "3", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("NotUnitary"));
}

#[test]
fn parse_errors_exit_two() {
    let o = run(&["verify", "--input", &data("broken.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["modobj", "--input", &data("missing.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["classify", "--input", &data("identity.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blocks_study_is_deterministic() {
    let a = run(&["blocks", "--n", "2", "--N", "16"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let rows = lines(&a);
    let sizes: Vec<u64> = rows.iter().map(|r| r["N"].as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![1, 2, 4, 8, 16]);
    assert!(rows.iter().all(|r| r["cyclic"] == true && r["separating"] == true));
    assert_eq!(a.stdout, run(&["blocks", "--n", "2", "--N", "16"]).stdout);
}

#[test]
fn classify_reproduces_two_lattice_classes() {
    let args = ["classify", "--input", &data("geometric_step1.json"), &data("geometric_step2.json")];
    let with_target: Vec<String> = args.iter().map(|s| s.to_string()).chain(["--target".into(), data("lattice10.json")]).collect();
    let refs: Vec<&str> = with_target.iter().map(String::as_str).collect();
    let o = run(&refs);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("admissible: both; equivalent: false"));
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("admissible: both; equivalent: false"));
    assert_eq!(o.stdout, run(&args).stdout);
}

#[test]
fn classify_inadmissible_exits_one() {
    let o = run(&["classify", "--input", &data("two_point.json"), "--target", &data("lattice10.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("admissible: none"));
    assert!(stderr(&o).contains("ratio_set"));
}

#[test]
fn enumerate_lattice_contains_both_classes() {
    let o = run(&["enumerate", "--input", &data("enumerate_lattice.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = lines(&o);
    let count = out.last().unwrap()["classes"].as_u64().unwrap();
    assert_eq!(count as usize, out.len() - 1);
    assert!(count >= 2);
    assert_eq!(o.stdout, run(&["enumerate", "--input", &data("enumerate_lattice.json")]).stdout);
    let o = run(&["enumerate", "--input", &data("enumerate_lattice.json"), "--type", "TypeII_1"]);
    assert_eq!(lines(&o).last().unwrap()["classes"], 0);
}

#[test]
fn enumerate_finite_target_single_class() {
    let o = run(&["enumerate", "--input", &data("enumerate_finite.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(lines(&o).last().unwrap()["classes"], 1);
}

#[test]
fn crosscheck_file_and_sweep() {
    let o = run(&["crosscheck", "--input", &data("two_point.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(lines(&o)[0]["report"]["pass"], true);
    let a = run(&["crosscheck", "--count", "20", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(lines(&a).len(), 20);
    assert_eq!(a.stdout, run(&["crosscheck", "--count", "20", "--seed", "5"]).stdout);
}

#[test]
fn crosscheck_rejects_tail_data() {
    let o = run(&["crosscheck", "--input", &data("geometric_step1.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("InvalidSpectralData"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let o = run(&["verify", "--n", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 12);
}
