use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn entangle(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_entangle"))
        .args(args)
        .env_remove("ENTANGLE_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Output with the wall-clock field removed.
fn numeric(mut v: Value) -> Value {
    v["manifest"]
        .as_object_mut()
        .unwrap()
        .remove("duration_seconds");
    v
}

#[test]
fn empty_argv_is_a_usage_error() {
    let out = entangle(&[], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(entangle(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(
        entangle(&["maximize", "--restarts", "x"], None)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn catalog_piped_into_profile() {
    let state = entangle(&["catalog", "M4"], None);
    let text = String::from_utf8(state.stdout).unwrap();
    let v = json_of(&entangle(&["profile", "-"], Some(&text)));
    let avg = v["average"].as_f64().unwrap();
    assert!((avg - (1.0 + 0.5 * 3f64.log2())).abs() < 1e-12);
    assert_eq!(v["manifest"]["command"], "profile");
    assert_eq!(v["manifest"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn entropy_of_cat_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c4.json");
    let state = entangle(&["catalog", "CAT_N(4)"], None);
    std::fs::write(&path, &state.stdout).unwrap();
    let v = json_of(&entangle(&["entropy", path.to_str().unwrap()], None));
    assert!((v["average"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = json_of(&entangle(
        &["entropy", "--keep", "A", path.to_str().unwrap()],
        None,
    ));
    assert!((v["entropy"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn file_round_trip_is_bitwise() {
    use entangle_core::catalog::{make, CatalogId};
    use entangle_core::metrics::profile;
    let state = entangle(&["catalog", "PSI_EXAMPLE"], None);
    let text = String::from_utf8(state.stdout).unwrap();
    let v = json_of(&entangle(&["entropy", "-"], Some(&text)));
    let direct = profile(&make(CatalogId::PsiExample).unwrap()).unwrap();
    assert_eq!(
        v["average"].as_f64().unwrap().to_bits(),
        direct.average().to_bits()
    );
}

#[test]
fn malformed_state_is_a_domain_error() {
    let out = entangle(&["entropy", "-"], Some(r#"{"dims":[2,2],"amps":[[1,0]]}"#));
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(
        entangle(&["entropy", "/nonexistent/state.json"], None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(entangle(&["catalog", "NOPE"], None).status.code(), Some(1));
}

#[test]
fn seeded_runs_reproduce() {
    let args = ["maximize", "--restarts", "3", "--seed", "4"];
    let a = numeric(json_of(&entangle(&args, None)));
    let b = numeric(json_of(&entangle(&args, None)));
    assert_eq!(a, b);
    assert_eq!(a["manifest"]["seed"], 4);
    assert_eq!(a["restarts"].as_array().unwrap().len(), 3);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_entangle"))
        .args(["ame", "--dims", "2,2", "--restarts", "2"])
        .env("ENTANGLE_SEED", "17")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["manifest"]["seed"], 17);
    assert!(v["floor"].as_f64().unwrap() < 1e-12);
}

#[test]
fn strict_flags_non_convergence() {
    let args = [
        "--strict",
        "maximize",
        "--restarts",
        "1",
        "--max-iters",
        "2",
    ];
    let out = entangle(&args, None);
    assert_eq!(out.status.code(), Some(1));
    // the report is still printed
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["restarts"][0]["termination"], "max_iterations");
    assert!(entangle(&args[1..], None).status.success());
}

#[test]
fn canonical_form_pipes_on() {
    let state = String::from_utf8(entangle(&["catalog", "M4"], None).stdout).unwrap();
    let canon = entangle(
        &["canonicalize", "-", "--restarts", "4", "--seed", "1"],
        Some(&state),
    );
    let text = String::from_utf8(canon.stdout).unwrap();
    let c: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(c["converged"], true);
    assert_eq!(c["unitaries"].as_array().unwrap().len(), 4);
    let v = json_of(&entangle(&["profile", "-"], Some(&text)));
    assert!((v["average"].as_f64().unwrap() - (1.0 + 0.5 * 3f64.log2())).abs() < 1e-10);
}

#[test]
fn measurement_outputs() {
    let state = String::from_utf8(entangle(&["catalog", "M4"], None).stdout).unwrap();
    let v = json_of(&entangle(&["measure", "-", "--party", "B"], Some(&state)));
    let outcomes = v["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 2);
    for o in outcomes {
        assert!((o["probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!(o["profile"]["average"].as_f64().is_some());
    }
    let v = json_of(&entangle(
        &["robustness", "-", "--trials", "2", "--seed", "3"],
        Some(&state),
    ));
    assert_eq!(v["fragile_bases"], 0);
    let qutrits = r#"{"dims":[3,2],"amps":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}"#;
    let out = entangle(&["measure", "-", "--basis", "plusminus"], Some(qutrits));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stationarity_at_m4() {
    let state = String::from_utf8(entangle(&["catalog", "M4"], None).stdout).unwrap();
    let v = json_of(&entangle(&["stationarity", "-"], Some(&state)));
    assert!(v["tangent_grad_norm"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 3);
}
