use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ciequil");

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn ciequil(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("CIEQ_TOL").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = ciequil(&all);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ciequil-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exit_codes() {
    assert_eq!(code(&ciequil(&["invariants", "--format", "4,2,2", "--graph", "edges:2-3"])), 0);
    assert_eq!(code(&ciequil(&["invariants", "--format", "5,2,2", "--graph", "edges:2-3"])), 1);
    assert_eq!(code(&ciequil(&["invariants", "--format", "4,x,2"])), 2);
    assert_eq!(code(&ciequil(&["invariants", "--format", "4,2,2", "--graph", "edges:2-5"])), 2);
    assert_eq!(code(&ciequil(&["verify", "--fixture", "nope", "--family", "G1"])), 2);
    assert_eq!(code(&ciequil(&["verify", "--game", &data("missing.json"), "--profile", &data("pd-uniform.json")])), 2);
    assert_eq!(code(&ciequil(&["bogus"])), 2);
}

#[test]
fn parse_errors_carry_positions() {
    let out = ciequil(&["invariants", "--format", "4,2,2", "--graph", "edges:2-3,3"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("column 11"), "{err}");
}

#[test]
fn output_is_deterministic() {
    let runs = [
        vec!["solve", "--fixture", "pareto-2-2-2", "--starts", "16", "--seed", "3"],
        vec!["solve", "--fixture", "beats-nash-4-2-2", "--newton", "--starts", "8"],
        vec!["equations", "--fixture", "coordination-2-2-2", "--graph", "edges:1-2,2-3", "--export", "m2"],
        vec!["invariants", "--format", "3,3,2,2", "--graph", "edges:1-2,3-4", "--json"],
    ];
    for args in runs {
        let a = ciequil(&args);
        let b = ciequil(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status, b.status);
    }
}

#[test]
fn different_seeds_may_differ_but_each_verifies() {
    for seed in ["1", "2"] {
        let v = json(&["solve", "--fixture", "pareto-2-2-2", "--newton", "--starts", "8", "--seed", seed]);
        for check in v["verifications"].as_array().unwrap() {
            assert_eq!(check["verdicts"]["ci"], Value::Bool(true));
        }
    }
}

#[test]
fn invariants_json_has_table_values() {
    let v = json(&["invariants", "--format", "3,3,3", "--graph", "edges:2-3"]);
    let reports = v["reports"].as_array().unwrap();
    let nash = reports.iter().find(|r| r["kind"] == "NashCI").unwrap();
    assert_eq!(nash["dimension"], 4);
    assert_eq!(nash["degree"], "141");
    assert_eq!(nash["status"], "nonempty");
    let v = json(&["invariants", "--format", "7,2,3", "--graph", "edges:2-3"]);
    let nash = v["reports"].as_array().unwrap().iter().find(|r| r["kind"] == "NashCI").unwrap().clone();
    assert_eq!(nash["status"], "empty");
    assert!(nash["degree"].is_null() && nash["dimension"].is_null());
}

#[test]
fn equations_write_to_a_file() {
    let path = scratch("pd.m2");
    let p = path.to_string_lossy().into_owned();
    let args = [
        "equations",
        "--game",
        &data("prisoners-dilemma.json"),
        "--graph",
        &data("path-3.json"),
        "--export",
        "m2",
        "-o",
        &p,
    ];
    // The graph has three vertices but the game two players.
    assert_eq!(code(&ciequil(&args)), 2);
    let args = ["equations", "--fixture", "beats-nash-4-2-2", "--graph", "edges:2-3", "--export", "m2", "-o", &p];
    assert_eq!(code(&ciequil(&args)), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("R = QQ["));
    // Three linear generators for player 1 and one cubic for each of players 2 and 3.
    let body = text.split("ideal(").nth(1).unwrap();
    assert_eq!(body.lines().filter(|l| l.trim_end().ends_with(',') || l.trim() == ");").count(), 5);
    let again = ciequil(&["equations", "--fixture", "beats-nash-4-2-2", "--graph", "edges:2-3", "--export", "m2"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn tolerance_comes_from_the_environment() {
    let profile = scratch("near.json");
    std::fs::write(&profile, r#"{ "format": [2, 2], "p": [0.375, 0.125, 0.125000001, 0.374999999] }"#).unwrap();
    let p = profile.to_string_lossy().into_owned();
    let base = [
        "verify",
        "--game",
        &data("prisoners-dilemma.json"),
        "--graph",
        "complete",
        "--profile",
        &p,
        "--backend",
        "double",
    ];
    assert_eq!(code(&ciequil(&base)), 1);
    let loose = Command::new(BIN).args(base).env("CIEQ_TOL", "1e-6").output().unwrap();
    assert_eq!(code(&loose), 0);
    let mut explicit = base.to_vec();
    explicit.extend(["--tol", "1e-6"]);
    assert_eq!(code(&ciequil(&explicit)), 0);
}

#[test]
fn required_verdict_sets_the_exit_code() {
    let g = data("prisoners-dilemma.json");
    let p = data("pd-correlated.json");
    let with =
        |req: &str| code(&ciequil(&["verify", "--game", &g, "--graph", "complete", "--profile", &p, "--require", req]));
    assert_eq!(with("dependency"), 0);
    assert_eq!(with("ci"), 0);
    assert_eq!(with("nash"), 1);
    // On the empty graph the correlated profile is not a CI equilibrium.
    let out = ciequil(&["verify", "--game", &g, "--graph", "empty", "--profile", &p]);
    assert_eq!(code(&out), 1);
}

#[test]
fn family_parameters_are_checked() {
    let out = ciequil(&["verify", "--fixture", "el-farol-3/4", "--family", "G1", "--param", "1/3"]);
    assert_eq!(code(&out), 2);
    let out = ciequil(&["verify", "--fixture", "prisoners-dilemma", "--family", "second", "--param", "-1/5"]);
    assert_eq!(code(&out), 0);
    // The closed end of the interval is on the boundary of the simplex.
    let out = ciequil(&["verify", "--fixture", "prisoners-dilemma", "--family", "second", "--param", "-1/3"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not totally mixed"));
}

#[test]
fn wrong_shape_falls_back_to_newton() {
    let out = ciequil(&["solve", "--game", &data("coordination.json"), "--graph", "edges:2-3", "--starts", "4"]);
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    let text = stdout(&out);
    assert!(err.contains("using Newton") || text.contains("using Newton"), "{err}{text}");
    assert!(text.contains("method: newton"));
    assert_eq!(code(&out), 0);
}

#[test]
fn model_reports() {
    let v = json(&["model", "--graph", "edges:1-2,1-3,1-4,1-5,1-6", "--format", "2,2,2,2,2,2", "--degree", "--dim"]);
    assert_eq!(v["degree"], "14400");
    let out = ciequil(&["model", "--graph", &data("four-cycle.json"), "--format", "2,2,2,2", "--dim"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("dim: 8"));
}

#[test]
fn fixtures_list_every_game() {
    let v = json(&["fixtures"]);
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|f| f["id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), 7);
    assert!(ids.contains(&"beats-nash-4-2-2"));
}
