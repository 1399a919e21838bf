use std::process::{Command, Output};

use serde_json::Value;

fn drwkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drwkit")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let o = drwkit(&a);
    assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn ghost_components() {
    let o = drwkit(&["witt", "ghost", "--p", "2", "--coords", "3,5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "[3, 19]");
    let v = json(&["witt", "ghost", "--p", "2", "--coords", "3,5"]);
    assert_eq!(v["ghost"], serde_json::json!(["3", "19"]));
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["nosuch"],
        vec![],
        vec!["witt", "ghost", "--p", "2"],
        vec!["witt", "ghost", "--p", "2", "--coords", "a,b"],
        vec!["drw", "compute", "--ring", "F4[x]", "--level", "1", "--weight-bound", "2"],
        vec!["derham", "build", "--ring", "Q[x]"],
        vec!["arith", "smith", "--matrix", "1,2;3"],
        vec!["dieudonne", "check", "--catalog", "999"],
        vec!["dieudonne", "check", "--complex", "/nonexistent.json"],
        vec!["mixed", "eta", "--catalog", "2:1"],
    ] {
        assert_eq!(code(&drwkit(&args)), 2, "{args:?}");
    }
}

#[test]
fn mathematical_failures_exit_with_one() {
    for args in [
        vec!["dieudonne", "saturate", "--catalog", "3"],
        vec!["arith", "divp", "--vars", "x", "--p", "3", "--poly", "3*x+1"],
        vec!["dieudonne", "classify", "--catalog", "0", "--orientation", "reversed"],
        vec!["drw", "compute", "--ring", "F2[x,y]", "--level", "2", "--weight-bound", "4", "--budget", "10"],
        vec![
            "drw",
            "compute",
            "--ring",
            "F2[x]",
            "--level",
            "2",
            "--weight-bound",
            "2",
            "--route",
            "saturation",
            "--iter-cap",
            "0",
        ],
    ] {
        assert_eq!(code(&drwkit(&args)), 1, "{args:?}");
    }
}

#[test]
fn failed_checks_still_write_the_report() {
    let o =
        drwkit(&["dieudonne", "classify", "--catalog", "0", "--orientation", "reversed", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn drw_compute_writes_a_deterministic_report() {
    let dir = std::env::temp_dir().join(format!("drwkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let args = [
        "drw",
        "compute",
        "--ring",
        "F2[x]",
        "--level",
        "2",
        "--weight-bound",
        "4",
        "--route",
        "both",
        "--check",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ];
    assert_eq!(code(&drwkit(&args)), 0);
    let first = std::fs::read_to_string(&path).unwrap();
    assert_eq!(code(&drwkit(&args)), 0);
    assert_eq!(first, std::fs::read_to_string(&path).unwrap());
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn complexes_round_trip_through_files() {
    let cat = json(&["dieudonne", "catalog"]);
    let dir = std::env::temp_dir().join(format!("drwkit-cli-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for c in cat["complexes"].as_array().unwrap() {
        let path = dir.join(format!("{}.json", c["index"]));
        std::fs::write(&path, c["complex"].to_string()).unwrap();
        let from_file = json(&["dieudonne", "eta", "--complex", path.to_str().unwrap()]);
        let from_catalog = json(&["dieudonne", "eta", "--catalog", &c["index"].to_string()]);
        assert_eq!(from_file["complex"], from_catalog["complex"]);
    }
    let heart = json(&["mixed", "heart", "--catalog", "2"]);
    let path = dir.join("heart.json");
    std::fs::write(&path, heart["complex"].to_string()).unwrap();
    assert_eq!(
        json(&["mixed", "eta", "--complex", path.to_str().unwrap()])["complex"],
        json(&["mixed", "eta", "--heart-of", "2"])["complex"]
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

/// One passing invocation per module operation, with a JSON key its output
/// must carry.
const COVERAGE: &[(&str, &[&str], &str)] = &[
    ("apply_map", &["arith", "apply", "--vars", "x,y", "--map", "y,x+1", "--poly", "x*y"], "result"),
    ("exact_div_p", &["arith", "divp", "--vars", "x", "--p", "3", "--poly", "3*x+6"], "result"),
    ("smith_decompose", &["arith", "smith", "--matrix", "2,4;6,8"], "D"),
    ("lattice_intersect", &["arith", "intersect", "--a", "2,0;0,3", "--b", "3,0;0,2"], "generators"),
    ("ghost", &["witt", "ghost", "--p", "3", "--coords", "1,2"], "ghost"),
    ("from_ghost", &["witt", "from-ghost", "--p", "2", "--ghost", "3,19"], "coords"),
    ("witt_add", &["witt", "add", "--p", "2", "--coords", "1,1", "--other", "1,0"], "coords"),
    ("witt_mul", &["witt", "mul", "--p", "2", "--coords", "1,1", "--other", "1,1"], "coords"),
    ("frobenius", &["witt", "frob", "--p", "3", "--coords", "1,2,3"], "coords"),
    ("verschiebung", &["witt", "versch", "--p", "3", "--coords", "1,2"], "coords"),
    ("teichmuller", &["witt", "teich", "--p", "5", "--n", "3", "--a", "2"], "coords"),
    ("delta_of", &["witt", "delta", "--ring", "Z_(2)[x]", "--lift", "x^2+2*x"], "values"),
    ("delta_laws_check", &["witt", "delta", "--ring", "Z_(3)[x,y]", "--lift", "x^3,y^3+3*x"], "checks"),
    ("w2_section_check", &["witt", "delta", "--ring", "Z_(2)[x]", "--lift", "x^2"], "checks"),
    ("char_poly_witt", &["witt", "bigwitt", "charpoly", "--matrix", "0,1;1,1", "--trunc", "6"], "series"),
    ("bigwitt_frobenius", &["witt", "bigwitt", "frob", "--series", "1,1,0,0", "--m", "2"], "series"),
    ("bigwitt_verschiebung", &["witt", "bigwitt", "versch", "--series", "1,1", "--m", "2"], "series"),
    ("ker_membership", &["witt", "bigwitt", "kernel", "--series", "1,1", "--prime-bound", "7"], "member"),
    ("build_de_rham", &["derham", "build", "--ring", "Z_(2)[x,y]"], "ranks"),
    ("frobenius_on_forms", &["derham", "frob", "--ring", "Z_(3)[x]", "--lift", "x^3+3*x"], "F"),
    (
        "universal_da_map",
        &["derham", "map", "--ring", "Z_(2)[x]", "--target-ring", "Z_(2)[y]", "--map", "y^2"],
        "dx",
    ),
    ("check_dieudonne", &["dieudonne", "check", "--catalog", "2"], "checks"),
    ("eta_p", &["dieudonne", "eta", "--catalog", "2"], "alpha"),
    ("is_saturated", &["dieudonne", "saturate", "--catalog", "2"], "is_saturated"),
    ("saturate", &["dieudonne", "saturate", "--catalog", "7"], "stages"),
    ("solve_verschiebung", &["dieudonne", "verschiebung", "--catalog", "1"], "V"),
    ("wr_quotient", &["dieudonne", "wr", "--catalog", "1", "--r", "2"], "quotient"),
    ("strictness_probe", &["dieudonne", "strict", "--catalog", "1"], "report"),
    ("check_dieudonne_algebra", &["dieudonne", "algebra", "--ring", "Z_(2)[x,y]"], "checks"),
    ("classify_relations_check", &["dieudonne", "classify", "--catalog", "0"], "checks"),
    ("check_mixed", &["mixed", "check", "--catalog", "3:2"], "checks"),
    ("p_twist", &["mixed", "twist", "--catalog", "3:2"], "complex"),
    ("eta_p_mixed", &["mixed", "eta", "--heart-of", "2"], "complex"),
    ("adjunction_check", &["mixed", "adjoint", "--m", "2:1", "--n", "2:2"], "left_log_count"),
    ("beilinson_truncate", &["mixed", "truncate", "--heart-of", "2"], "truncation"),
    ("heart_embed", &["mixed", "heart", "--catalog", "2"], "complex"),
    ("ddr_mixed", &["mixed", "ddr", "--ring", "Z_(2)[x]", "--degree-bound", "4"], "presentation"),
    (
        "witt_ring_presentation",
        &["drw", "presentation", "--ring", "F2[x]", "--level", "2", "--weight-bound", "4"],
        "presentation",
    ),
    (
        "drw_truncated",
        &["drw", "compute", "--ring", "F2[x,y]", "--level", "2", "--weight-bound", "2"],
        "reports",
    ),
    (
        "drw_via_saturation",
        &[
            "drw",
            "compute",
            "--ring",
            "F3[x]",
            "--level",
            "2",
            "--weight-bound",
            "3",
            "--route",
            "saturation",
        ],
        "reports",
    ),
    (
        "drw_identity_suite",
        &["drw", "identities", "--ring", "F2[x]", "--level", "2", "--weight-bound", "3"],
        "checks",
    ),
];

#[test]
fn every_operation_is_reachable() {
    for (op, args, key) in COVERAGE {
        let v = json(args);
        assert!(v.get(*key).is_some(), "{op}: no {key:?} in {v}");
        assert_eq!(v["passed"], true, "{op}: {v}");
    }
}

#[test]
fn selftest_report_is_deterministic_and_passes() {
    let a = drwkit(&["selftest", "--format", "json"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = drwkit(&["selftest", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 10);
    assert_eq!(v["passed"], true);
}

#[test]
fn budget_overrides_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_drwkit"))
        .args(["drw", "compute", "--ring", "F2[x,y]", "--level", "2", "--weight-bound", "4"])
        .env("DRWKIT_SPAN_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_drwkit"))
        .args(["selftest", "--format", "json"])
        .env("DRWKIT_HOM_BUDGET", "2")
        .env("DRWKIT_SPAN_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let skipped: Vec<u64> = v["suites"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["status"] == "skip")
        .map(|s| s["id"].as_u64().unwrap())
        .collect();
    assert_eq!(skipped, vec![6, 8]);
    let o = Command::new(env!("CARGO_BIN_EXE_drwkit"))
        .args(["selftest"])
        .env("DRWKIT_HOM_BUDGET", "x")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
