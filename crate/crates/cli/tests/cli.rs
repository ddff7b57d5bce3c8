use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qsvlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsvlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("QSVLAB_SEED")
        .output()
        .unwrap()
}

fn qsvlab_ok(args: &[&str], dir: &Path) {
    let out = qsvlab(args, dir);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn schema(name: &str) -> jsonschema::Validator {
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{name}.schema.json"));
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&raw).unwrap()
}

fn load(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let v = schema(schema_name);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}");
}

#[test]
fn every_report_matches_its_schema() {
    let tmp = tempfile::tempdir().unwrap();
    for family in ["random", "worst-case"] {
        let out = tmp.path().join(family);
        qsvlab_ok(
            &[
                "report-all",
                "--n",
                "12",
                "--kappa",
                "8,16",
                "--trials",
                "200",
                "--family",
                family,
                "--out",
                out.to_str().unwrap(),
            ],
            tmp.path(),
        );
        for (file, schema_name) in [
            ("gen-instance", "instance"),
            ("adversary-pair", "adversary-pair"),
            ("verify", "verify"),
            ("typical-sweep", "typical-sweep"),
            ("pm-bound", "pm-bound"),
            ("cost-gap", "cost-gap"),
        ] {
            assert_valid(schema_name, &load(&out.join(format!("{file}.json"))));
        }
    }
}

#[test]
fn schemas_reject_malformed_reports() {
    let bad_pair = serde_json::json!({"kappa": 10.0, "bounds_ok": "yes"});
    assert!(!schema("adversary-pair").is_valid(&bad_pair));
    let bad_bound = serde_json::json!({
        "overlap": 0.5, "q0_pm_exact": "infinite", "q0_pm_floor150": 0, "distance_at_q0": 0.1
    });
    assert!(!schema("pm-bound").is_valid(&bad_bound));
    let unbounded = serde_json::json!({
        "overlap": 1.0, "q0_pm_exact": "unbounded", "q0_pm_floor150": 0, "distance_at_q0": 0.0
    });
    assert!(schema("pm-bound").is_valid(&unbounded));
}

#[test]
fn adversary_pair_example() {
    let tmp = tempfile::tempdir().unwrap();
    qsvlab_ok(
        &[
            "adversary-pair",
            "--kappa",
            "100",
            "--n",
            "64",
            "--seed",
            "7",
        ],
        tmp.path(),
    );
    let doc = load(&tmp.path().join("qsvlab-adversary-pair.json"));
    assert_eq!(doc["bounds_ok"], Value::Bool(true));
    assert!(doc["dist_xx"].as_f64().unwrap() > 0.625);
}

#[test]
fn verify_example() {
    let tmp = tempfile::tempdir().unwrap();
    qsvlab_ok(
        &[
            "verify", "--kappa", "50", "--d", "0.125", "--trials", "10000", "--seed", "1",
            "--kind", "mixed",
        ],
        tmp.path(),
    );
    let doc = load(&tmp.path().join("qsvlab-verify.json"));
    let rate = doc["accept_rate"].as_f64().unwrap();
    let sigma = doc["sigma"].as_f64().unwrap();
    assert!(rate >= 0.79 - 3.0 * sigma, "{rate}");
    assert_eq!(doc["outcomes"].as_array().unwrap().len(), 10000);
}

#[test]
fn typical_sweep_csv() {
    let tmp = tempfile::tempdir().unwrap();
    qsvlab_ok(
        &[
            "typical-sweep",
            "--n",
            "512",
            "--kappa",
            "16",
            "--trials",
            "50",
            "--format",
            "both",
            "--out",
            "t",
        ],
        tmp.path(),
    );
    let doc = load(&tmp.path().join("t.json"));
    assert!(doc["empirical_tail"].as_f64().unwrap() <= doc["bound_value"].as_f64().unwrap());
    let text = std::fs::read_to_string(tmp.path().join("t.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,inverse_norm,in_window"));
    let values = doc["values"].as_array().unwrap();
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], i.to_string());
        // 17 significant digits round-trip exactly
        assert_eq!(
            cells[1].parse::<f64>().unwrap(),
            values[i].as_f64().unwrap()
        );
        assert!(cells[1].contains('e') && cells[1].split('e').next().unwrap().len() == 18);
        assert!(cells[2] == "true" || cells[2] == "false");
    }
}

#[test]
fn cost_gap_sweep_csv() {
    let tmp = tempfile::tempdir().unwrap();
    qsvlab_ok(
        &[
            "cost-gap",
            "--family",
            "worst-case",
            "--n",
            "32",
            "--kappa",
            "4,8,16,32",
            "--format",
            "csv",
            "--out",
            "g",
        ],
        tmp.path(),
    );
    assert!(!tmp.path().join("g.json").exists());
    let text = std::fs::read_to_string(tmp.path().join("g.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "kappa,gap,lambda_ss_sq,cmin,shots");
    assert_eq!(rows.len(), 5);
    let shots: Vec<u64> = rows[1..]
        .iter()
        .map(|r| r.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    for w in shots.windows(2) {
        assert_eq!(w[1], 16 * w[0]);
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("cfg.json"),
        r#"{"n": 5, "kappa": 20, "seed": 3, "family": "worst-case", "out": "from-config"}"#,
    )
    .unwrap();
    qsvlab_ok(
        &["gen-instance", "--config", "cfg.json", "--n", "7"],
        tmp.path(),
    );
    let doc = load(&tmp.path().join("from-config.json"));
    assert_eq!(doc["eigvals"].as_array().unwrap().len(), 7);
    assert_eq!(doc["kappa"].as_f64(), Some(20.0));

    std::fs::write(tmp.path().join("bad.json"), r#"{"nn": 5}"#).unwrap();
    assert_eq!(
        qsvlab(&["gen-instance", "--config", "bad.json"], tmp.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qsvlab(&["gen-instance", "--config", "missing.json"], tmp.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seed_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, extra: &[&str], out: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qsvlab"));
        cmd.args(["gen-instance", "--kappa", "10", "--out", out])
            .args(extra)
            .current_dir(tmp.path());
        match env {
            Some(s) => cmd.env("QSVLAB_SEED", s),
            None => cmd.env_remove("QSVLAB_SEED"),
        };
        assert!(cmd.status().unwrap().success());
        std::fs::read(tmp.path().join(format!("{out}.json"))).unwrap()
    };
    let default = run(None, &[], "a");
    let zero = run(None, &["--seed", "0"], "b");
    let env5 = run(Some("5"), &[], "c");
    let flag5 = run(None, &["--seed", "5"], "d");
    let flag_beats_env = run(Some("9"), &["--seed", "5"], "e");
    assert_eq!(default, zero);
    assert_ne!(default, env5);
    assert_eq!(env5, flag5);
    assert_eq!(flag5, flag_beats_env);
}

#[test]
fn exit_codes_and_no_partial_files() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| qsvlab(args, tmp.path()).status.code();
    assert_eq!(code(&["no-such-command"]), Some(2));
    assert_eq!(code(&["verify", "--eps", "0.5"]), Some(2));
    assert_eq!(code(&["verify", "--d", "1.5"]), Some(2));
    assert_eq!(code(&["gen-instance", "--n", "1"]), Some(2));
    assert_eq!(code(&["gen-instance", "--kappa", "0.5"]), Some(2));
    assert_eq!(code(&["typical-sweep", "--kappa", "4,8"]), Some(2));
    assert_eq!(
        code(&["cost-gap", "--n", "3000", "--family", "worst-case"]),
        Some(2)
    );
    assert_eq!(code(&["verify", "--trials", "0"]), Some(2));
    assert_eq!(code(&["verify", "--jobs", "0"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
    // nothing written by failed runs
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);

    let missing = tmp.path().join("absent/dir/out");
    assert_eq!(
        code(&["gen-instance", "--out", missing.to_str().unwrap()]),
        Some(3)
    );
    let stderr = String::from_utf8(qsvlab(&["verify", "--eps", "0.5"], tmp.path()).stderr).unwrap();
    assert!(stderr.contains("--eps"));
}

#[test]
fn rerun_overwrites_atomically() {
    let tmp = tempfile::tempdir().unwrap();
    qsvlab_ok(
        &[
            "pm-bound",
            "--kappa",
            "300",
            "--n",
            "2",
            "--family",
            "worst-case",
            "--out",
            "p",
        ],
        tmp.path(),
    );
    let first = std::fs::read(tmp.path().join("p.json")).unwrap();
    qsvlab_ok(
        &[
            "pm-bound",
            "--kappa",
            "300",
            "--n",
            "2",
            "--family",
            "worst-case",
            "--out",
            "p",
        ],
        tmp.path(),
    );
    assert_eq!(first, std::fs::read(tmp.path().join("p.json")).unwrap());
    let names: Vec<String> = std::fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, vec!["p.json".to_string()]);
    let doc = load(&tmp.path().join("p.json"));
    assert_eq!(doc["q0_pm_floor150"], 600);
}

#[test]
fn verify_is_independent_of_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    for jobs in ["1", "3"] {
        qsvlab_ok(
            &[
                "verify", "--trials", "500", "--seed", "4", "--eps", "0.01", "--format", "both",
                "--jobs", jobs, "--out", jobs,
            ],
            tmp.path(),
        );
    }
    for ext in ["json", "csv"] {
        assert_eq!(
            std::fs::read(tmp.path().join(format!("1.{ext}"))).unwrap(),
            std::fs::read(tmp.path().join(format!("3.{ext}"))).unwrap()
        );
    }
}
