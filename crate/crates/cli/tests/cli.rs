use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn carleman(args: &[&str], out: &Path, threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_carleman"));
    cmd.args(args).arg("--out").arg(out);
    cmd.env_remove("CARLEMAN_THREADS");
    if let Some(n) = threads {
        cmd.env("CARLEMAN_THREADS", n.to_string());
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn run_dirs(out: &Path) -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(out)
        .map(|rd| rd.map(|e| e.unwrap().path()).collect())
        .unwrap_or_default();
    dirs.sort();
    dirs
}

fn only_run(out: &Path) -> PathBuf {
    let dirs = run_dirs(out);
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.into_iter().next().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

/// Output files of a run, excluding the manifest, keyed by relative path.
fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    manifest(dir)["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| {
            let name = v.as_str().unwrap().to_string();
            let bytes = fs::read(dir.join(&name)).unwrap();
            (name, bytes)
        })
        .collect()
}

#[test]
fn commutator_check_example() {
    let tmp = TempDir::new().unwrap();
    let o = carleman(
        &["commutator-check", "--d", "1", "--R", "10", "--c", "2", "--trials", "50", "--seed", "7"],
        tmp.path(),
        None,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("commutator: PASS"));
    let dir = only_run(tmp.path());
    assert!(dir.file_name().unwrap().to_str().unwrap().starts_with("commutator-check_seed7_"));
    let report: Value = serde_json::from_slice(&fs::read(dir.join("commutator-check.json")).unwrap()).unwrap();
    assert!(report["defect"].as_f64().unwrap() < 1e-8);
    assert_eq!(report["trials"], 50);
    let m = manifest(&dir);
    assert_eq!(m["subcommand"], "commutator-check");
    assert_eq!(m["seed"], 7);
    assert_eq!(m["config"]["c"], 2.0);
    assert_eq!(m["input_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn counterexample_modes() {
    let tmp = TempDir::new().unwrap();
    let o = carleman(&["counterexample", "--R", "20", "--mode", "repaired"], tmp.path(), None);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.matches(": PASS").count(), 5, "{stdout}");

    let lit = TempDir::new().unwrap();
    let o = carleman(&["counterexample", "--R", "20", "--mode", "literal_paper"], lit.path(), None);
    assert_eq!(code(&o), 1);
    let tsv = fs::read_to_string(only_run(lit.path()).join("counterexample-residuals.tsv")).unwrap();
    let sites: Vec<&str> = tsv.lines().skip(1).map(|l| l.rsplitn(3, '\t').nth(2).unwrap()).collect();
    assert_eq!(sites, ["-2\t20", "0\t18", "0\t22", "2\t20"]);
}

#[test]
fn saved_counterexample_reverifies() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&carleman(&["counterexample", "--R", "12"], tmp.path(), None)), 0);
    let saved = only_run(tmp.path()).join("counterexample.json");
    let check = TempDir::new().unwrap();
    let o = carleman(&["verify-counterexample", "--input", saved.to_str().unwrap()], check.path(), None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("saved_field_matches: PASS"));
}

#[test]
fn help_exits_zero() {
    let tmp = TempDir::new().unwrap();
    let o = carleman(&["lambda-scan", "--help"], tmp.path(), None);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("Usage"));
    assert!(text.contains("log_lambda"));
    assert!(run_dirs(tmp.path()).is_empty());
}

#[test]
fn usage_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&carleman(&["no-such-command"], tmp.path(), None)), 2);
    assert_eq!(code(&carleman(&["evolve", "--dt", "0.3"], tmp.path(), None)), 2);
    assert_eq!(code(&carleman(&["kbessel", "--tolerance", "nonsense=1"], tmp.path(), None)), 2);
    assert_eq!(code(&carleman(&["kbessel", "--tolerance", "identity"], tmp.path(), None)), 2);
    assert_eq!(code(&carleman(&["threshold-scan", "--mode", "cubic"], tmp.path(), None)), 2);
    assert!(run_dirs(tmp.path()).is_empty());
}

#[test]
fn config_file_errors_name_the_key() {
    let tmp = TempDir::new().unwrap();
    for (body, key) in [(r#"{"R_list":"ten"}"#, "R_list"), (r#"{"radius":4}"#, "radius")] {
        let cfg = tmp.path().join("cfg.json");
        fs::write(&cfg, body).unwrap();
        let o = carleman(&["lambda-scan", "--config", cfg.to_str().unwrap()], &tmp.path().join("runs"), None);
        assert_eq!(code(&o), 2);
        assert!(String::from_utf8_lossy(&o.stderr).contains(key));
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"R_list":[8,12,16],"seed":1,"mu":2.0}"#).unwrap();
    let out = tmp.path().join("runs");
    let o = carleman(&["kbessel", "--config", cfg.to_str().unwrap(), "--mu", "1.5"], &out, None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let m = manifest(&only_run(&out));
    assert_eq!(m["config"]["R_list"], serde_json::json!([8.0, 12.0, 16.0]));
    assert_eq!(m["seed"], 1);
    assert_eq!(m["config"]["mu"], 1.5);

    let empty = tmp.path().join("empty.json");
    fs::write(&empty, "{}").unwrap();
    let out2 = tmp.path().join("runs2");
    assert_eq!(code(&carleman(&["kbessel", "--config", empty.to_str().unwrap()], &out2, None)), 0);
    let m = manifest(&only_run(&out2));
    assert_eq!(m["config"]["R_list"], serde_json::json!([5.0, 10.0, 20.0]));
}

#[test]
fn check_failures_exit_one() {
    let tmp = TempDir::new().unwrap();
    let o = carleman(&["threshold-scan", "--mode", "sqrt_log"], tmp.path(), None);
    assert_eq!(code(&o), 1);
    let o = carleman(&["threshold-scan", "--mode", "log"], tmp.path(), None);
    assert_eq!(code(&o), 0);
}

#[test]
fn numeric_failures_exit_three() {
    let tmp = TempDir::new().unwrap();
    let o = carleman(&["evolve", "--L", "1e300"], tmp.path(), None);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn outputs_are_identical_across_worker_counts() {
    let cases: [&[&str]; 4] = [
        &["lambda-scan", "--dt", "0.005", "--M", "30", "--R-list", "6,8,10,12,14,16,18,20"],
        &["carleman-check", "--R", "6", "--d", "2", "--trials", "10", "--seed", "5"],
        &["logconvexity", "--L", "1", "--seed", "2", "--dt", "0.005", "--M", "30"],
        &["normstar", "--M", "300"],
    ];
    for args in cases {
        let runs: Vec<BTreeMap<String, Vec<u8>>> = [1, 4, 8]
            .iter()
            .map(|&n| {
                let tmp = TempDir::new().unwrap();
                let o = carleman(args, tmp.path(), Some(n));
                assert!(code(&o) <= 1, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
                outputs(&only_run(tmp.path()))
            })
            .collect();
        assert!(!runs[0].is_empty());
        assert_eq!(runs[0], runs[1], "{args:?}");
        assert_eq!(runs[0], runs[2], "{args:?}");
    }
}

#[test]
fn manifests_list_every_output_once() {
    let tmp = TempDir::new().unwrap();
    for args in [&["evolve", "--M", "25", "--dt", "0.01"][..], &["counterexample", "--R", "10"][..], &["hiding-scan"][..]] {
        carleman(args, tmp.path(), None);
    }
    for dir in run_dirs(tmp.path()) {
        let listed: Vec<String> = manifest(&dir)["outputs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect();
        let mut on_disk = Vec::new();
        let mut stack = vec![dir.clone()];
        while let Some(p) = stack.pop() {
            for e in fs::read_dir(&p).unwrap() {
                let path = e.unwrap().path();
                if path.is_dir() {
                    stack.push(path);
                } else {
                    let rel = path.strip_prefix(&dir).unwrap().to_string_lossy().replace('\\', "/");
                    if rel != "manifest.json" {
                        on_disk.push(rel);
                    }
                }
            }
        }
        let mut sorted = listed.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), listed.len(), "duplicate entries in {}", dir.display());
        on_disk.sort();
        assert_eq!(sorted, on_disk, "{}", dir.display());
    }
}

#[test]
fn report_summarizes_runs() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&carleman(&["report"], tmp.path(), None)), 2);
    carleman(&["potential-scan", "--R-list", "10,12"], tmp.path(), None);
    assert_eq!(code(&carleman(&["report"], tmp.path(), None)), 0);
    carleman(&["counterexample", "--R", "10", "--mode", "literal_paper"], tmp.path(), None);
    let o = carleman(&["report"], tmp.path(), None);
    assert_eq!(code(&o), 1);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("failed: diamond_harmonic, equation_holds"), "{stdout}");
}
