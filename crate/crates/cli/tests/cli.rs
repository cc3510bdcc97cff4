use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus/uc5_before.json");

fn retune(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retune"))
        .args(args)
        .env("RETUNE_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn refactored_corpus(dir: &Path) -> PathBuf {
    let after = dir.join("after.json");
    let o = retune(&["refactor", "catalog", "--set", CORPUS, "--out", after.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    after
}

#[test]
fn translate_prints_formula_and_atoms() {
    let o = retune(&["translate", "--set", CORPUS, "--id", "UC5_R_1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("UC5_R_1: G (a1 & a2 -> a3)\n"), "{out}");
    assert!(out.contains("a1 = sensorFaults"));
}

#[test]
fn rename_onto_itself_is_an_input_error() {
    let o = retune(&["refactor", "rename", "--set", CORPUS, "--old", "UC5_R_1", "--new", "UC5_R_1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("already in use"));
}

#[test]
fn missing_file_and_bad_text_exit_2() {
    assert_eq!(retune(&["validate", "--set", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(retune(&["parse", "if (x > ) C shall y"]).status.code(), Some(2));
    assert_eq!(retune(&["parse", "in mode C shall y"]).status.code(), Some(2));
}

#[test]
fn single_pair_check_respects_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let after = refactored_corpus(dir.path());
    let after = after.to_str().unwrap();
    let args = [
        "check", "--set", after, "--baseline", CORPUS, "--original", "UC5_R_1.1", "--refactored", "UC5_R_1.1",
        "--resolution", "inline",
    ];
    let o = retune(&[&args[..], &["--expect", "implies"]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("RefactoredImpliesOriginal"));
    assert_eq!(retune(&args).status.code(), Some(1));
}

#[test]
fn check_all_json_is_sorted_and_counted() {
    let dir = tempfile::tempdir().unwrap();
    let after = refactored_corpus(dir.path());
    let o = retune(&[
        "check", "--json", "--set", after.to_str().unwrap(), "--baseline", CORPUS, "--all", "--expect", "implies",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["Equivalent"], 24);
    assert_eq!(v["summary"]["RefactoredImpliesOriginal"], 6);
    let ids: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["refactored_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn refactor_without_out_leaves_input_alone() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    std::fs::copy(CORPUS, &input).unwrap();
    let before = std::fs::read(&input).unwrap();
    let o = retune(&[
        "refactor", "extract", "--set", input.to_str().unwrap(), "--id", "SENSOR_FAULTS", "--component", "Controller",
        "--match", "(sensorValue(S) > nominalValue + R) | (sensorValue(S) < nominalValue - R) | (sensorValue(S) = null)",
        "--placeholder", "sensorFaults",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&input).unwrap(), before);
    // stdout is the new set
    let set = retune_core::store::RequirementSet::from_json(&stdout(&o)).unwrap();
    assert_eq!(set.len(), 43);
    assert_eq!(set.referencing("SENSOR_FAULTS").len(), 12);

    let o = retune(&["refactor", "dedupe", "--set", input.to_str().unwrap(), "--in-place"]);
    assert_eq!(o.status.code(), Some(0));
    // nothing to dedupe: the file is rewritten in canonical form only
    let canonical = retune_core::store::RequirementSet::from_json(std::str::from_utf8(&before).unwrap())
        .unwrap()
        .to_json();
    assert!(std::fs::read_to_string(&input).unwrap() == canonical);
}

#[test]
fn report_is_deterministic_and_plain() {
    let dir = tempfile::tempdir().unwrap();
    let after = refactored_corpus(dir.path());
    let args = ["report", "--before", CORPUS, "--after", after.to_str().unwrap()];
    let (a, b) = (retune(&args), retune(&args));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("| **Total (re)definitions** | | 132 | 9 |"), "{text}");
    assert!(!text.contains('\x1b'));
    let csv = stdout(&retune(&[&args[..], &["--format", "csv"]].concat()));
    assert!(csv.contains("total,,,132,9"), "{csv}");
}

#[test]
fn failed_verification_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    std::fs::write(
        &input,
        r#"{"requirements": [
            {"id": "A", "text": "if (p) C shall (x > 0)"},
            {"id": "B", "text": "if (q) C shall (y > 0)"}
        ]}"#,
    )
    .unwrap();
    let out = dir.path().join("out.json");
    // merging condition-side parts weakens the requirements
    let o = retune(&[
        "refactor", "merge", "--set", input.to_str().unwrap(), "--id", "PQ", "--component", "C", "--site", "A:if",
        "--site", "B:if", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL merge A"));
    assert!(!out.exists());
    let o = retune(&[
        "refactor", "merge", "--set", input.to_str().unwrap(), "--id", "PQ", "--component", "C", "--site", "A:if",
        "--site", "B:if", "--out", out.to_str().unwrap(), "--no-verify",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.exists());
}
