use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const ORIGINAL: &str = "void printRoots(int n) { for (int i=0; i<n; i++) { double d = sqrt(i); d++; println(d); } }\n";
const VARIANT: &str = "void printRoots(int n) { int i = 0; while (i < n) { double d = sqrt(i); println(++d); i++; } }\n";

fn cpgnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpgnorm")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn running_example_dir(root: &Path) -> std::path::PathBuf {
    let dir = root.join("example");
    for (id, text) in [("original", ORIGINAL), ("variant", VARIANT)] {
        fs::create_dir_all(dir.join(id)).unwrap();
        fs::write(dir.join(id).join("Main.minij"), text).unwrap();
    }
    dir
}

#[test]
fn detect_running_example() {
    let tmp = tempfile::tempdir().unwrap();
    let input = running_example_dir(tmp.path());
    let out = tmp.path().join("out");
    let o = cpgnorm(&["detect", "--min-match", "3", "--mode", "normalized", s(&input), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("original,variant,1,1,"), "{csv}");
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "detect");
    assert_eq!(manifest["config"]["minMatch"], 3);
    assert!(manifest["version"].is_string());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert!(json["results"][0]["tiles"][0]["spanA"].is_object());
}

#[test]
fn empty_directory_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let o = cpgnorm(&["detect", s(&empty), "--out", s(&tmp.path().join("out"))]);
    assert_eq!(o.status.code(), Some(1));
    let record: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(record["error"]["kind"], "usage");
    assert_eq!(cpgnorm(&["detect", "--min-match", "x"]).status.code(), Some(1));
}

#[test]
fn broken_submission_is_reported_in_band() {
    let tmp = tempfile::tempdir().unwrap();
    let input = running_example_dir(tmp.path());
    fs::create_dir_all(input.join("broken")).unwrap();
    fs::write(input.join("broken/Main.minij"), "void f( {").unwrap();
    let out = tmp.path().join("out");
    let o = cpgnorm(&["detect", s(&input), "--out", s(&out)]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert_eq!(json["failures"].as_array().unwrap().len(), 1);
    fs::remove_dir_all(input.join("original")).unwrap();
    fs::remove_dir_all(input.join("variant")).unwrap();
    assert_eq!(cpgnorm(&["detect", s(&input), "--out", s(&out)]).status.code(), Some(2));
}

#[test]
fn evaluate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    assert!(cpgnorm(&["generate", "--count", "8", "--seed", "5", s(&corpus)]).status.success());
    let run = |name: &str, jobs: &str| {
        let out = tmp.path().join(name);
        let o = cpgnorm(&["evaluate", "--attack", "insertion", "--seed", "7", "--attacked", "6", "--jobs", jobs, s(&corpus), "--out", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (fs::read(out.join("report.json")).unwrap(), fs::read(out.join("report.csv")).unwrap())
    };
    let a = run("a", "1");
    let b = run("b", "3");
    assert_eq!(a, b);
    let csv = String::from_utf8(a.1).unwrap();
    assert!(csv.starts_with("approach,dataset,metric,value"));
    assert!(csv.contains("normalized,insertion,medianSeparation,"));
}

#[test]
fn obfuscate_tokenize_normalize_with_config() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    assert!(cpgnorm(&["generate", "--count", "2", "--seed", "1", s(&corpus)]).status.success());
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "kind = \"refactoring\"\nintensity = 4\nseed = 9\nmode = \"baseline\"\n").unwrap();
    let attacked = tmp.path().join("attacked");
    let o = cpgnorm(&["obfuscate", "--config", s(&cfg), s(&corpus), s(&attacked)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let log: serde_json::Value = serde_json::from_str(&fs::read_to_string(attacked.join("p00.edits.json")).unwrap()).unwrap();
    assert_eq!(log["edits"].as_array().unwrap().len(), 4);
    assert!(attacked.join("p00/Main.minij").is_file());
    let tokens = tmp.path().join("tokens");
    assert!(cpgnorm(&["tokenize", "--config", s(&cfg), s(&attacked), "--out", s(&tokens)]).status.success());
    assert!(fs::read_to_string(tokens.join("p00.tokens")).unwrap().starts_with("CLASS_BEGIN"));
    let norm = tmp.path().join("norm");
    assert!(cpgnorm(&["normalize", "--disable", "T5,T6", "--no-reorder", s(&attacked), "--out", s(&norm)]).status.success());
    assert!(norm.join("p01/Main.minij").is_file());
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "nonsense = 1\n").unwrap();
    assert_eq!(cpgnorm(&["detect", "--config", s(&bad), s(&corpus)]).status.code(), Some(1));
}
