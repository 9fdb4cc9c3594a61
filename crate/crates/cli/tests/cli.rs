use std::path::{Path, PathBuf};
use std::process::Command;

use metaprobe_cli::{EXIT_CONFIG, EXIT_FAILURES, EXIT_OK, EXIT_USAGE};
use metaprobe_core::config::CampaignConfig;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn copy_campaign(to: &Path) {
    for e in std::fs::read_dir(fixtures().join("campaign")).unwrap() {
        let e = e.unwrap();
        std::fs::copy(e.path(), to.join(e.file_name())).unwrap();
    }
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = metaprobe_cli::run(std::iter::once("metaprobe").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["review", "--bug", "a/B", "--label", "maybe"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn config_problems_exit_with_the_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("none.toml");
    let (code, _, err) = run(&["-c", missing.to_str().unwrap(), "catalog"]);
    assert_eq!(code, EXIT_CONFIG, "{err}");
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "catalog = \"c.jsonl\"\nworkspace_root = \"w\"\ncolour = 1\n[backend]\nkind = \"scripted\"\nscript = \"s.json\"\n").unwrap();
    let (code, _, err) = run(&["-c", bad.to_str().unwrap(), "catalog"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("colour"), "{err}");
}

#[test]
fn stage_order_and_incomplete_reports_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    copy_campaign(tmp.path());
    let cfg = tmp.path().join("campaign4.toml");
    let cfg = cfg.to_str().unwrap();
    assert_eq!(run(&["-c", cfg, "generate"]).0, EXIT_USAGE);
    let (code, out, _) = run(&["-c", cfg, "catalog"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("4 rules loaded, 4 selected"), "{out}");
    assert_eq!(run(&["-c", cfg, "generate", "--rules", "ABS_HASHCODE"]).0, EXIT_OK);
    let (code, out, _) = run(&["-c", cfg, "mutate", "--rules", "ABS_HASHCODE"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.contains("run `validate`"), "{out}");
    assert_eq!(run(&["-c", cfg, "report"]).0, EXIT_USAGE);
    assert_eq!(run(&["-c", cfg, "report", "--allow-incomplete"]).0, EXIT_OK);
}

#[test]
fn the_binary_runs_a_campaign_and_records_reviews() {
    let tmp = tempfile::tempdir().unwrap();
    copy_campaign(tmp.path());
    let out = Command::new(env!("CARGO_BIN_EXE_metaprobe")).args(["-c", "campaign4.toml", "run"]).current_dir(tmp.path()).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(EXIT_OK), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("| analyzer |"), "{stdout}");
    assert!(tmp.path().join("work4/summary.md").is_file());

    let cfg = tmp.path().join("campaign4.toml");
    let (code, out, err) = run(&["-c", cfg.to_str().unwrap(), "review", "--bug", "stub/ABS_HASHCODE", "--label", "tp", "--root-cause", "abs-dataflow"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("Type1"), "{out}");
    let (_, json, _) = run(&["-c", cfg.to_str().unwrap(), "report", "--json"]);
    let s: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(s["totals"]["type1_tp"], 1);
    assert_eq!(s["unique_bugs"].as_array().unwrap().len(), 2);
    assert_eq!(std::fs::read_to_string(tmp.path().join("work4/summary.json")).unwrap(), json);
}

#[test]
fn a_broken_analyzer_fails_its_rules() {
    let tmp = tempfile::tempdir().unwrap();
    copy_campaign(tmp.path());
    let cfg = tmp.path().join("campaign4.toml");
    let text = std::fs::read_to_string(&cfg).unwrap();
    let text = text
        .replace("invocation = [\"stub-analyzer\", \"--rules\", \"{rules}\", \"--input\", \"{input}\", \"--output\", \"{output}\"]", "invocation = [\"sh\", \"-c\", \"exit 1\", \"{input}\", \"{output}\"]")
        .replace("version_probe = [\"stub-analyzer\", \"--version\"]\n", "");
    std::fs::write(&cfg, text).unwrap();
    let (code, out, _) = run(&["-c", cfg.to_str().unwrap(), "run", "--rules", "ABS_HASHCODE"]);
    assert_eq!(code, EXIT_FAILURES, "{out}");
    assert!(out.contains("failed stub/ABS_HASHCODE"), "{out}");
}

#[test]
fn the_spotbugs_fixture_config_loads() {
    let c = CampaignConfig::load(&fixtures().join("spotbugs/campaign.toml")).unwrap();
    let a = c.analyzer_configs().unwrap();
    assert_eq!(a[0].analyzer_id, "spotbugs");
    assert!(matches!(c.toolchain, metaprobe_core::config::ToolchainConfig::Command(_)));
}

mod stub_analyzer {
    use super::*;

    fn stub(args: &[&str]) -> (i32, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = metaprobe_cli::stub::run(std::iter::once("stub-analyzer").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(err).unwrap())
    }

    fn write_source(dir: &Path, text: &str) {
        std::fs::create_dir_all(dir.join("demo")).unwrap();
        std::fs::write(dir.join("demo/BucketIndex.java"), text).unwrap();
    }

    #[test]
    fn reports_planted_patterns_as_sarif() {
        let tmp = tempfile::tempdir().unwrap();
        let src = tmp.path().join("src");
        write_source(&src, "package demo;\n\npublic class BucketIndex {\n    int f(String key) {\n        return Math.abs(key.hashCode()) % 8;\n    }\n}\n");
        let report = tmp.path().join("out.sarif");
        let rules = fixtures().join("campaign/stub-rules.toml");
        let (code, err) = stub(&["--rules", rules.to_str().unwrap(), "--input", src.to_str().unwrap(), "--output", report.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        let results = s["runs"][0]["results"].as_array().unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0]["ruleId"], "ABS_HASHCODE");
        assert_eq!(results[0]["locations"][0]["physicalLocation"]["region"]["startLine"], 5);
    }

    #[test]
    fn unparseable_sources_exit_2_without_a_report() {
        let tmp = tempfile::tempdir().unwrap();
        let src = tmp.path().join("src");
        write_source(&src, "package demo;\n\npublic class BucketIndex {\n    int f( {\n}\n");
        let report = tmp.path().join("out.sarif");
        let rules = fixtures().join("campaign/stub-rules.toml");
        let (code, err) = stub(&["--rules", rules.to_str().unwrap(), "--input", src.to_str().unwrap(), "--output", report.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("BucketIndex.java:") && err.contains("cannot parse"), "{err}");
        assert!(!report.exists());
    }
}
