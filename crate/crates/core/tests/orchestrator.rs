use std::path::{Path, PathBuf};

use metaprobe_core::config::CampaignConfig;
use metaprobe_core::evaluator::{ManualLabel, VerdictKind};
use metaprobe_core::orchestrator::{Campaign, CampaignError, JobOutcome, Selection};
use metaprobe_core::workspace::Stage;

const SEED: &str = "package demo;\n\npublic class BucketIndex {\n    public int showBug(String key, int buckets) {\n        int index = Math.abs(key.hashCode()) % buckets;\n        return index;\n    }\n}\n";
const TEST: &str = "package demo;\n\nimport org.junit.Test;\nimport static org.junit.Assert.assertTrue;\n\npublic class BucketIndexTest {\n    @Test\n    public void indexIsNeverNegative() {\n        int index = new BucketIndex().showBug(\"polygenelubricants\", 10);\n        assertTrue(index >= 0);\n    }\n}\n";

fn setup(dir: &Path) -> PathBuf {
    let catalog = concat!(
        "{\"schema\": \"rule-catalog\", \"version\": 1}\n",
        "{\"analyzer_id\": \"canned\", \"rule_id\": \"ABS_HASHCODE\", \"title\": \"abs of hashCode\", \"description\": \"Math.abs of a hash code can be negative.\", \"category\": \"correctness\"}\n",
        "{\"analyzer_id\": \"canned\", \"rule_id\": \"STYLE_ONLY\", \"title\": \"style\", \"description\": \"Not selected by the filter.\", \"category\": \"style\"}\n",
    );
    std::fs::write(dir.join("catalog.jsonl"), catalog).unwrap();
    let queue = serde_json::json!([
        {"purpose": "seed.generate", "text": format!("```java\n{SEED}```\nBUGGY_LINES: 5")},
        {"purpose": "test.generate", "text": format!("```java\n{TEST}```")},
        {"purpose": "test.judge", "text": "VERDICT: valid\nRATIONALE: negative index"},
    ]);
    std::fs::write(dir.join("script.json"), serde_json::json!({"queues": {"canned/ABS_HASHCODE": queue}}).to_string()).unwrap();
    std::fs::write(dir.join("empty-script.json"), "{}").unwrap();
    let report = serde_json::json!({"version": "2.1.0", "runs": [{"tool": {"driver": {"name": "canned"}}, "results": [
        {"ruleId": "ABS_HASHCODE", "message": {"text": "abs of hashCode"}, "locations": [{"physicalLocation": {"artifactLocation": {"uri": "demo/BucketIndex.java"}, "region": {"startLine": 5}}}]}
    ]}]});
    std::fs::write(dir.join("canned.sarif"), report.to_string()).unwrap();
    let config = r#"
catalog = "catalog.jsonl"
workspace_root = "work"
rng_seed = 3

[budgets]
variants_per_operator = 2

[backend]
kind = "scripted"
script = "script.json"

[mutation]
operators = ["DEAD_STORE", "RENAME_LOCAL"]

[filter]
categories = ["correctness"]

[[analyzers]]
analyzer_id = "canned"
invocation = ["sh", "-c", "cp \"$0\" \"$1\"", "{report}", "{output}", "{input}"]
input_kind = "source"
report_format = "sarif_json"
vars = { report = "canned.sarif" }
"#;
    std::fs::write(dir.join("campaign.toml"), config).unwrap();
    dir.join("campaign.toml")
}

fn open(cfg: &Path) -> Campaign {
    Campaign::open(CampaignConfig::load(cfg).unwrap()).unwrap()
}

fn with_empty_script(cfg: &Path) -> Campaign {
    let mut c = CampaignConfig::load(cfg).unwrap();
    c.backend = metaprobe_core::config::BackendConfig::Scripted { id: "scripted".into(), script: "empty-script.json".into() };
    Campaign::open(c).unwrap()
}

fn outcomes(c: &Campaign, stage: Stage, force: bool) -> Vec<JobOutcome> {
    c.run_stage(stage, &Selection::default(), force).unwrap().jobs.into_iter().map(|(_, o)| o).collect()
}

#[test]
fn interrupted_campaign_resumes_without_new_model_calls() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = setup(tmp.path());
    let c = open(&cfg);
    let cat = c.catalog(&Selection::default()).unwrap();
    assert_eq!((cat.loaded, cat.selected), (2, 1));
    for s in [Stage::Seeded, Stage::Validated, Stage::Mutated] {
        assert_eq!(outcomes(&c, s, false), vec![JobOutcome::Done]);
    }
    drop(c);

    let resumed = with_empty_script(&cfg);
    let (reports, summary) = resumed.run(&Selection::default()).unwrap();
    let by_stage: Vec<(String, Vec<JobOutcome>)> = reports.into_iter().map(|r| (r.stage, r.jobs.into_iter().map(|(_, o)| o).collect())).collect();
    assert_eq!(by_stage.iter().take(3).map(|(_, o)| o.clone()).collect::<Vec<_>>(), vec![vec![JobOutcome::Skipped]; 3]);
    assert_eq!(by_stage[3].1, vec![JobOutcome::Done]);
    assert_eq!(by_stage[4].1, vec![JobOutcome::Done]);
    assert_eq!(summary.totals.consistent, 1);
    assert!(summary.totals.counts.valid_mutants > 0);

    let fresh = tempfile::tempdir().unwrap();
    let (_, straight) = open(&setup(fresh.path())).run(&Selection::default()).unwrap();
    assert_eq!(summary.to_json(), straight.to_json());
}

#[test]
fn stages_out_of_order_are_blocked() {
    let tmp = tempfile::tempdir().unwrap();
    let c = open(&setup(tmp.path()));
    assert!(matches!(c.run_stage(Stage::Seeded, &Selection::default(), false), Err(CampaignError::Usage(_))));
    c.catalog(&Selection::default()).unwrap();
    assert!(matches!(outcomes(&c, Stage::Mutated, false)[..], [JobOutcome::Blocked(_)]));
    assert_eq!(outcomes(&c, Stage::Seeded, false), vec![JobOutcome::Done]);
    assert!(matches!(outcomes(&c, Stage::Mutated, false)[..], [JobOutcome::Blocked(_)]));
}

#[test]
fn forcing_a_stage_marks_later_ones_stale() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = setup(tmp.path());
    let mut c = open(&cfg);
    c.run(&Selection::default()).unwrap();
    let mut config = CampaignConfig::load(&cfg).unwrap();
    let queue = std::fs::read_to_string(tmp.path().join("script.json")).unwrap();
    let mut reseed: serde_json::Value = serde_json::from_str(&queue).unwrap();
    let q = reseed["queues"]["canned/ABS_HASHCODE"].as_array().unwrap().clone();
    reseed["queues"]["canned/ABS_HASHCODE"] = serde_json::Value::Array(q[..1].to_vec());
    std::fs::write(tmp.path().join("reseed.json"), reseed.to_string()).unwrap();
    config.backend = metaprobe_core::config::BackendConfig::Scripted { id: "scripted".into(), script: "reseed.json".into() };
    c = Campaign::open(config).unwrap();
    assert_eq!(outcomes(&c, Stage::Seeded, true), vec![JobOutcome::Done]);
    let state = &c.workspace.states().unwrap()[0];
    assert_eq!(state.stage, Stage::Seeded);
    assert_eq!(state.stale.iter().copied().collect::<Vec<_>>(), vec![Stage::Validated, Stage::Mutated, Stage::Analyzed, Stage::Evaluated]);
    assert!(matches!(c.report(&Selection::default(), false), Err(CampaignError::Incomplete(_))));
    let partial = c.report(&Selection::default(), true).unwrap();
    assert_eq!(partial.totals.consistent, 0);
}

#[test]
fn report_is_idempotent_and_reviews_survive_reevaluation() {
    let tmp = tempfile::tempdir().unwrap();
    let c = open(&setup(tmp.path()));
    c.run(&Selection::default()).unwrap();
    let first = std::fs::read(c.workspace.summary_json()).unwrap();
    c.report(&Selection::default(), false).unwrap();
    assert_eq!(std::fs::read(c.workspace.summary_json()).unwrap(), first);

    let r = c.review("canned/ABS_HASHCODE", ManualLabel::FalsePositive, Some("canned".into())).unwrap();
    assert_eq!(r.verdict.kind, VerdictKind::Consistent);
    assert_eq!(outcomes(&c, Stage::Evaluated, true), vec![JobOutcome::Done]);
    let s = c.report(&Selection::default(), false).unwrap();
    assert_eq!(s.rules[0].manual_label, Some(ManualLabel::FalsePositive));
    assert_eq!(s.rules[0].root_cause_tag.as_deref(), Some("canned"));
    assert!(c.review("canned/NOPE", ManualLabel::TruePositive, None).is_err());
}

#[test]
fn a_selection_matching_nothing_gives_an_empty_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let c = open(&setup(tmp.path()));
    let sel = Selection { rules: Some("NO_SUCH_RULE".into()), analyzer: None };
    let (reports, summary) = c.run(&sel).unwrap();
    assert!(reports.iter().all(|r| r.jobs.is_empty()));
    assert!(summary.rows.is_empty());
    assert_eq!(summary.totals.rules, 0);
}
