use std::path::PathBuf;
use std::sync::Arc;

use metaprobe_core::build::{Javalite, Limits};
use metaprobe_core::catalog::{Category, RuleSpec};
use metaprobe_core::corpus::{load_corpus, CorpusEntry};
use metaprobe_core::gateway::{Gateway, GatewayError, Sampling, Script, ScriptEntry, ScriptedBackend, Session, Transcript};
use metaprobe_core::seed::{generate_seed, AgentCtx, AgentError, Budget, SeedOutcome};
use metaprobe_core::validation::{validate_seed, ValidationOutcome, VerdictStatus};

const JOB: &str = "stub/ABS_HASHCODE";

fn rule() -> RuleSpec {
    RuleSpec {
        analyzer_id: "stub".into(),
        rule_id: "ABS_HASHCODE".into(),
        title: "Absolute value of a hash code".into(),
        description: "Math.abs of hashCode() can be negative.".into(),
        category: Category::Correctness,
        severity: None,
        example_snippets: vec![],
        source_url: None,
        tags: vec![],
    }
}

fn entry() -> CorpusEntry {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus");
    load_corpus(&dir).unwrap().into_iter().find(|e| e.name == "abs_hashcode").unwrap()
}

fn java(src: &str) -> String {
    format!("```java\n{src}```\n")
}

fn gateway(replies: Vec<(&str, String)>) -> Gateway {
    let queue = replies.into_iter().map(|(p, t)| ScriptEntry::Detailed { text: t, repeat: false, purpose: Some(p.into()) }).collect();
    let script = Script { default: vec![], queues: [(JOB.to_string(), queue)].into() };
    Gateway::new(Arc::new(ScriptedBackend::new("scripted", script)), Sampling::default())
}

fn with_ctx<R>(g: &Gateway, f: impl FnOnce(&AgentCtx<'_>, &Transcript) -> R) -> R {
    let tmp = tempfile::tempdir().unwrap();
    let transcript = Transcript::in_memory();
    let ctx = AgentCtx {
        session: Session { gateway: g, transcript: &transcript, job: JOB },
        toolchain: &Javalite,
        limits: Limits::default(),
        scratch: tmp.path(),
        budget: Budget { max_attempts: 5 },
    };
    f(&ctx, &transcript)
}

fn purposes(t: &Transcript) -> Vec<String> {
    t.entries().into_iter().map(|e| e.request.purpose).collect()
}

#[test]
fn seed_is_repaired_until_it_compiles() {
    let e = entry();
    let broken = e.seed.text.replace("return index;", "return idx;");
    let g = gateway(vec![
        ("seed.generate", "No code here.".into()),
        ("seed.repair", java(&broken)),
        ("seed.repair", format!("{}BUGGY_LINES: 12", java(&e.seed.text))),
    ]);
    with_ctx(&g, |ctx, t| {
        let SeedOutcome::Accepted(s) = generate_seed(&rule(), ctx).unwrap() else { panic!("discarded") };
        assert_eq!(s.attempts_used, 3);
        assert_eq!(s.buggy_lines, vec![12]);
        assert!(!s.buggy_lines_inferred);
        assert_eq!(s.provenance.transcript, vec![1, 2, 3]);
        assert_eq!(purposes(t), vec!["seed.generate", "seed.repair", "seed.repair"]);
        let repair = &t.entries()[2].request.messages;
        assert!(repair.iter().any(|m| m.text.contains("idx")), "the repair prompt carries the diagnostics");
    });
}

#[test]
fn seed_without_entry_method_is_sent_back() {
    let e = entry();
    let renamed = e.seed.text.replace("showBug", "compute");
    let g = gateway(vec![("seed.generate", java(&renamed)), ("seed.repair", java(&e.seed.text))]);
    with_ctx(&g, |ctx, _| {
        let SeedOutcome::Accepted(s) = generate_seed(&rule(), ctx).unwrap() else { panic!("discarded") };
        assert_eq!(s.attempts_used, 2);
        assert!(s.buggy_lines_inferred);
        assert!(!s.buggy_lines.is_empty());
    });
}

#[test]
fn exhausted_script_is_an_error_not_a_discard() {
    let g = gateway(vec![("seed.generate", "nothing".into())]);
    with_ctx(&g, |ctx, _| {
        let r = generate_seed(&rule(), ctx);
        assert!(matches!(r, Err(AgentError::Gateway(GatewayError::Exhausted { .. }))), "{r:?}");
    });
}

#[test]
fn valid_test_is_accepted_with_its_signature() {
    let e = entry();
    let g = gateway(vec![("test.generate", java(&e.test.text)), ("test.judge", "VERDICT: valid\nRATIONALE: index goes negative".into())]);
    with_ctx(&g, |ctx, t| {
        let ValidationOutcome::Accepted(p) = validate_seed(&rule(), &e.seed_program(), ctx, 1).unwrap() else { panic!("discarded") };
        assert_eq!((p.generations, p.judgments), (1, 1));
        assert!(p.verdict.signature.any_failing());
        assert!(p.test.invoked_entry);
        assert_eq!(t.entries()[1].request.temperature, 0.1);
        assert_eq!(t.entries()[0].request.temperature, 0.75);
    });
}

#[test]
fn invalid_verdict_regenerates_once_then_discards() {
    let e = entry();
    let judge_no = "VERDICT: invalid\nRATIONALE: does not show the defect".to_string();
    let g = gateway(vec![
        ("test.generate", java(&e.test.text)),
        ("test.judge", judge_no.clone()),
        ("test.generate", java(&e.test.text)),
        ("test.judge", judge_no),
    ]);
    with_ctx(&g, |ctx, _| {
        let ValidationOutcome::Discarded(d) = validate_seed(&rule(), &e.seed_program(), ctx, 1).unwrap() else { panic!("accepted") };
        assert_eq!((d.generations, d.judgments), (2, 2));
        assert_eq!(d.last_verdict.unwrap().status, VerdictStatus::Invalid);
        assert_eq!(d.discard.reason, "test judged invalid");
    });
}

#[test]
fn valid_claim_on_all_passing_tests_needs_review() {
    let e = entry();
    let passing = e.test.text.replace("\"polygenelubricants\"", "\"plain\"");
    let g = gateway(vec![
        ("test.generate", java(&passing)),
        ("test.judge", "VERDICT: valid\nRATIONALE: looks fine".into()),
        ("test.refine", java(&e.test.text)),
        ("test.judge", "VERDICT: valid\nRATIONALE: now it fails".into()),
    ]);
    with_ctx(&g, |ctx, _| {
        let ValidationOutcome::Accepted(p) = validate_seed(&rule(), &e.seed_program(), ctx, 1).unwrap() else { panic!("discarded") };
        assert_eq!((p.generations, p.judgments), (2, 2));
        assert!(!p.verdict.manual_review);
    });
}

#[test]
fn test_not_calling_the_entry_method_is_repaired() {
    let e = entry();
    let detached = e.test.text.replace("b.showBug(\"polygenelubricants\")", "-1").replace("new HashBucket(10).showBug(\"abc\")", "1");
    let g = gateway(vec![
        ("test.generate", java(&detached)),
        ("test.repair", java(&e.test.text)),
        ("test.judge", "VERDICT: valid\nRATIONALE: negative index".into()),
    ]);
    with_ctx(&g, |ctx, t| {
        let ValidationOutcome::Accepted(p) = validate_seed(&rule(), &e.seed_program(), ctx, 1).unwrap() else { panic!("discarded") };
        assert_eq!(p.generations, 2);
        assert_eq!(purposes(t), vec!["test.generate", "test.repair", "test.judge"]);
    });
}
