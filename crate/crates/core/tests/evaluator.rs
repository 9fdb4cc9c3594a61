use std::collections::BTreeMap;

use metaprobe_core::evaluator::{classify, emit_report, group_unique, BugReport, DetectionMatrix, Evidence, GroupKey, ManualLabel, RuleCounts, RuleRecord, RuleRef, VerdictKind};
use proptest::prelude::*;

fn matrix(seed: bool, mutants: &[(&str, bool)]) -> DetectionMatrix {
    DetectionMatrix {
        rule: RuleRef { analyzer_id: "a".into(), rule_id: "R".into() },
        seed_detected: seed,
        mutant_detected: mutants.iter().map(|(k, d)| (k.to_string(), *d)).collect(),
    }
}

#[test]
fn truth_table() {
    let cases = [
        (true, vec![], VerdictKind::Consistent),
        (false, vec![], VerdictKind::SeedMissOnly),
        (true, vec![("DEAD_STORE/1", true)], VerdictKind::Consistent),
        (true, vec![("DEAD_STORE/1", false)], VerdictKind::Type1),
        (false, vec![("DEAD_STORE/1", true)], VerdictKind::SeedMissOnly),
        (false, vec![("DEAD_STORE/1", false)], VerdictKind::Type2),
        (true, vec![("DEAD_STORE/1", true), ("RENAME_LOCAL/2", false)], VerdictKind::Type1),
        (false, vec![("DEAD_STORE/1", true), ("RENAME_LOCAL/2", false)], VerdictKind::Type2),
    ];
    for (seed, ms, want) in cases {
        let v = classify(&matrix(seed, &ms));
        assert_eq!(v.kind, want, "seed={seed} {ms:?}");
    }
    let v = classify(&matrix(true, &[("UNREACHABLE_IF/2", false), ("DEAD_STORE/1", false), ("RENAME_LOCAL/1", true)]));
    assert_eq!(v.witnesses, vec!["DEAD_STORE/1", "UNREACHABLE_IF/2"]);
}

fn arb_matrix() -> impl Strategy<Value = DetectionMatrix> {
    (any::<bool>(), proptest::collection::btree_map("[A-Z_]{3,8}/[1-3]", any::<bool>(), 0..6)).prop_map(|(s, m)| DetectionMatrix {
        rule: RuleRef { analyzer_id: "a".into(), rule_id: "R".into() },
        seed_detected: s,
        mutant_detected: m,
    })
}

fn report(analyzer: &str, rule: &str, backend: &str, kind_matrix: DetectionMatrix, tag: Option<&str>) -> BugReport {
    let mut m = kind_matrix;
    m.rule = RuleRef { analyzer_id: analyzer.into(), rule_id: rule.into() };
    BugReport {
        id: format!("{analyzer}/{rule}"),
        backend_id: backend.into(),
        verdict: classify(&m),
        evidence: Evidence::default(),
        incidental: vec![],
        manual_label: ManualLabel::Unreviewed,
        root_cause_tag: tag.map(str::to_string),
    }
}

proptest! {
    #[test]
    fn verdicts_partition_the_matrices(m in arb_matrix()) {
        let v = classify(&m);
        let missed = m.mutant_detected.values().filter(|d| !**d).count();
        let holds = [
            (VerdictKind::Consistent, m.seed_detected && missed == 0),
            (VerdictKind::Type1, m.seed_detected && missed > 0),
            (VerdictKind::Type2, !m.seed_detected && missed > 0),
            (VerdictKind::SeedMissOnly, !m.seed_detected && missed == 0),
        ];
        let kinds: Vec<VerdictKind> = holds.iter().filter(|(_, h)| *h).map(|(k, _)| *k).collect();
        prop_assert_eq!(kinds, vec![v.kind]);
        prop_assert_eq!(v.witnesses.len(), missed);
    }

    #[test]
    fn dropping_a_detected_mutant_keeps_the_verdict(m in arb_matrix()) {
        let before = classify(&m);
        if let Some(k) = m.mutant_detected.iter().find(|(_, d)| **d).map(|(k, _)| k.clone()) {
            let mut smaller = m.clone();
            smaller.mutant_detected.remove(&k);
            let after = classify(&smaller);
            prop_assert_eq!(after.kind, before.kind);
            prop_assert_eq!(after.witnesses, before.witnesses);
        }
    }

    #[test]
    fn groups_never_span_rules(ms in proptest::collection::vec((arb_matrix(), 0usize..3, 0usize..2, proptest::option::of("[a-z]{1,3}")), 0..10)) {
        let reports: Vec<BugReport> = ms
            .into_iter()
            .enumerate()
            .map(|(i, (m, r, b, tag))| report("a", &format!("R{r}"), &format!("b{b}-{i}"), m, tag.as_deref()))
            .collect();
        let groups = group_unique(&reports);
        let bugs = reports.iter().filter(|r| r.verdict.kind.is_bug()).count();
        prop_assert_eq!(groups.iter().map(|g| g.members.len()).sum::<usize>(), bugs);
        for g in &groups {
            for m in &g.members {
                let r = reports.iter().find(|r| format!("{}@{}", r.id, r.backend_id) == *m).unwrap();
                prop_assert_eq!(r.rule(), &g.rule);
            }
        }
    }
}

#[test]
fn root_cause_tags_merge_reports_of_one_rule() {
    let t1 = matrix(true, &[("DEAD_STORE/1", false)]);
    let t2 = matrix(true, &[("RENAME_LOCAL/1", false)]);
    let reports = vec![report("a", "R", "m1", t1.clone(), Some("bytecode-pattern")), report("a", "R", "m2", t2.clone(), Some("bytecode-pattern")), report("a", "R", "m3", t2, None)];
    let groups = group_unique(&reports);
    assert_eq!(groups.len(), 2);
    assert_eq!(groups[0].key, GroupKey::RootCause("bytecode-pattern".into()));
    assert_eq!(groups[0].members, vec!["a/R@m1", "a/R@m2"]);
    assert!(matches!(&groups[1].key, GroupKey::Provisional(ops) if ops.iter().eq(["RENAME_LOCAL"].iter())));
}

fn record(rule: &str, stage: &str, report: Option<BugReport>) -> RuleRecord {
    RuleRecord {
        rule: RuleRef { analyzer_id: "a".into(), rule_id: rule.into() },
        backend_id: "m".into(),
        stage: stage.into(),
        failure: None,
        counts: RuleCounts { seeds: 1, comp_seeds: 1, tests: 1, valid_seeds: 1, mutants: 2, comp_mutants: 2, valid_mutants: 2 },
        report,
    }
}

#[test]
fn unfinished_rules_block_the_summary_unless_allowed() {
    let done = record("R1", "evaluated", Some(report("a", "R1", "m", matrix(true, &[("DEAD_STORE/1", false)]), None)));
    let pending = record("R2", "mutated", None);
    let err = emit_report(&[done.clone(), pending.clone()], false).unwrap_err();
    assert_eq!(err.pending, vec!["a/R2 (mutated)"]);
    let s = emit_report(&[done, pending], true).unwrap();
    assert_eq!(s.totals.type1, 1);
    assert_eq!(s.totals.rules, 2);
    assert_eq!(s.totals.counts.mutants, 4);
    assert_eq!(s.to_json(), emit_report(&[record("R1", "evaluated", Some(report("a", "R1", "m", matrix(true, &[("DEAD_STORE/1", false)]), None))), record("R2", "mutated", None)], true).unwrap().to_json());
}

#[test]
fn empty_campaign_summarizes_to_zero() {
    let s = emit_report(&[], false).unwrap();
    assert!(s.rows.is_empty());
    assert_eq!(s.totals.rules, 0);
    let _: BTreeMap<String, serde_json::Value> = serde_json::from_str(&s.to_json()).unwrap();
}
