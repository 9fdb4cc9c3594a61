use metaprobe_core::catalog::{filter_rules, parse_catalog, serialize_catalog, Category, FilterPolicy, RuleSelector, RuleSpec};
use proptest::prelude::*;

fn category() -> impl Strategy<Value = Category> {
    proptest::sample::select(Category::ALL.to_vec())
}

fn rule() -> impl Strategy<Value = RuleSpec> {
    (
        "[a-z]{1,8}",
        "[A-Z][A-Z_]{0,12}",
        "[ -~]{1,40}",
        "[ -~\n]{1,80}",
        category(),
        proptest::option::of(0u32..20),
        proptest::collection::vec("[a-z_]{1,10}", 0..3),
        proptest::collection::vec("[ -~]{0,30}", 0..2),
    )
        .prop_filter("blank text", |(_, _, t, d, ..)| !t.trim().is_empty() && !d.trim().is_empty())
        .prop_map(|(analyzer_id, rule_id, title, description, category, severity, tags, example_snippets)| RuleSpec {
            analyzer_id,
            rule_id,
            title,
            description,
            category,
            severity,
            example_snippets,
            source_url: None,
            tags,
        })
}

fn unique(rules: Vec<RuleSpec>) -> Vec<RuleSpec> {
    let mut seen = std::collections::HashSet::new();
    rules.into_iter().filter(|r| seen.insert(r.key())).collect()
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(rules in proptest::collection::vec(rule(), 0..12).prop_map(unique)) {
        let text = serialize_catalog(&rules);
        prop_assert_eq!(parse_catalog(&text).unwrap(), rules);
    }

    #[test]
    fn filtering_is_a_stable_subset(
        rules in proptest::collection::vec(rule(), 0..12).prop_map(unique),
        cats in proptest::collection::btree_set(category(), 1..4),
        tags in proptest::collection::btree_set("[a-z_]{1,10}", 0..3),
    ) {
        let policy = FilterPolicy::new(cats, tags).unwrap();
        let kept = filter_rules(&rules, &policy);
        prop_assert!(kept.iter().all(|r| rules.contains(r) && policy.keeps(r)));
        prop_assert_eq!(kept.len(), rules.iter().filter(|r| policy.keeps(r)).count());
        prop_assert_eq!(filter_rules(&kept, &policy), kept.clone());
        let order: Vec<usize> = kept.iter().map(|k| rules.iter().position(|r| r == k).unwrap()).collect();
        prop_assert!(order.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn every_bad_record_is_reported_with_its_line() {
    let text = concat!(
        "{\"schema\": \"rule-catalog\", \"version\": 1}\n",
        "{\"analyzer_id\": \"a\", \"rule_id\": \"R1\", \"title\": \"t\", \"description\": \"d\", \"category\": \"correctness\"}\n",
        "{\"analyzer_id\": \"a\", \"rule_id\": \"R2\", \"title\": \"t\", \"category\": \"correctness\"}\n",
        "not json\n",
        "{\"analyzer_id\": \"a\", \"rule_id\": \"R1\", \"title\": \"t\", \"description\": \"d\", \"category\": \"correctness\"}\n",
        "{\"analyzer_id\": \"a\", \"rule_id\": \"R3\", \"title\": \"t\", \"description\": \"d\", \"category\": \"weird\"}\n",
    );
    let err = parse_catalog(text).unwrap_err();
    let issues: Vec<(usize, Option<&str>)> = err.issues().iter().map(|i| (i.line, i.field.as_deref())).collect();
    assert_eq!(issues, vec![(3, Some("description")), (4, None), (5, Some("rule_id")), (6, Some("category"))]);
}

#[test]
fn selectors_match_bare_and_qualified_ids() {
    let r = RuleSpec {
        analyzer_id: "spotbugs".into(),
        rule_id: "RV_ABSOLUTE_VALUE_OF_HASHCODE".into(),
        title: "t".into(),
        description: "d".into(),
        category: Category::Correctness,
        severity: None,
        example_snippets: vec![],
        source_url: None,
        tags: vec![],
    };
    assert!(RuleSelector::parse("RV_*").unwrap().matches(&r));
    assert!(RuleSelector::parse("pmd/*, spotbugs/RV_ABSOLUTE_VALUE_OF_HASHCODE").unwrap().matches(&r));
    assert!(!RuleSelector::parse("pmd/*").unwrap().matches(&r));
    assert!(!RuleSelector::parse("RV").unwrap().matches(&r));
}
