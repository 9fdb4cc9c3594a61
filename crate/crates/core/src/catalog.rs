//! Analyzer rule catalogs: a JSON-lines file whose first line is a schema
//! header and every following line one rule record.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "rule-catalog";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Correctness,
    Security,
    Performance,
    Style,
    Maintainability,
    FrameworkSpecific,
    TestOnly,
    Other,
}

impl Category {
    pub const ALL: [Category; 8] = [
        Category::Correctness,
        Category::Security,
        Category::Performance,
        Category::Style,
        Category::Maintainability,
        Category::FrameworkSpecific,
        Category::TestOnly,
        Category::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Correctness => "correctness",
            Category::Security => "security",
            Category::Performance => "performance",
            Category::Style => "style",
            Category::Maintainability => "maintainability",
            Category::FrameworkSpecific => "framework_specific",
            Category::TestOnly => "test_only",
            Category::Other => "other",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown category '{s}'"))
    }
}

/// One bug-detection rule of one analyzer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    pub analyzer_id: String,
    pub rule_id: String,
    pub title: String,
    pub description: String,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub severity: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub example_snippets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_url: Option<String>,
    /// Free-form curation markers, e.g. `android` or `spring`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

impl RuleSpec {
    /// `analyzer/rule` key used for workspace paths and script queues.
    pub fn key(&self) -> String {
        format!("{}/{}", self.analyzer_id, self.rule_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    schema: String,
    version: u32,
}

/// Problem with one line of a catalog file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordIssue {
    /// 1-based line in the file.
    pub line: usize,
    pub rule_id: Option<String>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for RecordIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}", self.line)?;
        if let Some(r) = &self.rule_id {
            write!(f, " (rule {r})")?;
        }
        if let Some(field) = &self.field {
            write!(f, ", field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog {path} not found")]
    Missing { path: String },
    #[error("cannot read catalog {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("catalog header invalid: {0}")]
    Header(String),
    #[error("catalog has {} invalid record(s):\n{}", .0.len(), .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Schema(Vec<RecordIssue>),
}

impl CatalogError {
    pub fn issues(&self) -> &[RecordIssue] {
        match self {
            CatalogError::Schema(v) => v,
            _ => &[],
        }
    }
}

const FIELDS: [&str; 9] = ["analyzer_id", "rule_id", "title", "description", "category", "severity", "example_snippets", "source_url", "tags"];
const REQUIRED: [&str; 5] = ["analyzer_id", "rule_id", "title", "description", "category"];

fn check_record(line: usize, value: &serde_json::Value) -> Result<RuleSpec, RecordIssue> {
    let issue = |rule_id: Option<String>, field: Option<&str>, message: String| RecordIssue { line, rule_id, field: field.map(str::to_string), message };
    let Some(obj) = value.as_object() else {
        return Err(issue(None, None, "record is not a JSON object".into()));
    };
    let rule_id = obj.get("rule_id").and_then(|v| v.as_str()).map(str::to_string);
    for f in REQUIRED {
        if !obj.contains_key(f) {
            return Err(issue(rule_id, Some(f), "missing required field".into()));
        }
    }
    if let Some(k) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(issue(rule_id, Some(k), "unknown field".into()));
    }
    for (f, v) in obj {
        let bad = match f.as_str() {
            "analyzer_id" | "rule_id" | "title" | "description" => serde_json::from_value::<String>(v.clone()).err(),
            "category" => serde_json::from_value::<Category>(v.clone()).err(),
            "severity" => serde_json::from_value::<Option<u32>>(v.clone()).err(),
            "source_url" => serde_json::from_value::<Option<String>>(v.clone()).err(),
            _ => serde_json::from_value::<Vec<String>>(v.clone()).err(),
        };
        if let Some(e) = bad {
            return Err(issue(rule_id, Some(f), e.to_string()));
        }
    }
    let spec: RuleSpec = serde_json::from_value(value.clone()).map_err(|e| issue(rule_id.clone(), None, e.to_string()))?;
    for (f, v) in [("analyzer_id", &spec.analyzer_id), ("rule_id", &spec.rule_id), ("title", &spec.title), ("description", &spec.description)] {
        if v.trim().is_empty() {
            return Err(issue(Some(spec.rule_id.clone()).filter(|r| !r.is_empty()), Some(f), "must not be empty".into()));
        }
    }
    Ok(spec)
}

/// Parses catalog text, reporting every bad record at once.
pub fn parse_catalog(text: &str) -> Result<Vec<RuleSpec>, CatalogError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, first)) = lines.next() else {
        return Err(CatalogError::Header("empty file".into()));
    };
    let header: Header = serde_json::from_str(first).map_err(|e| CatalogError::Header(e.to_string()))?;
    if header.schema != SCHEMA {
        return Err(CatalogError::Header(format!("schema is '{}', expected '{SCHEMA}'", header.schema)));
    }
    if header.version != VERSION {
        return Err(CatalogError::Header(format!("unsupported version {}", header.version)));
    }
    let mut rules = Vec::new();
    let mut issues = Vec::new();
    let mut seen = HashSet::new();
    for (i, l) in lines {
        let line = i + 1;
        let value: serde_json::Value = match serde_json::from_str(l) {
            Ok(v) => v,
            Err(e) => {
                issues.push(RecordIssue { line, rule_id: None, field: None, message: format!("not valid JSON: {e}") });
                continue;
            }
        };
        match check_record(line, &value) {
            Ok(spec) => {
                if !seen.insert((spec.analyzer_id.clone(), spec.rule_id.clone())) {
                    issues.push(RecordIssue {
                        line,
                        rule_id: Some(spec.rule_id.clone()),
                        field: Some("rule_id".into()),
                        message: format!("duplicate rule id for analyzer {}", spec.analyzer_id),
                    });
                } else {
                    rules.push(spec);
                }
            }
            Err(issue) => issues.push(issue),
        }
    }
    if issues.is_empty() {
        Ok(rules)
    } else {
        Err(CatalogError::Schema(issues))
    }
}

pub fn load_catalog(path: &Path) -> Result<Vec<RuleSpec>, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CatalogError::Missing { path: path.display().to_string() }
        } else {
            CatalogError::Io { path: path.display().to_string(), source: e }
        }
    })?;
    parse_catalog(&text)
}

pub fn serialize_catalog(rules: &[RuleSpec]) -> String {
    let mut out = serde_json::to_string(&Header { schema: SCHEMA.into(), version: VERSION }).expect("header serializes");
    out.push('\n');
    for r in rules {
        out.push_str(&serde_json::to_string(r).expect("rule serializes"));
        out.push('\n');
    }
    out
}

pub fn write_catalog(path: &Path, rules: &[RuleSpec]) -> std::io::Result<()> {
    std::fs::write(path, serialize_catalog(rules))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterPolicy {
    pub included_categories: BTreeSet<Category>,
    #[serde(default)]
    pub excluded_tags: BTreeSet<String>,
}

#[derive(Debug, thiserror::Error)]
#[error("filter policy must include at least one category")]
pub struct EmptyPolicy;

impl FilterPolicy {
    pub fn new(included: impl IntoIterator<Item = Category>, excluded_tags: impl IntoIterator<Item = String>) -> Result<Self, EmptyPolicy> {
        let p = FilterPolicy { included_categories: included.into_iter().collect(), excluded_tags: excluded_tags.into_iter().collect() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EmptyPolicy> {
        if self.included_categories.is_empty() {
            Err(EmptyPolicy)
        } else {
            Ok(())
        }
    }

    /// Keeps everything.
    pub fn all() -> Self {
        FilterPolicy { included_categories: Category::ALL.into_iter().collect(), excluded_tags: BTreeSet::new() }
    }

    pub fn keeps(&self, rule: &RuleSpec) -> bool {
        self.included_categories.contains(&rule.category) && !rule.tags.iter().any(|t| self.excluded_tags.contains(t))
    }
}

impl Default for FilterPolicy {
    /// Correctness, security and performance rules that are not tied to a
    /// particular framework or platform.
    fn default() -> Self {
        FilterPolicy {
            included_categories: [Category::Correctness, Category::Security, Category::Performance].into_iter().collect(),
            excluded_tags: ["android", "spring", "framework_specific", "jakarta_ee"].into_iter().map(str::to_string).collect(),
        }
    }
}

pub fn filter_rules(rules: &[RuleSpec], policy: &FilterPolicy) -> Vec<RuleSpec> {
    rules.iter().filter(|r| policy.keeps(r)).cloned().collect()
}

/// Per-analyzer, per-category counts for `catalog stats`.
pub fn stats(rules: &[RuleSpec]) -> BTreeMap<String, BTreeMap<Category, usize>> {
    let mut out: BTreeMap<String, BTreeMap<Category, usize>> = BTreeMap::new();
    for r in rules {
        *out.entry(r.analyzer_id.clone()).or_default().entry(r.category).or_default() += 1;
    }
    out
}

/// Matches `analyzer/rule` keys against comma-separated glob patterns. A
/// pattern without `/` is matched against the bare rule id.
#[derive(Debug, Clone)]
pub struct RuleSelector {
    patterns: Vec<(bool, regex::Regex)>,
}

impl RuleSelector {
    pub fn parse(spec: &str) -> Result<Self, regex::Error> {
        let mut patterns = Vec::new();
        for p in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let qualified = p.contains('/');
            let re = format!("^{}$", regex::escape(p).replace(r"\*", ".*").replace(r"\?", "."));
            patterns.push((qualified, regex::Regex::new(&re)?));
        }
        Ok(RuleSelector { patterns })
    }

    pub fn any() -> Self {
        RuleSelector::parse("*").expect("static pattern")
    }

    pub fn matches(&self, rule: &RuleSpec) -> bool {
        self.patterns.iter().any(|(qualified, re)| if *qualified { re.is_match(&rule.key()) } else { re.is_match(&rule.rule_id) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(id: &str, category: Category) -> RuleSpec {
        RuleSpec {
            analyzer_id: "spotbugs".into(),
            rule_id: id.into(),
            title: format!("title {id}"),
            description: format!("description {id}"),
            category,
            severity: None,
            example_snippets: vec![],
            source_url: None,
            tags: vec![],
        }
    }

    #[test]
    fn three_records_load_in_order() {
        let rules = vec![rule("A", Category::Correctness), rule("B", Category::Style), rule("C", Category::Security)];
        let back = parse_catalog(&serialize_catalog(&rules)).unwrap();
        assert_eq!(back, rules);
    }

    #[test]
    fn missing_description_names_record_and_field() {
        let text = format!(
            "{}\n{}\n",
            r#"{"schema":"rule-catalog","version":1}"#,
            r#"{"analyzer_id":"pmd","rule_id":"X1","title":"t","category":"correctness"}"#
        );
        let err = parse_catalog(&text).unwrap_err();
        let issues = err.issues();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].rule_id.as_deref(), Some("X1"));
        assert_eq!(issues[0].field.as_deref(), Some("description"));
        assert_eq!(issues[0].line, 2);
    }

    #[test]
    fn empty_description_is_rejected() {
        let mut r = rule("E", Category::Correctness);
        r.description = "  ".into();
        let err = parse_catalog(&serialize_catalog(&[r])).unwrap_err();
        assert_eq!(err.issues()[0].field.as_deref(), Some("description"));
    }

    #[test]
    fn duplicates_and_bad_categories_are_all_reported() {
        let text = format!(
            "{}\n{}\n{}\n{}\n",
            r#"{"schema":"rule-catalog","version":1}"#,
            serde_json::to_string(&rule("A", Category::Correctness)).unwrap(),
            serde_json::to_string(&rule("A", Category::Security)).unwrap(),
            r#"{"analyzer_id":"pmd","rule_id":"B","title":"t","description":"d","category":"fancy"}"#
        );
        let err = parse_catalog(&text).unwrap_err();
        assert_eq!(err.issues().len(), 2);
        assert_eq!(err.issues()[1].field.as_deref(), Some("category"));
    }

    #[test]
    fn default_policy_excludes_style_and_framework_rules() {
        let mut android = rule("AND", Category::Correctness);
        android.tags.push("android".into());
        let rules = vec![rule("S", Category::Style), android, rule("OK", Category::Performance), rule("F", Category::FrameworkSpecific)];
        let kept: Vec<_> = filter_rules(&rules, &FilterPolicy::default()).into_iter().map(|r| r.rule_id).collect();
        assert_eq!(kept, vec!["OK"]);
        assert_eq!(filter_rules(&rules, &FilterPolicy::all()), rules);
    }

    #[test]
    fn empty_policy_is_invalid() {
        assert!(FilterPolicy::new([], []).is_err());
    }

    #[test]
    fn selector_globs() {
        let s = RuleSelector::parse("RV_*, pmd/Empty?").unwrap();
        assert!(s.matches(&rule("RV_ABS", Category::Correctness)));
        assert!(!s.matches(&rule("EmptyA", Category::Correctness)));
        let mut p = rule("EmptyA", Category::Correctness);
        p.analyzer_id = "pmd".into();
        assert!(s.matches(&p));
    }

    #[test]
    fn stats_count_per_category() {
        let rules = vec![rule("A", Category::Correctness), rule("B", Category::Correctness), rule("C", Category::Style)];
        let s = stats(&rules);
        assert_eq!(s["spotbugs"][&Category::Correctness], 2);
        assert_eq!(s["spotbugs"][&Category::Style], 1);
    }
}
