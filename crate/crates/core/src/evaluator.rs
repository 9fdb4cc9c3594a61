//! Comparing detections across a seed and its equivalent mutants, grouping
//! the resulting rule bugs, and the campaign summary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analyzer::Finding;
use crate::mutation::Operator;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RuleRef {
    pub analyzer_id: String,
    pub rule_id: String,
}

impl RuleRef {
    pub fn key(&self) -> String {
        format!("{}/{}", self.analyzer_id, self.rule_id)
    }
}

/// Detections on one seed and its equivalence-certified mutants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionMatrix {
    pub rule: RuleRef,
    pub seed_detected: bool,
    pub mutant_detected: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    Consistent,
    Type1,
    Type2,
    SeedMissOnly,
}

impl VerdictKind {
    pub const ALL: [VerdictKind; 4] = [VerdictKind::Consistent, VerdictKind::Type1, VerdictKind::Type2, VerdictKind::SeedMissOnly];

    pub fn is_bug(self) -> bool {
        matches!(self, VerdictKind::Type1 | VerdictKind::Type2)
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Consistent => "Consistent",
            VerdictKind::Type1 => "Type1",
            VerdictKind::Type2 => "Type2",
            VerdictKind::SeedMissOnly => "SeedMissOnly",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Undetected mutant ids, sorted.
    pub witnesses: Vec<String>,
    pub matrix: DetectionMatrix,
}

/// A missed seed with no equivalent mutants counts as `SeedMissOnly`: every
/// mutant (of none) was detected.
pub fn classify(matrix: &DetectionMatrix) -> Verdict {
    let witnesses: Vec<String> = matrix.mutant_detected.iter().filter(|(_, d)| !**d).map(|(k, _)| k.clone()).collect();
    let kind = match (matrix.seed_detected, witnesses.is_empty()) {
        (true, true) => VerdictKind::Consistent,
        (true, false) => VerdictKind::Type1,
        (false, false) => VerdictKind::Type2,
        (false, true) => VerdictKind::SeedMissOnly,
    };
    Verdict { kind, witnesses, matrix: matrix.clone() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManualLabel {
    TruePositive,
    FalsePositive,
    #[default]
    Unreviewed,
}

impl std::str::FromStr for ManualLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tp" | "true_positive" | "true-positive" => Ok(ManualLabel::TruePositive),
            "fp" | "false_positive" | "false-positive" => Ok(ManualLabel::FalsePositive),
            "unreviewed" | "none" => Ok(ManualLabel::Unreviewed),
            other => Err(format!("unknown label '{other}' (expected tp, fp or unreviewed)")),
        }
    }
}

/// Workspace-relative evidence paths.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub seed: String,
    pub test: String,
    /// Mutant id to source path.
    pub mutants: BTreeMap<String, String>,
    /// `seed` or a mutant id to the raw analyzer report.
    pub reports: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    /// `analyzer/rule`, the handle used by `review`.
    pub id: String,
    pub backend_id: String,
    pub verdict: Verdict,
    pub evidence: Evidence,
    /// Findings for other rules on the seed.
    #[serde(default)]
    pub incidental: Vec<Finding>,
    #[serde(default)]
    pub manual_label: ManualLabel,
    #[serde(default)]
    pub root_cause_tag: Option<String>,
}

impl BugReport {
    pub fn rule(&self) -> &RuleRef {
        &self.verdict.matrix.rule
    }

    pub fn witness_operators(&self) -> BTreeSet<String> {
        self.verdict.witnesses.iter().map(|w| w.split('/').next().unwrap_or(w).to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    RootCause(String),
    /// No tag yet: grouped by which operators escaped detection.
    Provisional(BTreeSet<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniqueGroup {
    pub rule: RuleRef,
    pub key: GroupKey,
    pub members: Vec<String>,
    pub labels: Vec<ManualLabel>,
}

impl UniqueGroup {
    pub fn confirmed(&self) -> bool {
        self.labels.contains(&ManualLabel::TruePositive)
    }
}

/// Groups Type1/Type2 reports into unique bugs; groups never span rules.
pub fn group_unique(reports: &[BugReport]) -> Vec<UniqueGroup> {
    let mut groups: BTreeMap<(RuleRef, GroupKey), (Vec<String>, Vec<ManualLabel>)> = BTreeMap::new();
    for r in reports.iter().filter(|r| r.verdict.kind.is_bug()) {
        let key = match r.root_cause_tag.as_deref().map(str::trim).filter(|t| !t.is_empty()) {
            Some(t) => GroupKey::RootCause(t.to_string()),
            None => GroupKey::Provisional(r.witness_operators()),
        };
        let e = groups.entry((r.rule().clone(), key)).or_default();
        e.0.push(format!("{}@{}", r.id, r.backend_id));
        e.1.push(r.manual_label);
    }
    groups
        .into_iter()
        .map(|((rule, key), (mut members, labels))| {
            members.sort();
            UniqueGroup { rule, key, members, labels }
        })
        .collect()
}

/// Pipeline counts for one rule job.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCounts {
    pub seeds: u32,
    pub comp_seeds: u32,
    pub tests: u32,
    pub valid_seeds: u32,
    pub mutants: u32,
    pub comp_mutants: u32,
    pub valid_mutants: u32,
}

impl std::ops::AddAssign for RuleCounts {
    fn add_assign(&mut self, o: RuleCounts) {
        self.seeds += o.seeds;
        self.comp_seeds += o.comp_seeds;
        self.tests += o.tests;
        self.valid_seeds += o.valid_seeds;
        self.mutants += o.mutants;
        self.comp_mutants += o.comp_mutants;
        self.valid_mutants += o.valid_mutants;
    }
}

/// Everything the summary needs about one rule job.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub rule: RuleRef,
    pub backend_id: String,
    pub stage: String,
    #[serde(default)]
    pub failure: Option<String>,
    pub counts: RuleCounts,
    #[serde(default)]
    pub report: Option<BugReport>,
}

impl RuleRecord {
    pub fn finished(&self) -> bool {
        self.failure.is_some() || self.report.is_some()
    }
}

pub const SUMMARY_SCHEMA: &str = "metaprobe-summary";

pub const COLUMNS: [&str; 18] = [
    "analyzer",
    "backend",
    "rules",
    "seeds",
    "comp_seeds",
    "tests",
    "valid_seeds",
    "mutants",
    "comp_mutants",
    "valid_mutants",
    "type1",
    "type1_tp",
    "type2",
    "type2_tp",
    "type2_with_seed_miss_only",
    "consistent",
    "seed_miss_only",
    "failed",
];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub analyzer: String,
    pub backend: String,
    pub rules: u32,
    #[serde(flatten)]
    pub counts: RuleCounts,
    pub type1: u32,
    pub type1_tp: u32,
    pub type2: u32,
    pub type2_tp: u32,
    /// Type2 under the reading that also counts seed-only misses.
    pub type2_with_seed_miss_only: u32,
    pub consistent: u32,
    pub seed_miss_only: u32,
    pub failed: u32,
    pub unique_bugs: u32,
    pub unique_bugs_tp: u32,
}

impl SummaryRow {
    fn cells(&self) -> Vec<String> {
        let c = &self.counts;
        let mut v = vec![self.analyzer.clone(), self.backend.clone()];
        v.extend(
            [
                self.rules,
                c.seeds,
                c.comp_seeds,
                c.tests,
                c.valid_seeds,
                c.mutants,
                c.comp_mutants,
                c.valid_mutants,
                self.type1,
                self.type1_tp,
                self.type2,
                self.type2_tp,
                self.type2_with_seed_miss_only,
                self.consistent,
                self.seed_miss_only,
                self.failed,
            ]
            .map(|n| n.to_string()),
        );
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleLine {
    pub rule: String,
    pub backend: String,
    pub stage: String,
    pub outcome: String,
    pub witnesses: Vec<String>,
    pub manual_label: Option<ManualLabel>,
    pub root_cause_tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: String,
    pub version: u32,
    pub columns: Vec<String>,
    pub rows: Vec<SummaryRow>,
    pub totals: SummaryRow,
    pub unique_bugs: Vec<UniqueGroup>,
    pub rules: Vec<RuleLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("workspace incomplete: {}", .pending.join(", "))]
pub struct Incomplete {
    /// `analyzer/rule (stage, next: command)` per unfinished job.
    pub pending: Vec<String>,
}

fn tally(row: &mut SummaryRow, rec: &RuleRecord) {
    row.rules += 1;
    row.counts += rec.counts;
    if rec.failure.is_some() {
        row.failed += 1;
        return;
    }
    let Some(r) = &rec.report else { return };
    let tp = (r.manual_label == ManualLabel::TruePositive) as u32;
    match r.verdict.kind {
        VerdictKind::Consistent => row.consistent += 1,
        VerdictKind::Type1 => {
            row.type1 += 1;
            row.type1_tp += tp;
        }
        VerdictKind::Type2 => {
            row.type2 += 1;
            row.type2_tp += tp;
            row.type2_with_seed_miss_only += 1;
        }
        VerdictKind::SeedMissOnly => {
            row.seed_miss_only += 1;
            row.type2_with_seed_miss_only += 1;
        }
    }
}

/// Builds the summary over finished records. Unfinished records are an
/// error unless `allow_incomplete`, in which case they count only toward
/// `rules` and the pipeline columns.
pub fn emit_report(records: &[RuleRecord], allow_incomplete: bool) -> Result<Summary, Incomplete> {
    let pending: Vec<String> = records.iter().filter(|r| !r.finished()).map(|r| format!("{} ({})", r.rule.key(), r.stage)).collect();
    if !pending.is_empty() && !allow_incomplete {
        return Err(Incomplete { pending });
    }
    let mut sorted: Vec<&RuleRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.rule, &a.backend_id).cmp(&(&b.rule, &b.backend_id)));
    let reports: Vec<BugReport> = sorted.iter().filter_map(|r| r.report.clone()).collect();
    let groups = group_unique(&reports);

    let mut rows: BTreeMap<(String, String), SummaryRow> = BTreeMap::new();
    let mut totals = SummaryRow { analyzer: "total".into(), backend: "*".into(), ..Default::default() };
    for rec in &sorted {
        let row = rows.entry((rec.rule.analyzer_id.clone(), rec.backend_id.clone())).or_insert_with(|| SummaryRow {
            analyzer: rec.rule.analyzer_id.clone(),
            backend: rec.backend_id.clone(),
            ..Default::default()
        });
        tally(row, rec);
        tally(&mut totals, rec);
    }
    for g in &groups {
        let confirmed = g.confirmed() as u32;
        for row in rows.values_mut().filter(|r| r.analyzer == g.rule.analyzer_id && g.members.iter().any(|m| m.ends_with(&format!("@{}", r.backend)))) {
            row.unique_bugs += 1;
            row.unique_bugs_tp += confirmed;
        }
        totals.unique_bugs += 1;
        totals.unique_bugs_tp += confirmed;
    }
    let rules = sorted
        .iter()
        .map(|rec| {
            let (outcome, witnesses, label, tag) = match (&rec.failure, &rec.report) {
                (Some(f), _) => (format!("failed: {f}"), Vec::new(), None, None),
                (None, Some(r)) => (r.verdict.kind.to_string(), r.verdict.witnesses.clone(), Some(r.manual_label), r.root_cause_tag.clone()),
                (None, None) => ("pending".to_string(), Vec::new(), None, None),
            };
            RuleLine { rule: rec.rule.key(), backend: rec.backend_id.clone(), stage: rec.stage.clone(), outcome, witnesses, manual_label: label, root_cause_tag: tag }
        })
        .collect();
    Ok(Summary {
        schema: SUMMARY_SCHEMA.into(),
        version: 1,
        columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows: rows.into_values().collect(),
        totals,
        unique_bugs: groups,
        rules,
    })
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serialize");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Campaign summary\n\n");
        out.push_str(&format!("| {} |\n", self.columns.join(" | ")));
        out.push_str(&format!("|{}\n", "---|".repeat(self.columns.len())));
        for row in self.rows.iter().chain(std::iter::once(&self.totals)) {
            out.push_str(&format!("| {} |\n", row.cells().join(" | ")));
        }
        out.push_str(&format!(
            "\nUnique rule bugs: {} ({} confirmed true positive).\n",
            self.totals.unique_bugs, self.totals.unique_bugs_tp
        ));
        if !self.rules.is_empty() {
            out.push_str("\n## Rules\n\n| rule | backend | outcome | witnesses | label | root cause |\n|---|---|---|---|---|---|\n");
            for r in &self.rules {
                let label = r.manual_label.map(|l| serde_json::to_value(l).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()).unwrap_or_default();
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} |\n",
                    r.rule,
                    r.backend,
                    r.outcome.replace('|', "\\|").replace('\n', " "),
                    r.witnesses.join(", "),
                    label,
                    r.root_cause_tag.as_deref().unwrap_or("")
                ));
            }
        }
        out.push_str(NOTES);
        out
    }
}

const NOTES: &str = "
## Notes

- A mutant is equivalent when its test run matches the seed's on per-test outcomes, normalized stdout, exception types and stack frames compared as type and method only, without file or line positions.
- `type2_with_seed_miss_only` also counts rules whose seed was missed while every mutant was detected.
- A rule counts as detected on a file when any finding for it names that file, whatever the line.
";

/// Parses an operator code out of a mutant id such as `RENAME_LOCAL/2`.
pub fn witness_operator(id: &str) -> Option<Operator> {
    id.split('/').next()?.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(seed: bool, ms: &[bool]) -> DetectionMatrix {
        DetectionMatrix {
            rule: RuleRef { analyzer_id: "a".into(), rule_id: "R".into() },
            seed_detected: seed,
            mutant_detected: ms.iter().enumerate().map(|(i, d)| (format!("DEAD_STORE/{}", i + 1), *d)).collect(),
        }
    }

    #[test]
    fn documented_examples() {
        let v = classify(&matrix(true, &[true, false, true]));
        assert_eq!((v.kind, v.witnesses.len()), (VerdictKind::Type1, 1));
        let v = classify(&matrix(false, &[false, false]));
        assert_eq!((v.kind, v.witnesses.len()), (VerdictKind::Type2, 2));
        assert_eq!(classify(&matrix(true, &[true, true])).kind, VerdictKind::Consistent);
        assert_eq!(classify(&matrix(false, &[true, true])).kind, VerdictKind::SeedMissOnly);
        assert_eq!(classify(&matrix(true, &[])).kind, VerdictKind::Consistent);
        assert_eq!(classify(&matrix(false, &[])).kind, VerdictKind::SeedMissOnly);
    }

    #[test]
    fn empty_campaign_is_all_zero() {
        let s = emit_report(&[], false).unwrap();
        assert!(s.rows.is_empty());
        assert_eq!(s.totals, SummaryRow { analyzer: "total".into(), backend: "*".into(), ..Default::default() });
        let md = s.to_markdown();
        assert!(md.contains("| total | * | 0 | 0 |"), "{md}");
    }

    #[test]
    fn labels_parse() {
        assert_eq!("tp".parse::<ManualLabel>(), Ok(ManualLabel::TruePositive));
        assert_eq!("FP".parse::<ManualLabel>(), Ok(ManualLabel::FalsePositive));
        assert!("maybe".parse::<ManualLabel>().is_err());
    }
}
