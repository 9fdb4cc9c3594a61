//! On-disk campaign workspace: one directory per rule holding every artifact
//! and a job-state record that makes campaigns resumable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::catalog::RuleSpec;

/// Writes pretty JSON through a temporary file so readers never see a
/// partial record.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> std::io::Result<()> {
    if let Some(p) = path.parent() {
        std::fs::create_dir_all(p)?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> std::io::Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Pending,
    Seeded,
    Validated,
    Mutated,
    Analyzed,
    Evaluated,
}

impl Stage {
    pub const ORDER: [Stage; 6] = [Stage::Pending, Stage::Seeded, Stage::Validated, Stage::Mutated, Stage::Analyzed, Stage::Evaluated];

    pub fn previous(self) -> Option<Stage> {
        let i = Stage::ORDER.iter().position(|s| *s == self)?;
        i.checked_sub(1).map(|j| Stage::ORDER[j])
    }

    pub fn next(self) -> Option<Stage> {
        let i = Stage::ORDER.iter().position(|s| *s == self)?;
        Stage::ORDER.get(i + 1).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Pending => "pending",
            Stage::Seeded => "seeded",
            Stage::Validated => "validated",
            Stage::Mutated => "mutated",
            Stage::Analyzed => "analyzed",
            Stage::Evaluated => "evaluated",
        }
    }

    /// Command that produces this stage.
    pub fn command(self) -> &'static str {
        match self {
            Stage::Pending => "catalog",
            Stage::Seeded => "generate",
            Stage::Validated => "validate",
            Stage::Mutated => "mutate",
            Stage::Analyzed => "analyze",
            Stage::Evaluated => "evaluate",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// Stage that could not be reached.
    pub stage: Stage,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleJobState {
    pub analyzer_id: String,
    pub rule_id: String,
    /// Last stage completed.
    pub stage: Stage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed: Option<Failure>,
    /// Stages whose artifacts predate a forced rerun of an earlier stage.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub stale: BTreeSet<Stage>,
    #[serde(default)]
    pub timestamps: BTreeMap<Stage, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StateError {
    #[error("{rule}: stage '{needed}' is required first (run `{command}`)")]
    MissingPrerequisite { rule: String, needed: Stage, command: &'static str },
    #[error("{rule}: failed while reaching '{}': {}", .failure.stage, .failure.reason)]
    Failed { rule: String, failure: Failure },
}

impl RuleJobState {
    pub fn new(rule: &RuleSpec) -> Self {
        RuleJobState {
            analyzer_id: rule.analyzer_id.clone(),
            rule_id: rule.rule_id.clone(),
            stage: Stage::Pending,
            failed: None,
            stale: BTreeSet::new(),
            timestamps: BTreeMap::new(),
        }
    }

    pub fn key(&self) -> String {
        format!("{}/{}", self.analyzer_id, self.rule_id)
    }

    pub fn is_terminal(&self) -> bool {
        self.failed.is_some() || self.stage == Stage::Evaluated
    }

    /// Decides whether `target` should run: `Ok(false)` when already done,
    /// an error when its prerequisite is missing or the job failed earlier.
    pub fn plan(&self, target: Stage, force: bool) -> Result<bool, StateError> {
        let prerequisite = target.previous().unwrap_or(Stage::Pending);
        if let Some(f) = &self.failed {
            if !(force && f.stage == target) && f.stage <= target {
                return Err(StateError::Failed { rule: self.key(), failure: f.clone() });
            }
        }
        if self.stage < prerequisite {
            return Err(StateError::MissingPrerequisite { rule: self.key(), needed: prerequisite, command: prerequisite.command() });
        }
        Ok(force || self.stage < target || self.stale.contains(&target))
    }

    /// Rewinds to just before `target` and marks everything it had reached
    /// beyond that as stale.
    pub fn rewind(&mut self, target: Stage) {
        let before = target.previous().unwrap_or(Stage::Pending);
        if self.stage >= target {
            let reached = self.stage;
            self.stale.extend(Stage::ORDER.iter().copied().filter(|s| *s > target && *s <= reached));
        }
        if self.stage > before {
            self.stage = before;
        }
        if self.failed.as_ref().is_some_and(|f| f.stage >= target) {
            self.failed = None;
        }
    }

    pub fn advance(&mut self, to: Stage, timestamp: String) {
        debug_assert!(to.previous().is_some_and(|p| p <= self.stage));
        self.stage = to;
        self.stale.remove(&to);
        self.failed = None;
        self.timestamps.insert(to, timestamp);
    }

    pub fn fail(&mut self, stage: Stage, reason: impl Into<String>) {
        self.failed = Some(Failure { stage, reason: reason.into() });
    }
}

/// Directory-safe form of an identifier.
pub fn path_component(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn open(root: &Path) -> std::io::Result<Workspace> {
        std::fs::create_dir_all(root.join("rules"))?;
        Ok(Workspace { root: root.canonicalize()? })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn rule(&self, analyzer_id: &str, rule_id: &str) -> RuleDir {
        RuleDir { root: self.root.join("rules").join(path_component(analyzer_id)).join(path_component(rule_id)) }
    }

    pub fn summary_json(&self) -> PathBuf {
        self.root.join("summary.json")
    }

    pub fn summary_md(&self) -> PathBuf {
        self.root.join("summary.md")
    }

    /// Every job-state record present, sorted by rule key.
    pub fn states(&self) -> std::io::Result<Vec<RuleJobState>> {
        let mut out = Vec::new();
        let rules = self.root.join("rules");
        for a in sorted_dirs(&rules)? {
            for r in sorted_dirs(&a)? {
                let p = r.join("state.json");
                if p.is_file() {
                    out.push(read_json(&p)?);
                }
            }
        }
        out.sort_by_key(|s: &RuleJobState| s.key());
        Ok(out)
    }
}

fn sorted_dirs(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)?.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_dir()).collect();
    v.sort();
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDir {
    pub root: PathBuf,
}

impl RuleDir {
    pub fn state_path(&self) -> PathBuf {
        self.root.join("state.json")
    }
    pub fn seed(&self) -> PathBuf {
        self.root.join("seed")
    }
    pub fn test(&self) -> PathBuf {
        self.root.join("test")
    }
    pub fn mutants(&self) -> PathBuf {
        self.root.join("mutants")
    }
    pub fn mutant(&self, op: &str, variant: &str) -> PathBuf {
        self.mutants().join(op).join(variant)
    }
    pub fn reports(&self) -> PathBuf {
        self.root.join("reports")
    }
    pub fn verdict(&self) -> PathBuf {
        self.root.join("verdict")
    }
    pub fn transcript(&self) -> PathBuf {
        self.root.join("transcript.jsonl")
    }
    /// Throwaway build sandboxes.
    pub fn scratch(&self) -> PathBuf {
        self.root.join("scratch")
    }

    pub fn load_state(&self, rule: &RuleSpec) -> std::io::Result<RuleJobState> {
        let p = self.state_path();
        if p.is_file() {
            read_json(&p)
        } else {
            Ok(RuleJobState::new(rule))
        }
    }

    pub fn save_state(&self, state: &RuleJobState) -> std::io::Result<()> {
        write_json(&self.state_path(), state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Category;

    fn rule() -> RuleSpec {
        RuleSpec {
            analyzer_id: "spotbugs".into(),
            rule_id: "RV_X".into(),
            title: "t".into(),
            description: "d".into(),
            category: Category::Correctness,
            severity: None,
            example_snippets: vec![],
            source_url: None,
            tags: vec![],
        }
    }

    #[test]
    fn stage_order_is_enforced() {
        let s = RuleJobState::new(&rule());
        let e = s.plan(Stage::Mutated, false).unwrap_err();
        assert!(e.to_string().contains("'validated'") && e.to_string().contains("validate"), "{e}");
        assert_eq!(s.plan(Stage::Seeded, false), Ok(true));
    }

    #[test]
    fn forced_rerun_marks_downstream_stale() {
        let mut s = RuleJobState::new(&rule());
        for st in &Stage::ORDER[1..] {
            s.advance(*st, String::new());
        }
        assert_eq!(s.plan(Stage::Seeded, false), Ok(false));
        s.rewind(Stage::Seeded);
        assert_eq!(s.stage, Stage::Pending);
        assert_eq!(s.stale.len(), 4);
        s.advance(Stage::Seeded, String::new());
        assert_eq!(s.plan(Stage::Validated, false), Ok(true));
    }

    #[test]
    fn failure_is_terminal_unless_forced() {
        let mut s = RuleJobState::new(&rule());
        s.fail(Stage::Seeded, "discarded");
        assert!(matches!(s.plan(Stage::Seeded, false), Err(StateError::Failed { .. })));
        assert!(matches!(s.plan(Stage::Validated, false), Err(StateError::Failed { .. })));
        assert_eq!(s.plan(Stage::Seeded, true), Ok(true));
    }
}
