//! Campaign driver: runs each pipeline stage over the selected rules, one
//! sequential job per rule, and persists everything needed to resume.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyzer::{self, AnalysisRun, AnalyzerConfig, InputKind};
use crate::build::{Sandbox, Toolchain};
use crate::catalog::{self, CatalogError, RuleSelector, RuleSpec};
use crate::config::{CampaignConfig, ConfigError, MutationMode};
use crate::evaluator::{self, BugReport, DetectionMatrix, Evidence, Incomplete, ManualLabel, RuleCounts, RuleRecord, RuleRef, Summary};
use crate::gateway::{Gateway, Session, Transcript};
use crate::mutation::{self, Mode, Mutant, MutantStatus, Operator};
use crate::seed::{self, AgentCtx, Budget, SeedOutcome, SeedProgram};
use crate::validation::{self, ValidationOutcome};
use crate::workspace::{read_json, write_json, RuleDir, RuleJobState, Stage, StateError, Workspace};

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Incomplete(#[from] Incomplete),
    #[error("workspace I/O at {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CampaignError + '_ {
    move |source| CampaignError::Io { path: path.display().to_string(), source }
}

/// What happened to one rule in one stage command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "detail", rename_all = "snake_case")]
pub enum JobOutcome {
    Done,
    /// Already complete and not stale.
    Skipped,
    Failed(String),
    /// A prerequisite stage has not run.
    Blocked(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub jobs: Vec<(String, JobOutcome)>,
}

impl StageReport {
    pub fn failures(&self) -> impl Iterator<Item = (&str, &str)> {
        self.jobs.iter().filter_map(|(k, o)| match o {
            JobOutcome::Failed(r) => Some((k.as_str(), r.as_str())),
            _ => None,
        })
    }

    pub fn blocked(&self) -> impl Iterator<Item = (&str, &str)> {
        self.jobs.iter().filter_map(|(k, o)| match o {
            JobOutcome::Blocked(r) => Some((k.as_str(), r.as_str())),
            _ => None,
        })
    }

    pub fn count(&self, want: fn(&JobOutcome) -> bool) -> usize {
        self.jobs.iter().filter(|(_, o)| want(o)).count()
    }
}

/// Which rules a command touches.
#[derive(Debug, Clone, Default)]
pub struct Selection {
    pub rules: Option<String>,
    pub analyzer: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogReport {
    pub loaded: usize,
    pub selected: usize,
    pub stats: BTreeMap<String, BTreeMap<String, usize>>,
}

/// Manual review input stored next to the verdict so re-evaluation keeps it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub manual_label: ManualLabel,
    #[serde(default)]
    pub root_cause_tag: Option<String>,
}

/// Mutant listing written by the mutate stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantIndexEntry {
    pub id: String,
    pub status: MutantStatus,
    /// Relative to the rule directory.
    pub dir: String,
}

const SNAPSHOT: &str = "catalog.jsonl";
const COUNTS: &str = "counts.json";
const RULE: &str = "rule.json";

pub struct Campaign {
    pub config: CampaignConfig,
    pub workspace: Workspace,
    gateway: Gateway,
    toolchain: Box<dyn Toolchain>,
    analyzers: BTreeMap<String, AnalyzerConfig>,
}

enum Step {
    Advanced,
    Failed(String),
}

impl Campaign {
    pub fn open(config: CampaignConfig) -> Result<Campaign, CampaignError> {
        let analyzers = config.analyzer_configs()?.into_iter().map(|a| (a.analyzer_id.clone(), a)).collect();
        let gateway = Gateway::new(config.backend()?, config.sampling());
        let toolchain = config.toolchain();
        let root = config.resolve(&config.workspace_root);
        let workspace = Workspace::open(&root).map_err(io(&root))?;
        Ok(Campaign { config, workspace, gateway, toolchain, analyzers })
    }

    pub fn backend_id(&self) -> &str {
        self.gateway.backend_id()
    }

    fn snapshot_path(&self) -> PathBuf {
        self.workspace.root().join(SNAPSHOT)
    }

    /// Loads the catalog, snapshots the rules the filter policy keeps into
    /// the workspace and creates a job record for every selected rule.
    pub fn catalog(&self, sel: &Selection) -> Result<CatalogReport, CampaignError> {
        let path = self.config.resolve(&self.config.catalog);
        let all = catalog::load_catalog(&path)?;
        let policy = self.config.filter.policy();
        policy.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let kept = catalog::filter_rules(&all, &policy);
        let snap = self.snapshot_path();
        catalog::write_catalog(&snap, &kept).map_err(io(&snap))?;
        let rules = self.apply_selection(kept, sel)?;
        for r in &rules {
            let dir = self.workspace.rule(&r.analyzer_id, &r.rule_id);
            let state = dir.load_state(r).map_err(io(&dir.root))?;
            dir.save_state(&state).map_err(io(&dir.root))?;
            write_json(&dir.root.join(RULE), r).map_err(io(&dir.root))?;
        }
        let stats = catalog::stats(&rules)
            .into_iter()
            .map(|(a, m)| (a, m.into_iter().map(|(c, n)| (c.as_str().to_string(), n)).collect()))
            .collect();
        Ok(CatalogReport { loaded: all.len(), selected: rules.len(), stats })
    }

    fn apply_selection(&self, rules: Vec<RuleSpec>, sel: &Selection) -> Result<Vec<RuleSpec>, CampaignError> {
        let pattern = sel.rules.clone().or_else(|| self.config.filter.rules.clone());
        let selector = match pattern {
            Some(p) => RuleSelector::parse(&p).map_err(|e| CampaignError::Usage(format!("bad rule filter '{p}': {e}")))?,
            None => RuleSelector::any(),
        };
        Ok(rules.into_iter().filter(|r| selector.matches(r) && sel.analyzer.as_ref().is_none_or(|a| &r.analyzer_id == a)).collect())
    }

    /// Rules from the workspace snapshot, narrowed by `sel`.
    pub fn selected_rules(&self, sel: &Selection) -> Result<Vec<RuleSpec>, CampaignError> {
        let snap = self.snapshot_path();
        if !snap.is_file() {
            return Err(CampaignError::Usage(format!("{} has no catalog snapshot (run `catalog` first)", self.workspace.root().display())));
        }
        let rules = catalog::load_catalog(&snap)?;
        self.apply_selection(rules, sel)
    }

    /// Runs one stage over the selected rules.
    pub fn run_stage(&self, stage: Stage, sel: &Selection, force: bool) -> Result<StageReport, CampaignError> {
        let rules = self.selected_rules(sel)?;
        if stage == Stage::Analyzed {
            self.check_analyzers(&rules)?;
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.config.parallelism).build().map_err(|e| CampaignError::Usage(e.to_string()))?;
        let jobs: Vec<(String, JobOutcome)> = pool.install(|| rules.par_iter().map(|r| (r.key(), self.job(stage, r, force))).collect());
        for (k, o) in &jobs {
            log::info!("{stage} {k}: {o:?}");
        }
        Ok(StageReport { stage: stage.as_str().to_string(), jobs })
    }

    fn check_analyzers(&self, rules: &[RuleSpec]) -> Result<(), CampaignError> {
        let needed: BTreeSet<&str> = rules.iter().map(|r| r.analyzer_id.as_str()).collect();
        for id in needed {
            let a = self.analyzers.get(id).ok_or_else(|| ConfigError::Invalid(format!("no analyzer configured for '{id}'")))?;
            a.probe().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Ok(())
    }

    /// Every stage in order, then the summary.
    pub fn run(&self, sel: &Selection) -> Result<(Vec<StageReport>, Summary), CampaignError> {
        self.catalog(sel)?;
        let mut reports = Vec::new();
        for stage in &Stage::ORDER[1..] {
            reports.push(self.run_stage(*stage, sel, false)?);
        }
        let summary = self.report(sel, false)?;
        Ok((reports, summary))
    }

    fn job(&self, stage: Stage, rule: &RuleSpec, force: bool) -> JobOutcome {
        let dir = self.workspace.rule(&rule.analyzer_id, &rule.rule_id);
        let mut state = match dir.load_state(rule) {
            Ok(s) => s,
            Err(e) => return JobOutcome::Failed(format!("cannot read job state: {e}")),
        };
        let mut planned = state.clone();
        if force {
            planned.rewind(stage);
        }
        match planned.plan(stage, force) {
            Err(StateError::Failed { failure, .. }) => return JobOutcome::Failed(format!("{} (at {})", failure.reason, failure.stage)),
            Err(e @ StateError::MissingPrerequisite { .. }) => return JobOutcome::Blocked(e.to_string()),
            Ok(false) => return JobOutcome::Skipped,
            Ok(true) => {}
        }
        state = planned;
        reset_counts(&dir, stage);
        let outcome = match self.exec(stage, rule, &dir) {
            Ok(Step::Advanced) => {
                state.advance(stage, chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
                JobOutcome::Done
            }
            Ok(Step::Failed(reason)) => {
                state.fail(stage, reason.clone());
                JobOutcome::Failed(reason)
            }
            Err(e) => {
                let reason = format!("{e:#}");
                state.fail(stage, reason.clone());
                JobOutcome::Failed(reason)
            }
        };
        if let Err(e) = dir.save_state(&state) {
            return JobOutcome::Failed(format!("cannot save job state: {e}"));
        }
        outcome
    }

    fn exec(&self, stage: Stage, rule: &RuleSpec, dir: &RuleDir) -> anyhow::Result<Step> {
        let transcript = Transcript::open(&dir.transcript()).context("opening transcript")?;
        let job = rule.key();
        let scratch = dir.scratch().join(stage.as_str());
        if scratch.exists() {
            std::fs::remove_dir_all(&scratch).with_context(|| format!("clearing {}", scratch.display()))?;
        }
        let ctx = AgentCtx {
            session: Session { gateway: &self.gateway, transcript: &transcript, job: &job },
            toolchain: self.toolchain.as_ref(),
            limits: self.config.limits,
            scratch: &scratch,
            budget: Budget { max_attempts: self.config.budgets.max_attempts },
        };
        match stage {
            Stage::Pending => Ok(Step::Advanced),
            Stage::Seeded => self.generate(rule, dir, &ctx),
            Stage::Validated => self.validate(rule, dir, &ctx),
            Stage::Mutated => self.mutate(rule, dir, &ctx),
            Stage::Analyzed => self.analyze(rule, dir, &scratch),
            Stage::Evaluated => self.evaluate(rule, dir),
        }
    }

    fn generate(&self, rule: &RuleSpec, dir: &RuleDir, ctx: &AgentCtx<'_>) -> anyhow::Result<Step> {
        clear(&dir.seed())?;
        let mut discards = Vec::new();
        for round in 1..=self.config.budgets.regeneration_limit + 1 {
            match seed::generate_seed(rule, ctx)? {
                SeedOutcome::Accepted(s) => {
                    seed::write_seed_metadata(&s, &dir.seed())?;
                    update_counts(dir, |c| {
                        c.seeds = round;
                        c.comp_seeds = 1;
                    })?;
                    return Ok(Step::Advanced);
                }
                SeedOutcome::Discarded(d) => discards.push(d),
            }
        }
        write_json(&dir.seed().join("discarded.json"), &discards)?;
        update_counts(dir, |c| c.seeds = discards.len() as u32)?;
        let last = discards.last().map(|d| d.reason.clone()).unwrap_or_default();
        Ok(Step::Failed(format!("seed discarded {} time(s): {last}", discards.len())))
    }

    fn validate(&self, rule: &RuleSpec, dir: &RuleDir, ctx: &AgentCtx<'_>) -> anyhow::Result<Step> {
        let seed = load_seed(dir)?;
        clear(&dir.test())?;
        match validation::validate_seed(rule, &seed, ctx, self.config.budgets.regeneration_limit)? {
            ValidationOutcome::Accepted(pair) => {
                validation::write_validated(&pair, &dir.test())?;
                update_counts(dir, |c| {
                    c.tests = 1;
                    c.valid_seeds = 1;
                })?;
                Ok(Step::Advanced)
            }
            ValidationOutcome::Discarded(d) => {
                write_json(&dir.test().join("discarded.json"), &d)?;
                let ran = d.last_verdict.is_some() as u32;
                update_counts(dir, |c| c.tests = ran)?;
                Ok(Step::Failed(format!("test discarded: {}", d.discard.reason)))
            }
        }
    }

    fn mutate(&self, rule: &RuleSpec, dir: &RuleDir, ctx: &AgentCtx<'_>) -> anyhow::Result<Step> {
        let seed = load_seed(dir)?;
        let pair = validation::read_validated(&dir.test().join("metadata.json"))?;
        let expected = &pair.verdict.signature;
        clear(&dir.mutants())?;
        let wanted = self.config.mutation.operator_set();
        let n = self.config.budgets.variants_per_operator as usize;
        let syntactic: BTreeSet<Operator> = mutation::applicable_operators(seed.source())?.intersection(&wanted).copied().collect();
        let mut all: Vec<Mutant> = Vec::new();
        let mode = self.config.mutation.mode;
        if matches!(mode, MutationMode::Deterministic | MutationMode::Both) {
            for op in &syntactic {
                all.extend(mutation::deterministic_mutants(
                    &seed.file,
                    *op,
                    self.config.rng_seed,
                    n,
                    &pair.test,
                    expected,
                    ctx.toolchain,
                    &ctx.sandbox_root("det"),
                    &ctx.limits,
                )?);
            }
        }
        if matches!(mode, MutationMode::Llm | MutationMode::Both) {
            let ops: BTreeSet<Operator> = if self.config.mutation.llm_applicability {
                mutation::llm_applicable_operators(&seed, ctx)?.intersection(&wanted).copied().collect()
            } else {
                syntactic.clone()
            };
            for op in ops {
                all.extend(mutation::mutate_llm(rule, &seed, &pair.test, expected, op, n, ctx)?);
            }
        }
        let mut index = Vec::new();
        for m in &all {
            let variant = mutation::variant_dir(m.mode, m.variant_index);
            let mdir = dir.mutant(m.operator.code(), &variant);
            std::fs::create_dir_all(&mdir)?;
            let src = mdir.join(&m.file.path);
            std::fs::create_dir_all(src.parent().unwrap_or(&mdir))?;
            std::fs::write(&src, &m.file.text)?;
            write_json(&mdir.join("mutant.json"), m)?;
            index.push(MutantIndexEntry { id: m.id(), status: m.status, dir: format!("mutants/{}/{variant}", m.operator.code()) });
        }
        write_json(&dir.mutants().join("index.json"), &index)?;
        let compiled = all.iter().filter(|m| m.status == MutantStatus::Equivalent || m.signature.is_some()).count() as u32;
        let equivalent = all.iter().filter(|m| m.status == MutantStatus::Equivalent).count() as u32;
        update_counts(dir, |c| {
            c.mutants = all.len() as u32;
            c.comp_mutants = compiled;
            c.valid_mutants = equivalent;
        })?;
        if let Some(bad) = all.iter().find(|m| m.engine_fault()) {
            let first = bad.note.as_deref().unwrap_or_default().lines().next().unwrap_or_default();
            return Ok(Step::Failed(format!("{} {first}", bad.id())));
        }
        Ok(Step::Advanced)
    }

    fn analyze(&self, rule: &RuleSpec, dir: &RuleDir, scratch: &Path) -> anyhow::Result<Step> {
        let config = self.analyzers.get(&rule.analyzer_id).with_context(|| format!("no analyzer configured for '{}'", rule.analyzer_id))?;
        let seed = load_seed(dir)?;
        let mut subjects = vec![("seed".to_string(), seed.file.clone())];
        for e in read_index(dir)? {
            if e.status == MutantStatus::Equivalent {
                let m: Mutant = read_json(&dir.root.join(&e.dir).join("mutant.json"))?;
                subjects.push((e.id.clone(), m.file));
            }
        }
        clear(&dir.reports())?;
        let mut runs: BTreeMap<String, AnalysisRun> = BTreeMap::new();
        for (id, file) in subjects {
            let sandbox = Sandbox::recreate(&scratch.join(id.replace('/', "-")))?;
            match config.input_kind {
                InputKind::CompiledArtifact => {
                    let c = self.toolchain.compile(&sandbox, std::slice::from_ref(&file))?;
                    if !c.success {
                        return Ok(Step::Failed(format!("{id} does not compile for analysis:\n{}", c.output.trim_end())));
                    }
                }
                InputKind::Source => {
                    sandbox.write_sources(std::slice::from_ref(&file))?;
                }
            }
            let report = dir.reports().join(&id).join(format!("{}.{}", crate::workspace::path_component(&config.analyzer_id), config.report_format.extension()));
            let mut run = match analyzer::run_analyzer(config, &sandbox, &report) {
                Ok(r) => r,
                Err(e) => return Ok(Step::Failed(format!("{id}: {e}"))),
            };
            run.raw_report = run.raw_report.strip_prefix(&dir.root).map(Path::to_path_buf).unwrap_or(run.raw_report);
            runs.insert(id, run);
        }
        write_json(&dir.reports().join("findings.json"), &runs)?;
        Ok(Step::Advanced)
    }

    fn evaluate(&self, rule: &RuleSpec, dir: &RuleDir) -> anyhow::Result<Step> {
        let seed = load_seed(dir)?;
        let runs: BTreeMap<String, AnalysisRun> = read_json(&dir.reports().join("findings.json"))?;
        let file = &seed.file.path;
        let detected = |r: &AnalysisRun| analyzer::rule_detected(&r.findings, &rule.rule_id, file);
        let seed_run = runs.get("seed").context("no analysis of the seed")?;
        let matrix = DetectionMatrix {
            rule: RuleRef { analyzer_id: rule.analyzer_id.clone(), rule_id: rule.rule_id.clone() },
            seed_detected: detected(seed_run),
            mutant_detected: runs.iter().filter(|(k, _)| k.as_str() != "seed").map(|(k, r)| (k.clone(), detected(r))).collect(),
        };
        let verdict = evaluator::classify(&matrix);
        let rel = |p: PathBuf| p.strip_prefix(self.workspace.root()).unwrap_or(&p).to_string_lossy().replace('\\', "/");
        let mut evidence = Evidence { seed: rel(dir.seed().join(file)), test: String::new(), mutants: BTreeMap::new(), reports: BTreeMap::new() };
        if let Ok(pair) = validation::read_validated(&dir.test().join("metadata.json")) {
            evidence.test = rel(dir.test().join(&pair.test.file.path));
        }
        for e in read_index(dir)?.into_iter().filter(|e| e.status == MutantStatus::Equivalent) {
            evidence.mutants.insert(e.id.clone(), rel(dir.root.join(&e.dir).join(file)));
        }
        for (k, r) in &runs {
            evidence.reports.insert(k.clone(), rel(dir.root.join(&r.raw_report)));
        }
        let incidental = seed_run.findings.iter().filter(|f| f.rule_id != rule.rule_id).cloned().collect();
        let review: Review = read_json(&dir.verdict().join("review.json")).unwrap_or_default();
        let report = BugReport {
            id: rule.key(),
            backend_id: seed.provenance.backend_id.clone(),
            verdict,
            evidence,
            incidental,
            manual_label: review.manual_label,
            root_cause_tag: review.root_cause_tag,
        };
        write_json(&dir.verdict().join("verdict.json"), &report)?;
        Ok(Step::Advanced)
    }

    /// Per-rule records for the summary, read from the workspace.
    pub fn records(&self, sel: &Selection) -> Result<Vec<RuleRecord>, CampaignError> {
        let mut out = Vec::new();
        for rule in self.selected_rules(sel)? {
            let dir = self.workspace.rule(&rule.analyzer_id, &rule.rule_id);
            let state: RuleJobState = dir.load_state(&rule).map_err(io(&dir.root))?;
            let counts: RuleCounts = read_json(&dir.root.join(COUNTS)).unwrap_or_default();
            let evaluated = state.stage == Stage::Evaluated && !state.stale.contains(&Stage::Evaluated) && state.failed.is_none();
            let report: Option<BugReport> = if evaluated { read_json(&dir.verdict().join("verdict.json")).ok() } else { None };
            let failure = state.failed.as_ref().map(|f| format!("{} (at {})", f.reason.lines().next().unwrap_or_default(), f.stage));
            let backend_id = report.as_ref().map(|r| r.backend_id.clone()).unwrap_or_else(|| self.backend_id().to_string());
            let stage = match &state.failed {
                Some(f) => format!("failed@{}", f.stage),
                None => state.stage.as_str().to_string(),
            };
            out.push(RuleRecord { rule: RuleRef { analyzer_id: rule.analyzer_id.clone(), rule_id: rule.rule_id.clone() }, backend_id, stage, failure, counts, report });
        }
        Ok(out)
    }

    /// Writes `summary.json` and `summary.md` and returns the summary.
    pub fn report(&self, sel: &Selection, allow_incomplete: bool) -> Result<Summary, CampaignError> {
        let records = self.records(sel)?;
        let summary = evaluator::emit_report(&records, allow_incomplete)?;
        let (j, m) = (self.workspace.summary_json(), self.workspace.summary_md());
        std::fs::write(&j, summary.to_json()).map_err(io(&j))?;
        std::fs::write(&m, summary.to_markdown()).map_err(io(&m))?;
        Ok(summary)
    }

    /// Records a manual label and optional root cause for `bug` (an
    /// `analyzer/rule` id).
    pub fn review(&self, bug: &str, label: ManualLabel, root_cause: Option<String>) -> Result<BugReport, CampaignError> {
        let (analyzer, rule) = bug.split_once('/').ok_or_else(|| CampaignError::Usage(format!("bug id '{bug}' is not of the form analyzer/rule")))?;
        let dir = self.workspace.rule(analyzer, rule);
        let vpath = dir.verdict().join("verdict.json");
        if !vpath.is_file() {
            return Err(CampaignError::Usage(format!("{bug} has no verdict yet (run `evaluate` first)")));
        }
        let mut report: BugReport = read_json(&vpath).map_err(io(&vpath))?;
        let rpath = dir.verdict().join("review.json");
        let mut review: Review = read_json(&rpath).unwrap_or_default();
        review.manual_label = label;
        if root_cause.is_some() {
            review.root_cause_tag = root_cause.filter(|t| !t.trim().is_empty());
        }
        write_json(&rpath, &review).map_err(io(&rpath))?;
        report.manual_label = review.manual_label;
        report.root_cause_tag = review.root_cause_tag;
        write_json(&vpath, &report).map_err(io(&vpath))?;
        Ok(report)
    }
}

fn clear(dir: &Path) -> std::io::Result<()> {
    if dir.exists() {
        std::fs::remove_dir_all(dir)?;
    }
    std::fs::create_dir_all(dir)
}

fn load_seed(dir: &RuleDir) -> anyhow::Result<SeedProgram> {
    Ok(seed::read_seed_metadata(&dir.seed().join("metadata.json"))?)
}

fn read_index(dir: &RuleDir) -> anyhow::Result<Vec<MutantIndexEntry>> {
    let p = dir.mutants().join("index.json");
    if !p.is_file() {
        return Ok(Vec::new());
    }
    Ok(read_json(&p)?)
}

fn update_counts(dir: &RuleDir, f: impl FnOnce(&mut RuleCounts)) -> std::io::Result<()> {
    let p = dir.root.join(COUNTS);
    let mut c: RuleCounts = read_json(&p).unwrap_or_default();
    f(&mut c);
    write_json(&p, &c)
}

/// Zeroes the counters produced by `stage` and everything after it.
fn reset_counts(dir: &RuleDir, stage: Stage) {
    let _ = update_counts(dir, |c| {
        if stage <= Stage::Seeded {
            c.seeds = 0;
            c.comp_seeds = 0;
        }
        if stage <= Stage::Validated {
            c.tests = 0;
            c.valid_seeds = 0;
        }
        if stage <= Stage::Mutated {
            c.mutants = 0;
            c.comp_mutants = 0;
            c.valid_mutants = 0;
        }
    });
}

/// Mutant ids recorded for the rule, by mode.
pub fn mutant_ids(dir: &RuleDir, mode: Mode) -> anyhow::Result<Vec<String>> {
    Ok(read_index(dir)?.into_iter().filter(|e| e.id.contains("/llm-") == (mode == Mode::Llm)).map(|e| e.id).collect())
}
