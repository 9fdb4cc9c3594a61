//! Test generation for accepted seeds, execution, and the model's judgment
//! of whether the observed behavior demonstrates the rule's defect.

use std::collections::{BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::build::{ExecutionSignature, Sandbox, SourceFile};
use crate::catalog::RuleSpec;
use crate::gateway::{extract_code_block, Artifact, TaskKind};
use crate::prompts::{render, Prompt, Template};
use crate::seed::{io, AgentCtx, AgentError, Discard, Provenance, SeedProgram};
use metaprobe_syntax::{descendants, JavaSource};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub seed_class: String,
    pub file: SourceFile,
    pub attempts_used: u32,
    pub invoked_entry: bool,
    pub provenance: Provenance,
}

impl TestCase {
    pub fn class_name(&self) -> String {
        self.file.class_name()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictStatus {
    Valid,
    Invalid,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationVerdict {
    pub status: VerdictStatus,
    pub rationale: String,
    pub signature: ExecutionSignature,
    /// Set when the judge claimed a valid demonstration although every test
    /// passed; such claims need a human.
    #[serde(default)]
    pub manual_review: bool,
    pub transcript_seq: u64,
}

/// An accepted seed together with the test that demonstrates its defect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatedPair {
    pub test: TestCase,
    pub verdict: ValidationVerdict,
    pub generations: u32,
    pub judgments: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationDiscard {
    pub discard: Discard,
    pub last_verdict: Option<ValidationVerdict>,
    pub generations: u32,
    pub judgments: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationOutcome {
    Accepted(ValidatedPair),
    Discarded(ValidationDiscard),
}

pub fn test_class_name(seed: &SeedProgram) -> String {
    format!("{}Test", seed.simple_name())
}

fn verdict_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)VERDICT\W*:\W*(valid|invalid|inconclusive)\b").expect("verdict pattern"))
}

fn rationale_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?is)RATIONALE\W*:\s*(.*)$").expect("rationale pattern"))
}

/// Reads the judge's reply; a reply without a verdict line is inconclusive.
pub fn parse_verdict(reply: &str) -> (VerdictStatus, String) {
    let status = match verdict_re().captures(reply).map(|c| c[1].to_ascii_lowercase()) {
        Some(s) if s == "valid" => VerdictStatus::Valid,
        Some(s) if s == "invalid" => VerdictStatus::Invalid,
        _ => VerdictStatus::Inconclusive,
    };
    let rationale = rationale_re().captures(reply).map(|c| c[1].trim().to_string()).unwrap_or_else(|| reply.trim().to_string());
    (status, rationale)
}

/// Whether code reachable from the test methods calls `entry` on some object
/// or class other than the test itself.
pub fn invokes_entry(test_src: &JavaSource, entry: &str) -> bool {
    let methods = test_src.methods();
    let mut queue: VecDeque<usize> = methods.iter().enumerate().filter(|(_, m)| m.is_test()).map(|(i, _)| i).collect();
    let mut seen: BTreeSet<usize> = queue.iter().copied().collect();
    while let Some(i) = queue.pop_front() {
        for call in test_src.invocations(methods[i].node) {
            let local = matches!(call.receiver.as_deref(), None | Some("this"));
            if !local && call.name == entry {
                return true;
            }
            if local {
                for (j, m) in methods.iter().enumerate() {
                    if m.name == call.name && seen.insert(j) {
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    false
}

/// Static checks on a candidate test before it is compiled.
pub fn test_problems(test_src: &str, seed: &SeedProgram) -> (Vec<String>, bool) {
    let parsed = match JavaSource::parse_lenient(test_src.to_string()) {
        Ok(p) => p,
        Err(e) => return (vec![e.to_string()], false),
    };
    let mut problems = Vec::new();
    let types = parsed.top_level_types();
    if types.iter().any(|t| *t == seed.simple_name()) {
        problems.push(format!("the test must not declare its own {} class; use the existing one", seed.simple_name()));
    }
    if !parsed.methods().iter().any(|m| m.is_test()) {
        problems.push("no method is annotated with @Test".to_string());
    }
    let entry = &seed.entry_method;
    let declares_entry = descendants(parsed.root())
        .filter(|n| n.kind() == "method_declaration")
        .filter_map(|n| n.child_by_field_name("name"))
        .any(|n| parsed.node_text(n) == entry);
    if declares_entry {
        problems.push(format!("the test declares its own {entry} method instead of calling {}.{entry}", seed.simple_name()));
    }
    let invoked = !declares_entry && invokes_entry(&parsed, entry);
    if !invoked && !declares_entry {
        problems.push(format!("no test method calls {}.{entry}", seed.simple_name()));
    }
    (problems, invoked)
}

struct Prompts<'a> {
    rule: &'a RuleSpec,
    seed: &'a SeedProgram,
    test_class: String,
    package_note: String,
}

impl Prompts<'_> {
    fn generate(&self) -> Prompt {
        let r = self.rule;
        let class = self.seed.simple_name();
        render(
            Template::TestGenerate,
            &[
                ("analyzer", &r.analyzer_id),
                ("rule_id", &r.rule_id),
                ("title", &r.title),
                ("description", &r.description),
                ("seed", self.seed.source()),
                ("test_class", &self.test_class),
                ("package_note", &self.package_note),
                ("seed_class", &class),
                ("entry", &self.seed.entry_method),
            ],
        )
    }

    fn repair(&self, test: &str, diagnostics: &str) -> Prompt {
        let class = self.seed.simple_name();
        render(
            Template::TestRepair,
            &[("seed", self.seed.source()), ("test", test), ("diagnostics", diagnostics), ("seed_class", &class), ("entry", &self.seed.entry_method)],
        )
    }

    fn refine(&self, test: &str, signature: &str, rationale: &str) -> Prompt {
        let class = self.seed.simple_name();
        render(
            Template::TestRefine,
            &[
                ("rule_id", &self.rule.rule_id),
                ("title", &self.rule.title),
                ("seed", self.seed.source()),
                ("test", test),
                ("signature", signature),
                ("rationale", rationale),
                ("seed_class", &class),
                ("entry", &self.seed.entry_method),
            ],
        )
    }

    fn judge(&self, test: &str, signature: &str) -> Prompt {
        let r = self.rule;
        render(
            Template::Judge,
            &[
                ("analyzer", &r.analyzer_id),
                ("rule_id", &r.rule_id),
                ("title", &r.title),
                ("description", &r.description),
                ("seed", self.seed.source()),
                ("test", test),
                ("signature", signature),
            ],
        )
    }
}

/// Generates, executes and judges a test for `seed`. Generation requests and
/// judgments each stay within `max_attempts`; a test judged invalid is
/// replaced by a fresh one up to `test_regenerations` times.
pub fn validate_seed(rule: &RuleSpec, seed: &SeedProgram, ctx: &AgentCtx<'_>, test_regenerations: u32) -> Result<ValidationOutcome, AgentError> {
    let prompts = Prompts {
        rule,
        seed,
        test_class: test_class_name(seed),
        package_note: seed.package().map(|p| format!(" in package {p}")).unwrap_or_default(),
    };
    let max = ctx.budget.max_attempts;
    let (mut generations, mut judgments, mut regenerations) = (0u32, 0u32, 0u32);
    let mut seqs = Vec::new();
    let mut last_problems = String::new();
    let mut last_verdict: Option<ValidationVerdict> = None;
    let mut prompt = prompts.generate();
    let mut reason = format!("no usable test after {max} generation attempts");

    while generations < max {
        let reply = ctx.session.ask_prompt(TaskKind::Generation, &prompt)?;
        generations += 1;
        seqs.push(reply.seq);
        let text = match extract_code_block(&reply.text, Artifact::TestFile) {
            Ok(t) => t,
            Err(e) => {
                last_problems = format!("- {e}");
                prompt = prompts.repair("", &last_problems);
                continue;
            }
        };
        let (problems, invoked) = test_problems(&text, seed);
        if !problems.is_empty() {
            last_problems = problems.iter().map(|p| format!("- {p}")).collect::<Vec<_>>().join("\n");
            prompt = prompts.repair(&text, &last_problems);
            continue;
        }
        let file = SourceFile::java(text.clone());
        let sandbox = Sandbox::recreate(&ctx.sandbox_root(&format!("test-{generations}")))?;
        let compiled = ctx.toolchain.compile(&sandbox, &[seed.file.clone(), file.clone()])?;
        if !compiled.success {
            last_problems = compiled.output.trim_end().to_string();
            prompt = prompts.repair(&text, &last_problems);
            continue;
        }
        let signature = ctx.toolchain.run_tests(&sandbox, &[file.class_name()], &ctx.limits)?;
        if judgments >= max {
            reason = format!("judgment budget of {max} exhausted");
            break;
        }
        let rendered = signature.render();
        let judged = ctx.session.ask_prompt(TaskKind::Validation, &prompts.judge(&text, &rendered))?;
        judgments += 1;
        seqs.push(judged.seq);
        let (mut status, rationale) = parse_verdict(&judged.text);
        let manual_review = status == VerdictStatus::Valid && !signature.any_failing();
        if manual_review {
            status = VerdictStatus::Inconclusive;
        }
        let verdict = ValidationVerdict { status, rationale: rationale.clone(), signature, manual_review, transcript_seq: judged.seq };
        last_verdict = Some(verdict.clone());
        match status {
            VerdictStatus::Valid => {
                let test = TestCase {
                    seed_class: seed.class_name(),
                    file,
                    attempts_used: generations,
                    invoked_entry: invoked,
                    provenance: Provenance { backend_id: reply.backend_id.clone(), transcript: seqs },
                };
                return Ok(ValidationOutcome::Accepted(ValidatedPair { test, verdict, generations, judgments }));
            }
            VerdictStatus::Inconclusive => {
                last_problems = rationale.clone();
                prompt = prompts.refine(&text, &rendered, &rationale);
            }
            VerdictStatus::Invalid => {
                last_problems = rationale.clone();
                if regenerations >= test_regenerations {
                    reason = "test judged invalid".to_string();
                    break;
                }
                regenerations += 1;
                prompt = prompts.generate();
            }
        }
    }
    if last_verdict.as_ref().is_some_and(|v| v.status == VerdictStatus::Inconclusive) && generations >= max {
        reason = format!("still inconclusive after {max} generation attempts");
    }
    Ok(ValidationOutcome::Discarded(ValidationDiscard {
        discard: Discard { reason, diagnostics: last_problems, attempts_used: generations, transcript: seqs },
        last_verdict,
        generations,
        judgments,
    }))
}

pub fn write_validated(pair: &ValidatedPair, dir: &Path) -> Result<PathBuf, AgentError> {
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let src = dir.join(&pair.test.file.path);
    if let Some(p) = src.parent() {
        std::fs::create_dir_all(p).map_err(io(p))?;
    }
    std::fs::write(&src, &pair.test.file.text).map_err(io(&src))?;
    let meta = dir.join("metadata.json");
    crate::workspace::write_json(&meta, pair).map_err(io(&meta))?;
    Ok(meta)
}

pub fn read_validated(path: &Path) -> Result<ValidatedPair, AgentError> {
    crate::workspace::read_json(path).map_err(io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_lines() {
        assert_eq!(parse_verdict("VERDICT: valid\nRATIONALE: overflow").0, VerdictStatus::Valid);
        assert_eq!(parse_verdict("**Verdict**: Invalid\nRationale: nothing").1, "nothing");
        assert_eq!(parse_verdict("I cannot tell").0, VerdictStatus::Inconclusive);
    }

    #[test]
    fn entry_reached_through_helpers() {
        let t = JavaSource::parse(
            "import org.junit.Test;\npublic class ATest {\n  @Test public void t() { check(\"x\"); }\n  private void check(String s) { new A().showBug(s); }\n}\n",
        )
        .unwrap();
        assert!(invokes_entry(&t, "showBug"));
        let copy = JavaSource::parse(
            "import org.junit.Test;\npublic class ATest {\n  @Test public void t() { showBug(\"x\"); }\n  int showBug(String s) { return Math.abs(s.hashCode()); }\n}\n",
        )
        .unwrap();
        assert!(!invokes_entry(&copy, "showBug"));
    }
}
