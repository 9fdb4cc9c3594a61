//! Model-driven mutation: the model proposes variants, the loop feeds back
//! compile diagnostics and behavioral differences.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;

use super::{certify_equivalence, same_program, Certification, Mode, Mutant, MutantStatus, Operator};
use crate::build::{ExecutionSignature, SourceFile};
use crate::catalog::RuleSpec;
use crate::gateway::{extract_code_block, Artifact, TaskKind};
use crate::prompts::{render, Template};
use crate::seed::{seed_problems, AgentCtx, AgentError, Provenance, SeedProgram};
use crate::validation::TestCase;

fn applicable_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?im)^\W*APPLICABLE\W*:\s*(.*)$").expect("applicable pattern"))
}

/// Operator codes listed on the reply's `APPLICABLE:` line; unknown codes
/// are ignored.
pub fn parse_applicable(reply: &str) -> BTreeSet<Operator> {
    let Some(c) = applicable_re().captures(reply) else { return BTreeSet::new() };
    c[1].split([',', ' ', ';']).filter_map(|s| s.trim().trim_matches('`').parse().ok()).collect()
}

pub fn llm_applicable_operators(seed: &SeedProgram, ctx: &AgentCtx<'_>) -> Result<BTreeSet<Operator>, AgentError> {
    let listing: String = Operator::ALL.iter().map(|o| format!("- {}: {}\n", o.code(), o.description())).collect();
    let prompt = render(Template::MutantApplicability, &[("operators", listing.trim_end()), ("seed", seed.source())]);
    let reply = ctx.session.ask_prompt(TaskKind::Validation, &prompt)?;
    Ok(parse_applicable(&reply.text))
}

fn previous_note(accepted: &[String]) -> String {
    if accepted.is_empty() {
        return String::new();
    }
    let mut s = String::from("\nYour result must differ from these earlier variants:\n");
    for v in accepted {
        s.push_str(&format!("```java\n{v}```\n"));
    }
    s
}

/// Up to `n` model-written variants for `op`. Each variant gets at most
/// `max_attempts` generation requests shared between compile repair and
/// behavioral refinement.
#[allow(clippy::too_many_arguments)]
pub fn mutate_llm(
    rule: &RuleSpec,
    seed: &SeedProgram,
    test: &TestCase,
    expected: &ExecutionSignature,
    op: Operator,
    n: usize,
    ctx: &AgentCtx<'_>,
) -> Result<Vec<Mutant>, AgentError> {
    let mut out = Vec::new();
    let mut accepted: Vec<String> = Vec::new();
    for k in 1..=n as u32 {
        let mut prompt = render(
            Template::MutantGenerate,
            &[
                ("operator", op.code()),
                ("operator_description", op.description()),
                ("rule_id", &rule.rule_id),
                ("entry", &seed.entry_method),
                ("seed", seed.source()),
                ("previous", &previous_note(&accepted)),
            ],
        );
        let mut seqs = Vec::new();
        let mut backend = String::new();
        let mut last: Option<(SourceFile, MutantStatus, String, Option<ExecutionSignature>)> = None;
        let mut attempts = 0;
        let mut done = false;
        while attempts < ctx.budget.max_attempts && !done {
            let reply = ctx.session.ask_prompt(TaskKind::Generation, &prompt)?;
            attempts += 1;
            seqs.push(reply.seq);
            backend = reply.backend_id.clone();
            let text = extract_code_block(&reply.text, Artifact::SourceFile).unwrap_or_default();
            let mut problems = if text.is_empty() { vec!["no Java code found in the reply".to_string()] } else { seed_problems(&text, &seed.entry_method) };
            let file = SourceFile { path: seed.file.path.clone(), text: text.clone() };
            if !text.is_empty() {
                if SourceFile::java(text.clone()).path != seed.file.path {
                    problems.push(format!("the class must keep the name and package of {}", seed.class_name()));
                }
                if same_program(&text, seed.source()) {
                    problems.push("the result is identical to the original program; apply the transformation".into());
                }
                if accepted.iter().any(|a| same_program(a, &text)) {
                    problems.push("the result repeats an earlier variant; produce a different one".into());
                }
            }
            if !problems.is_empty() {
                let diagnostics = problems.iter().map(|p| format!("- {p}")).collect::<Vec<_>>().join("\n");
                last = Some((file, MutantStatus::Rejected, diagnostics.clone(), None));
                prompt = repair(op, &text, &diagnostics, seed);
                continue;
            }
            let root = ctx.sandbox_root(&format!("llm-{}-{k}-{attempts}", op.code()));
            match certify_equivalence(ctx.toolchain, &root, &file, test, expected, &ctx.limits)? {
                Certification::Equivalent(sig) => {
                    accepted.push(text);
                    last = Some((file, MutantStatus::Equivalent, String::new(), Some(sig)));
                    done = true;
                }
                Certification::Uncompiled(c) => {
                    let diagnostics = c.output.trim_end().to_string();
                    prompt = repair(op, &text, &diagnostics, seed);
                    last = Some((file, MutantStatus::Uncompiled, diagnostics, None));
                }
                Certification::Mismatch { signature, differences } => {
                    let diff = differences.join("\n");
                    prompt = render(Template::MutantRefine, &[("operator", op.code()), ("seed", seed.source()), ("mutant", &text), ("differences", &diff)]);
                    last = Some((file, MutantStatus::Rejected, diff, Some(signature)));
                }
            }
        }
        let Some((file, status, note, signature)) = last else { continue };
        out.push(Mutant {
            operator: op,
            variant_index: k,
            mode: Mode::Llm,
            file,
            status,
            attempts_used: attempts,
            site: None,
            note: (!note.is_empty()).then_some(note),
            signature,
            provenance: Some(Provenance { backend_id: backend, transcript: seqs }),
        });
    }
    Ok(out)
}

fn repair(op: Operator, mutant: &str, diagnostics: &str, seed: &SeedProgram) -> crate::prompts::Prompt {
    render(Template::MutantRepair, &[("operator", op.code()), ("mutant", mutant), ("diagnostics", diagnostics), ("seed", seed.source())])
}
