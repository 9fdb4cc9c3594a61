//! Seed generation: a rule description becomes a compilable, self-contained
//! program that violates the rule, via generation plus compile repair.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::build::{BuildError, Limits, Sandbox, SourceFile, Toolchain};
use crate::catalog::RuleSpec;
use crate::gateway::{extract_code_block, Artifact, GatewayError, Session, TaskKind};
use crate::prompts::{render, Template};
use metaprobe_syntax::JavaSource;

pub const DEFAULT_ENTRY: &str = "showBug";

/// Namespaces a seed may import from.
pub const STANDARD_NAMESPACES: [&str; 2] = ["java.", "javax."];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_attempts: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_attempts: 5 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("workspace I/O at {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Engine(String),
}

pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> AgentError + '_ {
    move |source| AgentError::Io { path: path.display().to_string(), source }
}

/// What an agent needs to talk to the model and to build code.
#[derive(Clone, Copy)]
pub struct AgentCtx<'a> {
    pub session: Session<'a>,
    pub toolchain: &'a dyn Toolchain,
    pub limits: Limits,
    /// Directory for this job's throwaway sandboxes.
    pub scratch: &'a Path,
    pub budget: Budget,
}

impl AgentCtx<'_> {
    pub fn sandbox_root(&self, name: &str) -> PathBuf {
        self.scratch.join(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub backend_id: String,
    /// Transcript sequence numbers of the exchanges that produced the artifact.
    pub transcript: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedProgram {
    pub analyzer_id: String,
    pub rule_id: String,
    pub file: SourceFile,
    pub entry_method: String,
    pub buggy_lines: Vec<usize>,
    /// True when the reply carried no usable line list and the entry method's
    /// body lines were used instead.
    #[serde(default)]
    pub buggy_lines_inferred: bool,
    pub attempts_used: u32,
    pub provenance: Provenance,
}

impl SeedProgram {
    pub fn source(&self) -> &str {
        &self.file.text
    }

    pub fn class_name(&self) -> String {
        self.file.class_name()
    }

    pub fn simple_name(&self) -> String {
        let c = self.class_name();
        c.rsplit('.').next().unwrap_or(&c).to_string()
    }

    pub fn package(&self) -> Option<String> {
        let c = self.class_name();
        c.rfind('.').map(|i| c[..i].to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discard {
    pub reason: String,
    /// Problems reported for the final attempt.
    pub diagnostics: String,
    pub attempts_used: u32,
    pub transcript: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedOutcome {
    Accepted(SeedProgram),
    Discarded(Discard),
}

fn trailer_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?mi)^\s*\**BUGGY[_ ]LINES\**\s*:\s*(.*)$").expect("trailer pattern"))
}

/// Line numbers from a `BUGGY_LINES:` trailer; ranges like `4-6` allowed.
pub fn parse_buggy_lines(reply: &str) -> Vec<usize> {
    let Some(c) = trailer_re().captures_iter(reply).last() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for part in c[1].split([',', ' ']).map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once('-') {
            if let (Ok(a), Ok(b)) = (a.trim().parse::<usize>(), b.trim().parse::<usize>()) {
                out.extend(a..=b.min(a + 1000));
            }
        } else if let Ok(n) = part.parse() {
            out.push(n);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Static requirements a seed must meet before it is compiled.
pub fn seed_problems(src: &str, entry: &str) -> Vec<String> {
    let parsed = match JavaSource::parse_lenient(src.to_string()) {
        Ok(p) => p,
        Err(e) => return vec![e.to_string()],
    };
    let mut problems = Vec::new();
    if parsed.top_level_types().is_empty() {
        problems.push("no top-level class is declared".to_string());
    }
    if parsed.find_method(entry).is_none() {
        problems.push(format!("the violation must be inside a method named {entry}, which is missing"));
    }
    for imp in parsed.imports() {
        if !STANDARD_NAMESPACES.iter().any(|ns| imp.namespace().starts_with(ns)) {
            problems.push(format!("line {}: import {} is not part of the Java standard library", imp.line, imp.path));
        }
    }
    problems
}

/// Lines strictly inside the entry method's body.
pub fn entry_body_lines(src: &str, entry: &str) -> Vec<usize> {
    let Ok(parsed) = JavaSource::parse_lenient(src.to_string()) else { return Vec::new() };
    let Some(m) = parsed.find_method(entry) else { return Vec::new() };
    let Some(body) = m.body() else { return Vec::new() };
    let (a, b) = (body.start_position().row + 1, body.end_position().row + 1);
    if b > a + 1 {
        (a + 1..b).collect()
    } else {
        vec![a]
    }
}

fn diagnostics_text(problems: &[String]) -> String {
    problems.iter().map(|p| format!("- {p}")).collect::<Vec<_>>().join("\n")
}

pub fn generate_seed(rule: &RuleSpec, ctx: &AgentCtx<'_>) -> Result<SeedOutcome, AgentError> {
    generate_seed_with_entry(rule, ctx, DEFAULT_ENTRY)
}

pub fn generate_seed_with_entry(rule: &RuleSpec, ctx: &AgentCtx<'_>, entry: &str) -> Result<SeedOutcome, AgentError> {
    let mut prompt = render(
        Template::SeedGenerate,
        &[("analyzer", &rule.analyzer_id), ("rule_id", &rule.rule_id), ("title", &rule.title), ("description", &rule.description), ("entry", entry)],
    );
    let mut seqs = Vec::new();
    let mut last_problems = String::new();
    for attempt in 1..=ctx.budget.max_attempts {
        let reply = ctx.session.ask_prompt(TaskKind::Generation, &prompt)?;
        seqs.push(reply.seq);
        let (source, problems) = match extract_code_block(&reply.text, Artifact::SourceFile) {
            Err(e) => (String::new(), vec![e.to_string()]),
            Ok(source) => {
                let mut problems = seed_problems(&source, entry);
                if problems.is_empty() {
                    let file = SourceFile::java(source.clone());
                    let sandbox = Sandbox::recreate(&ctx.sandbox_root(&format!("seed-{attempt}")))?;
                    let compiled = ctx.toolchain.compile(&sandbox, std::slice::from_ref(&file))?;
                    if compiled.success {
                        let line_count = source.lines().count();
                        let mut lines: Vec<usize> = parse_buggy_lines(&reply.text).into_iter().filter(|l| (1..=line_count).contains(l)).collect();
                        let inferred = lines.is_empty();
                        if inferred {
                            lines = entry_body_lines(&source, entry);
                        }
                        return Ok(SeedOutcome::Accepted(SeedProgram {
                            analyzer_id: rule.analyzer_id.clone(),
                            rule_id: rule.rule_id.clone(),
                            file,
                            entry_method: entry.to_string(),
                            buggy_lines: lines,
                            buggy_lines_inferred: inferred,
                            attempts_used: attempt,
                            provenance: Provenance { backend_id: reply.backend_id.clone(), transcript: seqs },
                        }));
                    }
                    problems.push(compiled.output.trim_end().to_string());
                }
                (source, problems)
            }
        };
        last_problems = diagnostics_text(&problems);
        prompt = render(
            Template::SeedRepair,
            &[("rule_id", &rule.rule_id), ("title", &rule.title), ("source", &source), ("diagnostics", &last_problems), ("entry", entry)],
        );
    }
    Ok(SeedOutcome::Discarded(Discard {
        reason: format!("no acceptable seed after {} attempts", ctx.budget.max_attempts),
        diagnostics: last_problems,
        attempts_used: ctx.budget.max_attempts,
        transcript: seqs,
    }))
}

/// Writes `<dir>/metadata.json` and the source file; returns the record path.
pub fn write_seed_metadata(seed: &SeedProgram, dir: &Path) -> Result<PathBuf, AgentError> {
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let src = dir.join(&seed.file.path);
    if let Some(p) = src.parent() {
        std::fs::create_dir_all(p).map_err(io(p))?;
    }
    std::fs::write(&src, &seed.file.text).map_err(io(&src))?;
    let meta = dir.join("metadata.json");
    crate::workspace::write_json(&meta, seed).map_err(io(&meta))?;
    Ok(meta)
}

pub fn read_seed_metadata(path: &Path) -> Result<SeedProgram, AgentError> {
    crate::workspace::read_json(path).map_err(io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailer_parsing() {
        assert_eq!(parse_buggy_lines("```java\n...\n```\nBUGGY_LINES: 5, 3,4-5"), vec![3, 4, 5]);
        assert_eq!(parse_buggy_lines("**Buggy lines**: 7"), vec![7]);
        assert!(parse_buggy_lines("no trailer").is_empty());
    }

    #[test]
    fn static_checks() {
        let ok = "import java.util.List;\npublic class A { void showBug() {} }\n";
        assert!(seed_problems(ok, "showBug").is_empty());
        let p = seed_problems("import org.apache.commons.X;\npublic class A { void f() {} }\n", "showBug");
        assert_eq!(p.len(), 2, "{p:?}");
    }

    #[test]
    fn body_lines_of_entry() {
        let src = "public class A {\n  int showBug(String s) {\n    int h = s.hashCode();\n    return Math.abs(h);\n  }\n}\n";
        assert_eq!(entry_body_lines(src, "showBug"), vec![3, 4]);
    }
}
