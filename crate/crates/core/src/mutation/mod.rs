//! Semantics-preserving mutation of seed programs and the behavioral
//! equivalence check that certifies each mutant.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::build::{CompileResult, ExecutionSignature, Limits, Sandbox, SourceFile, Toolchain};
use crate::seed::Provenance;
use crate::validation::TestCase;
use metaprobe_syntax::{apply_edits, normalize_whitespace, JavaSource};

pub mod llm;
mod ops;

pub use llm::{llm_applicable_operators, mutate_llm, parse_applicable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Operator {
    DeadStore,
    ObfuscateNumeric,
    DuplicateAssignment,
    UnreachableIf,
    UnreachableIfElse,
    UnreachableSwitch,
    UnreachableFor,
    UnreachableWhile,
    RenameLocal,
    ForWhileToDoWhile,
}

impl Operator {
    pub const ALL: [Operator; 10] = [
        Operator::DeadStore,
        Operator::ObfuscateNumeric,
        Operator::DuplicateAssignment,
        Operator::UnreachableIf,
        Operator::UnreachableIfElse,
        Operator::UnreachableSwitch,
        Operator::UnreachableFor,
        Operator::UnreachableWhile,
        Operator::RenameLocal,
        Operator::ForWhileToDoWhile,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Operator::DeadStore => "DEAD_STORE",
            Operator::ObfuscateNumeric => "OBFUSCATE_NUMERIC",
            Operator::DuplicateAssignment => "DUPLICATE_ASSIGNMENT",
            Operator::UnreachableIf => "UNREACHABLE_IF",
            Operator::UnreachableIfElse => "UNREACHABLE_IF_ELSE",
            Operator::UnreachableSwitch => "UNREACHABLE_SWITCH",
            Operator::UnreachableFor => "UNREACHABLE_FOR",
            Operator::UnreachableWhile => "UNREACHABLE_WHILE",
            Operator::RenameLocal => "RENAME_LOCAL",
            Operator::ForWhileToDoWhile => "FOR_WHILE_TO_DO_WHILE",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Operator::DeadStore => "declare one new local variable that is initialized and never used",
            Operator::ObfuscateNumeric => {
                "rewrite a numeric value in an assignment, declaration or return as value + c - c for a small constant c of the same type"
            }
            Operator::DuplicateAssignment => {
                "repeat an assignment whose right-hand side has no method invocation or side effect immediately after itself"
            }
            Operator::UnreachableIf => "insert an if statement whose condition is always false at run time",
            Operator::UnreachableIfElse => "insert an if-else statement whose then-branch never runs and whose else-branch is empty",
            Operator::UnreachableSwitch => "insert a switch statement whose cases never match so that control falls to an empty default",
            Operator::UnreachableFor => "insert a for loop whose condition is always false at run time",
            Operator::UnreachableWhile => "insert a while loop whose condition is always false at run time",
            Operator::RenameLocal => "rename one local variable to a fresh single-letter name that is not used anywhere in the file",
            Operator::ForWhileToDoWhile => "rewrite one for or while loop as an equivalent do-while loop guarded by the loop condition",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mutation operator '{0}'")]
pub struct UnknownOperator(pub String);

impl FromStr for Operator {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        Operator::ALL.into_iter().find(|o| o.code() == wanted).ok_or_else(|| UnknownOperator(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Deterministic,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutantStatus {
    Uncompiled,
    Compiled,
    Equivalent,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutant {
    pub operator: Operator,
    pub variant_index: u32,
    pub mode: Mode,
    pub file: SourceFile,
    pub status: MutantStatus,
    pub attempts_used: u32,
    /// Where a deterministic transformation was applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<ExecutionSignature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl Mutant {
    /// Stable id, also the mutant's directory below `mutants/`.
    pub fn id(&self) -> String {
        format!("{}/{}", self.operator.code(), variant_dir(self.mode, self.variant_index))
    }
}

pub fn variant_dir(mode: Mode, k: u32) -> String {
    match mode {
        Mode::Deterministic => k.to_string(),
        Mode::Llm => format!("llm-{k}"),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MutationError {
    #[error("seed does not parse: {0}")]
    Unparseable(String),
    #[error("{op} reported applicable but produced no mutant")]
    NoSite { op: Operator },
}

fn parse(text: &str) -> Result<JavaSource, MutationError> {
    JavaSource::parse(text.to_string()).map_err(|e| MutationError::Unparseable(e.to_string()))
}

/// Operators the syntax-tree engine can apply to `source`.
pub fn applicable_operators(source: &str) -> Result<BTreeSet<Operator>, MutationError> {
    let src = parse(source)?;
    Ok(Operator::ALL.into_iter().filter(|op| !ops::candidates(&src, *op).is_empty()).collect())
}

/// One deterministic transformation result before compilation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub text: String,
    pub site: String,
    pub line: usize,
}

fn stream(rng_seed: u64, op: Operator) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(rng_seed.to_le_bytes());
    h.update(op.code().as_bytes());
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}

/// Up to `n` distinct single-site variants of `source` under `op`, chosen by
/// the random stream derived from `rng_seed`. Each variant parses and differs
/// from the seed and from the others after whitespace normalization.
pub fn mutate_deterministic(source: &str, op: Operator, rng_seed: u64, n: usize) -> Result<Vec<Variant>, MutationError> {
    let src = parse(source)?;
    let mut cands = ops::candidates(&src, op);
    let mut rng = stream(rng_seed, op);
    cands.shuffle(&mut rng);
    let mut seen: BTreeSet<String> = [normalize_whitespace(source)].into();
    let mut out = Vec::new();
    for c in cands {
        if out.len() >= n {
            break;
        }
        let start = rng.gen_range(0..c.options.len());
        for i in 0..c.options.len() {
            let edits = &c.options[(start + i) % c.options.len()];
            let Ok(text) = apply_edits(source, edits) else { continue };
            if JavaSource::parse(text.clone()).is_err() || !seen.insert(normalize_whitespace(&text)) {
                continue;
            }
            out.push(Variant { text, site: c.label.clone(), line: c.line });
            break;
        }
    }
    if out.is_empty() && n > 0 && !ops::candidates(&src, op).is_empty() {
        return Err(MutationError::NoSite { op });
    }
    Ok(out)
}

/// Result of running the accepted test against a mutant.
#[derive(Debug, Clone)]
pub enum Certification {
    Uncompiled(CompileResult),
    Mismatch { signature: ExecutionSignature, differences: Vec<String> },
    Equivalent(ExecutionSignature),
}

/// Compiles `mutant` with the seed's test in a fresh sandbox and compares
/// the run against `expected`.
pub fn certify_equivalence(
    toolchain: &dyn Toolchain,
    sandbox_root: &Path,
    mutant: &SourceFile,
    test: &TestCase,
    expected: &ExecutionSignature,
    limits: &Limits,
) -> Result<Certification, crate::build::BuildError> {
    let sandbox = Sandbox::recreate(sandbox_root)?;
    let compiled = toolchain.compile(&sandbox, &[mutant.clone(), test.file.clone()])?;
    if !compiled.success {
        return Ok(Certification::Uncompiled(compiled));
    }
    let sig = toolchain.run_tests(&sandbox, &[test.class_name()], limits)?;
    if crate::build::signatures_equal(expected, &sig) {
        Ok(Certification::Equivalent(sig))
    } else {
        Ok(Certification::Mismatch { differences: expected.differences(&sig), signature: sig })
    }
}

pub fn same_program(a: &str, b: &str) -> bool {
    normalize_whitespace(a) == normalize_whitespace(b)
}

/// Deterministic mutants of one operator, each certified. A mutant that
/// fails to compile or changes behavior is kept as `rejected` with
/// `engine_fault` set in its note; callers treat that as a hard failure.
#[allow(clippy::too_many_arguments)]
pub fn deterministic_mutants(
    seed: &SourceFile,
    op: Operator,
    rng_seed: u64,
    n: usize,
    test: &TestCase,
    expected: &ExecutionSignature,
    toolchain: &dyn Toolchain,
    scratch: &Path,
    limits: &Limits,
) -> Result<Vec<Mutant>, crate::seed::AgentError> {
    let variants = mutate_deterministic(&seed.text, op, rng_seed, n).map_err(|e| crate::seed::AgentError::Engine(e.to_string()))?;
    let mut out = Vec::new();
    for (i, v) in variants.into_iter().enumerate() {
        let k = i as u32 + 1;
        let file = SourceFile { path: seed.path.clone(), text: v.text };
        let root = scratch.join(format!("{}-{k}", op.code()));
        let cert = certify_equivalence(toolchain, &root, &file, test, expected, limits)?;
        let (status, note, signature) = match cert {
            Certification::Equivalent(sig) => (MutantStatus::Equivalent, None, Some(sig)),
            Certification::Uncompiled(c) => (MutantStatus::Rejected, Some(format!("{ENGINE_FAULT}: does not compile\n{}", c.output.trim_end())), None),
            Certification::Mismatch { signature, differences } => {
                (MutantStatus::Rejected, Some(format!("{ENGINE_FAULT}: behavior changed\n{}", differences.join("\n"))), Some(signature))
            }
        };
        out.push(Mutant {
            operator: op,
            variant_index: k,
            mode: Mode::Deterministic,
            file,
            status,
            attempts_used: 1,
            site: Some(v.site),
            note,
            signature,
            provenance: None,
        });
    }
    Ok(out)
}

pub const ENGINE_FAULT: &str = "engine fault";

impl Mutant {
    pub fn engine_fault(&self) -> bool {
        self.mode == Mode::Deterministic && self.note.as_deref().is_some_and(|n| n.starts_with(ENGINE_FAULT))
    }
}

#[cfg(test)]
mod tests;
