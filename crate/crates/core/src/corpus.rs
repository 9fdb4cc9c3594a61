//! Seed/test pairs stored as plain directories: one program plus one
//! `*Test.java` per directory.

use std::path::{Path, PathBuf};

use crate::build::{ExecutionSignature, Limits, SourceFile, Toolchain};
use crate::seed::{Provenance, SeedProgram, DEFAULT_ENTRY};
use crate::validation::TestCase;

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub dir: PathBuf,
    pub seed: SourceFile,
    pub test: SourceFile,
}

impl CorpusEntry {
    pub fn seed_program(&self) -> SeedProgram {
        SeedProgram {
            analyzer_id: "corpus".into(),
            rule_id: self.name.clone(),
            file: self.seed.clone(),
            entry_method: DEFAULT_ENTRY.into(),
            buggy_lines: Vec::new(),
            buggy_lines_inferred: true,
            attempts_used: 1,
            provenance: Provenance { backend_id: "fixture".into(), transcript: Vec::new() },
        }
    }

    pub fn test_case(&self) -> TestCase {
        TestCase {
            seed_class: self.seed.class_name(),
            file: self.test.clone(),
            attempts_used: 1,
            invoked_entry: true,
            provenance: Provenance { backend_id: "fixture".into(), transcript: Vec::new() },
        }
    }

    /// Signature of the unmodified pair, built in a sandbox at `root`.
    pub fn baseline(&self, toolchain: &dyn Toolchain, root: &Path, limits: &Limits) -> anyhow::Result<ExecutionSignature> {
        let (c, sig) = crate::build::compile_and_run(toolchain, root, &[self.seed.clone(), self.test.clone()], &[self.test.class_name()], limits)?;
        match sig {
            Some(s) => Ok(s),
            None => anyhow::bail!("{} does not compile:\n{}", self.name, c.output),
        }
    }
}

pub fn load_corpus(dir: &Path) -> anyhow::Result<Vec<CorpusEntry>> {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(dir)?.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_dir()).collect();
    dirs.sort();
    let mut out = Vec::new();
    for d in dirs {
        let mut files: Vec<PathBuf> = std::fs::read_dir(&d)?.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.extension().is_some_and(|x| x == "java")).collect();
        files.sort();
        let (tests, seeds): (Vec<PathBuf>, Vec<PathBuf>) = files.into_iter().partition(|p| p.to_string_lossy().ends_with("Test.java"));
        let ([seed], [test]) = (seeds.as_slice(), tests.as_slice()) else {
            anyhow::bail!("{}: expected one program and one test file", d.display());
        };
        out.push(CorpusEntry {
            name: d.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            seed: SourceFile::java(std::fs::read_to_string(seed)?),
            test: SourceFile::java(std::fs::read_to_string(test)?),
            dir: d,
        });
    }
    Ok(out)
}
