use std::collections::BTreeSet;
use std::path::PathBuf;

use metaprobe_core::build::{Javalite, Limits};
use metaprobe_core::corpus::load_corpus;
use metaprobe_core::mutation::{applicable_operators, deterministic_mutants, MutantStatus, Operator};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus")
}

#[test]
fn every_deterministic_mutant_is_equivalent() {
    let corpus = load_corpus(&corpus_dir()).unwrap();
    assert!(corpus.len() >= 20);
    let tmp = tempfile::tempdir().unwrap();
    let limits = Limits::default();
    let mut covered = BTreeSet::new();
    let mut failures = Vec::new();
    let mut total = 0;
    for e in &corpus {
        let base = e.baseline(&Javalite, &tmp.path().join(&e.name).join("seed"), &limits).unwrap();
        let test = e.test_case();
        for op in applicable_operators(&e.seed.text).unwrap() {
            covered.insert(op);
            let ms = deterministic_mutants(&e.seed, op, 42, 3, &test, &base, &Javalite, &tmp.path().join(&e.name), &limits).unwrap();
            assert!(!ms.is_empty(), "{} {op}", e.name);
            for m in ms {
                total += 1;
                if m.status != MutantStatus::Equivalent {
                    failures.push(format!("{} {}: {}\n{}", e.name, m.id(), m.note.unwrap_or_default(), m.file.text));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{} of {total} failed:\n{}", failures.len(), failures.join("\n----\n"));
    assert_eq!(covered, Operator::ALL.into_iter().collect(), "corpus must exercise every operator");
}
