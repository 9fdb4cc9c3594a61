use std::path::PathBuf;
use std::sync::OnceLock;

use metaprobe_core::build::{Javalite, Limits};
use metaprobe_core::corpus::{load_corpus, CorpusEntry};
use metaprobe_core::mutation::{applicable_operators, certify_equivalence, mutate_deterministic, same_program, Certification, Operator};
use metaprobe_syntax::JavaSource;
use proptest::prelude::*;

fn corpus() -> &'static [CorpusEntry] {
    static C: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    C.get_or_init(|| load_corpus(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus")).unwrap())
}

fn entry_and_op() -> impl Strategy<Value = (usize, Operator)> {
    (0..corpus().len(), proptest::sample::select(Operator::ALL.to_vec()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variants_are_reproducible_distinct_and_parse((i, op) in entry_and_op(), rng in any::<u64>(), n in 1usize..5) {
        let seed = &corpus()[i].seed.text;
        let a = mutate_deterministic(seed, op, rng, n).unwrap();
        let b = mutate_deterministic(seed, op, rng, n).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.len() <= n);
        prop_assert_eq!(a.is_empty(), !applicable_operators(seed).unwrap().contains(&op));
        for (k, v) in a.iter().enumerate() {
            prop_assert!(JavaSource::parse(v.text.clone()).is_ok());
            prop_assert!(!same_program(&v.text, seed));
            prop_assert!(a[..k].iter().all(|w| !same_program(&w.text, &v.text)));
        }
    }

    #[test]
    fn fewer_variants_are_a_prefix((i, op) in entry_and_op(), rng in any::<u64>()) {
        let seed = &corpus()[i].seed.text;
        let three = mutate_deterministic(seed, op, rng, 3).unwrap();
        let one = mutate_deterministic(seed, op, rng, 1).unwrap();
        prop_assert_eq!(one.first(), three.first());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_stream_yields_equivalent_mutants((i, op) in entry_and_op(), rng in any::<u64>()) {
        let e = &corpus()[i];
        let tmp = tempfile::tempdir().unwrap();
        let limits = Limits::default();
        let base = e.baseline(&Javalite, &tmp.path().join("seed"), &limits).unwrap();
        for (k, v) in mutate_deterministic(&e.seed.text, op, rng, 2).unwrap().into_iter().enumerate() {
            let file = metaprobe_core::build::SourceFile { path: e.seed.path.clone(), text: v.text.clone() };
            let cert = certify_equivalence(&Javalite, &tmp.path().join(format!("m{k}")), &file, &e.test_case(), &base, &limits).unwrap();
            prop_assert!(matches!(cert, Certification::Equivalent(_)), "{} {op} rng={rng}:\n{}", e.name, v.text);
        }
    }
}
