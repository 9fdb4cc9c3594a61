use super::*;

const ABS: &str = r#"package demo;

public class HashAbs {
    public int showBug(String input) {
        int hash = input.hashCode();
        int bucket = Math.abs(hash) % 16;
        return bucket;
    }
}
"#;

const LOOPS: &str = r#"public class Loops {
    static int sum(int[] xs) {
        int total = 0;
        for (int i = 0; i < xs.length; i++) {
            total += xs[i];
        }
        int j = 0;
        while (j < 3) {
            j++;
        }
        outer:
        while (true) {
            if (total > 0) {
                break outer;
            }
            total = 1;
        }
        return total + j;
    }
}
"#;

fn ops_of(src: &str) -> BTreeSet<Operator> {
    applicable_operators(src).unwrap()
}

#[test]
fn applicability_follows_preconditions() {
    let a = ops_of(ABS);
    assert!(!a.contains(&Operator::ForWhileToDoWhile));
    assert!(a.contains(&Operator::RenameLocal));
    assert!(a.contains(&Operator::ObfuscateNumeric));
    assert!(!a.contains(&Operator::DuplicateAssignment), "no plain assignment statement");
    let empty = ops_of("public class E { void showBug() {} }");
    let insertion: BTreeSet<Operator> = [
        Operator::DeadStore,
        Operator::UnreachableIf,
        Operator::UnreachableIfElse,
        Operator::UnreachableSwitch,
        Operator::UnreachableFor,
        Operator::UnreachableWhile,
    ]
    .into();
    assert_eq!(empty, insertion);
    let l = ops_of(LOOPS);
    assert!(l.contains(&Operator::ForWhileToDoWhile));
}

#[test]
fn int_assignment_and_local_enable_three_operators() {
    let src = "public class A {\n  int f() {\n    int x;\n    x = 1;\n    return x;\n  }\n}\n";
    let a = ops_of(src);
    for op in [Operator::ObfuscateNumeric, Operator::RenameLocal, Operator::DuplicateAssignment] {
        assert!(a.contains(&op), "{op} missing from {a:?}");
    }
}

#[test]
fn same_inputs_give_identical_mutants() {
    for op in Operator::ALL {
        let a = mutate_deterministic(LOOPS, op, 7, 3);
        let b = mutate_deterministic(LOOPS, op, 7, 3);
        match (a, b) {
            (Ok(a), Ok(b)) => assert_eq!(a, b, "{op}"),
            (a, b) => panic!("{op}: {a:?} {b:?}"),
        }
    }
}

#[test]
fn variants_are_distinct_and_differ_from_seed() {
    for op in ops_of(LOOPS) {
        let vs = mutate_deterministic(LOOPS, op, 1, 3).unwrap();
        assert!(!vs.is_empty(), "{op}");
        let mut seen = BTreeSet::new();
        for v in &vs {
            assert!(!same_program(&v.text, LOOPS), "{op}");
            assert!(seen.insert(normalize_whitespace(&v.text)), "{op} duplicated a variant");
        }
    }
}

#[test]
fn unreachable_switch_falls_to_default() {
    let v = &mutate_deterministic(ABS, Operator::UnreachableSwitch, 3, 1).unwrap()[0];
    assert!(v.text.contains("boolean flag = false;"), "{}", v.text);
    assert!(v.text.contains("switch (flag ? 1 : 0) {"));
    assert!(v.text.contains("default:"));
}

#[test]
fn obfuscation_uses_exact_constants() {
    let src = "public class D {\n  double f() {\n    double x;\n    x = 1.0;\n    return x;\n  }\n}\n";
    let vs = mutate_deterministic(src, Operator::ObfuscateNumeric, 0, 3).unwrap();
    assert!(!vs.is_empty());
    for v in &vs {
        assert!(v.text.contains("x = 1.0 + ") || v.text.contains("return x"), "{}", v.text);
    }
    let all: Vec<String> = (0..20).flat_map(|s| mutate_deterministic(src, Operator::ObfuscateNumeric, s, 1).unwrap()).map(|v| v.text).collect();
    assert!(all.iter().any(|t| t.contains("x = 1.0 + 0.1 - 0.1;")), "0.1 is exact for 1.0");
    assert!(!all.iter().any(|t| t.contains("return x +")), "double variables are never rewritten");
    let neg_zero = "public class Z {\n  double f() {\n    return -0.0;\n  }\n}\n";
    for v in (0..10).flat_map(|s| mutate_deterministic(neg_zero, Operator::ObfuscateNumeric, s, 3).unwrap()) {
        assert!(!v.text.contains("-0.0 + 0.0"), "signed zero must survive: {}", v.text);
    }
}

#[test]
fn rename_is_fresh_and_complete() {
    let vs = mutate_deterministic(ABS, Operator::RenameLocal, 5, 3).unwrap();
    let src = JavaSource::parse(ABS).unwrap();
    let idents = src.identifiers();
    for v in vs {
        let m = JavaSource::parse(v.text.clone()).unwrap();
        let added: Vec<String> = m.identifiers().difference(&idents).cloned().collect();
        assert_eq!(added.len(), 1, "{}", v.text);
        assert_eq!(added[0].len(), 1);
        let removed: Vec<String> = idents.difference(&m.identifiers()).cloned().collect();
        assert_eq!(removed.len(), 1, "every use renamed: {}", v.text);
    }
}

#[test]
fn rename_leaves_fields_and_methods_alone() {
    let src = "public class R {\n  int n;\n  int n() { return 1; }\n  int f() {\n    int n = this.n + n();\n    return n;\n  }\n}\n";
    let vs = mutate_deterministic(src, Operator::RenameLocal, 0, 1).unwrap();
    let t = &vs[0].text;
    assert!(t.contains("this.n + n()"), "{t}");
    assert!(!t.contains("return n;"), "{t}");
}

#[test]
fn loop_rewrites() {
    let all: Vec<Variant> = mutate_deterministic(LOOPS, Operator::ForWhileToDoWhile, 0, 3).unwrap();
    assert_eq!(all.len(), 3);
    let joined: String = all.iter().map(|v| v.text.clone()).collect();
    assert!(joined.contains("if (j < 3) {"), "{joined}");
    assert!(joined.contains("} while (i < xs.length);"), "{joined}");
    assert!(joined.contains("outer: do {"), "label moves onto the do: {joined}");
    assert!(!joined.contains("if (true)"), "{joined}");
}

#[test]
fn for_with_continue_is_not_rewritten() {
    let src = "public class C {\n  int f() {\n    int s = 0;\n    for (int i = 0; i < 3; i++) {\n      if (i == 1) continue;\n      s += i;\n    }\n    return s;\n  }\n}\n";
    assert!(!ops_of(src).contains(&Operator::ForWhileToDoWhile));
}

#[test]
fn duplicate_assignment_rules() {
    let ok = "public class P {\n  int f;\n  P(int f) {\n    this.f = f;\n  }\n}\n";
    let v = mutate_deterministic(ok, Operator::DuplicateAssignment, 0, 1).unwrap();
    assert_eq!(v[0].text.matches("this.f = f;").count(), 2);
    for bad in [
        "public class P {\n  int x;\n  void g() {\n    x = x + 1;\n  }\n}\n",
        "public class P {\n  int x;\n  void g() {\n    x = compute();\n  }\n  int compute() { return 1; }\n}\n",
        "public class P {\n  void g(int[] a, int i) {\n    a[i++] = 3;\n  }\n}\n",
        "public class P {\n  void g() {\n    final int x;\n    x = 3;\n  }\n}\n",
        "public class P {\n  void g() {\n    int x;\n    x = 3;\n    Runnable r = () -> System.out.println(x);\n  }\n}\n",
    ] {
        assert!(!ops_of(bad).contains(&Operator::DuplicateAssignment), "{bad}");
    }
}

#[test]
fn constructor_insertion_keeps_super_first() {
    let src = "public class K extends Object {\n  K() {\n    super();\n  }\n}\n";
    for op in [Operator::DeadStore, Operator::UnreachableIf] {
        for s in 0..5 {
            for v in mutate_deterministic(src, op, s, 3).unwrap() {
                let body = &v.text[v.text.find("K() {").unwrap() + 5..];
                assert!(body.trim_start().starts_with("super();"), "{}", v.text);
            }
        }
    }
}

#[test]
fn operator_codes_round_trip() {
    for op in Operator::ALL {
        assert_eq!(op.code().parse::<Operator>().unwrap(), op);
        let json = serde_json::to_string(&op).unwrap();
        assert_eq!(json, format!("\"{}\"", op.code()));
    }
    assert!("NOPE".parse::<Operator>().is_err());
}

#[test]
fn applicability_reply_parsing() {
    let s = parse_applicable("Thinking...\nAPPLICABLE: DEAD_STORE, rename_local, FOO");
    assert_eq!(s, [Operator::DeadStore, Operator::RenameLocal].into());
    assert!(parse_applicable("none").is_empty());
}
