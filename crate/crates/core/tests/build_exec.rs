use std::time::Duration;

use metaprobe_core::build::{compile_and_run, signatures_equal, BuildError, Javalite, Limits, Sandbox, SourceFile, TestOutcome, Toolchain};

const SUBJECT: &str = "package demo;\n\npublic class Counter {\n    public int showBug(int n) {\n        int total = 0;\n        for (int i = 0; i <= n; i++) {\n            total += i;\n        }\n        return total / (n - 3);\n    }\n}\n";

const TEST: &str = "package demo;\n\nimport org.junit.Test;\nimport static org.junit.Assert.assertEquals;\n\npublic class CounterTest {\n    @Test\n    public void sumOfFive() {\n        assertEquals(7, new Counter().showBug(5));\n    }\n\n    @Test\n    public void atThree() {\n        new Counter().showBug(3);\n    }\n\n    @Test\n    public void printsNothing() {\n        System.out.println(\"fine\");\n    }\n}\n";

fn run(root: &std::path::Path, subject: &str) -> metaprobe_core::build::ExecutionSignature {
    let (c, sig) = compile_and_run(&Javalite, root, &[SourceFile::java(subject), SourceFile::java(TEST)], &["demo.CounterTest".into()], &Limits::default()).unwrap();
    sig.unwrap_or_else(|| panic!("compile failed: {}", c.output))
}

#[test]
fn signature_records_outcomes_exceptions_and_output() {
    let tmp = tempfile::tempdir().unwrap();
    let sig = run(tmp.path(), SUBJECT);
    assert_eq!(sig.per_test_outcomes.get("demo.CounterTest.sumOfFive"), Some(&TestOutcome::Pass));
    assert_eq!(sig.per_test_outcomes.get("demo.CounterTest.atThree"), Some(&TestOutcome::Error));
    assert!(sig.exception_types.iter().any(|e| e == "java.lang.ArithmeticException"), "{:?}", sig.exception_types);
    assert!(sig.trace_frames.iter().any(|f| f.type_name == "demo.Counter" && f.method == "showBug"));
    assert!(sig.stdout_digest.contains("fine"));
}

#[test]
fn sandbox_location_and_line_numbers_do_not_matter() {
    let tmp = tempfile::tempdir().unwrap();
    let a = run(&tmp.path().join("a"), SUBJECT);
    let b = run(&tmp.path().join("x/y/z/deep"), SUBJECT);
    assert!(signatures_equal(&a, &b), "{:?}", a.differences(&b));
    let shifted = SUBJECT.replace("public class Counter {\n", "public class Counter {\n\n    // spacer\n\n");
    let c = run(&tmp.path().join("c"), &shifted);
    assert!(signatures_equal(&a, &c), "{:?}", a.differences(&c));
}

#[test]
fn a_behavior_change_changes_the_signature() {
    let tmp = tempfile::tempdir().unwrap();
    let a = run(&tmp.path().join("a"), SUBJECT);
    let fixed = SUBJECT.replace("return total / (n - 3);", "return n == 3 ? 0 : total / (n - 3);");
    let b = run(&tmp.path().join("b"), &fixed);
    assert!(!signatures_equal(&a, &b));
    assert!(!a.differences(&b).is_empty());
}

#[test]
fn runaway_tests_hit_the_wall_clock_limit() {
    let tmp = tempfile::tempdir().unwrap();
    let spin = "package demo;\n\nimport org.junit.Test;\n\npublic class SpinTest {\n    @Test\n    public void forever() {\n        int i = 0;\n        while (i >= 0) {\n            i = (i + 1) % 7;\n        }\n    }\n}\n";
    let limits = Limits { wall: Duration::from_millis(500), ..Limits::default() };
    let started = std::time::Instant::now();
    let (_, sig) = compile_and_run(&Javalite, tmp.path(), &[SourceFile::java(spin)], &["demo.SpinTest".into()], &limits).unwrap();
    let sig = sig.unwrap();
    assert!(started.elapsed() < Duration::from_secs(20));
    assert_ne!(sig.per_test_outcomes.get("demo.SpinTest.forever"), Some(&TestOutcome::Pass), "{sig:?}");
}

#[test]
fn incompatible_instanceof_is_a_compile_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = "package demo;\n\npublic class Bad {\n    public boolean showBug(String s) {\n        return s instanceof Integer;\n    }\n}\n";
    let sandbox = Sandbox::recreate(tmp.path()).unwrap();
    let c = Javalite.compile(&sandbox, &[SourceFile::java(bad)]).unwrap();
    assert!(!c.success);
    let e = c.errors().next().expect("an error diagnostic");
    assert_eq!(e.file, "demo/Bad.java");
    assert_eq!(e.line, 5);
}

#[test]
fn compiling_nothing_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let sandbox = Sandbox::recreate(tmp.path()).unwrap();
    assert!(matches!(Javalite.compile(&sandbox, &[]), Err(BuildError::NoSources)));
}
