use std::fs;

use metaprobe_javalite::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&args, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const SUBJECT: &str = r#"package demo;

public class Abs {
    public int showBug(String input) {
        return Math.abs(input.hashCode());
    }
}
"#;

const TEST: &str = r#"package demo;

import org.junit.Test;
import static org.junit.Assert.*;

public class AbsTest {
    @Test
    public void overflows() {
        int result = new Abs().showBug("polygenelubricants");
        assertTrue(result >= 0);
    }

    @Test
    public void ordinary() {
        System.out.println("checked");
        assertEquals(Math.abs("a".hashCode()), new Abs().showBug("a"));
    }

    @Test
    public void explodes() {
        new Abs().showBug(null);
    }
}
"#;

#[test]
fn compile_then_test_writes_surefire_report() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    fs::create_dir_all(&src).unwrap();
    fs::write(src.join("Abs.java"), SUBJECT).unwrap();
    fs::write(src.join("AbsTest.java"), TEST).unwrap();
    let out = dir.path().join("out");
    let (code, _, err) = call(&["compile", "-d", out.to_str().unwrap(), "-encoding", "UTF-8", src.join("Abs.java").to_str().unwrap(), src.join("AbsTest.java").to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.join("demo/Abs.jls").is_file());

    let reports = dir.path().join("reports");
    let (code, stdout, err) = call(&["test", "-cp", out.to_str().unwrap(), "-d", reports.to_str().unwrap()]);
    assert_eq!(code, 1, "{err}");
    assert!(stdout.contains("Tests run: 3, Failures: 1, Errors: 1"), "{stdout}");
    let xml = fs::read_to_string(reports.join("TEST-demo.AbsTest.xml")).unwrap();
    assert!(xml.contains("type=\"java.lang.AssertionError\""), "{xml}");
    assert!(xml.contains("type=\"java.lang.NullPointerException\""), "{xml}");
    assert!(xml.contains("at demo.Abs.showBug(Abs.java:5)"), "{xml}");
    assert!(xml.contains("<![CDATA[checked\n]]>"), "{xml}");
}

#[test]
fn compile_errors_are_reported_javac_style() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("Bad.java");
    fs::write(&file, "public class Bad {\n    boolean f(String s) {\n        return s instanceof Integer;\n    }\n}\n").unwrap();
    let (code, _, err) = call(&["compile", "-d", dir.path().join("out").to_str().unwrap(), file.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("Bad.java:3: error: incompatible types"), "{err}");
    assert!(err.trim_end().ends_with("1 error"), "{err}");
    assert!(!dir.path().join("out/Bad.jls").exists());
}

#[test]
fn classpath_units_resolve_dependencies() {
    let dir = tempfile::tempdir().unwrap();
    let lib = dir.path().join("lib");
    let a = dir.path().join("A.java");
    let b = dir.path().join("B.java");
    fs::write(&a, "public class A { public static int twice(int x) { return 2 * x; } }\n").unwrap();
    fs::write(&b, "public class B { public static void main(String[] args) { System.out.println(A.twice(21)); } }\n").unwrap();
    assert_eq!(call(&["compile", "-d", lib.to_str().unwrap(), a.to_str().unwrap()]).0, 0);
    let bin = dir.path().join("bin");
    let (code, _, err) = call(&["compile", "-d", bin.to_str().unwrap(), "-cp", lib.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let cp = format!("{}:{}", lib.display(), bin.display());
    let (code, out, _) = call(&["run", "-cp", &cp, "B"]);
    assert_eq!((code, out.as_str()), (0, "42\n"));
}

#[test]
fn usage_errors() {
    assert_eq!(call(&[]).0, 2);
    assert_eq!(call(&["compile", "x.java"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
}
