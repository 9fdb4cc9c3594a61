//! JUnit-style test runner and Surefire-format XML reports.

use std::time::{Duration, Instant};

use crate::interp::{Interp, Unwind};
use crate::ir::{Annotation, Program};
use crate::jfmt;
use crate::types::{Builtin, ClassRef, Type};
use crate::value::{Ref, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass,
    Failure(Problem),
    Error(Problem),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub type_name: String,
    pub message: Option<String>,
    pub trace: String,
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub name: String,
    pub classname: String,
    pub time: Duration,
    pub outcome: Outcome,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub cases: Vec<CaseResult>,
    pub time: Duration,
}

impl SuiteResult {
    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| matches!(c.outcome, Outcome::Failure(_))).count()
    }

    pub fn errors(&self) -> usize {
        self.cases.iter().filter(|c| matches!(c.outcome, Outcome::Error(_))).count()
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Applied to tests without their own `timeout`.
    pub default_timeout: Duration,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { default_timeout: Duration::from_secs(10) }
    }
}

/// Concrete classes declaring or inheriting `@Test` methods.
pub fn test_classes(prog: &Program) -> Vec<usize> {
    (0..prog.classes.len())
        .filter(|&c| {
            let cls = &prog.classes[c];
            !cls.is_abstract && !cls.is_interface && !test_methods(prog, c).is_empty()
        })
        .collect()
}

fn chain(prog: &Program, c: usize) -> Vec<usize> {
    let mut out = vec![c];
    let mut cur = c;
    while let ClassRef::User(s) = prog.classes[cur].superclass {
        out.push(s);
        cur = s;
    }
    out
}

struct TestMethod {
    class: usize,
    method: usize,
    expected: Option<ClassRef>,
    timeout_ms: Option<u64>,
}

/// `String.hashCode` order, then name: JUnit's default method order.
fn test_methods(prog: &Program, c: usize) -> Vec<TestMethod> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for k in chain(prog, c) {
        for (mi, m) in prog.classes[k].methods.iter().enumerate() {
            if m.is_static || seen.contains(&m.signature_key()) {
                continue;
            }
            seen.push(m.signature_key());
            for a in &m.annotations {
                if let Annotation::Test { expected, timeout_ms } = a {
                    out.push(TestMethod { class: k, method: mi, expected: *expected, timeout_ms: *timeout_ms });
                }
            }
        }
    }
    out.sort_by(|a, b| {
        let na = &prog.classes[a.class].methods[a.method].name;
        let nb = &prog.classes[b.class].methods[b.method].name;
        let ha = jfmt::string_hash(&jfmt::to_utf16(na));
        let hb = jfmt::string_hash(&jfmt::to_utf16(nb));
        ha.cmp(&hb).then_with(|| na.cmp(nb))
    });
    out
}

/// Lifecycle methods with annotation `want`, superclass first.
fn lifecycle(prog: &Program, c: usize, want: &Annotation) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in chain(prog, c).into_iter().rev() {
        for (mi, m) in prog.classes[k].methods.iter().enumerate() {
            if m.annotations.contains(want) {
                out.push((k, mi));
            }
        }
    }
    out
}

fn problem(it: &mut Interp<'_>, ex: &Ref) -> Problem {
    let type_name = it.class_name_of(ex);
    let message = it.throw_data(ex).and_then(|d| d.message);
    let message = match it.call_get_message(ex) {
        Some(m) => Some(m),
        None => message,
    };
    let trace = it.stack_trace(ex).unwrap_or_else(|_| format!("{type_name}\n"));
    Problem { type_name, message, trace }
}

fn synthetic(type_name: &str, message: String) -> Problem {
    Problem { type_name: type_name.to_string(), trace: format!("{type_name}: {message}\n"), message: Some(message) }
}

fn classify(it: &mut Interp<'_>, ex: &Ref) -> Outcome {
    let p = problem(it, ex);
    if it.instance_of(&Value::Ref(ex.clone()), &Type::builtin(Builtin::AssertionError)) {
        Outcome::Failure(p)
    } else {
        Outcome::Error(p)
    }
}

fn timeout_problem(ms: u128) -> Problem {
    synthetic(Builtin::TestTimedOutException.info().fqn, format!("test timed out after {ms} milliseconds"))
}

/// Runs every test of class `c` on a shared interpreter.
pub fn run_class(it: &mut Interp<'_>, c: usize, opts: &RunOptions) -> SuiteResult {
    let prog = it.prog;
    let name = prog.classes[c].binary_name.clone();
    let started = Instant::now();
    let mut cases = Vec::new();
    let class_deadline = |ms: Duration| Some(Instant::now() + ms);

    it.reset_stack();
    it.set_deadline(class_deadline(opts.default_timeout));
    for (k, m) in lifecycle(prog, c, &Annotation::BeforeClass) {
        let out0 = it.stdout.len();
        let err0 = it.stderr.len();
        if let Err(u) = it.invoke(k, m, Value::Null, Vec::new()) {
            let outcome = match u {
                Unwind::Throw(ex) => classify(it, &ex),
                Unwind::Timeout => Outcome::Error(timeout_problem(opts.default_timeout.as_millis())),
            };
            it.reset_stack();
            cases.push(CaseResult {
                name: "classMethod".into(),
                classname: name.clone(),
                time: started.elapsed(),
                outcome,
                stdout: it.stdout[out0..].to_string(),
                stderr: it.stderr[err0..].to_string(),
            });
            return SuiteResult { name, cases, time: started.elapsed() };
        }
    }

    let befores = lifecycle(prog, c, &Annotation::Before);
    let mut afters = lifecycle(prog, c, &Annotation::After);
    afters.reverse();
    for t in test_methods(prog, c) {
        let t0 = Instant::now();
        let out0 = it.stdout.len();
        let err0 = it.stderr.len();
        let limit = t.timeout_ms.map(Duration::from_millis).unwrap_or(opts.default_timeout);
        it.reset_stack();
        it.set_deadline(Some(t0 + limit));
        let outcome = run_one(it, c, &t, &befores, &afters, limit, opts);
        it.reset_stack();
        cases.push(CaseResult {
            name: prog.classes[t.class].methods[t.method].name.clone(),
            classname: name.clone(),
            time: t0.elapsed(),
            outcome,
            stdout: it.stdout[out0..].to_string(),
            stderr: it.stderr[err0..].to_string(),
        });
    }

    it.set_deadline(class_deadline(opts.default_timeout));
    for (k, m) in lifecycle(prog, c, &Annotation::AfterClass) {
        let out0 = it.stdout.len();
        if let Err(Unwind::Throw(ex)) = it.invoke(k, m, Value::Null, Vec::new()) {
            let outcome = classify(it, &ex);
            cases.push(CaseResult { name: "classMethod".into(), classname: name.clone(), time: Duration::ZERO, outcome, stdout: it.stdout[out0..].to_string(), stderr: String::new() });
        }
        it.reset_stack();
    }
    SuiteResult { name, cases, time: started.elapsed() }
}

fn run_one(it: &mut Interp<'_>, c: usize, t: &TestMethod, befores: &[(usize, usize)], afters: &[(usize, usize)], limit: Duration, opts: &RunOptions) -> Outcome {
    let Some(ctor) = it.default_ctor(c) else {
        return Outcome::Error(synthetic("java.lang.Exception", "Test class should have exactly one public zero-argument constructor".into()));
    };
    let this = match it.instantiate(c, ctor, Vec::new()) {
        Ok(v) => v,
        Err(Unwind::Throw(ex)) => return Outcome::Error(problem(it, &ex)),
        Err(Unwind::Timeout) => return Outcome::Error(timeout_problem(limit.as_millis())),
    };
    let mut outcome = None;
    for (k, m) in befores {
        match it.invoke(*k, *m, this.clone(), Vec::new()) {
            Ok(_) => {}
            Err(Unwind::Throw(ex)) => {
                outcome = Some(classify(it, &ex));
                break;
            }
            Err(Unwind::Timeout) => {
                outcome = Some(Outcome::Error(timeout_problem(limit.as_millis())));
                break;
            }
        }
    }
    if outcome.is_none() {
        let r = it.invoke(t.class, t.method, this.clone(), Vec::new());
        outcome = Some(match (r, t.expected) {
            (Ok(_), None) => Outcome::Pass,
            (Ok(_), Some(e)) => {
                let name = expected_name(it, e);
                Outcome::Failure(synthetic("java.lang.AssertionError", format!("Expected exception: {name}")))
            }
            (Err(Unwind::Throw(ex)), None) => classify(it, &ex),
            (Err(Unwind::Throw(ex)), Some(e)) => {
                if it.instance_of(&Value::Ref(ex.clone()), &Type::Class(e, Vec::new())) {
                    Outcome::Pass
                } else {
                    let want = expected_name(it, e);
                    let got = it.class_name_of(&ex);
                    let inner = problem(it, &ex);
                    let msg = format!("Unexpected exception, expected<{want}> but was<{got}>");
                    Outcome::Error(Problem { type_name: "java.lang.Exception".into(), trace: format!("java.lang.Exception: {msg}\nCaused by: {}", inner.trace), message: Some(msg) })
                }
            }
            (Err(Unwind::Timeout), _) => Outcome::Error(timeout_problem(limit.as_millis())),
        });
    }
    it.reset_stack();
    it.set_deadline(Some(Instant::now() + opts.default_timeout));
    for (k, m) in afters {
        if let Err(u) = it.invoke(*k, *m, this.clone(), Vec::new()) {
            if matches!(outcome, Some(Outcome::Pass)) {
                outcome = Some(match u {
                    Unwind::Throw(ex) => classify(it, &ex),
                    Unwind::Timeout => Outcome::Error(timeout_problem(opts.default_timeout.as_millis())),
                });
            }
            it.reset_stack();
        }
    }
    outcome.unwrap_or(Outcome::Pass)
}

fn expected_name(it: &Interp<'_>, e: ClassRef) -> String {
    match e {
        ClassRef::Builtin(b) => b.info().fqn.to_string(),
        ClassRef::User(i) => it.prog.classes[i].binary_name.clone(),
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\t' | '\r' => out.push(ch),
            c if (c as u32) < 0x20 => out.push_str(&format!("&#{};", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn escape_text(s: &str) -> String {
    escape(s).replace("&#10;", "\n").replace("&quot;", "\"")
}

fn cdata(s: &str) -> String {
    let clean: String = s.chars().filter(|c| !((*c as u32) < 0x20 && !matches!(c, '\n' | '\t' | '\r'))).collect();
    format!("<![CDATA[{}]]>", clean.replace("]]>", "]]]]><![CDATA[>"))
}

/// Surefire-style `TEST-<class>.xml` content.
pub fn to_xml(s: &SuiteResult) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<testsuite name=\"{}\" time=\"{:.3}\" tests=\"{}\" errors=\"{}\" skipped=\"0\" failures=\"{}\">\n",
        escape(&s.name),
        s.time.as_secs_f64(),
        s.cases.len(),
        s.errors(),
        s.failures()
    ));
    for c in &s.cases {
        out.push_str(&format!("  <testcase name=\"{}\" classname=\"{}\" time=\"{:.3}\"", escape(&c.name), escape(&c.classname), c.time.as_secs_f64()));
        let body = match &c.outcome {
            Outcome::Pass => None,
            Outcome::Failure(p) => Some(("failure", p)),
            Outcome::Error(p) => Some(("error", p)),
        };
        if body.is_none() && c.stdout.is_empty() && c.stderr.is_empty() {
            out.push_str("/>\n");
            continue;
        }
        out.push_str(">\n");
        if let Some((tag, p)) = body {
            out.push_str(&format!("    <{tag}"));
            if let Some(m) = &p.message {
                out.push_str(&format!(" message=\"{}\"", escape(m)));
            }
            out.push_str(&format!(" type=\"{}\">{}</{tag}>\n", escape(&p.type_name), escape_text(&p.trace)));
        }
        if !c.stdout.is_empty() {
            out.push_str(&format!("    <system-out>{}</system-out>\n", cdata(&c.stdout)));
        }
        if !c.stderr.is_empty() {
            out.push_str(&format!("    <system-err>{}</system-err>\n", cdata(&c.stderr)));
        }
        out.push_str("  </testcase>\n");
    }
    out.push_str("</testsuite>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xml_escapes_attributes_and_cdata() {
        let s = SuiteResult {
            name: "p.T".into(),
            time: Duration::from_millis(5),
            cases: vec![CaseResult {
                name: "a".into(),
                classname: "p.T".into(),
                time: Duration::ZERO,
                outcome: Outcome::Failure(synthetic("java.lang.AssertionError", "expected:<1> but was:<2>".into())),
                stdout: "x]]>y\n".into(),
                stderr: String::new(),
            }],
        };
        let x = to_xml(&s);
        assert!(x.contains("message=\"expected:&lt;1&gt; but was:&lt;2&gt;\""));
        assert!(x.contains("failures=\"1\""));
        assert!(x.contains("<![CDATA[x]]]]><![CDATA[>y\n]]>"));
    }
}
