//! Compile-and-run sandboxes for seeds, mutants and their tests, producing
//! structured diagnostics and normalized execution signatures.
//!
//! Sandbox layout:
//!
//! ```text
//! <sandbox>/sources/      sources, by package path
//! <sandbox>/artifacts/    compiler output
//! <sandbox>/logs/         raw tool output; logs/reports holds JUnit XML
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::process::{self, ProcError, Vars};
use metaprobe_javalite as javalite;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    /// Path below `sources/`, e.g. `demo/Abs.java`.
    pub path: String,
    pub text: String,
}

impl SourceFile {
    /// Places a Java compilation unit by its package and first top-level type.
    pub fn java(text: impl Into<String>) -> SourceFile {
        let text = text.into();
        let (pkg, name) = match metaprobe_syntax::JavaSource::parse_lenient(text.clone()) {
            Ok(src) => (src.package(), src.top_level_types().into_iter().next()),
            Err(_) => (None, None),
        };
        let name = name.unwrap_or_else(|| "Main".to_string());
        let path = match pkg {
            Some(p) => format!("{}/{name}.java", p.replace('.', "/")),
            None => format!("{name}.java"),
        };
        SourceFile { path, text }
    }

    /// Binary name of the primary class.
    pub fn class_name(&self) -> String {
        self.path.trim_end_matches(".java").replace('/', ".")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub line: u32,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileResult {
    pub success: bool,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(with = "millis")]
    pub elapsed: Duration,
    /// Raw compiler output, fed back verbatim in repair prompts.
    pub output: String,
}

impl CompileResult {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    /// Equality ignoring elapsed time.
    pub fn same_outcome(&self, other: &CompileResult) -> bool {
        self.success == other.success && self.diagnostics == other.diagnostics
    }
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    #[serde(rename = "wall_s", with = "secs")]
    pub wall: Duration,
    pub memory_mb: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { wall: Duration::from_secs(30), memory_mb: 512 }
    }
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestOutcome {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Frame {
    #[serde(rename = "type")]
    pub type_name: String,
    pub method: String,
}

/// What two runs must share to count as the same behavior. Messages are
/// left out; positions are stripped from frames.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionSignature {
    pub per_test_outcomes: BTreeMap<String, TestOutcome>,
    pub stdout_digest: String,
    pub exception_types: Vec<String>,
    pub trace_frames: Vec<Frame>,
}

impl ExecutionSignature {
    pub fn any_failing(&self) -> bool {
        self.per_test_outcomes.values().any(|o| *o != TestOutcome::Pass)
    }

    /// Human-readable rendering for prompts and evidence.
    pub fn render(&self) -> String {
        let mut s = String::from("test outcomes:\n");
        for (t, o) in &self.per_test_outcomes {
            s.push_str(&format!("  {t}: {o:?}\n"));
        }
        if !self.exception_types.is_empty() {
            s.push_str(&format!("exceptions: {}\n", self.exception_types.join(", ")));
        }
        if !self.trace_frames.is_empty() {
            s.push_str("trace:\n");
            s.push_str(&render_frames(&self.trace_frames));
        }
        s.push_str("stdout:\n");
        s.push_str(&self.stdout_digest);
        s
    }

    /// Lists the components that differ, for mismatch feedback.
    pub fn differences(&self, other: &ExecutionSignature) -> Vec<String> {
        let mut d = Vec::new();
        if self.per_test_outcomes != other.per_test_outcomes {
            d.push(format!("test outcomes: {:?} vs {:?}", self.per_test_outcomes, other.per_test_outcomes));
        }
        if self.stdout_digest != other.stdout_digest {
            d.push(format!("stdout: {:?} vs {:?}", self.stdout_digest, other.stdout_digest));
        }
        if self.exception_types != other.exception_types {
            d.push(format!("exceptions: {:?} vs {:?}", self.exception_types, other.exception_types));
        }
        if self.trace_frames != other.trace_frames {
            d.push(format!("trace frames:\n{}vs\n{}", render_frames(&self.trace_frames), render_frames(&other.trace_frames)));
        }
        d
    }
}

pub fn signatures_equal(a: &ExecutionSignature, b: &ExecutionSignature) -> bool {
    a == b
}

pub fn render_frames(frames: &[Frame]) -> String {
    frames.iter().map(|f| format!("\tat {}.{}\n", f.type_name, f.method)).collect()
}

fn frame_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*at\s+(?:[\w.$-]+/+)?([^\s(/]+)\.([^\s.(]+)(?:\(.*\))?\s*$").expect("frame pattern"))
}

const RUNNER_PREFIXES: [&str; 12] = [
    "org.junit.runner.",
    "org.junit.runners.",
    "org.junit.internal.runners.",
    "org.junit.platform.",
    "org.junit.jupiter.engine.",
    "org.junit.vintage.",
    "junit.framework.",
    "jdk.internal.",
    "sun.reflect.",
    "java.lang.reflect.",
    "org.apache.maven.",
    "java.util.concurrent.",
];

/// Frames of a Java stack trace with file names and line numbers dropped;
/// test-runner plumbing is left out.
pub fn normalize_trace(trace: &str) -> Vec<Frame> {
    trace
        .lines()
        .filter_map(|l| {
            let c = frame_re().captures(l)?;
            let type_name = c[1].to_string();
            if RUNNER_PREFIXES.iter().any(|p| type_name.starts_with(p)) {
                return None;
            }
            Some(Frame { type_name, method: c[2].to_string() })
        })
        .collect()
}

fn cause_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\s*Caused by:\s*([\w.$]+)").expect("cause pattern"))
}

fn exception_head_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^([\w$]+(?:\.[\w$]+)+)(?::|$)").expect("head pattern"))
}

/// Thrown type followed by its cause chain.
pub fn exception_chain(declared: Option<&str>, trace: &str) -> Vec<String> {
    let mut out = Vec::new();
    match declared.filter(|d| !d.is_empty()) {
        Some(t) => out.push(t.to_string()),
        None => {
            if let Some(c) = trace.lines().next().and_then(|l| exception_head_re().captures(l.trim())) {
                out.push(c[1].to_string());
            }
        }
    }
    out.extend(trace.lines().filter_map(|l| cause_re().captures(l).map(|c| c[1].to_string())));
    out
}

/// Trailing whitespace trimmed per line, trailing blank lines dropped, and
/// sandbox locations replaced by a fixed token.
pub fn normalize_stdout(text: &str, sandbox_roots: &[&Path]) -> String {
    let mut t = text.replace("\r\n", "\n");
    for root in sandbox_roots {
        let r = root.to_string_lossy();
        if !r.is_empty() {
            t = t.replace(r.as_ref(), "$SANDBOX");
        }
    }
    let mut lines: Vec<&str> = t.lines().map(|l| l.trim_end()).collect();
    while lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    lines.join("\n")
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("no sources to compile")]
    NoSources,
    #[error("toolchain not available: {0}")]
    ToolchainMissing(String),
    #[error("sandbox I/O at {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("sandbox {0} is already in use")]
    SandboxInUse(String),
    #[error("test launcher failed: {0}")]
    Launch(String),
    #[error("malformed test report {file}: {message}")]
    Report { file: String, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BuildError + '_ {
    move |source| BuildError::Io { path: path.display().to_string(), source }
}

/// A private directory owned by exactly one compile-and-run sequence.
#[derive(Debug, Clone)]
pub struct Sandbox {
    root: PathBuf,
}

impl Sandbox {
    /// Creates the layout under `root`, which must not hold a sandbox yet.
    pub fn create(root: &Path) -> Result<Sandbox, BuildError> {
        if root.join("sources").exists() {
            return Err(BuildError::SandboxInUse(root.display().to_string()));
        }
        for d in ["sources", "artifacts", "logs/reports"] {
            std::fs::create_dir_all(root.join(d)).map_err(io_err(root))?;
        }
        let root = root.canonicalize().map_err(io_err(root))?;
        Ok(Sandbox { root })
    }

    /// Empties and recreates the layout under `root`.
    pub fn recreate(root: &Path) -> Result<Sandbox, BuildError> {
        if root.exists() {
            std::fs::remove_dir_all(root).map_err(io_err(root))?;
        }
        Sandbox::create(root)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn sources(&self) -> PathBuf {
        self.root.join("sources")
    }

    pub fn artifacts(&self) -> PathBuf {
        self.root.join("artifacts")
    }

    pub fn logs(&self) -> PathBuf {
        self.root.join("logs")
    }

    pub fn reports(&self) -> PathBuf {
        self.root.join("logs/reports")
    }

    pub fn write_sources(&self, sources: &[SourceFile]) -> Result<Vec<PathBuf>, BuildError> {
        let mut paths = Vec::new();
        for s in sources {
            let p = self.sources().join(&s.path);
            if let Some(d) = p.parent() {
                std::fs::create_dir_all(d).map_err(io_err(d))?;
            }
            std::fs::write(&p, &s.text).map_err(io_err(&p))?;
            paths.push(p);
        }
        Ok(paths)
    }
}

pub trait Toolchain: Send + Sync {
    fn id(&self) -> &str;
    fn compile(&self, sandbox: &Sandbox, sources: &[SourceFile]) -> Result<CompileResult, BuildError>;
    /// Runs the named test classes against everything compiled in the sandbox.
    fn run_tests(&self, sandbox: &Sandbox, test_classes: &[String], limits: &Limits) -> Result<ExecutionSignature, BuildError>;
}

fn diag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(.+?\.java):(\d+):(?:\d+:)?\s*(error|warning):\s*(.*)$").expect("diagnostic pattern"))
}

/// Parses javac-format output into diagnostics with paths relative to `base`.
pub fn parse_diagnostics(output: &str, base: &Path) -> Vec<Diagnostic> {
    let base_s = format!("{}/", base.display());
    output
        .lines()
        .filter_map(|l| {
            let c = diag_re().captures(l)?;
            let file = c[1].strip_prefix(&base_s).unwrap_or(&c[1]).to_string();
            Some(Diagnostic {
                file,
                line: c[2].parse().unwrap_or(0),
                severity: if &c[3] == "error" { Severity::Error } else { Severity::Warning },
                message: c[4].trim().to_string(),
            })
        })
        .collect()
}

/// Reads every JUnit XML report below `dir` into a signature.
pub fn signature_from_reports(dir: &Path, sandbox_roots: &[&Path]) -> Result<ExecutionSignature, BuildError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "xml"))
        .collect();
    files.sort();
    let mut sig = ExecutionSignature::default();
    let mut stdout = String::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(io_err(&f))?;
        let doc = roxmltree::Document::parse(&text).map_err(|e| BuildError::Report { file: f.display().to_string(), message: e.to_string() })?;
        for suite in doc.descendants().filter(|n| n.has_tag_name("testsuite")) {
            for case in suite.children().filter(|n| n.has_tag_name("testcase")) {
                let name = format!("{}.{}", case.attribute("classname").unwrap_or(""), case.attribute("name").unwrap_or(""));
                let mut outcome = TestOutcome::Pass;
                for child in case.children().filter(|n| n.is_element()) {
                    match child.tag_name().name() {
                        tag @ ("failure" | "error") => {
                            outcome = if tag == "failure" { TestOutcome::Fail } else { TestOutcome::Error };
                            let trace = child.text().unwrap_or("");
                            sig.exception_types.extend(exception_chain(child.attribute("type"), trace));
                            sig.trace_frames.extend(normalize_trace(trace));
                        }
                        "system-out" => stdout.push_str(child.text().unwrap_or("")),
                        _ => {}
                    }
                }
                sig.per_test_outcomes.insert(name, outcome);
            }
            if let Some(out) = suite.children().find(|n| n.has_tag_name("system-out")) {
                stdout.push_str(out.text().unwrap_or(""));
            }
        }
    }
    sig.stdout_digest = normalize_stdout(&stdout, sandbox_roots);
    Ok(sig)
}

/// The built-in reference toolchain, run in-process.
#[derive(Debug, Default, Clone)]
pub struct Javalite;

impl Toolchain for Javalite {
    fn id(&self) -> &str {
        "javalite"
    }

    fn compile(&self, sandbox: &Sandbox, sources: &[SourceFile]) -> Result<CompileResult, BuildError> {
        if sources.is_empty() {
            return Err(BuildError::NoSources);
        }
        let started = Instant::now();
        let paths = sandbox.write_sources(sources)?;
        let mut args = vec!["compile".to_string(), "-d".into(), sandbox.artifacts().display().to_string()];
        args.extend(paths.iter().map(|p| p.display().to_string()));
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = javalite::cli::run(&args, &mut out, &mut err);
        let output = String::from_utf8_lossy(&err).into_owned();
        std::fs::write(sandbox.logs().join("compile.log"), &output).map_err(io_err(&sandbox.logs()))?;
        let diagnostics = parse_diagnostics(&output, &sandbox.sources());
        if code != 0 && diagnostics.is_empty() {
            return Err(BuildError::Launch(output));
        }
        Ok(CompileResult { success: code == 0, diagnostics, elapsed: started.elapsed(), output: relativize(&output, &sandbox.sources()) })
    }

    fn run_tests(&self, sandbox: &Sandbox, test_classes: &[String], limits: &Limits) -> Result<ExecutionSignature, BuildError> {
        let mut args = vec![
            "test".to_string(),
            "-cp".into(),
            sandbox.artifacts().display().to_string(),
            "-d".into(),
            sandbox.reports().display().to_string(),
            "--timeout-ms".into(),
            limits.wall.as_millis().to_string(),
        ];
        args.extend(test_classes.iter().cloned());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = javalite::cli::run(&args, &mut out, &mut err);
        let log = format!("{}{}", String::from_utf8_lossy(&out), String::from_utf8_lossy(&err));
        std::fs::write(sandbox.logs().join("test.log"), &log).map_err(io_err(&sandbox.logs()))?;
        if code > 1 {
            return Err(BuildError::Launch(log));
        }
        signature_from_reports(&sandbox.reports(), &[sandbox.root()])
    }
}

fn relativize(text: &str, base: &Path) -> String {
    text.replace(&format!("{}/", base.display()), "")
}

/// External compiler and test launcher driven by command templates.
///
/// Compile placeholders: `{out}`, `{classpath}`, `{sources}` (expands).
/// Test placeholders: `{classpath}`, `{reports}`, `{tests}` (expands),
/// `{timeout_ms}`, `{memory_mb}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandToolchain {
    #[serde(default = "default_command_id")]
    pub id: String,
    pub compile: Vec<String>,
    pub test: Vec<String>,
    /// Extra classpath entries (test framework jars and the like).
    #[serde(default)]
    pub classpath: Vec<String>,
    #[serde(default)]
    pub version_probe: Vec<String>,
}

fn default_command_id() -> String {
    "command".into()
}

impl CommandToolchain {
    fn classpath(&self, sandbox: &Sandbox) -> String {
        let mut cp = vec![sandbox.artifacts().display().to_string()];
        cp.extend(self.classpath.iter().cloned());
        cp.join(":")
    }

    fn launch(&self, argv: &[String], sandbox: &Sandbox, timeout: Duration) -> Result<process::ProcOutput, BuildError> {
        process::run(argv, Some(sandbox.root()), timeout).map_err(|e| match e {
            ProcError::NotFound(p) => BuildError::ToolchainMissing(p),
            other => BuildError::Launch(other.to_string()),
        })
    }

    /// Checks that the toolchain is installed.
    pub fn probe(&self) -> Result<String, BuildError> {
        if self.version_probe.is_empty() {
            return Ok(String::new());
        }
        let out = process::run(&self.version_probe, None, Duration::from_secs(60)).map_err(|e| BuildError::ToolchainMissing(e.to_string()))?;
        if !out.success() {
            return Err(BuildError::ToolchainMissing(format!("{} exited with {:?}", self.version_probe[0], out.status)));
        }
        Ok(format!("{}{}", out.stdout, out.stderr).trim().to_string())
    }
}

impl Toolchain for CommandToolchain {
    fn id(&self) -> &str {
        &self.id
    }

    fn compile(&self, sandbox: &Sandbox, sources: &[SourceFile]) -> Result<CompileResult, BuildError> {
        if sources.is_empty() {
            return Err(BuildError::NoSources);
        }
        let paths = sandbox.write_sources(sources)?;
        let mut vars = Vars::new();
        vars.set("out", sandbox.artifacts().display().to_string())
            .set("classpath", self.classpath(sandbox))
            .set("sandbox", sandbox.root().display().to_string())
            .set_list("sources", paths.iter().map(|p| p.display().to_string()).collect());
        let out = self.launch(&vars.expand(&self.compile), sandbox, Duration::from_secs(300))?;
        let output = format!("{}{}", out.stdout, out.stderr);
        std::fs::write(sandbox.logs().join("compile.log"), &output).map_err(io_err(&sandbox.logs()))?;
        let diagnostics = parse_diagnostics(&output, &sandbox.sources());
        Ok(CompileResult { success: out.success(), diagnostics, elapsed: out.elapsed, output: relativize(&output, &sandbox.sources()) })
    }

    fn run_tests(&self, sandbox: &Sandbox, test_classes: &[String], limits: &Limits) -> Result<ExecutionSignature, BuildError> {
        let mut vars = Vars::new();
        vars.set("classpath", self.classpath(sandbox))
            .set("out", sandbox.artifacts().display().to_string())
            .set("reports", sandbox.reports().display().to_string())
            .set("timeout_ms", limits.wall.as_millis().to_string())
            .set("memory_mb", limits.memory_mb.to_string())
            .set("sandbox", sandbox.root().display().to_string())
            .set_list("tests", test_classes.to_vec());
        let out = self.launch(&vars.expand(&self.test), sandbox, limits.wall + Duration::from_secs(5))?;
        std::fs::write(sandbox.logs().join("test.log"), format!("{}{}", out.stdout, out.stderr)).map_err(io_err(&sandbox.logs()))?;
        let mut sig = signature_from_reports(&sandbox.reports(), &[sandbox.root()])?;
        if out.timed_out {
            sig.per_test_outcomes.insert("<timeout>".into(), TestOutcome::Error);
            sig.exception_types.push("<timeout>".into());
        } else if sig.per_test_outcomes.is_empty() {
            return Err(BuildError::Launch(format!("no test reports produced (exit {:?}): {}", out.status, out.stderr.trim())));
        }
        Ok(sig)
    }
}

/// Compiles `sources` into a fresh sandbox at `root` and runs `tests`.
pub fn compile_and_run(
    toolchain: &dyn Toolchain,
    root: &Path,
    sources: &[SourceFile],
    tests: &[String],
    limits: &Limits,
) -> Result<(CompileResult, Option<ExecutionSignature>), BuildError> {
    let sandbox = Sandbox::recreate(root)?;
    let c = toolchain.compile(&sandbox, sources)?;
    if !c.success {
        return Ok((c, None));
    }
    let sig = toolchain.run_tests(&sandbox, tests, limits)?;
    Ok((c, Some(sig)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_drop_positions_and_runner_plumbing() {
        let trace = "java.lang.AssertionError\n\tat org.junit.Assert.fail(Assert.java:87)\n\tat demo.AbsTest.overflows(/tmp/x/sources/demo/AbsTest.java:10)\n\tat java.base/jdk.internal.reflect.NativeMethodAccessorImpl.invoke0(Native Method)\n\tat app//org.junit.runners.ParentRunner.run(ParentRunner.java:413)\n\tat java.base/java.lang.Math.abs(Math.java)\n";
        let f = normalize_trace(trace);
        let names: Vec<String> = f.iter().map(|f| format!("{}#{}", f.type_name, f.method)).collect();
        assert_eq!(names, vec!["org.junit.Assert#fail", "demo.AbsTest#overflows", "java.lang.Math#abs"]);
        assert_eq!(normalize_trace(&render_frames(&f)), f);
    }

    #[test]
    fn exception_chain_reads_causes() {
        let t = "java.lang.RuntimeException: outer\n\tat A.b(A.java:1)\nCaused by: java.lang.IllegalStateException: inner\n\t... 3 more\n";
        assert_eq!(exception_chain(None, t), vec!["java.lang.RuntimeException", "java.lang.IllegalStateException"]);
        assert_eq!(exception_chain(Some("x.Y"), t), vec!["x.Y", "java.lang.IllegalStateException"]);
    }

    #[test]
    fn stdout_normalization() {
        let root = Path::new("/tmp/sb1");
        assert_eq!(normalize_stdout("a  \r\n/tmp/sb1/x\n\n\n", &[root]), "a\n$SANDBOX/x");
    }

    #[test]
    fn javac_diagnostics_parse_relative() {
        let out = "/w/sources/demo/Bad.java:4: error: incompatible types: String cannot be converted to Integer\n        return s instanceof Integer;\n               ^\n/w/sources/demo/Bad.java:9: warning: [rawtypes] found raw type\n2 errors\n";
        let d = parse_diagnostics(out, Path::new("/w/sources"));
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], Diagnostic { file: "demo/Bad.java".into(), line: 4, severity: Severity::Error, message: "incompatible types: String cannot be converted to Integer".into() });
        assert_eq!(d[1].severity, Severity::Warning);
    }

    #[test]
    fn source_file_location_follows_package() {
        let s = SourceFile::java("package a.b;\npublic class C {}\n");
        assert_eq!(s.path, "a/b/C.java");
        assert_eq!(s.class_name(), "a.b.C");
        assert_eq!(SourceFile::java("class D {}").path, "D.java");
    }
}
