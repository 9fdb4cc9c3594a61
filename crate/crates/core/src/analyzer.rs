//! Running external static analyzers and normalizing what they report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Duration;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::build::Sandbox;
use crate::process::{self, ProcError, Vars};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Source,
    CompiledArtifact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    SarifJson,
    NativeXml,
    NativeJson,
    LineText,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::SarifJson => "sarif",
            ReportFormat::NativeXml => "xml",
            ReportFormat::NativeJson => "json",
            ReportFormat::LineText => "txt",
        }
    }
}

fn default_ok_codes() -> Vec<i32> {
    vec![0]
}

fn default_timeout() -> u64 {
    300
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzerConfig {
    pub analyzer_id: String,
    /// Command template. `{input}` names the analyzed directory (sources or
    /// class files per `input_kind`) and `{output}` the report path;
    /// `{sources}` expands to the individual source files, `{base}` to the
    /// source root, and entries of `vars` to their values.
    pub invocation: Vec<String>,
    pub input_kind: InputKind,
    pub report_format: ReportFormat,
    #[serde(default)]
    pub rule_id_map: BTreeMap<String, String>,
    #[serde(default)]
    pub version_probe: Vec<String>,
    /// Substring the probe output must contain.
    #[serde(default)]
    pub version_pin: Option<String>,
    /// Extra placeholders, e.g. a pinned severity threshold.
    #[serde(default)]
    pub vars: BTreeMap<String, String>,
    #[serde(default = "default_ok_codes")]
    pub ok_exit_codes: Vec<i32>,
    #[serde(default = "default_timeout")]
    pub timeout_s: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum AnalyzerError {
    #[error("analyzer config {id}: {message}")]
    Config { id: String, message: String },
    #[error("analyzer {id} is not installed: {source}")]
    Missing { id: String, source: ProcError },
    #[error("analyzer {id}: version probe failed: {message}")]
    Probe { id: String, message: String },
    #[error("analyzer {id}: version '{found}' does not match pinned '{pinned}'")]
    VersionMismatch { id: String, found: String, pinned: String },
    #[error("analyzer {id} exited with {status:?} and wrote no report:\n{stderr}")]
    Failed { id: String, status: Option<i32>, stderr: String },
    #[error("analyzer {id} timed out after {seconds}s")]
    Timeout { id: String, seconds: u64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("analyzer I/O at {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl AnalyzerConfig {
    pub fn validate(&self) -> Result<(), AnalyzerError> {
        let err = |m: &str| Err(AnalyzerError::Config { id: self.analyzer_id.clone(), message: m.to_string() });
        if self.analyzer_id.trim().is_empty() {
            return err("analyzer_id is empty");
        }
        let joined = self.invocation.join(" ");
        if !(joined.contains("{input}") || joined.contains("{sources}")) {
            return err("invocation has no {input} or {sources} placeholder");
        }
        if !joined.contains("{output}") {
            return err("invocation has no {output} placeholder");
        }
        if let Some((k, _)) = self.rule_id_map.iter().find(|(_, v)| v.trim().is_empty()) {
            return err(&format!("rule_id_map entry '{k}' maps to an empty id"));
        }
        Ok(())
    }

    pub fn normalize_rule(&self, native: &str) -> String {
        self.rule_id_map.get(native).cloned().unwrap_or_else(|| native.to_string())
    }

    /// Runs the version probe and checks the pin.
    pub fn probe(&self) -> Result<String, AnalyzerError> {
        if self.version_probe.is_empty() {
            return Ok(String::new());
        }
        let out = process::run(&self.version_probe, None, Duration::from_secs(60)).map_err(|e| match e {
            ProcError::NotFound(_) => AnalyzerError::Missing { id: self.analyzer_id.clone(), source: e },
            other => AnalyzerError::Probe { id: self.analyzer_id.clone(), message: other.to_string() },
        })?;
        let text = format!("{}{}", out.stdout, out.stderr);
        if !out.success() {
            return Err(AnalyzerError::Probe { id: self.analyzer_id.clone(), message: text.trim().to_string() });
        }
        let found = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or_default().to_string();
        if let Some(pin) = &self.version_pin {
            if !text.contains(pin.as_str()) {
                return Err(AnalyzerError::VersionMismatch { id: self.analyzer_id.clone(), found, pinned: pin.clone() });
            }
        }
        Ok(found)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    pub analyzer_id: String,
    pub rule_id: String,
    /// Path relative to the analyzed source root.
    pub file: String,
    pub line_span: (u32, u32),
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed {format} report at {at}: {message}")]
pub struct ParseError {
    pub format: &'static str,
    pub at: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parsed {
    pub findings: Vec<Finding>,
    /// One entry per record dropped or degraded, with the reason.
    pub skipped: Vec<String>,
}

pub struct ParseCtx<'a> {
    pub analyzer_id: &'a str,
    pub base: &'a Path,
    pub rule_id_map: &'a BTreeMap<String, String>,
}

impl ParseCtx<'_> {
    fn rule(&self, native: &str) -> String {
        self.rule_id_map.get(native).cloned().unwrap_or_else(|| native.to_string())
    }

    fn finding(&self, rule: &str, file: &str, span: (u32, u32), message: &str) -> Finding {
        Finding {
            analyzer_id: self.analyzer_id.to_string(),
            rule_id: self.rule(rule),
            file: relativize(file, self.base),
            line_span: span,
            message: message.trim().to_string(),
        }
    }
}

/// Strips URI schemes and the base directory; separators become `/`.
pub fn relativize(path: &str, base: &Path) -> String {
    let p = path.strip_prefix("file://").unwrap_or(path).replace('\\', "/");
    let base_s = base.to_string_lossy().replace('\\', "/");
    let trimmed = base_s.trim_end_matches('/');
    if !trimmed.is_empty() {
        if let Some(rest) = p.strip_prefix(trimmed) {
            if rest.starts_with('/') {
                return rest.trim_start_matches('/').to_string();
            }
        }
        if let Ok(canon) = base.canonicalize() {
            let c = canon.to_string_lossy().replace('\\', "/");
            if let Some(rest) = p.strip_prefix(c.trim_end_matches('/')) {
                if rest.starts_with('/') {
                    return rest.trim_start_matches('/').to_string();
                }
            }
        }
    }
    p.trim_start_matches("./").to_string()
}

fn span(start: Option<u64>, end: Option<u64>) -> Option<(u32, u32)> {
    let s = start? as u32;
    let e = end.map(|e| e as u32).unwrap_or(s).max(s);
    Some((s, e))
}

pub fn parse_report(format: ReportFormat, raw: &[u8], cx: &ParseCtx<'_>) -> Result<Parsed, ParseError> {
    match format {
        ReportFormat::SarifJson => parse_sarif(raw, cx),
        ReportFormat::NativeXml => parse_native_xml(raw, cx),
        ReportFormat::NativeJson => parse_native_json(raw, cx),
        ReportFormat::LineText => Ok(parse_line_text(&String::from_utf8_lossy(raw), cx)),
    }
}

fn json_error(format: &'static str, e: serde_json::Error, raw: &[u8]) -> ParseError {
    let offset = raw.split(|b| *b == b'\n').take(e.line().saturating_sub(1)).map(|l| l.len() + 1).sum::<usize>() + e.column().saturating_sub(1);
    ParseError { format, at: format!("byte {offset}"), message: e.to_string() }
}

fn parse_sarif(raw: &[u8], cx: &ParseCtx<'_>) -> Result<Parsed, ParseError> {
    let doc: Value = serde_json::from_slice(raw).map_err(|e| json_error("SARIF", e, raw))?;
    let runs = doc.get("runs").and_then(Value::as_array).ok_or_else(|| ParseError { format: "SARIF", at: "$".into(), message: "missing runs array".into() })?;
    let mut out = Parsed::default();
    for (ri, run) in runs.iter().enumerate() {
        let rules: Vec<&str> = run
            .pointer("/tool/driver/rules")
            .and_then(Value::as_array)
            .map(|rs| rs.iter().map(|r| r.get("id").and_then(Value::as_str).unwrap_or("")).collect())
            .unwrap_or_default();
        let Some(results) = run.get("results").and_then(Value::as_array) else { continue };
        for (i, r) in results.iter().enumerate() {
            let at = format!("runs[{ri}].results[{i}]");
            let rule = r
                .get("ruleId")
                .and_then(Value::as_str)
                .or_else(|| r.pointer("/rule/id").and_then(Value::as_str))
                .or_else(|| r.get("ruleIndex").and_then(Value::as_u64).and_then(|k| rules.get(k as usize).copied()).filter(|s| !s.is_empty()));
            let Some(rule) = rule else {
                out.skipped.push(format!("{at}: no rule id"));
                continue;
            };
            let message = r.pointer("/message/text").and_then(Value::as_str).unwrap_or_default();
            let Some(loc) = r.pointer("/locations/0/physicalLocation") else {
                out.skipped.push(format!("{at}: no physical location"));
                continue;
            };
            let Some(uri) = loc.pointer("/artifactLocation/uri").and_then(Value::as_str) else {
                out.skipped.push(format!("{at}: no artifact uri"));
                continue;
            };
            let region = loc.get("region");
            let start = region.and_then(|g| g.get("startLine")).and_then(Value::as_u64);
            let end = region.and_then(|g| g.get("endLine")).and_then(Value::as_u64);
            let s = span(start, end).unwrap_or_else(|| {
                out.skipped.push(format!("{at}: no line information; recorded as 0-0"));
                (0, 0)
            });
            out.findings.push(cx.finding(rule, uri, s, message));
        }
    }
    Ok(out)
}

fn attr_u64(n: roxmltree::Node<'_, '_>, name: &str) -> Option<u64> {
    n.attribute(name).and_then(|v| v.trim().parse().ok())
}

fn parse_native_xml(raw: &[u8], cx: &ParseCtx<'_>) -> Result<Parsed, ParseError> {
    let text = std::str::from_utf8(raw).map_err(|e| ParseError { format: "XML", at: format!("byte {}", e.valid_up_to()), message: "invalid UTF-8".into() })?;
    let doc = roxmltree::Document::parse(text).map_err(|e| ParseError { format: "XML", at: format!("{}", e.pos()), message: e.to_string() })?;
    let root = doc.root_element();
    match root.tag_name().name() {
        "BugCollection" => Ok(parse_spotbugs(root, cx)),
        "pmd" => Ok(parse_pmd_xml(root, cx)),
        other => Err(ParseError { format: "XML", at: format!("element <{other}>"), message: "unsupported root element".into() }),
    }
}

fn parse_spotbugs(root: roxmltree::Node<'_, '_>, cx: &ParseCtx<'_>) -> Parsed {
    let mut out = Parsed::default();
    for (i, bug) in root.children().filter(|n| n.has_tag_name("BugInstance")).enumerate() {
        let at = format!("BugInstance[{i}]");
        let Some(rule) = bug.attribute("type") else {
            out.skipped.push(format!("{at}: no type attribute"));
            continue;
        };
        let message = bug
            .children()
            .find(|n| n.has_tag_name("LongMessage"))
            .or_else(|| bug.children().find(|n| n.has_tag_name("ShortMessage")))
            .and_then(|n| n.text())
            .unwrap_or(rule);
        let direct: Vec<roxmltree::Node<'_, '_>> = bug.children().filter(|n| n.has_tag_name("SourceLine")).collect();
        let line = direct
            .iter()
            .find(|n| n.attribute("primary") == Some("true"))
            .or_else(|| direct.first())
            .copied()
            .or_else(|| {
                bug.children()
                    .filter(|n| n.has_tag_name("Method") || n.has_tag_name("Class"))
                    .flat_map(|n| n.children().filter(|c| c.has_tag_name("SourceLine")))
                    .next()
            });
        let Some(line) = line else {
            out.skipped.push(format!("{at}: no SourceLine"));
            continue;
        };
        let Some(file) = line.attribute("sourcepath").or_else(|| line.attribute("sourcefile")) else {
            out.skipped.push(format!("{at}: SourceLine without a source path"));
            continue;
        };
        let s = span(attr_u64(line, "start"), attr_u64(line, "end")).unwrap_or_else(|| {
            out.skipped.push(format!("{at}: no line information; recorded as 0-0"));
            (0, 0)
        });
        out.findings.push(cx.finding(rule, file, s, message));
    }
    out
}

fn parse_pmd_xml(root: roxmltree::Node<'_, '_>, cx: &ParseCtx<'_>) -> Parsed {
    let mut out = Parsed::default();
    for file in root.children().filter(|n| n.has_tag_name("file")) {
        let name = file.attribute("name").unwrap_or_default();
        for (i, v) in file.children().filter(|n| n.has_tag_name("violation")).enumerate() {
            let at = format!("file[{name}].violation[{i}]");
            let Some(rule) = v.attribute("rule") else {
                out.skipped.push(format!("{at}: no rule attribute"));
                continue;
            };
            let s = span(attr_u64(v, "beginline"), attr_u64(v, "endline")).unwrap_or_else(|| {
                out.skipped.push(format!("{at}: no line information; recorded as 0-0"));
                (0, 0)
            });
            out.findings.push(cx.finding(rule, name, s, v.text().unwrap_or_default()));
        }
    }
    out
}

pub const FINDINGS_SCHEMA: &str = "findings";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct FindingsDoc {
    schema: String,
    version: u32,
    findings: Vec<Finding>,
}

/// The internal findings format; `parse_report(NativeJson, ..)` reads it
/// back unchanged.
pub fn serialize_findings(findings: &[Finding]) -> String {
    let doc = FindingsDoc { schema: FINDINGS_SCHEMA.into(), version: 1, findings: findings.to_vec() };
    let mut s = serde_json::to_string_pretty(&doc).expect("findings serialize");
    s.push('\n');
    s
}

fn parse_native_json(raw: &[u8], cx: &ParseCtx<'_>) -> Result<Parsed, ParseError> {
    let doc: Value = serde_json::from_slice(raw).map_err(|e| json_error("JSON", e, raw))?;
    if doc.get("schema").and_then(Value::as_str) == Some(FINDINGS_SCHEMA) {
        let d: FindingsDoc = serde_json::from_value(doc).map_err(|e| ParseError { format: "JSON", at: "findings".into(), message: e.to_string() })?;
        return Ok(Parsed { findings: d.findings, skipped: Vec::new() });
    }
    let Some(files) = doc.get("files").and_then(Value::as_array) else {
        return Err(ParseError { format: "JSON", at: "$".into(), message: "neither a findings document nor a PMD report".into() });
    };
    let mut out = Parsed::default();
    for (fi, f) in files.iter().enumerate() {
        let name = f.get("filename").and_then(Value::as_str).unwrap_or_default();
        for (i, v) in f.get("violations").and_then(Value::as_array).into_iter().flatten().enumerate() {
            let at = format!("files[{fi}].violations[{i}]");
            let Some(rule) = v.get("rule").and_then(Value::as_str) else {
                out.skipped.push(format!("{at}: no rule"));
                continue;
            };
            let s = span(v.get("beginline").and_then(Value::as_u64), v.get("endline").and_then(Value::as_u64)).unwrap_or_else(|| {
                out.skipped.push(format!("{at}: no line information; recorded as 0-0"));
                (0, 0)
            });
            out.findings.push(cx.finding(rule, name, s, v.get("description").and_then(Value::as_str).unwrap_or_default()));
        }
    }
    Ok(out)
}

fn line_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(.+?\.java):(\d+)(?::\d+)?:\s*(?:(?:warning|error|note|info):\s*)?\[([^\]]+)\]\s*(.*)$").expect("line pattern"))
}

/// `File.java:12: warning: [Rule] message` lines; anything else is ignored.
pub fn parse_line_text(text: &str, cx: &ParseCtx<'_>) -> Parsed {
    let mut out = Parsed::default();
    for l in text.lines() {
        if let Some(c) = line_re().captures(l.trim_end()) {
            let n: u32 = c[2].parse().unwrap_or(0);
            out.findings.push(cx.finding(&c[3], &c[1], (n, n), &c[4]));
        }
    }
    out
}

/// Whether two relative paths name the same file, allowing either to carry
/// extra leading directories.
pub fn same_file(a: &str, b: &str) -> bool {
    let (a, b) = (a.trim_start_matches("./"), b.trim_start_matches("./"));
    a == b || a.ends_with(&format!("/{b}")) || b.ends_with(&format!("/{a}"))
}

/// Line-insensitive detection of `rule_id` on `file`.
pub fn rule_detected(findings: &[Finding], rule_id: &str, file: &str) -> bool {
    findings.iter().any(|f| f.rule_id == rule_id && same_file(&f.file, file))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisRun {
    pub analyzer_id: String,
    pub findings: Vec<Finding>,
    pub skipped: Vec<String>,
    pub raw_report: PathBuf,
    pub exit_status: Option<i32>,
}

/// Runs `config` over a sandbox that holds compiled sources. The raw report
/// is written to `report_path`.
pub fn run_analyzer(config: &AnalyzerConfig, sandbox: &Sandbox, report_path: &Path) -> Result<AnalysisRun, AnalyzerError> {
    config.validate()?;
    let io = |p: &Path| {
        let path = p.display().to_string();
        move |source| AnalyzerError::Io { path, source }
    };
    if let Some(dir) = report_path.parent() {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
    }
    if report_path.exists() {
        std::fs::remove_file(report_path).map_err(io(report_path))?;
    }
    let sources_dir = sandbox.sources();
    let mut files = Vec::new();
    collect_files(&sources_dir, "java", &mut files).map_err(io(&sources_dir))?;
    files.sort();
    let input = match config.input_kind {
        InputKind::Source => sources_dir.clone(),
        InputKind::CompiledArtifact => sandbox.artifacts(),
    };
    let mut vars = Vars::new();
    vars.set("input", input.display().to_string())
        .set("output", report_path.display().to_string())
        .set("base", sources_dir.display().to_string())
        .set("sandbox", sandbox.root().display().to_string())
        .set_list("sources", files.iter().map(|p| p.display().to_string()).collect());
    for (k, v) in &config.vars {
        vars.set(k, v.clone());
    }
    let argv = vars.expand(&config.invocation);
    let out = process::run(&argv, Some(sandbox.root()), Duration::from_secs(config.timeout_s)).map_err(|e| match e {
        ProcError::NotFound(_) => AnalyzerError::Missing { id: config.analyzer_id.clone(), source: e },
        other => AnalyzerError::Failed { id: config.analyzer_id.clone(), status: None, stderr: other.to_string() },
    })?;
    let log = sandbox.logs().join(format!("{}.log", crate::workspace::path_component(&config.analyzer_id)));
    let _ = std::fs::write(&log, format!("$ {}\n{}{}", argv.join(" "), out.stdout, out.stderr));
    if out.timed_out {
        return Err(AnalyzerError::Timeout { id: config.analyzer_id.clone(), seconds: config.timeout_s });
    }
    if !report_path.is_file() {
        if config.report_format == ReportFormat::LineText && config.ok_exit_codes.contains(&out.status.unwrap_or(-1)) {
            std::fs::write(report_path, &out.stdout).map_err(io(report_path))?;
        } else {
            return Err(AnalyzerError::Failed { id: config.analyzer_id.clone(), status: out.status, stderr: out.stderr.clone() });
        }
    }
    if !config.ok_exit_codes.contains(&out.status.unwrap_or(-1)) {
        log::warn!("{} exited with {:?} but wrote a report; parsing it", config.analyzer_id, out.status);
    }
    let raw = std::fs::read(report_path).map_err(io(report_path))?;
    let parsed = parse_report(config.report_format, &raw, &ParseCtx { analyzer_id: &config.analyzer_id, base: &sources_dir, rule_id_map: &config.rule_id_map })?;
    for s in &parsed.skipped {
        log::info!("{}: {s}", config.analyzer_id);
    }
    Ok(AnalysisRun { analyzer_id: config.analyzer_id.clone(), findings: parsed.findings, skipped: parsed.skipped, raw_report: report_path.to_path_buf(), exit_status: out.status })
}

fn collect_files(dir: &Path, ext: &str, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    if !dir.is_dir() {
        return Ok(());
    }
    for e in std::fs::read_dir(dir)? {
        let p = e?.path();
        if p.is_dir() {
            collect_files(&p, ext, out)?;
        } else if p.extension().is_some_and(|x| x == ext) {
            out.push(p);
        }
    }
    Ok(())
}

/// Minimal SARIF 2.1.0 document for a list of findings.
pub fn to_sarif(tool: &str, findings: &[Finding]) -> String {
    let results: Vec<Value> = findings
        .iter()
        .map(|f| {
            serde_json::json!({
                "ruleId": f.rule_id,
                "message": {"text": f.message},
                "locations": [{"physicalLocation": {
                    "artifactLocation": {"uri": f.file},
                    "region": {"startLine": f.line_span.0, "endLine": f.line_span.1}
                }}]
            })
        })
        .collect();
    let doc = serde_json::json!({
        "version": "2.1.0",
        "$schema": "https://json.schemastore.org/sarif-2.1.0.json",
        "runs": [{"tool": {"driver": {"name": tool}}, "results": results}]
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("sarif serialize");
    s.push('\n');
    s
}

/// Pattern rules for the bundled offline stub analyzer.
pub mod stub {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct StubRule {
        pub rule_id: String,
        /// Every pattern must match somewhere in the file.
        pub all_of: Vec<String>,
        /// No pattern may match anywhere in the file.
        #[serde(default)]
        pub none_of: Vec<String>,
        #[serde(default)]
        pub message: String,
    }

    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct StubRules {
        #[serde(default = "default_tool")]
        pub tool: String,
        pub rules: Vec<StubRule>,
    }

    fn default_tool() -> String {
        "stub".into()
    }

    struct Compiled<'a> {
        rule: &'a StubRule,
        all: Vec<Regex>,
        none: Vec<Regex>,
    }

    pub fn scan(rules: &StubRules, root: &Path) -> anyhow::Result<Vec<Finding>> {
        let compiled = rules
            .rules
            .iter()
            .map(|r| {
                let all = r.all_of.iter().map(|p| Regex::new(&format!("(?m){p}"))).collect::<Result<Vec<_>, _>>()?;
                let none = r.none_of.iter().map(|p| Regex::new(&format!("(?m){p}"))).collect::<Result<Vec<_>, _>>()?;
                Ok(Compiled { rule: r, all, none })
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let mut files = Vec::new();
        collect_files(root, "java", &mut files)?;
        files.sort();
        let mut out = Vec::new();
        for f in files {
            let text = std::fs::read_to_string(&f)?;
            let rel = relativize(&f.to_string_lossy(), root);
            for c in &compiled {
                if c.all.is_empty() || !c.all.iter().all(|r| r.is_match(&text)) || c.none.iter().any(|r| r.is_match(&text)) {
                    continue;
                }
                let pos = c.all[0].find(&text).map(|m| m.start()).unwrap_or(0);
                let line = metaprobe_syntax::line_of(&text, pos) as u32;
                let message = if c.rule.message.is_empty() { c.rule.rule_id.clone() } else { c.rule.message.clone() };
                out.push(Finding { analyzer_id: rules.tool.clone(), rule_id: c.rule.rule_id.clone(), file: rel.clone(), line_span: (line, line), message });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx<'a>(map: &'a BTreeMap<String, String>) -> ParseCtx<'a> {
        ParseCtx { analyzer_id: "a", base: Path::new("/w/sources"), rule_id_map: map }
    }

    #[test]
    fn path_matching_respects_components() {
        assert!(same_file("demo/A.java", "demo/A.java"));
        assert!(same_file("src/demo/A.java", "demo/A.java"));
        assert!(!same_file("demo/BA.java", "A.java"));
        assert!(!same_file("demo/A.java", "other/A.java"));
    }

    #[test]
    fn relativize_strips_scheme_and_base() {
        assert_eq!(relativize("file:///w/sources/demo/A.java", Path::new("/w/sources")), "demo/A.java");
        assert_eq!(relativize("demo/A.java", Path::new("/w/sources")), "demo/A.java");
        assert_eq!(relativize("/w/sourcesX/A.java", Path::new("/w/sources")), "/w/sourcesX/A.java");
    }

    #[test]
    fn line_text_reports() {
        let m = BTreeMap::from([("MathAbsNegative".to_string(), "ABS".to_string())]);
        let p = parse_line_text("/w/sources/demo/A.java:7: warning: [MathAbsNegative] abs may be negative\nnoise\n", &cx(&m));
        assert_eq!(p.findings.len(), 1);
        assert_eq!(p.findings[0].rule_id, "ABS");
        assert_eq!(p.findings[0].file, "demo/A.java");
        assert_eq!(p.findings[0].line_span, (7, 7));
    }

    #[test]
    fn config_needs_both_placeholders() {
        let mut c = AnalyzerConfig {
            analyzer_id: "x".into(),
            invocation: vec!["tool".into(), "{input}".into()],
            input_kind: InputKind::Source,
            report_format: ReportFormat::SarifJson,
            rule_id_map: BTreeMap::new(),
            version_probe: vec![],
            version_pin: None,
            vars: BTreeMap::new(),
            ok_exit_codes: vec![0],
            timeout_s: 10,
        };
        assert!(c.validate().is_err());
        c.invocation.push("-o={output}".into());
        assert!(c.validate().is_ok());
    }
}
