use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use metaprobe_core::analyzer::{parse_report, rule_detected, same_file, serialize_findings, to_sarif, AnalyzerConfig, Finding, ParseCtx, ReportFormat};
use proptest::prelude::*;

fn reports() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/reports")
}

fn golden(file: &str, format: ReportFormat, analyzer: &str) {
    let raw = std::fs::read(reports().join(file)).unwrap();
    let map = BTreeMap::new();
    let parsed = parse_report(format, &raw, &ParseCtx { analyzer_id: analyzer, base: Path::new("/tmp/sandbox/sources"), rule_id_map: &map }).unwrap();
    let want: serde_json::Value = serde_json::from_slice(&std::fs::read(reports().join(format!("{file}.expected.json"))).unwrap()).unwrap();
    let findings: Vec<Finding> = serde_json::from_value(want["findings"].clone()).unwrap();
    assert_eq!(parsed.findings, findings, "{file}");
    assert_eq!(parsed.skipped.len() as u64, want["skipped"].as_u64().unwrap(), "{file}: {:?}", parsed.skipped);
}

#[test]
fn sarif_golden() {
    golden("spotbugs.sarif", ReportFormat::SarifJson, "spotbugs");
}

#[test]
fn spotbugs_xml_golden() {
    golden("spotbugs.xml", ReportFormat::NativeXml, "spotbugs");
}

#[test]
fn pmd_xml_golden() {
    golden("pmd.xml", ReportFormat::NativeXml, "pmd");
}

#[test]
fn pmd_json_golden() {
    golden("pmd.json", ReportFormat::NativeJson, "pmd");
}

#[test]
fn line_text_golden() {
    golden("errorprone.txt", ReportFormat::LineText, "errorprone");
}

#[test]
fn rule_id_map_normalizes_native_ids() {
    let raw = std::fs::read(reports().join("spotbugs.xml")).unwrap();
    let map: BTreeMap<String, String> = [("RV_ABSOLUTE_VALUE_OF_HASHCODE".to_string(), "ABS_HASHCODE".to_string())].into();
    let p = parse_report(ReportFormat::NativeXml, &raw, &ParseCtx { analyzer_id: "spotbugs", base: Path::new("/"), rule_id_map: &map }).unwrap();
    assert!(rule_detected(&p.findings, "ABS_HASHCODE", "demo/HashBucket.java"));
    assert!(!rule_detected(&p.findings, "RV_ABSOLUTE_VALUE_OF_HASHCODE", "demo/HashBucket.java"));
}

#[test]
fn malformed_reports_name_the_format_and_position() {
    let map = BTreeMap::new();
    let cx = ParseCtx { analyzer_id: "x", base: Path::new("/"), rule_id_map: &map };
    let e = parse_report(ReportFormat::SarifJson, b"{\"runs\": [ {\"results\": [}", &cx).unwrap_err();
    assert_eq!(e.format, "SARIF");
    assert!(e.at.starts_with("byte "));
    let e = parse_report(ReportFormat::NativeXml, b"<BugCollection><BugInstance></BugCollection>", &cx).unwrap_err();
    assert_eq!(e.format, "XML");
    let e = parse_report(ReportFormat::NativeXml, b"<checkstyle/>", &cx).unwrap_err();
    assert!(e.message.contains("unsupported"));
}

#[test]
fn analyzer_configs_need_input_and_output() {
    let ok: AnalyzerConfig = toml::from_str("analyzer_id = \"a\"\ninvocation = [\"tool\", \"{input}\", \"-o\", \"{output}\"]\ninput_kind = \"source\"\nreport_format = \"sarif_json\"\n").unwrap();
    assert!(ok.validate().is_ok());
    assert_eq!(ok.ok_exit_codes, vec![0]);
    let bad: AnalyzerConfig = toml::from_str("analyzer_id = \"a\"\ninvocation = [\"tool\", \"{input}\"]\ninput_kind = \"source\"\nreport_format = \"sarif_json\"\n").unwrap();
    assert!(bad.validate().is_err());
}

fn finding() -> impl Strategy<Value = Finding> {
    ("[a-z]{1,6}", "[A-Z_]{1,10}", "([a-z]{1,5}/){0,3}[A-Z][a-z]{0,6}\\.java", 0u32..500, 0u32..20, "[ -~]{0,40}").prop_map(|(a, r, f, s, d, m)| Finding {
        analyzer_id: a,
        rule_id: r,
        file: f,
        line_span: (s, s + d),
        message: m.trim().to_string(),
    })
}

proptest! {
    #[test]
    fn internal_format_round_trips(fs in proptest::collection::vec(finding(), 0..8)) {
        let map = BTreeMap::new();
        let cx = ParseCtx { analyzer_id: "ignored", base: Path::new("/"), rule_id_map: &map };
        let back = parse_report(ReportFormat::NativeJson, serialize_findings(&fs).as_bytes(), &cx).unwrap();
        prop_assert_eq!(back.findings, fs);
    }

    #[test]
    fn sarif_export_round_trips(fs in proptest::collection::vec(finding(), 0..8)) {
        let fs: Vec<Finding> = fs.into_iter().map(|f| Finding { analyzer_id: "tool".into(), line_span: (f.line_span.0.max(1), f.line_span.1.max(1)), ..f }).collect();
        let map = BTreeMap::new();
        let cx = ParseCtx { analyzer_id: "tool", base: Path::new("/"), rule_id_map: &map };
        let back = parse_report(ReportFormat::SarifJson, to_sarif("tool", &fs).as_bytes(), &cx).unwrap();
        prop_assert_eq!(back.findings, fs);
    }

    #[test]
    fn more_findings_never_hide_a_detection(fs in proptest::collection::vec(finding(), 0..6), extra in proptest::collection::vec(finding(), 0..4), pick in 0usize..6) {
        if let Some(f) = fs.get(pick % fs.len().max(1)) {
            prop_assert!(rule_detected(&fs, &f.rule_id, &f.file));
            let mut more = fs.clone();
            more.extend(extra);
            prop_assert!(rule_detected(&more, &f.rule_id, &f.file));
            let nested = format!("extra/{}", f.file);
            prop_assert!(rule_detected(&fs, &f.rule_id, &nested));
        }
    }

    #[test]
    fn same_file_is_symmetric(a in "([a-z]{1,3}/){0,2}[A-Z][a-z]{0,3}\\.java", b in "([a-z]{1,3}/){0,2}[A-Z][a-z]{0,3}\\.java") {
        prop_assert_eq!(same_file(&a, &b), same_file(&b, &a));
        prop_assert!(same_file(&a, &a));
    }
}
