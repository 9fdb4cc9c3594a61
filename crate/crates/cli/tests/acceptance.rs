//! Acceptance checks. Prints one line per criterion and exits non-zero
//! when any of them fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, ensure, Context, Result};
use metaprobe_core::analyzer::{parse_report, serialize_findings, Finding, ParseCtx, ReportFormat};
use metaprobe_core::build::{compile_and_run, signatures_equal, Javalite, Limits, SourceFile};
use metaprobe_core::catalog::{Category, RuleSpec};
use metaprobe_core::corpus::load_corpus;
use metaprobe_core::evaluator::{classify, DetectionMatrix, RuleRef, VerdictKind};
use metaprobe_core::gateway::{read_transcript, Gateway, Sampling, ScriptedBackend, Session, TaskKind, Transcript};
use metaprobe_core::mutation::{applicable_operators, deterministic_mutants, MutantStatus};
use metaprobe_core::process::resolve_program;
use metaprobe_core::seed::{generate_seed, AgentCtx, Budget, SeedOutcome};
use metaprobe_core::validation::{validate_seed, ValidationOutcome};
use serde_json::Value;

type Criterion = (&'static str, fn() -> Result<Outcome>);

enum Outcome {
    Pass(String),
    Skip(String),
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixtures() -> PathBuf {
    root().join("fixtures")
}

fn copy_dir(from: &Path, to: &Path) -> Result<()> {
    std::fs::create_dir_all(to)?;
    for e in std::fs::read_dir(from)? {
        let e = e?;
        let target = to.join(e.file_name());
        if e.file_type()?.is_dir() {
            copy_dir(&e.path(), &target)?;
        } else {
            std::fs::copy(e.path(), &target)?;
        }
    }
    Ok(())
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["metaprobe"];
    argv.extend_from_slice(args);
    let code = metaprobe_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

/// Copies a fixture campaign into `dir` and runs it end to end.
fn run_campaign(fixture: &str, config: &str, dir: &Path) -> Result<PathBuf> {
    copy_dir(&fixtures().join(fixture), dir)?;
    let cfg = dir.join(config);
    let (code, out, err) = run_cli(&["-c", cfg.to_str().unwrap(), "run"]);
    ensure!(code == 0, "run exited with {code}\n{out}{err}");
    Ok(cfg)
}

fn corpus_mutants_equivalent() -> Result<Outcome> {
    let started = Instant::now();
    let corpus = load_corpus(&fixtures().join("corpus"))?;
    ensure!(corpus.len() >= 20, "corpus has only {} seeds", corpus.len());
    let tmp = tempfile::tempdir()?;
    let limits = Limits::default();
    let (mut total, mut bad) = (0usize, Vec::new());
    for e in &corpus {
        let base = e.baseline(&Javalite, &tmp.path().join(&e.name).join("seed"), &limits)?;
        let test = e.test_case();
        for op in applicable_operators(&e.seed.text)? {
            for m in deterministic_mutants(&e.seed, op, 42, 3, &test, &base, &Javalite, &tmp.path().join(&e.name), &limits)? {
                total += 1;
                if m.status != MutantStatus::Equivalent {
                    bad.push(format!("{} {}", e.name, m.id()));
                }
            }
        }
    }
    let elapsed = started.elapsed();
    ensure!(bad.is_empty(), "{} of {total} not equivalent: {}", bad.len(), bad.join(", "));
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(Outcome::Pass(format!("{total} mutants over {} seeds, all equivalent, {:.1}s", corpus.len(), elapsed.as_secs_f64())))
}

fn expected_kind(seed: bool, mutants: &[bool]) -> VerdictKind {
    let all = mutants.iter().all(|d| *d);
    match (seed, all) {
        (true, true) => VerdictKind::Consistent,
        (true, false) => VerdictKind::Type1,
        (false, false) => VerdictKind::Type2,
        (false, true) => VerdictKind::SeedMissOnly,
    }
}

fn classify_matches_brute_force() -> Result<Outcome> {
    let mut n = 0;
    for m in 0..=4usize {
        for bits in 0..(1u32 << (m + 1)) {
            let seed = bits & 1 == 1;
            let mutants: Vec<bool> = (0..m).map(|i| bits >> (i + 1) & 1 == 1).collect();
            let matrix = DetectionMatrix {
                rule: RuleRef { analyzer_id: "a".into(), rule_id: "R".into() },
                seed_detected: seed,
                mutant_detected: mutants.iter().enumerate().map(|(i, d)| (format!("DEAD_STORE/{i}"), *d)).collect(),
            };
            let v = classify(&matrix);
            let want = expected_kind(seed, &mutants);
            ensure!(v.kind == want, "seed={seed} mutants={mutants:?}: got {}, want {want}", v.kind);
            let missed: Vec<String> = matrix.mutant_detected.iter().filter(|(_, d)| !**d).map(|(k, _)| k.clone()).collect();
            ensure!(v.witnesses == missed, "witnesses for seed={seed} mutants={mutants:?}");
            n += 1;
        }
    }
    ensure!(n == 62, "enumerated {n} matrices");
    Ok(Outcome::Pass(format!("{n} matrices agree")))
}

fn sample_rule() -> RuleSpec {
    RuleSpec {
        analyzer_id: "stub".into(),
        rule_id: "ABS_HASHCODE".into(),
        title: "Absolute value of a hash code".into(),
        description: "Math.abs of hashCode() can be negative.".into(),
        category: Category::Correctness,
        severity: None,
        example_snippets: Vec::new(),
        source_url: None,
        tags: Vec::new(),
    }
}

fn failing_backend_discards() -> Result<Outcome> {
    let tmp = tempfile::tempdir()?;
    let gateway = Gateway::new(Arc::new(ScriptedBackend::always("broken", "Sorry, I cannot produce that program.")), Sampling::default());
    let rule = sample_rule();
    let transcript = Transcript::in_memory();
    let ctx = AgentCtx {
        session: Session { gateway: &gateway, transcript: &transcript, job: "stub/ABS_HASHCODE" },
        toolchain: &Javalite,
        limits: Limits::default(),
        scratch: tmp.path(),
        budget: Budget { max_attempts: 5 },
    };
    let SeedOutcome::Discarded(d) = generate_seed(&rule, &ctx)? else { bail!("seed was accepted") };
    let entries = transcript.entries();
    ensure!(d.attempts_used == 5 && entries.len() == 5, "seed: {} attempts, {} transcript entries", d.attempts_used, entries.len());
    ensure!(entries.iter().all(|e| e.request.purpose.starts_with("seed.")), "unexpected seed purposes");

    let corpus = load_corpus(&fixtures().join("corpus"))?;
    let entry = corpus.iter().find(|e| e.name == "abs_hashcode").ok_or_else(|| anyhow!("abs_hashcode missing from corpus"))?;
    let seed = entry.seed_program();
    let transcript = Transcript::in_memory();
    let ctx = AgentCtx { session: Session { gateway: &gateway, transcript: &transcript, job: "stub/ABS_HASHCODE" }, ..ctx };
    let ValidationOutcome::Discarded(d) = validate_seed(&rule, &seed, &ctx, 1)? else { bail!("test was accepted") };
    let entries = transcript.entries();
    ensure!(d.generations == 5 && entries.len() == 5, "test: {} generations, {} transcript entries", d.generations, entries.len());
    ensure!(entries.iter().all(|e| e.request.purpose.starts_with("test.") && e.request.purpose != "test.judge"), "unexpected test purposes");
    Ok(Outcome::Pass("seed and test generation each made 5 attempts, then discarded".into()))
}

fn transcript_temperatures() -> Result<Outcome> {
    let tmp = tempfile::tempdir()?;
    run_campaign("campaign", "campaign2.toml", tmp.path())?;
    let (mut g, mut v) = (0usize, 0usize);
    for rule in ["ABS_HASHCODE", "INT_DIVISION_TO_DOUBLE"] {
        let path = tmp.path().join("work2/rules/stub").join(rule).join("transcript.jsonl");
        for e in read_transcript(&path).with_context(|| path.display().to_string())? {
            let want = match e.request.task_kind {
                TaskKind::Generation => 0.75,
                TaskKind::Validation => 0.1,
            };
            ensure!(e.request.temperature == want, "{rule} #{} {} at {}", e.seq, e.request.purpose, e.request.temperature);
            let judging = e.request.purpose.ends_with(".judge") || e.request.purpose.ends_with(".applicability");
            ensure!(judging == (e.request.task_kind == TaskKind::Validation), "{} has kind {:?}", e.request.purpose, e.request.task_kind);
            match e.request.task_kind {
                TaskKind::Generation => g += 1,
                TaskKind::Validation => v += 1,
            }
        }
    }
    ensure!(g > 0 && v > 0, "generation {g}, validation {v}");
    Ok(Outcome::Pass(format!("{g} generation requests at 0.75, {v} validation requests at 0.1")))
}

fn planted_campaign_is_reproducible() -> Result<Outcome> {
    let started = Instant::now();
    let mut summaries = Vec::new();
    for _ in 0..2 {
        let tmp = tempfile::tempdir()?;
        run_campaign("campaign", "campaign4.toml", tmp.path())?;
        summaries.push(std::fs::read(tmp.path().join("work4/summary.json"))?);
    }
    let elapsed = started.elapsed();
    ensure!(summaries[0] == summaries[1], "summary.json differs between runs");
    let s: Value = serde_json::from_slice(&summaries[0])?;
    let t = &s["totals"];
    let counts: Vec<u64> = ["type1", "type2", "consistent", "seed_miss_only"].iter().map(|k| t[*k].as_u64().unwrap_or(u64::MAX)).collect();
    ensure!(counts == [1, 1, 1, 1], "type1/type2/consistent/seed_miss_only = {counts:?}");
    ensure!(elapsed < Duration::from_secs(60), "two runs took {elapsed:?}");
    Ok(Outcome::Pass(format!("identical summaries, one of each verdict, {:.1}s for both runs", elapsed.as_secs_f64())))
}

fn check_golden(file: &str, format: ReportFormat, analyzer: &str) -> Result<usize> {
    let dir = fixtures().join("reports");
    let raw = std::fs::read(dir.join(file))?;
    let map = BTreeMap::new();
    let cx = ParseCtx { analyzer_id: analyzer, base: Path::new("/tmp/sandbox/sources"), rule_id_map: &map };
    let parsed = parse_report(format, &raw, &cx)?;
    let want: Value = serde_json::from_slice(&std::fs::read(dir.join(format!("{file}.expected.json")))?)?;
    let findings: Vec<Finding> = serde_json::from_value(want["findings"].clone())?;
    ensure!(parsed.findings == findings, "{file}: got {:#?}", parsed.findings);
    ensure!(parsed.skipped.len() as u64 == want["skipped"].as_u64().unwrap_or(0), "{file}: skipped {:?}", parsed.skipped);
    let back = parse_report(ReportFormat::NativeJson, serialize_findings(&parsed.findings).as_bytes(), &cx)?;
    ensure!(back.findings == parsed.findings && back.skipped.is_empty(), "{file}: internal round trip changed findings");
    Ok(findings.len())
}

fn golden_reports_parse() -> Result<Outcome> {
    let sarif = check_golden("spotbugs.sarif", ReportFormat::SarifJson, "spotbugs")?;
    let xml = check_golden("spotbugs.xml", ReportFormat::NativeXml, "spotbugs")?;
    let map = BTreeMap::new();
    let cx = ParseCtx { analyzer_id: "spotbugs", base: Path::new("/"), rule_id_map: &map };
    let empty = parse_report(ReportFormat::SarifJson, &std::fs::read(fixtures().join("reports/empty.sarif"))?, &cx)?;
    ensure!(empty.findings.is_empty() && empty.skipped.is_empty(), "empty SARIF produced findings");
    Ok(Outcome::Pass(format!("SARIF {sarif} findings, SpotBugs XML {xml} findings, empty SARIF 0, internal format round-trips")))
}

fn real_spotbugs_type1() -> Result<Outcome> {
    let missing: Vec<&str> = ["spotbugs", "javac", "java"].into_iter().filter(|p| resolve_program(p).is_none()).collect();
    if !missing.is_empty() {
        return Ok(Outcome::Skip(format!("not installed: {}", missing.join(", "))));
    }
    let Ok(cp) = std::env::var("METAPROBE_JUNIT_CLASSPATH") else {
        return Ok(Outcome::Skip("METAPROBE_JUNIT_CLASSPATH is not set".into()));
    };
    let tmp = tempfile::tempdir()?;
    copy_dir(&fixtures().join("spotbugs"), tmp.path())?;
    let cfg = tmp.path().join("campaign.toml");
    let text = std::fs::read_to_string(&cfg)?.replace("@JUNIT_CLASSPATH@", &cp);
    std::fs::write(&cfg, text)?;
    let (code, out, err) = run_cli(&["-c", cfg.to_str().unwrap(), "run"]);
    ensure!(code == 0, "run exited with {code}\n{out}{err}");
    let v: Value = serde_json::from_slice(&std::fs::read(tmp.path().join("work/rules/spotbugs/RV_ABSOLUTE_VALUE_OF_HASHCODE/verdict/verdict.json"))?)?;
    let kind = v["verdict"]["kind"].as_str().unwrap_or_default().to_string();
    ensure!(kind.eq_ignore_ascii_case("type1"), "verdict is {kind}");
    Ok(Outcome::Pass(format!("Type1, witnesses {}", v["verdict"]["witnesses"])))
}

fn signatures_are_stable() -> Result<Outcome> {
    let corpus = load_corpus(&fixtures().join("corpus"))?;
    let e = corpus.iter().find(|e| e.name == "abs_hashcode").ok_or_else(|| anyhow!("abs_hashcode missing from corpus"))?;
    let tmp = tempfile::tempdir()?;
    let limits = Limits::default();
    let tests = [e.test.class_name()];
    let sig = |root: &Path, seed: &SourceFile| -> Result<_> {
        let (c, s) = compile_and_run(&Javalite, root, &[seed.clone(), e.test.clone()], &tests, &limits)?;
        s.ok_or_else(|| anyhow!("does not compile: {}", c.output))
    };
    let base = sig(&tmp.path().join("a"), &e.seed)?;
    ensure!(base.any_failing(), "the seed's test should fail");
    let moved = sig(&tmp.path().join("deeper/nested/elsewhere"), &e.seed)?;
    ensure!(signatures_equal(&base, &moved), "path shift changed the signature: {:?}", base.differences(&moved));
    let shifted = SourceFile { path: e.seed.path.clone(), text: format!("// moved down\n\n\n{}", e.seed.text) };
    let shifted = sig(&tmp.path().join("b"), &shifted)?;
    ensure!(signatures_equal(&base, &shifted), "line shift changed the signature: {:?}", base.differences(&shifted));
    let fixed_text = e.seed.text.replace("Math.abs(hash) % buckets", "Math.abs(hash % buckets)");
    ensure!(fixed_text != e.seed.text, "bug-fix rewrite did not apply");
    let fixed = sig(&tmp.path().join("c"), &SourceFile { path: e.seed.path.clone(), text: fixed_text })?;
    ensure!(!signatures_equal(&base, &fixed), "the bug-fixed mutant has the seed's signature");
    Ok(Outcome::Pass("path and line shifts keep the signature, the bug fix changes it".into()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("deterministic corpus mutants compile and certify equivalent", corpus_mutants_equivalent),
        ("classify agrees with brute force", classify_matches_brute_force),
        ("always-failing backend exhausts the attempt budget", failing_backend_discards),
        ("transcript temperatures", transcript_temperatures),
        ("planted campaign is byte-reproducible", planted_campaign_is_reproducible),
        ("golden analyzer reports", golden_reports_parse),
        ("real SpotBugs reports Type1 on the hashCode rule", real_spotbugs_type1),
        ("execution signatures ignore paths and line numbers", signatures_are_stable),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let line = match check() {
            Ok(Outcome::Pass(d)) => format!("PASS  {name}: {d}"),
            Ok(Outcome::Skip(d)) => format!("SKIP  {name}: {d}"),
            Err(e) => {
                failed += 1;
                format!("FAIL  {name}: {e:#}")
            }
        };
        println!("criterion {}: {line}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
