//! The offline stub analyzer: regex rules over Java sources, SARIF out.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use metaprobe_core::analyzer::{stub, to_sarif};
use metaprobe_syntax::JavaSource;

#[derive(Debug, Parser)]
#[command(name = "stub-analyzer", version, about = "Pattern-rule analyzer used for offline campaigns")]
pub struct StubArgs {
    /// TOML rule file.
    #[arg(long)]
    pub rules: PathBuf,
    /// Directory of Java sources.
    #[arg(long)]
    pub input: PathBuf,
    /// SARIF report to write.
    #[arg(long)]
    pub output: PathBuf,
}

fn collect(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for e in std::fs::read_dir(dir)? {
        let p = e?.path();
        if p.is_dir() {
            collect(&p, out)?;
        } else if p.extension().is_some_and(|x| x == "java") {
            out.push(p);
        }
    }
    Ok(())
}

fn scan(args: &StubArgs, err: &mut dyn Write) -> anyhow::Result<i32> {
    let rules: stub::StubRules = toml::from_str(&std::fs::read_to_string(&args.rules)?)?;
    let mut files = Vec::new();
    collect(&args.input, &mut files)?;
    files.sort();
    for f in &files {
        let text = std::fs::read_to_string(f)?;
        let issues = JavaSource::parse_lenient(text).map(|s| s.syntax_issues()).unwrap_or_default();
        if let Some(i) = issues.first() {
            writeln!(err, "{}:{}:{}: cannot parse: {}", f.display(), i.line, i.column, i.message)?;
            return Ok(2);
        }
    }
    let findings = stub::scan(&rules, &args.input)?;
    std::fs::write(&args.output, to_sarif(&rules.tool, &findings))?;
    Ok(0)
}

pub fn run<'a, I, T>(args: I, out: &'a mut dyn Write, err: &'a mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match StubArgs::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match scan(&args, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "stub-analyzer: {e:#}");
            1
        }
    }
}
