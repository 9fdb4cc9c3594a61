//! Command-line front end. `run` parses arguments and returns the process
//! exit code so tests can drive the binary in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use metaprobe_core::config::CampaignConfig;
use metaprobe_core::evaluator::ManualLabel;
use metaprobe_core::orchestrator::{Campaign, CampaignError, JobOutcome, Selection, StageReport};
use metaprobe_core::workspace::Stage;

pub mod stub;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_FAILURES: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "metaprobe", version, about = "Metamorphic testing of static analyzer rules")]
pub struct Cli {
    /// Campaign configuration file.
    #[arg(short, long, global = true, default_value = "metaprobe.toml")]
    pub config: PathBuf,
    /// Log more (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Filter {
    /// Comma-separated rule patterns (`RULE`, `analyzer/RULE`, `*` globs).
    #[arg(long)]
    pub rules: Option<String>,
    /// Only rules of this analyzer.
    #[arg(long)]
    pub analyzer: Option<String>,
}

impl Filter {
    fn selection(&self) -> Selection {
        Selection { rules: self.rules.clone(), analyzer: self.analyzer.clone() }
    }
}

#[derive(Debug, Clone, Args)]
pub struct StageArgs {
    #[command(flatten)]
    pub filter: Filter,
    /// Redo the stage and mark later stages stale.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and filter the rule catalog into the workspace.
    Catalog(Filter),
    /// Generate seed programs.
    Generate(StageArgs),
    /// Generate and judge tests for the seeds.
    Validate(StageArgs),
    /// Produce and certify equivalent mutants.
    Mutate(StageArgs),
    /// Run the analyzers over seeds and mutants.
    Analyze(StageArgs),
    /// Classify each rule and write its bug report.
    Evaluate(StageArgs),
    /// Write summary.json and summary.md.
    Report {
        #[command(flatten)]
        filter: Filter,
        /// Summarize even when some rules have not finished.
        #[arg(long)]
        allow_incomplete: bool,
        /// Print the JSON summary instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Label a bug report after manual inspection.
    Review {
        /// `analyzer/rule`.
        #[arg(long)]
        bug: String,
        /// tp, fp or unreviewed.
        #[arg(long)]
        label: ManualLabel,
        #[arg(long)]
        root_cause: Option<String>,
    },
    /// Every stage in order, then the report.
    Run(Filter),
}

fn exit_code(e: &CampaignError) -> i32 {
    match e {
        CampaignError::Config(_) | CampaignError::Catalog(_) => EXIT_CONFIG,
        CampaignError::Usage(_) | CampaignError::Incomplete(_) => EXIT_USAGE,
        CampaignError::Io { .. } => EXIT_INTERNAL,
    }
}

fn print_stage(out: &mut dyn Write, r: &StageReport) -> std::io::Result<()> {
    let n = |f: fn(&JobOutcome) -> bool| r.count(f);
    writeln!(
        out,
        "{}: {} done, {} skipped, {} failed, {} blocked",
        r.stage,
        n(|o| matches!(o, JobOutcome::Done)),
        n(|o| matches!(o, JobOutcome::Skipped)),
        n(|o| matches!(o, JobOutcome::Failed(_))),
        n(|o| matches!(o, JobOutcome::Blocked(_)))
    )?;
    for (k, reason) in r.failures() {
        writeln!(out, "  failed {k}: {}", reason.lines().next().unwrap_or_default())?;
    }
    for (k, reason) in r.blocked() {
        writeln!(out, "  blocked {k}: {reason}")?;
    }
    Ok(())
}

fn stage_code(reports: &[StageReport]) -> i32 {
    if reports.iter().any(|r| r.failures().next().is_some()) {
        EXIT_FAILURES
    } else if reports.iter().any(|r| r.blocked().next().is_some()) {
        EXIT_USAGE
    } else {
        EXIT_OK
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CampaignError> {
    let config = CampaignConfig::load(&cli.config)?;
    let campaign = Campaign::open(config)?;
    let io = |e: std::io::Error| CampaignError::Io { path: "<stdout>".into(), source: e };
    let stage = |s: Stage, a: &StageArgs, out: &mut dyn Write| -> Result<i32, CampaignError> {
        let r = campaign.run_stage(s, &a.filter.selection(), a.force)?;
        print_stage(out, &r).map_err(io)?;
        Ok(stage_code(&[r]))
    };
    match &cli.command {
        Command::Catalog(f) => {
            let r = campaign.catalog(&f.selection())?;
            writeln!(out, "catalog: {} rules loaded, {} selected", r.loaded, r.selected).map_err(io)?;
            for (a, cats) in &r.stats {
                for (c, n) in cats {
                    writeln!(out, "  {a} {c}: {n}").map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Generate(a) => stage(Stage::Seeded, a, out),
        Command::Validate(a) => stage(Stage::Validated, a, out),
        Command::Mutate(a) => stage(Stage::Mutated, a, out),
        Command::Analyze(a) => stage(Stage::Analyzed, a, out),
        Command::Evaluate(a) => stage(Stage::Evaluated, a, out),
        Command::Report { filter, allow_incomplete, json } => {
            let s = campaign.report(&filter.selection(), *allow_incomplete)?;
            let text = if *json { s.to_json() } else { s.to_markdown() };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Review { bug, label, root_cause } => {
            let r = campaign.review(bug, *label, root_cause.clone())?;
            writeln!(out, "{}: {} labeled {:?}{}", r.id, r.verdict.kind, r.manual_label, r.root_cause_tag.map(|t| format!(", root cause {t}")).unwrap_or_default())
                .map_err(io)?;
            if campaign.workspace.summary_json().is_file() {
                campaign.report(&Selection::default(), true)?;
            }
            Ok(EXIT_OK)
        }
        Command::Run(f) => {
            let (reports, summary) = campaign.run(&f.selection())?;
            for r in &reports {
                print_stage(out, r).map_err(io)?;
            }
            out.write_all(summary.to_markdown().as_bytes()).map_err(io)?;
            Ok(stage_code(&reports))
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<'a, I, T>(args: I, out: &'a mut dyn Write, err: &'a mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).is_test(cfg!(test)).try_init();
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
