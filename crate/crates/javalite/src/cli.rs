//! `javalite` command line: `compile` and `test` with javac/JUnit-like
//! options, so build templates written for the real tools carry over.

use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::check::{check, render, Input};
use crate::interp::{run_main, with_big_stack, Interp, Options};
use crate::junit::{run_class, test_classes, to_xml, RunOptions};

/// Extension of compiled units placed in output directories.
pub const UNIT_EXT: &str = "jls";

const USAGE: &str = "usage:
  javalite compile -d <dir> [-cp <path>] <file.java>...
  javalite test -cp <path> [-d <reports>] [--timeout-ms <n>] [<class>...]
  javalite run -cp <path> <class>";

struct Io<'a> {
    out: &'a mut dyn std::io::Write,
    err: &'a mut dyn std::io::Write,
}

/// Runs the tool; returns the process exit code.
pub fn run(args: &[String], out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    let mut io = Io { out, err };
    let Some((cmd, rest)) = args.split_first() else {
        let _ = writeln!(io.err, "{USAGE}");
        return 2;
    };
    match cmd.as_str() {
        "compile" => compile(rest, &mut io),
        "test" => test(rest, &mut io),
        "run" => run_cmd(rest, &mut io),
        "-h" | "--help" | "help" => {
            let _ = writeln!(io.out, "{USAGE}");
            0
        }
        other => {
            let _ = writeln!(io.err, "javalite: unknown command '{other}'\n{USAGE}");
            2
        }
    }
}

#[derive(Default)]
struct Opts {
    dest: Option<PathBuf>,
    classpath: Vec<PathBuf>,
    timeout_ms: Option<u64>,
    positional: Vec<String>,
}

fn parse(args: &[String]) -> Result<Opts, String> {
    let mut o = Opts::default();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let mut value = |name: &str| it.next().cloned().ok_or_else(|| format!("{name} requires an argument"));
        match a.as_str() {
            "-d" => o.dest = Some(PathBuf::from(value("-d")?)),
            "-cp" | "-classpath" | "--class-path" => {
                let v = value(a)?;
                o.classpath.extend(std::env::split_paths(&v).filter(|p| !p.as_os_str().is_empty()));
            }
            "--timeout-ms" => o.timeout_ms = Some(value(a)?.parse().map_err(|_| "--timeout-ms expects a number".to_string())?),
            // javac options without effect here
            "-encoding" | "-source" | "-target" | "--release" | "-sourcepath" | "-Xlint" => {
                value(a)?;
            }
            "-g" | "-nowarn" | "-deprecation" | "-parameters" | "-Xlint:none" => {}
            s if s.starts_with("-Xlint:") || s.starts_with("-J") => {}
            s if s.starts_with('@') => {
                let text = std::fs::read_to_string(&s[1..]).map_err(|e| format!("cannot read {}: {e}", &s[1..]))?;
                let nested: Vec<String> = text.split_whitespace().map(|w| w.trim_matches('"').to_string()).collect();
                let inner = parse(&nested)?;
                o.dest = inner.dest.or(o.dest);
                o.classpath.extend(inner.classpath);
                o.positional.extend(inner.positional);
            }
            s if s.starts_with('-') && s.len() > 1 => return Err(format!("invalid flag: {s}")),
            s => o.positional.push(s.to_string()),
        }
    }
    Ok(o)
}

fn collect_units(dir: &Path, out: &mut Vec<PathBuf>) {
    let Ok(rd) = std::fs::read_dir(dir) else { return };
    let mut entries: Vec<PathBuf> = rd.filter_map(|e| e.ok().map(|e| e.path())).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_units(&p, out);
        } else if p.extension().is_some_and(|e| e == UNIT_EXT) {
            out.push(p);
        }
    }
}

/// Compiled units on the classpath, named back to their `.java` form.
fn classpath_inputs(cp: &[PathBuf]) -> Result<Vec<Input>, String> {
    let mut files = Vec::new();
    for d in cp {
        if d.is_dir() {
            collect_units(d, &mut files);
        }
    }
    let mut inputs = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(|e| format!("cannot read {}: {e}", f.display()))?;
        inputs.push(Input { path: f.with_extension("java").to_string_lossy().into_owned(), text });
    }
    Ok(inputs)
}

fn package_of(src: &str) -> Option<String> {
    let re = regex::Regex::new(r"(?m)^\s*package\s+([\w.]+)\s*;").expect("package pattern");
    re.captures(src).map(|c| c[1].to_string())
}

fn compile(args: &[String], io: &mut Io<'_>) -> i32 {
    let o = match parse(args) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}\n{USAGE}");
            return 2;
        }
    };
    let Some(dest) = o.dest.clone() else {
        let _ = writeln!(io.err, "error: -d <dir> is required");
        return 2;
    };
    if o.positional.is_empty() {
        let _ = writeln!(io.err, "error: no source files");
        return 2;
    }
    let mut sources = Vec::new();
    for p in &o.positional {
        match std::fs::read_to_string(p) {
            Ok(text) => sources.push(Input { path: p.clone(), text }),
            Err(_) => {
                let _ = writeln!(io.err, "error: file not found: {p}");
                return 2;
            }
        }
    }
    let mut all = sources.clone();
    let own: Vec<String> = sources.iter().map(|s| unit_path(&dest, s)).collect();
    match classpath_inputs(&o.classpath) {
        // A unit already compiled from the same source is replaced, not duplicated.
        Ok(cp) => all.extend(cp.into_iter().filter(|i| !own.iter().any(|p| Path::new(p).with_extension("java") == Path::new(&i.path)))),
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            return 2;
        }
    }
    let result = with_big_stack(|| check(&all).map(|_| ()).map_err(|d| render(&d)));
    if let Err(text) = result {
        let _ = write!(io.err, "{text}");
        return 1;
    }
    for (s, target) in sources.iter().zip(&own) {
        let target = PathBuf::from(target);
        if let Some(parent) = target.parent() {
            if let Err(e) = std::fs::create_dir_all(parent) {
                let _ = writeln!(io.err, "error: cannot create {}: {e}", parent.display());
                return 2;
            }
        }
        if let Err(e) = std::fs::write(&target, &s.text) {
            let _ = writeln!(io.err, "error: cannot write {}: {e}", target.display());
            return 2;
        }
    }
    0
}

fn unit_path(dest: &Path, s: &Input) -> String {
    let stem = Path::new(&s.path).file_stem().map(|x| x.to_string_lossy().into_owned()).unwrap_or_default();
    let mut p = dest.to_path_buf();
    if let Some(pkg) = package_of(&s.text) {
        for part in pkg.split('.') {
            p.push(part);
        }
    }
    p.push(format!("{stem}.{UNIT_EXT}"));
    p.to_string_lossy().into_owned()
}

fn load(o: &Opts, io: &mut Io<'_>) -> Option<Vec<Input>> {
    match classpath_inputs(&o.classpath) {
        Ok(v) if !v.is_empty() => Some(v),
        Ok(_) => {
            let _ = writeln!(io.err, "error: no compiled units on the classpath");
            None
        }
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            None
        }
    }
}

fn test(args: &[String], io: &mut Io<'_>) -> i32 {
    let o = match parse(args) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}\n{USAGE}");
            return 2;
        }
    };
    let Some(inputs) = load(&o, io) else { return 2 };
    let reports = o.dest.clone();
    let timeout = Duration::from_millis(o.timeout_ms.unwrap_or(10_000));
    let wanted = o.positional.clone();
    let outcome = with_big_stack(move || -> Result<(String, Vec<(String, String)>, bool), String> {
        let prog = check(&inputs).map_err(|d| render(&d))?;
        let mut classes = test_classes(&prog);
        if !wanted.is_empty() {
            classes.retain(|c| {
                let cls = &prog.classes[*c];
                wanted.iter().any(|w| *w == cls.binary_name || *w == cls.name)
            });
        }
        let mut it = Interp::new(&prog, Options::default());
        let opts = RunOptions { default_timeout: timeout };
        let mut summary = String::new();
        let mut files = Vec::new();
        let (mut run, mut fail, mut err) = (0, 0, 0);
        for c in classes {
            let suite = run_class(&mut it, c, &opts);
            run += suite.cases.len();
            fail += suite.failures();
            err += suite.errors();
            summary.push_str(&format!(
                "Running {}\nTests run: {}, Failures: {}, Errors: {}, Skipped: 0, Time elapsed: {:.3} s\n",
                suite.name,
                suite.cases.len(),
                suite.failures(),
                suite.errors(),
                suite.time.as_secs_f64()
            ));
            files.push((format!("TEST-{}.xml", suite.name), to_xml(&suite)));
        }
        summary.push_str(&format!("\nResults:\n\nTests run: {run}, Failures: {fail}, Errors: {err}, Skipped: 0\n"));
        Ok((summary, files, fail + err == 0))
    });
    match outcome {
        Err(diags) => {
            let _ = write!(io.err, "{diags}");
            2
        }
        Ok((summary, files, ok)) => {
            let _ = write!(io.out, "{summary}");
            if let Some(dir) = reports {
                if let Err(e) = std::fs::create_dir_all(&dir) {
                    let _ = writeln!(io.err, "error: cannot create {}: {e}", dir.display());
                    return 2;
                }
                for (name, xml) in files {
                    if let Err(e) = std::fs::write(dir.join(&name), xml) {
                        let _ = writeln!(io.err, "error: cannot write {name}: {e}");
                        return 2;
                    }
                }
            }
            if ok {
                0
            } else {
                1
            }
        }
    }
}

fn run_cmd(args: &[String], io: &mut Io<'_>) -> i32 {
    let o = match parse(args) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}\n{USAGE}");
            return 2;
        }
    };
    let Some(main) = o.positional.first().cloned() else {
        let _ = writeln!(io.err, "error: main class required");
        return 2;
    };
    let Some(inputs) = load(&o, io) else { return 2 };
    let deadline = o.timeout_ms.map(|ms| std::time::Instant::now() + Duration::from_millis(ms));
    let r = with_big_stack(move || -> Result<Option<crate::interp::MainResult>, String> {
        let prog = check(&inputs).map_err(|d| render(&d))?;
        Ok(run_main(&prog, &main, Options::default(), deadline))
    });
    match r {
        Err(d) => {
            let _ = write!(io.err, "{d}");
            2
        }
        Ok(None) => {
            let _ = writeln!(io.err, "error: could not find or load main class {}", o.positional[0]);
            1
        }
        Ok(Some(res)) => {
            let _ = write!(io.out, "{}", res.stdout);
            let _ = write!(io.err, "{}", res.stderr);
            if let Some(u) = res.uncaught {
                let _ = write!(io.err, "{u}");
                return 1;
            }
            if res.timed_out {
                let _ = writeln!(io.err, "error: timed out");
                return 1;
            }
            0
        }
    }
}
