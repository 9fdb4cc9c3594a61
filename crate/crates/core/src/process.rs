//! Subprocess execution with a wall-clock cap and placeholder expansion for
//! configured command templates.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use wait_timeout::ChildExt;

#[derive(Debug, Clone)]
pub struct ProcOutput {
    pub status: Option<i32>,
    pub stdout: String,
    pub stderr: String,
    pub timed_out: bool,
    pub elapsed: Duration,
}

impl ProcOutput {
    pub fn success(&self) -> bool {
        self.status == Some(0) && !self.timed_out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProcError {
    #[error("program '{0}' not found")]
    NotFound(String),
    #[error("empty command template")]
    Empty,
    #[error("cannot launch {program}: {source}")]
    Launch { program: String, source: std::io::Error },
}

/// Values substituted into `{name}` placeholders. A list value expands an
/// argument that consists solely of its placeholder into several arguments.
#[derive(Debug, Clone, Default)]
pub struct Vars {
    scalars: BTreeMap<String, String>,
    lists: BTreeMap<String, Vec<String>>,
}

impl Vars {
    pub fn new() -> Self {
        Vars::default()
    }

    pub fn set(&mut self, k: &str, v: impl Into<String>) -> &mut Self {
        self.scalars.insert(k.to_string(), v.into());
        self
    }

    pub fn set_list(&mut self, k: &str, v: Vec<String>) -> &mut Self {
        self.lists.insert(k.to_string(), v);
        self
    }

    pub fn expand(&self, template: &[String]) -> Vec<String> {
        let mut out = Vec::new();
        for arg in template {
            if let Some(name) = arg.strip_prefix('{').and_then(|a| a.strip_suffix('}')) {
                if let Some(list) = self.lists.get(name) {
                    out.extend(list.iter().cloned());
                    continue;
                }
            }
            // `--flag={list}` repeats the flag once per element.
            if let Some((flag, name)) = arg.strip_suffix('}').and_then(|a| a.rsplit_once("={")) {
                if let Some(list) = self.lists.get(name) {
                    out.extend(list.iter().map(|v| format!("{flag}={v}")));
                    continue;
                }
            }
            let mut s = arg.clone();
            for (k, v) in &self.scalars {
                s = s.replace(&format!("{{{k}}}"), v);
            }
            for (k, v) in &self.lists {
                s = s.replace(&format!("{{{k}}}"), &v.join(" "));
            }
            out.push(s);
        }
        out
    }
}

/// Finds `name` as given, next to the running executable (so binaries
/// built alongside this tool are found without installation), or on PATH.
pub fn resolve_program(name: &str) -> Option<PathBuf> {
    let p = Path::new(name);
    if p.components().count() > 1 {
        return p.exists().then(|| p.to_path_buf());
    }
    if let Ok(exe) = std::env::current_exe() {
        for dir in exe.ancestors().skip(1).take(2) {
            let cand = dir.join(name);
            if cand.is_file() {
                return Some(cand);
            }
        }
    }
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join(name)).find(|c| c.is_file())
}

pub fn run(argv: &[String], cwd: Option<&Path>, timeout: Duration) -> Result<ProcOutput, ProcError> {
    let (program, args) = argv.split_first().ok_or(ProcError::Empty)?;
    let resolved = resolve_program(program).ok_or_else(|| ProcError::NotFound(program.clone()))?;
    let mut cmd = Command::new(&resolved);
    cmd.args(args).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    if let Some(d) = cwd {
        cmd.current_dir(d);
    }
    let started = Instant::now();
    let mut child = cmd.spawn().map_err(|e| ProcError::Launch { program: program.clone(), source: e })?;
    let mut out_pipe = child.stdout.take().expect("piped stdout");
    let mut err_pipe = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = out_pipe.read_to_end(&mut buf);
        buf
    });
    let err_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = err_pipe.read_to_end(&mut buf);
        buf
    });
    let (status, timed_out) = match child.wait_timeout(timeout) {
        Ok(Some(st)) => (st.code(), false),
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            (None, true)
        }
        Err(e) => return Err(ProcError::Launch { program: program.clone(), source: e }),
    };
    let stdout = String::from_utf8_lossy(&out_reader.join().unwrap_or_default()).into_owned();
    let stderr = String::from_utf8_lossy(&err_reader.join().unwrap_or_default()).into_owned();
    Ok(ProcOutput { status, stdout, stderr, timed_out, elapsed: started.elapsed() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_placeholders_expand_to_several_arguments() {
        let mut v = Vars::new();
        v.set("out", "/o").set_list("sources", vec!["a.java".into(), "b.java".into()]);
        let t: Vec<String> = ["javac", "-d", "{out}", "{sources}", "--x={out}/y"].iter().map(|s| s.to_string()).collect();
        assert_eq!(v.expand(&t), vec!["javac", "-d", "/o", "a.java", "b.java", "--x=/o/y"]);
        let t = vec!["--select-class={sources}".to_string()];
        assert_eq!(v.expand(&t), vec!["--select-class=a.java", "--select-class=b.java"]);
    }

    #[test]
    fn timeout_kills_the_child() {
        let out = run(&["sleep".into(), "5".into()], None, Duration::from_millis(200)).unwrap();
        assert!(out.timed_out);
        assert!(out.elapsed < Duration::from_secs(3));
    }

    #[test]
    fn missing_program_is_reported() {
        assert!(matches!(run(&["definitely-not-a-program-xyz".into()], None, Duration::from_secs(1)), Err(ProcError::NotFound(_))));
    }
}
