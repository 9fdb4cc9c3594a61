//! Text-generation backends behind one interface, with per-task sampling
//! defaults and an append-only transcript of every exchange.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub text: String,
}

impl Message {
    pub fn system(text: impl Into<String>) -> Self {
        Message { role: Role::System, text: text.into() }
    }

    pub fn user(text: impl Into<String>) -> Self {
        Message { role: Role::User, text: text.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Generation,
    Validation,
}

/// Sampling defaults applied by the gateway when a request does not
/// override them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    pub generation: f64,
    pub validation: f64,
    pub max_output_tokens: u32,
    pub top_p: Option<f64>,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { generation: 0.75, validation: 0.1, max_output_tokens: 4096, top_p: None }
    }
}

impl Sampling {
    pub fn temperature(&self, kind: TaskKind) -> f64 {
        match kind {
            TaskKind::Generation => self.generation,
            TaskKind::Validation => self.validation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptRequest {
    /// Job the request belongs to (`analyzer/rule`); selects script queues.
    pub job: String,
    /// Pipeline step, e.g. `seed.generate`.
    pub purpose: String,
    /// Prompt template reference (`id@version`).
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub template: String,
    pub task_kind: TaskKind,
    pub temperature: f64,
    pub max_output_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_p: Option<f64>,
    pub messages: Vec<Message>,
}

impl PromptRequest {
    pub fn with_temperature(mut self, t: f64) -> Self {
        self.temperature = t;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt: u64,
    pub completion: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    pub backend_id: String,
    pub latency: Duration,
    pub token_usage: Option<TokenUsage>,
    /// Sequence number of this exchange in the job transcript.
    pub seq: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("authentication rejected by {backend}: {message}")]
    Auth { backend: String, message: String },
    #[error("backend {backend} rejected the request: {message}")]
    Rejected { backend: String, message: String },
    #[error("scripted backend exhausted for job '{job}' at {purpose} (fixture bug)")]
    Exhausted { job: String, purpose: String },
    #[error("scripted response for job '{job}' expects {expected}, request was {actual} (fixture bug)")]
    ScriptMismatch { job: String, expected: String, actual: String },
    #[error("invalid backend configuration: {0}")]
    Config(String),
    #[error("transcript I/O: {0}")]
    Transcript(#[from] std::io::Error),
}

pub trait Backend: Send + Sync {
    fn id(&self) -> &str;
    /// Returns the raw output; `seq` is filled by the gateway.
    fn complete(&self, request: &PromptRequest) -> Result<Completion, GatewayError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub seq: u64,
    pub request: PromptRequest,
    pub backend_id: String,
    pub completion: String,
    pub latency_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_usage: Option<TokenUsage>,
}

/// Exchanges of one job, mirrored to a JSON-lines file when it has a path.
#[derive(Debug, Default)]
pub struct Transcript {
    path: Option<PathBuf>,
    entries: Mutex<Vec<TranscriptEntry>>,
}

impl Transcript {
    pub fn in_memory() -> Self {
        Transcript::default()
    }

    /// Opens (or creates) a transcript file, keeping earlier entries so
    /// sequence numbers continue across resumed runs.
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let entries = if path.exists() { read_transcript(path)? } else { Vec::new() };
        Ok(Transcript { path: Some(path.to_path_buf()), entries: Mutex::new(entries) })
    }

    pub fn entries(&self) -> Vec<TranscriptEntry> {
        self.entries.lock().expect("transcript lock").clone()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("transcript lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn record(&self, request: &PromptRequest, c: &Completion) -> Result<u64, GatewayError> {
        let mut entries = self.entries.lock().expect("transcript lock");
        let seq = entries.last().map(|e| e.seq + 1).unwrap_or(1);
        let entry = TranscriptEntry {
            seq,
            request: request.clone(),
            backend_id: c.backend_id.clone(),
            completion: c.text.clone(),
            latency_ms: c.latency.as_millis() as u64,
            token_usage: c.token_usage,
        };
        if let Some(path) = &self.path {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{}", serde_json::to_string(&entry).expect("entry serializes"))?;
        }
        entries.push(entry);
        Ok(seq)
    }
}

pub fn read_transcript(path: &Path) -> std::io::Result<Vec<TranscriptEntry>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
        .collect()
}

#[derive(Clone)]
pub struct Gateway {
    backend: Arc<dyn Backend>,
    sampling: Sampling,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway").field("backend", &self.backend.id()).field("sampling", &self.sampling).finish()
    }
}

impl Gateway {
    pub fn new(backend: Arc<dyn Backend>, sampling: Sampling) -> Self {
        Gateway { backend, sampling }
    }

    pub fn backend_id(&self) -> &str {
        self.backend.id()
    }

    pub fn sampling(&self) -> &Sampling {
        &self.sampling
    }

    /// Builds a request with the sampling defaults for `kind`.
    pub fn request(&self, kind: TaskKind, job: &str, purpose: &str, messages: Vec<Message>) -> PromptRequest {
        PromptRequest {
            job: job.to_string(),
            purpose: purpose.to_string(),
            template: String::new(),
            task_kind: kind,
            temperature: self.sampling.temperature(kind),
            max_output_tokens: self.sampling.max_output_tokens,
            top_p: self.sampling.top_p,
            messages,
        }
    }

    pub fn complete(&self, request: &PromptRequest, transcript: &Transcript) -> Result<Completion, GatewayError> {
        let mut c = self.backend.complete(request)?;
        if c.text.trim().is_empty() {
            log::warn!("{} returned an empty completion for {} ({})", c.backend_id, request.job, request.purpose);
        }
        c.seq = transcript.record(request, &c)?;
        Ok(c)
    }
}

/// Requests issued on behalf of one job.
#[derive(Debug, Clone, Copy)]
pub struct Session<'a> {
    pub gateway: &'a Gateway,
    pub transcript: &'a Transcript,
    pub job: &'a str,
}

impl Session<'_> {
    pub fn ask(&self, kind: TaskKind, purpose: &str, messages: Vec<Message>) -> Result<Completion, GatewayError> {
        let req = self.gateway.request(kind, self.job, purpose, messages);
        self.gateway.complete(&req, self.transcript)
    }

    pub fn ask_prompt(&self, kind: TaskKind, prompt: &crate::prompts::Prompt) -> Result<Completion, GatewayError> {
        let mut req = self.gateway.request(kind, self.job, prompt.template.id(), prompt.messages.clone());
        req.template = prompt.template.reference();
        self.gateway.complete(&req, self.transcript)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScriptEntry {
    Text(String),
    Detailed {
        text: String,
        /// Answer every further request of the queue with this text.
        #[serde(default)]
        repeat: bool,
        /// Purpose the request must have; catches misaligned fixtures.
        #[serde(default)]
        purpose: Option<String>,
    },
}

impl ScriptEntry {
    fn text(&self) -> &str {
        match self {
            ScriptEntry::Text(t) | ScriptEntry::Detailed { text: t, .. } => t,
        }
    }

    fn repeats(&self) -> bool {
        matches!(self, ScriptEntry::Detailed { repeat: true, .. })
    }

    fn purpose(&self) -> Option<&str> {
        match self {
            ScriptEntry::Detailed { purpose: Some(p), .. } => Some(p),
            _ => None,
        }
    }
}

/// Script file: a shared `default` queue plus per-job queues keyed by
/// `analyzer/rule`, so concurrently running jobs stay deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Script {
    #[serde(default)]
    pub default: Vec<ScriptEntry>,
    #[serde(default)]
    pub queues: BTreeMap<String, Vec<ScriptEntry>>,
}

/// Queue contents and read cursor; `None` keys the shared default queue.
type Queues = BTreeMap<Option<String>, (Vec<ScriptEntry>, usize)>;

#[derive(Debug)]
pub struct ScriptedBackend {
    id: String,
    state: Mutex<Queues>,
}

impl ScriptedBackend {
    pub fn new(id: impl Into<String>, script: Script) -> Self {
        let mut state = BTreeMap::new();
        state.insert(None, (script.default, 0));
        for (k, v) in script.queues {
            state.insert(Some(k), (v, 0));
        }
        ScriptedBackend { id: id.into(), state: Mutex::new(state) }
    }

    pub fn from_file(id: impl Into<String>, path: &Path) -> Result<Self, GatewayError> {
        let text = std::fs::read_to_string(path).map_err(|e| GatewayError::Config(format!("cannot read script {}: {e}", path.display())))?;
        let script: Script = serde_json::from_str(&text).map_err(|e| GatewayError::Config(format!("invalid script {}: {e}", path.display())))?;
        Ok(ScriptedBackend::new(id, script))
    }

    /// Replays recorded completions in their original per-job order.
    pub fn from_transcript(id: impl Into<String>, entries: &[TranscriptEntry]) -> Self {
        let mut script = Script::default();
        for e in entries {
            script.queues.entry(e.request.job.clone()).or_default().push(ScriptEntry::Detailed {
                text: e.completion.clone(),
                repeat: false,
                purpose: Some(e.request.purpose.clone()),
            });
        }
        ScriptedBackend::new(id, script)
    }

    /// Every request gets `text`.
    pub fn always(id: impl Into<String>, text: impl Into<String>) -> Self {
        ScriptedBackend::new(id, Script { default: vec![ScriptEntry::Detailed { text: text.into(), repeat: true, purpose: None }], queues: BTreeMap::new() })
    }
}

impl Backend for ScriptedBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, request: &PromptRequest) -> Result<Completion, GatewayError> {
        let started = Instant::now();
        let mut state = self.state.lock().expect("script lock");
        let key = if state.contains_key(&Some(request.job.clone())) { Some(request.job.clone()) } else { None };
        let (queue, cursor) = state.get_mut(&key).expect("queue present");
        // A repeating entry is sticky: it answers every later request.
        let Some(entry) = queue.get(*cursor).cloned() else {
            return Err(GatewayError::Exhausted { job: request.job.clone(), purpose: request.purpose.clone() });
        };
        if let Some(p) = entry.purpose() {
            if p != request.purpose {
                return Err(GatewayError::ScriptMismatch { job: request.job.clone(), expected: p.to_string(), actual: request.purpose.clone() });
            }
        }
        if !entry.repeats() {
            *cursor += 1;
        }
        Ok(Completion { text: entry.text().to_string(), backend_id: self.id.clone(), latency: started.elapsed(), token_usage: None, seq: 0 })
    }
}

/// OpenAI-compatible chat-completions endpoint.
#[derive(Debug)]
pub struct HttpBackend {
    id: String,
    endpoint: String,
    model: String,
    api_key: Option<String>,
    retries: u32,
    backoff: Duration,
    client: reqwest::blocking::Client,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpBackendConfig {
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the bearer token.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    #[serde(default = "default_timeout_s")]
    pub timeout_s: u64,
}

fn default_retries() -> u32 {
    3
}

fn default_backoff_ms() -> u64 {
    1000
}

fn default_timeout_s() -> u64 {
    300
}

impl HttpBackend {
    pub fn new(id: impl Into<String>, cfg: &HttpBackendConfig) -> Result<Self, GatewayError> {
        let api_key = match &cfg.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| GatewayError::Config(format!("environment variable {var} is not set")))?),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_s))
            .build()
            .map_err(|e| GatewayError::Config(e.to_string()))?;
        Ok(HttpBackend {
            id: id.into(),
            endpoint: cfg.endpoint.trim_end_matches('/').to_string(),
            model: cfg.model.clone(),
            api_key,
            retries: cfg.retries,
            backoff: Duration::from_millis(cfg.backoff_ms),
            client,
        })
    }

    fn body(&self, r: &PromptRequest) -> serde_json::Value {
        let messages: Vec<_> = r.messages.iter().map(|m| serde_json::json!({"role": m.role, "content": m.text})).collect();
        let mut body = serde_json::json!({
            "model": self.model,
            "messages": messages,
            "temperature": r.temperature,
            "max_tokens": r.max_output_tokens,
        });
        if let Some(p) = r.top_p {
            body["top_p"] = serde_json::json!(p);
        }
        body
    }
}

impl Backend for HttpBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, request: &PromptRequest) -> Result<Completion, GatewayError> {
        let url = if self.endpoint.ends_with("/chat/completions") { self.endpoint.clone() } else { format!("{}/chat/completions", self.endpoint) };
        let body = self.body(request);
        let started = Instant::now();
        let mut last = String::new();
        for attempt in 0..=self.retries {
            if attempt > 0 {
                std::thread::sleep(self.backoff * 2u32.saturating_pow(attempt - 1));
            }
            let mut req = self.client.post(&url).json(&body);
            if let Some(k) = &self.api_key {
                req = req.bearer_auth(k);
            }
            let resp = match req.send() {
                Ok(r) => r,
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            };
            let status = resp.status();
            if status.as_u16() == 401 || status.as_u16() == 403 {
                return Err(GatewayError::Auth { backend: self.id.clone(), message: resp.text().unwrap_or_default() });
            }
            if status.is_server_error() || status.as_u16() == 429 {
                last = format!("HTTP {status}");
                continue;
            }
            if !status.is_success() {
                return Err(GatewayError::Rejected { backend: self.id.clone(), message: format!("HTTP {status}: {}", resp.text().unwrap_or_default()) });
            }
            let v: serde_json::Value = match resp.json() {
                Ok(v) => v,
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            };
            let text = v["choices"][0]["message"]["content"].as_str().unwrap_or_default().to_string();
            let token_usage = v.get("usage").map(|u| TokenUsage {
                prompt: u["prompt_tokens"].as_u64().unwrap_or(0),
                completion: u["completion_tokens"].as_u64().unwrap_or(0),
            });
            return Ok(Completion { text, backend_id: self.id.clone(), latency: started.elapsed(), token_usage, seq: 0 });
        }
        Err(GatewayError::Transport { attempts: self.retries + 1, message: last })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Artifact {
    SourceFile,
    TestFile,
}

#[derive(Debug, thiserror::Error)]
#[error("completion contains no extractable {0:?}")]
pub struct NoCode(pub Artifact);

/// Body of the first fenced block, or the whole reply when it has none.
pub fn extract_code_block(text: &str, expected: Artifact) -> Result<String, NoCode> {
    let mut lines = text.lines();
    let mut body = None;
    while let Some(l) = lines.next() {
        let t = l.trim_start();
        if let Some(rest) = t.strip_prefix("```") {
            let fence_len = 3 + rest.chars().take_while(|c| *c == '`').count();
            let fence = "`".repeat(fence_len);
            let mut block = Vec::new();
            for inner in lines.by_ref() {
                if inner.trim() == fence || inner.trim_start().starts_with(&fence) && inner.trim().chars().all(|c| c == '`') {
                    break;
                }
                block.push(inner);
            }
            body = Some(block.join("\n"));
            break;
        }
    }
    let code = match body {
        Some(b) => b,
        None => text.to_string(),
    };
    let code = code.trim_matches('\n').trim_end().to_string();
    if code.trim().is_empty() {
        return Err(NoCode(expected));
    }
    Ok(format!("{code}\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gw(backend: ScriptedBackend) -> Gateway {
        Gateway::new(Arc::new(backend), Sampling::default())
    }

    #[test]
    fn scripted_queue_then_exhaustion() {
        let g = gw(ScriptedBackend::new("s", Script { default: vec![ScriptEntry::Text("A".into()), ScriptEntry::Text("B".into())], queues: BTreeMap::new() }));
        let t = Transcript::in_memory();
        let s = Session { gateway: &g, transcript: &t, job: "x/y" };
        assert_eq!(s.ask(TaskKind::Generation, "p", vec![]).unwrap().text, "A");
        assert_eq!(s.ask(TaskKind::Generation, "p", vec![]).unwrap().text, "B");
        assert!(matches!(s.ask(TaskKind::Generation, "p", vec![]), Err(GatewayError::Exhausted { .. })));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn per_job_queues_take_precedence() {
        let mut queues = BTreeMap::new();
        queues.insert("a/r".to_string(), vec![ScriptEntry::Text("mine".into())]);
        let g = gw(ScriptedBackend::new("s", Script { default: vec![ScriptEntry::Text("shared".into())], queues }));
        let t = Transcript::in_memory();
        assert_eq!(Session { gateway: &g, transcript: &t, job: "a/r" }.ask(TaskKind::Generation, "p", vec![]).unwrap().text, "mine");
        assert_eq!(Session { gateway: &g, transcript: &t, job: "b/r" }.ask(TaskKind::Generation, "p", vec![]).unwrap().text, "shared");
    }

    #[test]
    fn default_temperatures_by_task() {
        let g = gw(ScriptedBackend::always("s", "x"));
        assert_eq!(g.request(TaskKind::Generation, "j", "p", vec![]).temperature, 0.75);
        assert_eq!(g.request(TaskKind::Validation, "j", "p", vec![]).temperature, 0.1);
        assert_eq!(g.request(TaskKind::Validation, "j", "p", vec![]).with_temperature(0.5).temperature, 0.5);
    }

    #[test]
    fn repeat_entry_never_exhausts() {
        let g = gw(ScriptedBackend::always("s", "same"));
        let t = Transcript::in_memory();
        let s = Session { gateway: &g, transcript: &t, job: "j" };
        for _ in 0..7 {
            assert_eq!(s.ask(TaskKind::Validation, "p", vec![]).unwrap().text, "same");
        }
        let seqs: Vec<u64> = t.entries().iter().map(|e| e.seq).collect();
        assert_eq!(seqs, (1..=7).collect::<Vec<_>>());
    }

    #[test]
    fn purpose_mismatch_is_a_fixture_error() {
        let g = gw(ScriptedBackend::new(
            "s",
            Script { default: vec![ScriptEntry::Detailed { text: "x".into(), repeat: false, purpose: Some("seed.generate".into()) }], queues: BTreeMap::new() },
        ));
        let t = Transcript::in_memory();
        let r = Session { gateway: &g, transcript: &t, job: "j" }.ask(TaskKind::Generation, "test.generate", vec![]);
        assert!(matches!(r, Err(GatewayError::ScriptMismatch { .. })));
    }

    #[test]
    fn transcript_replay_reproduces_completions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        let g = gw(ScriptedBackend::new("s", Script { default: vec![ScriptEntry::Text("one".into()), ScriptEntry::Text("two".into())], queues: BTreeMap::new() }));
        {
            let t = Transcript::open(&path).unwrap();
            let s = Session { gateway: &g, transcript: &t, job: "a/b" };
            s.ask(TaskKind::Generation, "p1", vec![Message::user("hi")]).unwrap();
            s.ask(TaskKind::Validation, "p2", vec![]).unwrap();
        }
        let entries = read_transcript(&path).unwrap();
        assert_eq!(entries.len(), 2);
        let replay = gw(ScriptedBackend::from_transcript("s", &entries));
        let t = Transcript::in_memory();
        let s = Session { gateway: &replay, transcript: &t, job: "a/b" };
        assert_eq!(s.ask(TaskKind::Generation, "p1", vec![]).unwrap().text, "one");
        assert_eq!(s.ask(TaskKind::Validation, "p2", vec![]).unwrap().text, "two");
        let reopened = Transcript::open(&path).unwrap();
        assert_eq!(reopened.len(), 2);
    }

    #[test]
    fn code_block_extraction() {
        assert_eq!(extract_code_block("here is code:\n```\nX\n```", Artifact::SourceFile).unwrap(), "X\n");
        assert_eq!(extract_code_block("```java\nA\n```\ntext\n```\nB\n```", Artifact::SourceFile).unwrap(), "A\n");
        assert_eq!(extract_code_block("class A {}", Artifact::SourceFile).unwrap(), "class A {}\n");
        assert!(extract_code_block("```\n\n```", Artifact::TestFile).is_err());
        assert!(extract_code_block("   ", Artifact::TestFile).is_err());
    }
}
