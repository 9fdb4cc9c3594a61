//! Campaign configuration file (TOML). Relative paths resolve against the
//! directory holding the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analyzer::AnalyzerConfig;
use crate::build::{CommandToolchain, Javalite, Limits, Toolchain};
use crate::catalog::{Category, FilterPolicy};
use crate::gateway::{Backend, HttpBackend, HttpBackendConfig, ScriptedBackend};
use crate::mutation::Operator;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Requests per refinement loop (seed, test, each mutant).
    pub max_attempts: u32,
    pub variants_per_operator: u32,
    /// Fresh seeds after a discard, and fresh tests after an invalid verdict.
    pub regeneration_limit: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_attempts: 5, variants_per_operator: 3, regeneration_limit: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Temperatures {
    pub generation: f64,
    pub validation: f64,
}

impl Default for Temperatures {
    fn default() -> Self {
        Temperatures { generation: 0.75, validation: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendConfig {
    Scripted {
        #[serde(default = "scripted_id")]
        id: String,
        script: PathBuf,
    },
    Http {
        id: String,
        #[serde(flatten)]
        http: HttpBackendConfig,
    },
}

fn scripted_id() -> String {
    "scripted".into()
}

impl BackendConfig {
    pub fn id(&self) -> &str {
        match self {
            BackendConfig::Scripted { id, .. } | BackendConfig::Http { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ToolchainConfig {
    #[default]
    Javalite,
    Command(CommandToolchain),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationMode {
    #[default]
    Deterministic,
    Llm,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationConfig {
    pub mode: MutationMode,
    /// Operators to try; all ten when empty.
    pub operators: Vec<Operator>,
    /// Ask the model which operators apply (model mode only); otherwise the
    /// syntactic preconditions decide.
    pub llm_applicability: bool,
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig { mode: MutationMode::Deterministic, operators: Vec::new(), llm_applicability: true }
    }
}

impl MutationConfig {
    pub fn operator_set(&self) -> BTreeSet<Operator> {
        if self.operators.is_empty() {
            Operator::ALL.into_iter().collect()
        } else {
            self.operators.iter().copied().collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Empty keeps every category.
    pub categories: Vec<Category>,
    pub excluded_tags: Vec<String>,
    /// Default rule selector, e.g. `spotbugs/*`.
    pub rules: Option<String>,
}

impl FilterConfig {
    pub fn policy(&self) -> FilterPolicy {
        if self.categories.is_empty() {
            let mut p = FilterPolicy::all();
            p.excluded_tags = self.excluded_tags.iter().cloned().collect();
            return p;
        }
        FilterPolicy { included_categories: self.categories.iter().copied().collect(), excluded_tags: self.excluded_tags.iter().cloned().collect() }
    }
}

/// An analyzer given inline or as a path to its own TOML file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnalyzerEntry {
    File { config: PathBuf },
    Inline(AnalyzerConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub catalog: PathBuf,
    pub workspace_root: PathBuf,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub temperatures: Temperatures,
    #[serde(default = "default_max_tokens")]
    pub max_output_tokens: u32,
    /// Sent only when set.
    #[serde(default)]
    pub top_p: Option<f64>,
    pub backend: BackendConfig,
    #[serde(default)]
    pub toolchain: ToolchainConfig,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default)]
    pub mutation: MutationConfig,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default)]
    pub analyzers: Vec<AnalyzerEntry>,
    /// Set by `load`; not part of the file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_parallelism() -> usize {
    1
}

fn default_max_tokens() -> u32 {
    4096
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.display().to_string(), source })
}

impl CampaignConfig {
    pub fn load(path: &Path) -> Result<CampaignConfig, ConfigError> {
        let text = read(path)?;
        let mut cfg: CampaignConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse { path: path.display().to_string(), message: e.to_string() })?;
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        cfg.base_dir = dir.canonicalize().map_err(|source| ConfigError::Read { path: dir.display().to_string(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let b = &self.budgets;
        if b.max_attempts == 0 || b.variants_per_operator == 0 {
            return Err(ConfigError::Invalid("budgets.max_attempts and budgets.variants_per_operator must be positive".into()));
        }
        if self.parallelism == 0 {
            return Err(ConfigError::Invalid("parallelism must be positive".into()));
        }
        for (name, t) in [("generation", self.temperatures.generation), ("validation", self.temperatures.validation)] {
            if !(0.0..=2.0).contains(&t) {
                return Err(ConfigError::Invalid(format!("temperatures.{name} = {t} is outside 0..=2")));
            }
        }
        if self.top_p.is_some_and(|p| !(0.0..=1.0).contains(&p)) {
            return Err(ConfigError::Invalid("top_p must be within 0..=1".into()));
        }
        if self.mutation.mode != MutationMode::Llm && self.mutation.operator_set().is_empty() {
            return Err(ConfigError::Invalid("mutation.operators is empty".into()));
        }
        Ok(())
    }

    pub fn analyzer_configs(&self) -> Result<Vec<AnalyzerConfig>, ConfigError> {
        let mut out: Vec<AnalyzerConfig> = Vec::new();
        for e in &self.analyzers {
            let a = match e {
                AnalyzerEntry::Inline(a) => a.clone(),
                AnalyzerEntry::File { config } => {
                    let p = self.resolve(config);
                    toml::from_str(&read(&p)?).map_err(|e| ConfigError::Parse { path: p.display().to_string(), message: e.to_string() })?
                }
            };
            a.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
            if out.iter().any(|o| o.analyzer_id == a.analyzer_id) {
                return Err(ConfigError::Invalid(format!("analyzer '{}' is configured twice", a.analyzer_id)));
            }
            out.push(self.resolve_analyzer(a));
        }
        Ok(out)
    }

    /// Makes a leading relative program path in the invocation, and any
    /// `vars` value naming an existing file next to the config, absolute.
    fn resolve_analyzer(&self, mut a: AnalyzerConfig) -> AnalyzerConfig {
        for v in a.vars.values_mut() {
            let p = Path::new(v.as_str());
            if !p.is_absolute() && self.resolve(p).exists() {
                *v = self.resolve(p).display().to_string();
            }
        }
        for argv in [&mut a.invocation, &mut a.version_probe] {
            if let Some(first) = argv.first_mut() {
                if first.contains('/') && !Path::new(first.as_str()).is_absolute() {
                    *first = self.resolve(Path::new(first.as_str())).display().to_string();
                }
            }
        }
        a
    }

    pub fn backend(&self) -> Result<Arc<dyn Backend>, ConfigError> {
        match &self.backend {
            BackendConfig::Scripted { id, script } => {
                Ok(Arc::new(ScriptedBackend::from_file(id.clone(), &self.resolve(script)).map_err(|e| ConfigError::Invalid(e.to_string()))?))
            }
            BackendConfig::Http { id, http } => Ok(Arc::new(HttpBackend::new(id.clone(), http).map_err(|e| ConfigError::Invalid(e.to_string()))?)),
        }
    }

    pub fn toolchain(&self) -> Box<dyn Toolchain> {
        match &self.toolchain {
            ToolchainConfig::Javalite => Box::new(Javalite),
            ToolchainConfig::Command(c) => Box::new(c.clone()),
        }
    }

    pub fn sampling(&self) -> crate::gateway::Sampling {
        crate::gateway::Sampling {
            generation: self.temperatures.generation,
            validation: self.temperatures.validation,
            max_output_tokens: self.max_output_tokens,
            top_p: self.top_p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_method() {
        let cfg: CampaignConfig = toml::from_str("catalog = \"c.jsonl\"\nworkspace_root = \"w\"\n[backend]\nkind = \"scripted\"\nscript = \"s.json\"\n").unwrap();
        assert_eq!(cfg.budgets, Budgets { max_attempts: 5, variants_per_operator: 3, regeneration_limit: 1 });
        assert_eq!(cfg.temperatures, Temperatures { generation: 0.75, validation: 0.1 });
        assert_eq!(cfg.toolchain, ToolchainConfig::Javalite);
        assert_eq!(cfg.mutation.operator_set().len(), 10);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<CampaignConfig, _> = toml::from_str("catalog = \"c\"\nworkspace_root = \"w\"\nbogus = 1\n[backend]\nkind = \"scripted\"\nscript = \"s\"\n");
        assert!(r.is_err());
    }
}
