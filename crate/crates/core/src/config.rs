//! Command-line configuration file (TOML).
//!
//! ```toml
//! weights_path = "weights.toml"
//! kb_path = "exceptions.tsv"
//! cache_dir = ".exrec-cache"
//! output_format = "json"
//! top_k = 10
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::query::ExceptionKnowledgeBase;
use crate::ranking::{WeightConfig, DEFAULT_TOP_K};

pub const DEFAULT_CONFIG_FILE: &str = "exrec.toml";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliConfig {
    pub weights_path: Option<PathBuf>,
    pub kb_path: Option<PathBuf>,
    pub cache_dir: PathBuf,
    pub output_format: OutputFormat,
    pub top_k: usize,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            weights_path: None,
            kb_path: None,
            cache_dir: PathBuf::from(".exrec-cache"),
            output_format: OutputFormat::Text,
            top_k: DEFAULT_TOP_K,
        }
    }
}

impl CliConfig {
    /// Parse a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg: CliConfig = toml::from_str(text).map_err(|e| Error::Config {
            path: origin.to_path_buf(),
            reason: e.to_string(),
        })?;
        if cfg.top_k == 0 {
            return Err(Error::Config {
                path: origin.to_path_buf(),
                reason: "top_k must be at least 1".into(),
            });
        }
        let base = origin.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [cfg.weights_path.as_mut(), cfg.kb_path.as_mut(), Some(&mut cfg.cache_dir)]
            .into_iter()
            .flatten()
        {
            rebase(p);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    /// Load `explicit` if given, else `exrec.toml` in the working directory
    /// when present, else defaults.
    pub fn discover(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None if Path::new(DEFAULT_CONFIG_FILE).is_file() => Self::load(Path::new(DEFAULT_CONFIG_FILE)),
            None => Ok(Self::default()),
        }
    }

    pub fn weights(&self) -> Result<WeightConfig> {
        match &self.weights_path {
            Some(p) => WeightConfig::load(p),
            None => Ok(WeightConfig::default()),
        }
    }

    pub fn knowledge_base(&self) -> Result<ExceptionKnowledgeBase> {
        match &self.kb_path {
            Some(p) => ExceptionKnowledgeBase::load(p),
            None => Ok(ExceptionKnowledgeBase::bundled()),
        }
    }
}
