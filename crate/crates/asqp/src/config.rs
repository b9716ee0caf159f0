//! Optional TOML config file. Keys mirror the long command-line flags with
//! `-` replaced by `_`:
//!
//! ```toml
//! task = "asqp"
//! mode = "natural"
//! vocab = "data/categories.txt"
//! backend = "perturb"
//! seed = 7
//! rho = 0.3
//! jobs = 4
//! endpoint = "http://127.0.0.1:8080"
//! ```
//!
//! A flag given on the command line always wins over the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub task: Option<String>,
    pub mode: Option<String>,
    pub vocab: Option<PathBuf>,
    pub backend: Option<String>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub strict: Option<bool>,
    pub transfer_suffix: Option<bool>,
    pub lexicon: Option<String>,
    pub order: Option<String>,
    pub rho: Option<f64>,
    pub weights: Option<String>,
    pub endpoint: Option<String>,
    pub max_batch: Option<usize>,
    pub retries: Option<usize>,
    pub backoff_ms: Option<u64>,
    pub timeout_secs: Option<u64>,
    pub max_in_flight: Option<usize>,
    pub exclusive_generation: Option<bool>,
    pub dev_ratio: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::io::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}
