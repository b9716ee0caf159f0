use std::fmt;
use std::str::FromStr;

use asqp_core::backend::{GenerationRequest, GeneratorBackend, OracleBackend, PerturbBackend, PerturbConfig};
use asqp_core::linearize::ProjectionMode;
use asqp_core::{CategoryVocab, Example};

use crate::http::{HttpBackend, HttpConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendKind {
    #[default]
    Oracle,
    Perturb,
    Http,
}

impl BackendKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Oracle => "oracle",
            BackendKind::Perturb => "perturb",
            BackendKind::Http => "http",
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(BackendKind::Oracle),
            "perturb" => Ok(BackendKind::Perturb),
            "http" => Ok(BackendKind::Http),
            other => Err(Error::Usage(format!("unknown backend {other:?}, expected oracle, perturb or http"))),
        }
    }
}

/// Everything needed to construct any backend.
#[derive(Debug, Clone)]
pub struct BackendSpec<'a> {
    pub kind: BackendKind,
    pub golds: &'a [Example],
    pub mode: &'a ProjectionMode,
    pub vocab: &'a CategoryVocab,
    pub transfer_suffix: bool,
    pub perturb: PerturbConfig,
    pub http: Option<HttpConfig>,
}

#[derive(Debug, Clone)]
pub enum AnyBackend {
    Oracle(OracleBackend),
    Perturb(PerturbBackend),
    Http(HttpBackend),
}

impl AnyBackend {
    pub fn build(spec: &BackendSpec<'_>) -> Result<Self> {
        Ok(match spec.kind {
            BackendKind::Oracle => {
                AnyBackend::Oracle(OracleBackend::new(spec.golds, spec.mode, spec.vocab, spec.transfer_suffix)?)
            }
            BackendKind::Perturb => AnyBackend::Perturb(PerturbBackend::new(
                spec.golds,
                &spec.perturb,
                spec.vocab,
                spec.mode,
                spec.transfer_suffix,
            )?),
            BackendKind::Http => {
                let cfg = spec.http.clone().ok_or_else(|| {
                    Error::Usage(format!("the http backend needs --endpoint or {}", crate::http::ENDPOINT_ENV))
                })?;
                AnyBackend::Http(HttpBackend::new(cfg))
            }
        })
    }
}

impl GeneratorBackend for AnyBackend {
    type Error = Error;

    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>> {
        match self {
            AnyBackend::Oracle(b) => Ok(b.generate(request)?),
            AnyBackend::Perturb(b) => Ok(b.generate(request)?),
            AnyBackend::Http(b) => Ok(b.generate(request)?),
        }
    }
}
