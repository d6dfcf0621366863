//! Problem files and merging them with flags and environment.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use ramsey_core::engines::DEFAULT_BUDGET;
use ramsey_core::{EngineId, ProblemSpec};

pub const ENV_BUDGET: &str = "RAMSEY_BUDGET";
pub const ENV_WORKERS: &str = "RAMSEY_WORKERS";

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("problem file: {0}")]
    File(#[from] toml::de::Error),
    #[error("missing required field `{0}`")]
    Missing(&'static str),
    #[error("environment variable {name}={value:?} is not a nonnegative integer")]
    Env { name: &'static str, value: String },
    #[error(transparent)]
    Core(#[from] ramsey_core::Error),
}

/// A flat `key = value` document (TOML syntax):
///
/// ```toml
/// t = 2
/// r = 2
/// p = [3, 3]
/// n = 5
/// engine = "direct"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub t: Option<usize>,
    pub r: Option<usize>,
    pub p: Option<Vec<usize>>,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub engine: Option<String>,
    pub k_cutoff: Option<usize>,
    pub budget: Option<u64>,
    pub workers: Option<usize>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }
}

/// Values given on the command line; `None` means not given.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub t: Option<usize>,
    pub r: Option<usize>,
    pub p: Option<Vec<usize>>,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub engine: Option<EngineId>,
    pub k_cutoff: Option<usize>,
    pub budget: Option<u64>,
    pub workers: Option<usize>,
}

/// Fully resolved inputs of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    pub spec: ProblemSpec,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub engine: Option<EngineId>,
    pub k_cutoff: Option<usize>,
    pub budget: u64,
    pub workers: Option<usize>,
}

fn env_number(name: &'static str, lookup: &dyn Fn(&str) -> Option<String>) -> Result<Option<u64>, ParseError> {
    match lookup(name) {
        None => Ok(None),
        Some(value) => value
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| ParseError::Env { name, value }),
    }
}

/// Flags win over the environment, which wins over the file.
pub fn resolve(
    flags: Overrides,
    file: Option<ProblemFile>,
    lookup: &dyn Fn(&str) -> Option<String>,
) -> Result<Resolved, ParseError> {
    let file = file.unwrap_or_default();
    let t = flags.t.or(file.t).ok_or(ParseError::Missing("t"))?;
    let r = flags.r.or(file.r).ok_or(ParseError::Missing("r"))?;
    let p = flags.p.or(file.p).ok_or(ParseError::Missing("p"))?;
    let spec = ProblemSpec::new(t, r, p)?;
    let engine = match (flags.engine, file.engine) {
        (Some(e), _) => Some(e),
        (None, Some(name)) => Some(name.parse()?),
        (None, None) => None,
    };
    let budget = flags
        .budget
        .or(env_number(ENV_BUDGET, lookup)?)
        .or(file.budget)
        .unwrap_or(DEFAULT_BUDGET);
    let workers = flags
        .workers
        .or(env_number(ENV_WORKERS, lookup)?.map(|w| w as usize))
        .or(file.workers);
    Ok(Resolved {
        spec,
        n: flags.n.or(file.n),
        n_max: flags.n_max.or(file.n_max),
        engine,
        k_cutoff: flags.k_cutoff.or(file.k_cutoff),
        budget,
        workers,
    })
}
