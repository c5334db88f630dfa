//! Flat key=value pipeline configuration.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Relative paths are resolved against the config file's directory.
//! Samples are declared as `sample.<label> = <path>` and keep file order.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::layout::{LayoutParams, SizeRange};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}: expected key = value")]
    Parse { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value for {key:?}: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required key {0:?}")]
    MissingKey(&'static str),
    #[error("no sample.<label> entries")]
    NoSamples,
}

/// Everything a full pipeline run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub roster: PathBuf,
    pub fixtures: PathBuf,
    /// Optional pre-collected pairwise file; when set, the network stage
    /// reads it instead of deriving pairs from the collection run.
    pub pairwise: Option<PathBuf>,
    /// (label, path) in declaration order; the first sample's counts drive
    /// node sizing.
    pub samples: Vec<(String, PathBuf)>,
    pub output_dir: PathBuf,
    pub layout: LayoutParams,
    pub sizes: SizeRange,
    /// Row count of the strongest-links table.
    pub top_k: usize,
}

pub fn load_config(path: &Path) -> Result<PipelineConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base)
}

pub fn parse_config(text: &str, base_dir: &Path) -> Result<PipelineConfig, ConfigError> {
    let mut roster = None;
    let mut fixtures = None;
    let mut pairwise = None;
    let mut samples: Vec<(String, PathBuf)> = Vec::new();
    let mut output_dir = None;
    let mut layout = LayoutParams::default();
    let mut sizes = SizeRange::default();
    let mut top_k = None;
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Parse { line });
        };
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        seen.push(key.to_string());
        if value.is_empty() {
            return Err(ConfigError::BadValue {
                line,
                key: key.to_string(),
                message: "empty value".into(),
            });
        }

        let resolve = |value: &str| {
            let p = PathBuf::from(value);
            if p.is_absolute() {
                p
            } else {
                base_dir.join(p)
            }
        };
        let bad = |message: String| ConfigError::BadValue {
            line,
            key: key.to_string(),
            message,
        };

        if let Some(label) = key.strip_prefix("sample.") {
            if label.is_empty() {
                return Err(bad("empty sample label".into()));
            }
            samples.push((label.to_string(), resolve(value)));
            continue;
        }
        match key {
            "roster" => roster = Some(resolve(value)),
            "fixtures" => fixtures = Some(resolve(value)),
            "pairwise" => pairwise = Some(resolve(value)),
            "output_dir" => output_dir = Some(resolve(value)),
            "top_k" => top_k = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "layout.width" => layout.width = value.parse().map_err(|e| bad(format!("{e}")))?,
            "layout.height" => layout.height = value.parse().map_err(|e| bad(format!("{e}")))?,
            "layout.iterations" => {
                layout.iterations = value.parse().map_err(|e| bad(format!("{e}")))?
            }
            "layout.c" => layout.c_constant = value.parse().map_err(|e| bad(format!("{e}")))?,
            "layout.temperature" => {
                layout.initial_temperature = Some(value.parse().map_err(|e| bad(format!("{e}")))?)
            }
            "layout.seed" => layout.seed = value.parse().map_err(|e| bad(format!("{e}")))?,
            "size.min" => sizes.min = value.parse().map_err(|e| bad(format!("{e}")))?,
            "size.max" => sizes.max = value.parse().map_err(|e| bad(format!("{e}")))?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }

    if samples.is_empty() {
        return Err(ConfigError::NoSamples);
    }
    Ok(PipelineConfig {
        roster: roster.ok_or(ConfigError::MissingKey("roster"))?,
        fixtures: fixtures.ok_or(ConfigError::MissingKey("fixtures"))?,
        pairwise,
        samples,
        output_dir: output_dir.unwrap_or_else(|| base_dir.join("out")),
        layout,
        sizes,
        top_k: top_k.unwrap_or(10),
    })
}
