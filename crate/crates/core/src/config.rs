//! Run settings: one flat `key = value` file with per-key overrides.
//!
//! ```text
//! # thresholds
//! threshold = 2            # sets ac.threshold and dyn.threshold
//! ac.mode = schema_aware
//! ac.attributes = all
//! dyn.priority = email,phone,employer
//! dyn.max_depth = 3
//! norm.nicknames = bundled # or none, or a from,to CSV path
//! norm.canonical.country = bundled
//! schema = auto            # auto, default, or a comma-separated attribute list
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ac::{AcConfig, AcMode};
use crate::dynamic::{DynConfig, NameKeyMode};
use crate::ingest;
use crate::model::{ModelError, Schema, DEFAULT_ATTRIBUTES};
use crate::normalize::NormalizationConfig;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("threshold must be at least 2, got {0}")]
    ThresholdTooSmall(usize),
    #[error("no attributes selected")]
    NoAttributes,
    #[error("attribute `{0}` is not in the schema")]
    UnknownAttribute(String),
    #[error("name attribute `{0}` cannot be used for sub-blocking")]
    NameAttributeInPriority(String),
    #[error("attribute `{0}` listed twice in the priority order")]
    DuplicatePriority(String),
    #[error("max_depth must be at least 1")]
    ZeroDepth,
    #[error("dynamic blocking needs exactly two name attributes (given, family); schema has {0}")]
    NameAttributes(usize),
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown setting `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("cannot read {path}: {reason}")]
    Read { path: PathBuf, reason: String },
    #[error(transparent)]
    Schema(#[from] ModelError),
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
/// Later assignments win.
pub fn parse_flat(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            reason: format!("expected `key = value`, found `{line}`"),
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                reason: "empty key".into(),
            });
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaChoice {
    /// The 17-attribute schema if the input fits it, otherwise the input's own columns.
    Auto,
    Default,
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapSource {
    Bundled,
    None,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub schema: SchemaChoice,
    pub name_attributes: Option<Vec<String>>,

    pub ac_mode: AcMode,
    pub ac_threshold: Option<usize>,
    pub ac_attributes: Option<Vec<String>>,
    pub ac_apply_nicknames: bool,

    pub dyn_threshold: Option<usize>,
    pub dyn_priority: Option<Vec<String>>,
    pub dyn_max_depth: Option<usize>,
    pub dyn_name_key_mode: NameKeyMode,
    pub dyn_accept_oversized: bool,

    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub collapse_whitespace: bool,
    pub nicknames: MapSource,
    pub canonical: BTreeMap<String, MapSource>,
    pub atomic: Vec<String>,

    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub runs: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        let mut canonical = BTreeMap::new();
        canonical.insert("country".to_string(), MapSource::Bundled);
        Self {
            schema: SchemaChoice::Auto,
            name_attributes: None,
            ac_mode: AcMode::SchemaAware,
            ac_threshold: None,
            ac_attributes: None,
            ac_apply_nicknames: false,
            dyn_threshold: None,
            dyn_priority: None,
            dyn_max_depth: None,
            dyn_name_key_mode: NameKeyMode::FullName,
            dyn_accept_oversized: false,
            lowercase: true,
            strip_punctuation: true,
            collapse_whitespace: true,
            nicknames: MapSource::Bundled,
            canonical,
            atomic: Vec::new(),
            workers: None,
            seed: None,
            runs: None,
        }
    }
}

fn list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn invalid(key: &str, value: &str, reason: impl ToString) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| invalid(key, value, e))
}

fn flag(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(invalid(key, value, "expected true or false")),
    }
}

fn map_source(value: &str, base: Option<&Path>) -> MapSource {
    match value {
        "bundled" | "default" => MapSource::Bundled,
        "none" | "" => MapSource::None,
        path => {
            let p = PathBuf::from(path);
            match base {
                Some(b) if p.is_relative() => MapSource::File(b.join(p)),
                _ => MapSource::File(p),
            }
        }
    }
}

/// Settings resolved against a concrete schema.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub schema: Schema,
    pub ac: AcConfig,
    pub dynamic: DynConfig,
    pub norm: NormalizationConfig,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let mut s = Self::default();
        s.apply_text(&text, path.parent())?;
        Ok(s)
    }

    pub fn apply_text(&mut self, text: &str, base: Option<&Path>) -> Result<(), ConfigError> {
        for (k, v) in parse_flat(text)? {
            self.set_with_base(&k, &v, base)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.set_with_base(key, value, None)
    }

    fn set_with_base(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<(), ConfigError> {
        match key {
            "schema" => {
                self.schema = match value {
                    "auto" => SchemaChoice::Auto,
                    "default" => SchemaChoice::Default,
                    v => SchemaChoice::Explicit(list(v)),
                }
            }
            "schema.name_attributes" => self.name_attributes = Some(list(value)),
            "threshold" => {
                let t = num(key, value)?;
                self.ac_threshold = Some(t);
                self.dyn_threshold = Some(t);
            }
            "ac.mode" => self.ac_mode = value.parse().map_err(|e: String| invalid(key, value, e))?,
            "ac.threshold" => self.ac_threshold = Some(num(key, value)?),
            "ac.attributes" => {
                self.ac_attributes = if value == "all" { None } else { Some(list(value)) }
            }
            "ac.apply_nicknames" => self.ac_apply_nicknames = flag(key, value)?,
            "dyn.threshold" => self.dyn_threshold = Some(num(key, value)?),
            "dyn.priority" => {
                self.dyn_priority = if value == "default" { None } else { Some(list(value)) }
            }
            "dyn.max_depth" => self.dyn_max_depth = Some(num(key, value)?),
            "dyn.name_key_mode" => {
                self.dyn_name_key_mode = value.parse().map_err(|e: String| invalid(key, value, e))?
            }
            "dyn.accept_oversized" => self.dyn_accept_oversized = flag(key, value)?,
            "norm.lowercase" => self.lowercase = flag(key, value)?,
            "norm.strip_punctuation" => self.strip_punctuation = flag(key, value)?,
            "norm.collapse_whitespace" => self.collapse_whitespace = flag(key, value)?,
            "norm.nicknames" => self.nicknames = map_source(value, base),
            "norm.atomic" => self.atomic = list(value),
            "workers" => self.workers = Some(num(key, value)?),
            "seed" => self.seed = Some(num(key, value)?),
            "runs" => self.runs = Some(num(key, value)?),
            k => {
                if let Some(attr) = k.strip_prefix("norm.canonical.") {
                    self.canonical.insert(attr.to_string(), map_source(value, base));
                } else {
                    return Err(ConfigError::UnknownKey(k.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Picks the schema for an input whose attribute columns are `columns`.
    pub fn schema_for(&self, columns: &[String]) -> Result<Schema, ConfigError> {
        let attrs: Vec<String> = match &self.schema {
            SchemaChoice::Default => DEFAULT_ATTRIBUTES.iter().map(|s| s.to_string()).collect(),
            SchemaChoice::Explicit(a) => a.clone(),
            SchemaChoice::Auto => {
                if columns.iter().all(|c| DEFAULT_ATTRIBUTES.contains(&c.as_str())) {
                    DEFAULT_ATTRIBUTES.iter().map(|s| s.to_string()).collect()
                } else {
                    columns.to_vec()
                }
            }
        };
        let schema = match &self.name_attributes {
            Some(names) => Schema::new(attrs, names.clone())?,
            None => Schema::with_attributes(attrs)?,
        };
        Ok(schema)
    }

    pub fn normalization(&self, schema: &Schema) -> Result<NormalizationConfig, ConfigError> {
        let mut norm = NormalizationConfig::plain();
        norm.lowercase = self.lowercase;
        norm.strip_punctuation = self.strip_punctuation;
        norm.collapse_whitespace = self.collapse_whitespace;
        let bundled = NormalizationConfig::for_schema(schema);
        let read = |path: &Path| {
            ingest::load_map(path).map_err(|e| ConfigError::Read {
                path: path.to_path_buf(),
                reason: e.to_string(),
            })
        };
        let nick = match &self.nicknames {
            MapSource::Bundled => bundled.nickname_map().clone(),
            MapSource::None => BTreeMap::new(),
            MapSource::File(p) => read(p)?,
        };
        norm.set_nickname_map(nick)
            .map_err(|e| invalid("norm.nicknames", "", e))?;
        norm.set_nickname_attributes(schema.name_attributes().iter().cloned());
        for (attr, src) in &self.canonical {
            if !schema.contains(attr) {
                continue;
            }
            let map = match src {
                MapSource::Bundled => match bundled.canonical_map(attr) {
                    Some(m) => m.clone(),
                    None => continue,
                },
                MapSource::None => continue,
                MapSource::File(p) => read(p)?,
            };
            norm.set_canonical_map(attr, map)
                .map_err(|e| invalid(&format!("norm.canonical.{attr}"), "", e))?;
        }
        for a in &self.atomic {
            if !schema.contains(a) {
                return Err(ConfigError::UnknownAttribute(a.clone()));
            }
        }
        norm.set_atomic(self.atomic.iter().cloned());
        Ok(norm)
    }

    pub fn ac_config(&self, schema: &Schema) -> Result<AcConfig, ConfigError> {
        let mut ac = AcConfig::new(schema).with_mode(self.ac_mode);
        if let Some(t) = self.ac_threshold {
            ac.purge_threshold = t;
        }
        if let Some(a) = &self.ac_attributes {
            ac.attributes_used = a.clone();
        }
        ac.apply_nicknames = self.ac_apply_nicknames;
        ac.validate(schema)?;
        Ok(ac)
    }

    pub fn dyn_config(&self, schema: &Schema) -> Result<DynConfig, ConfigError> {
        let mut d = DynConfig::new(schema).with_name_key_mode(self.dyn_name_key_mode);
        if let Some(t) = self.dyn_threshold {
            d.threshold = t;
        }
        if let Some(p) = &self.dyn_priority {
            d.attribute_priority = p.clone();
        }
        if let Some(m) = self.dyn_max_depth {
            d.max_depth = m;
        }
        d.accept_oversized = self.dyn_accept_oversized;
        d.validate(schema)?;
        Ok(d)
    }

    pub fn resolve(&self, columns: &[String]) -> Result<Resolved, ConfigError> {
        let schema = self.schema_for(columns)?;
        Ok(Resolved {
            norm: self.normalization(&schema)?,
            ac: self.ac_config(&schema)?,
            dynamic: self.dyn_config(&schema)?,
            schema,
        })
    }
}
