use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Scan,
    SingularAvg,
    PrimeDev,
    Hunt,
    Proportion,
    Gaps,
    LacunaryCount,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Scan,
        ExperimentKind::SingularAvg,
        ExperimentKind::PrimeDev,
        ExperimentKind::Hunt,
        ExperimentKind::Proportion,
        ExperimentKind::Gaps,
        ExperimentKind::LacunaryCount,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Scan => "scan",
            ExperimentKind::SingularAvg => "singular-avg",
            ExperimentKind::PrimeDev => "prime-dev",
            ExperimentKind::Hunt => "hunt",
            ExperimentKind::Proportion => "proportion",
            ExperimentKind::Gaps => "gaps",
            ExperimentKind::LacunaryCount => "lacunary-count",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.as_str()).collect();
                Error::Usage(format!(
                    "unknown experiment kind `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// Parses a nonnegative integer, accepting `1e8`-style notation and `_` separators.
pub fn parse_count(s: &str) -> Result<u64> {
    let t = s.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = t
        .parse()
        .map_err(|_| Error::arg(format!("`{s}` is not an integer")))?;
    if f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f < 18_446_744_073_709_551_616.0 {
        Ok(f as u64)
    } else {
        Err(Error::arg(format!("`{s}` is not a nonnegative integer")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub name: String,
    pub kind: ExperimentKind,
    pub out_dir: PathBuf,
    pub params: BTreeMap<String, String>,
}

impl ExperimentManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::arg(format!(
                    "manifest line {}: expected `key = value`",
                    lineno + 1
                ))
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(Error::arg(format!(
                    "manifest line {}: empty key",
                    lineno + 1
                )));
            }
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::arg(format!("manifest key `{key}` given twice")));
            }
        }
        let mut take = |key: &str| {
            entries
                .remove(key)
                .ok_or_else(|| Error::arg(format!("manifest is missing required key `{key}`")))
        };
        let name = take("name")?;
        let kind = take("kind")?.parse()?;
        let out_dir = PathBuf::from(take("out_dir")?);
        Ok(ExperimentManifest {
            name,
            kind,
            out_dir,
            params: entries,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Sorted `key = value` lines, the input to the content hash.
    pub fn canonical_text(&self) -> String {
        let mut all = self.params.clone();
        all.insert("name".into(), self.name.clone());
        all.insert("kind".into(), self.kind.to_string());
        all.insert("out_dir".into(), self.out_dir.display().to_string());
        all.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    fn missing(&self, key: &str) -> Error {
        Error::arg(format!(
            "manifest kind `{}` requires key `{key}`",
            self.kind
        ))
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn require_u64(&self, key: &str) -> Result<u64> {
        let v = self.raw(key).ok_or_else(|| self.missing(key))?;
        parse_count(v).map_err(|e| Error::arg(format!("key `{key}`: {e}")))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.raw(key) {
            Some(_) => self.require_u64(key),
            None => Ok(default),
        }
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        let v = self.raw(key).ok_or_else(|| self.missing(key))?;
        v.trim()
            .parse()
            .map_err(|_| Error::arg(format!("key `{key}`: `{v}` is not a number")))
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::arg(format!("key `{key}`: `{s}` is not a number")))
                })
                .collect(),
        }
    }

    pub fn u64_list(&self, key: &str) -> Result<Vec<u64>> {
        let v = self.raw(key).ok_or_else(|| self.missing(key))?;
        v.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_count(s).map_err(|e| Error::arg(format!("key `{key}`: {e}"))))
            .collect()
    }
}
