//! Run configuration: defaults, config-file parsing, flag overrides, and the
//! provenance block stamped onto every output.
//!
//! The config file is plain `key = value` lines with `#` comments. Keys are
//! the long flag names without the leading dashes. Flags always win over the
//! file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Input(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut values = BTreeMap::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!(
                    "{}:{}: expected `key = value`, found {raw:?}",
                    path.display(),
                    line_no + 1
                ))
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if present, else config-file value parsed as `T`, else the
    /// default.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: std::str::FromStr,
    {
        if let Some(value) = flag {
            return Ok(value);
        }
        match self.get(key) {
            Some(text) => text.parse().map_err(|_| {
                CliError::Input(format!("config key {key}: cannot parse {text:?}"))
            }),
            None => Ok(default),
        }
    }

    pub fn resolve_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: std::str::FromStr,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(text) => text
                .parse()
                .map(Some)
                .map_err(|_| CliError::Input(format!("config key {key}: cannot parse {text:?}"))),
            None => Ok(None),
        }
    }
}

/// Provenance block carried by every output file: tool version, a hash of
/// the fully resolved configuration, and the seed (when one is in play).
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: String,
    pub seed: Option<u64>,
}

impl Provenance {
    /// Hash the resolved configuration: a sorted `key=value` list rendered
    /// canonically, fingerprinted with FNV-1a.
    pub fn new(resolved: &BTreeMap<String, String>, seed: Option<u64>) -> Self {
        let mut canonical = String::new();
        for (key, value) in resolved {
            let _ = writeln!(canonical, "{key}={value}");
        }
        Provenance {
            tool: "mteval",
            version: TOOL_VERSION,
            config: format!("{:016x}", mteval::rng::fnv1a64(canonical.as_bytes())),
            seed,
        }
    }

    /// `# key: value` comment lines for TSV/CSV outputs.
    pub fn header_block(&self) -> String {
        format!(
            "# tool: {} {}\n# config: {}\n# seed: {}\n",
            self.tool,
            self.version,
            self.config,
            self.seed.map_or_else(|| "-".to_string(), |s| s.to_string())
        )
    }
}

/// Comma-separated f64 list (for `--bins`).
pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|cell| {
            cell.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("bad number {cell:?} in list")))
        })
        .collect()
}
