//! Session configuration, read from TOML.

use std::path::{Path, PathBuf};

use atiyah_core::scalar::{parse_rational, rat};
use atiyah_core::Rational;
use serde::Deserialize;

use crate::CliError;

/// Environment variable that overrides `cache_dir`.
pub const CACHE_ENV: &str = "ATIYAH_KERNEL_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub group_size: usize,
    pub matrix_dim: usize,
    pub chain_levels: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self { group_size: 10_000, matrix_dim: 8, chain_levels: 64 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    field: Option<String>,
    caps: Caps,
    cache_dir: Option<PathBuf>,
    output: OutputFormat,
    tolerance: String,
    /// Digits for decimal renderings next to exact values; none when absent.
    decimals: Option<u32>,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            field: None,
            caps: Caps::default(),
            cache_dir: None,
            output: OutputFormat::Json,
            tolerance: "1/10".into(),
            decimals: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SessionConfig {
    /// Base order of `K = Q(ω_m)`; the ambient field is chosen per command.
    pub field: u64,
    pub caps: Caps,
    pub cache_dir: Option<PathBuf>,
    pub output: OutputFormat,
    pub tolerance: Rational,
    pub decimals: Option<u32>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self::from_raw(RawConfig::default()).expect("defaults are valid")
    }
}

impl SessionConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let raw = match path {
            None => RawConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?
            }
        };
        let mut cfg = Self::from_raw(raw)?;
        if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
            cfg.cache_dir = Some(PathBuf::from(dir));
        }
        Ok(cfg)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, CliError> {
        let caps = raw.caps;
        if caps.group_size == 0 || caps.matrix_dim == 0 || caps.chain_levels == 0 {
            return Err(CliError::input("caps must be positive"));
        }
        let tolerance = parse_rational(&raw.tolerance).map_err(CliError::from)?;
        if tolerance <= rat(0, 1) || tolerance >= rat(1, 1) {
            return Err(CliError::input(format!("tolerance {} must lie strictly between 0 and 1", raw.tolerance)));
        }
        if raw.decimals.is_some_and(|d| d == 0 || d > 15) {
            return Err(CliError::input("decimals must be between 1 and 15"));
        }
        let field = match &raw.field {
            Some(f) => parse_field(f)?,
            None => 1,
        };
        Ok(Self { field, caps, cache_dir: raw.cache_dir, output: raw.output, tolerance, decimals: raw.decimals })
    }
}

/// `q`, `Q`, `q(w5)`, `Q(ω5)` or a bare order `5`.
pub fn parse_field(text: &str) -> Result<u64, CliError> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(1);
    }
    let inner = t
        .strip_prefix("q(")
        .or_else(|| t.strip_prefix("Q("))
        .and_then(|s| s.strip_suffix(')'))
        .map(|s| s.trim_start_matches('w').trim_start_matches('ω'))
        .unwrap_or(t);
    match inner.parse::<u64>() {
        Ok(m) if m > 0 => Ok(m),
        _ => Err(CliError::input(format!("cannot read field {text:?}; use q, q(w5) or 5"))),
    }
}
