use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sidonlab::ratio::{parse_ratio, Q};

use crate::CliError;

/// Environment variable consulted for the default horizon.
pub const HORIZON_ENV: &str = "SIDONLAB_HORIZON";
pub const BUILTIN_HORIZON: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
    Plotdata,
}

/// Parameter bag mirroring the command-line flags. Flags take precedence
/// over values read from a config file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    /// Ball radius as `"p/q"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complement: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    /// Growth constant as `"p/q"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(eps) = &self.eps {
            parse_eps(eps)?;
        }
        if let Some(c) = &self.c {
            parse_positive(c, "c")?;
        }
        if let Some(blocks) = &self.blocks {
            check_increasing(blocks, "blocks")?;
        }
        if let Some(complement) = &self.complement {
            check_increasing(complement, "complement")?;
        }
        Ok(())
    }
}

/// Parses a ball radius, which must lie in `(0, 1/2)`.
pub fn parse_eps(text: &str) -> Result<Q, CliError> {
    let eps = parse_ratio(text).map_err(|e| CliError::Usage(e.to_string()))?;
    let half = Q::new(1.into(), 2.into());
    if eps <= Q::from_integer(0.into()) || eps >= half {
        return Err(CliError::Usage(format!("eps must lie in (0, 1/2), got {text}")));
    }
    Ok(eps)
}

pub fn parse_positive(text: &str, name: &str) -> Result<Q, CliError> {
    let value = parse_ratio(text).map_err(|e| CliError::Usage(e.to_string()))?;
    if value <= Q::from_integer(0.into()) {
        return Err(CliError::Usage(format!("{name} must be positive, got {text}")));
    }
    Ok(value)
}

pub fn check_increasing(values: &[u64], name: &str) -> Result<(), CliError> {
    match values.windows(2).find(|p| p[0] >= p[1]) {
        Some(p) => Err(CliError::Usage(format!(
            "{name} must be strictly increasing ({} then {})",
            p[0], p[1]
        ))),
        None => Ok(()),
    }
}

/// Comma separated nonnegative integers; the empty string is the empty list.
pub fn parse_list(text: &str) -> Result<Vec<u64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| format!("malformed set literal `{text}`"))
        })
        .collect()
}

/// Horizon from the environment, or the built-in default.
pub fn default_horizon() -> Result<u64, CliError> {
    match std::env::var(HORIZON_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{HORIZON_ENV} must be a nonnegative integer, got `{value}`"))),
        Err(_) => Ok(BUILTIN_HORIZON),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let config = RunConfig {
            format: Some(Format::Csv),
            horizon: Some(200),
            eps: Some("2/5".into()),
            blocks: Some(vec![3, 6, 11]),
            levels: Some(4),
            c: Some("3/2".into()),
            ..RunConfig::default()
        };
        let text = config.to_json();
        assert_eq!(RunConfig::from_json(&text).unwrap(), config);
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_json(r#"{"eps": "1/2"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"eps": "3/4"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"eps": "0"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"eps": "2/5"}"#).is_ok());
        assert!(RunConfig::from_json(r#"{"blocks": [3, 3]}"#).is_err());
        assert!(RunConfig::from_json(r#"{"blocks": [6, 3]}"#).is_err());
        assert!(RunConfig::from_json(r#"{"c": "-1"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"unknown": 1}"#).is_err());
    }

    #[test]
    fn list_literals() {
        assert_eq!(parse_list("0, 2,4").unwrap(), vec![0, 2, 4]);
        assert_eq!(parse_list("").unwrap(), Vec::<u64>::new());
        assert!(parse_list("1,,2").is_err());
        assert!(parse_list("1,-2").is_err());
    }
}
