//! Config file loading and flag > env > file > default resolution.

use std::fs;
use std::path::Path;
use std::time::Duration;

use handover_core::grasp::{CosineMode, SelectionConfig};
use handover_core::intent::EndpointConfig;
use serde::Deserialize;

use crate::error::CliError;

pub const TOKEN_ENV: &str = "HANDOVER_API_TOKEN";
pub const ENDPOINT_ENV: &str = "HANDOVER_ENDPOINT_URL";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileSettings {
    pub lambda: Option<f64>,
    pub clearance: Option<f64>,
    pub cosine_mode: Option<CosineMode>,
    pub endpoint: EndpointSettings,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointSettings {
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub timeout_secs: Option<f64>,
    pub retries: Option<u32>,
}

impl FileSettings {
    /// JSON when the extension is `.json`, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input("ReadError", format!("{}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::input("ConfigError", format!("{}: {e}", path.display())))
    }

    /// Values already merged from flags and env take priority over the file.
    pub fn selection(
        &self,
        lambda: Option<f64>,
        clearance: Option<f64>,
        cosine_mode: Option<CosineMode>,
    ) -> SelectionConfig {
        let d = SelectionConfig::default();
        SelectionConfig {
            lambda: lambda.or(self.lambda).unwrap_or(d.lambda),
            clearance: clearance.or(self.clearance).unwrap_or(d.clearance),
            cosine_mode: cosine_mode.or(self.cosine_mode).unwrap_or(d.cosine_mode),
        }
    }

    pub fn endpoint(&self, url_flag: Option<&str>, model: Option<&str>) -> Result<EndpointConfig, CliError> {
        let d = EndpointConfig::default();
        let env_url = std::env::var(ENDPOINT_ENV).ok().filter(|s| !s.is_empty());
        let e = &self.endpoint;
        let timeout = match e.timeout_secs {
            Some(t) if !(t.is_finite() && t > 0.0) => {
                return Err(CliError::input("ConfigError", format!("endpoint timeout {t} must be > 0")))
            }
            Some(t) => Duration::from_secs_f64(t),
            None => d.timeout,
        };
        Ok(EndpointConfig {
            base_url: url_flag
                .map(str::to_string)
                .or(env_url)
                .or_else(|| e.base_url.clone())
                .unwrap_or(d.base_url),
            model: model.map(str::to_string).or_else(|| e.model.clone()).unwrap_or(d.model),
            timeout,
            retries: e.retries.unwrap_or(d.retries),
            token: std::env::var(TOKEN_ENV).ok().filter(|s| !s.is_empty()),
        })
    }
}
