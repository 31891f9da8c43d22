//! Client for a chat-completion style multimodal endpoint.
//!
//! Request: `POST {base_url}/chat/completions` with
//! `{"model", "temperature": 0, "messages": [system, user]}`; an image is sent
//! as a `data:` URL part of the user message. Response text is read from
//! `choices[0].message.content`.

use std::fs;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use log::{debug, warn};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::{
    build_prompt, parse_task_description, ChatPrompt, IntentError, IntentQuery, IntentResolver,
    PromptTemplate, TaskDescription, ToolCatalog,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EndpointError {
    #[error("endpoint timed out after {0:?}")]
    Timeout(Duration),
    #[error("transport error: {0}")]
    TransportError(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    NonSuccessStatus { status: u16, body: String },
    #[error("malformed endpoint response: {0}")]
    MalformedResponse(String),
}

impl EndpointError {
    fn retryable(&self) -> bool {
        match self {
            EndpointError::Timeout(_) | EndpointError::TransportError(_) => true,
            EndpointError::NonSuccessStatus { status, .. } => *status >= 500,
            EndpointError::MalformedResponse(_) => false,
        }
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    /// e.g. `http://localhost:8000/v1`
    pub base_url: String,
    pub model: String,
    #[serde(with = "secs")]
    pub timeout: Duration,
    /// Extra attempts after the first on timeouts, transport errors and 5xx.
    pub retries: u32,
    #[serde(skip_serializing)]
    pub token: Option<String>,
}

// Keeps the token out of debug output.
impl std::fmt::Debug for EndpointConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EndpointConfig")
            .field("base_url", &self.base_url)
            .field("model", &self.model)
            .field("timeout", &self.timeout)
            .field("retries", &self.retries)
            .field("token", &self.token.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

mod secs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        d.as_secs_f64().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "http://127.0.0.1:8000/v1".into(),
            model: "gemma2".into(),
            timeout: Duration::from_secs(30),
            retries: 1,
            token: None,
        }
    }
}

fn request_body(cfg: &EndpointConfig, prompt: &ChatPrompt, image: Option<&[u8]>) -> Value {
    let user = match image {
        None => json!(prompt.user),
        Some(bytes) => json!([
            {"type": "text", "text": prompt.user},
            {"type": "image_url", "image_url": {"url": format!("data:image/png;base64,{}", STANDARD.encode(bytes))}}
        ]),
    };
    json!({
        "model": cfg.model,
        "temperature": 0,
        "messages": [
            {"role": "system", "content": prompt.system},
            {"role": "user", "content": user}
        ]
    })
}

fn attempt(
    agent: &ureq::Agent,
    cfg: &EndpointConfig,
    url: &str,
    body: &str,
) -> Result<String, EndpointError> {
    let mut req = agent.post(url).header("Content-Type", "application/json");
    if let Some(token) = &cfg.token {
        req = req.header("Authorization", format!("Bearer {token}"));
    }
    let resp = req.send(body).map_err(|e| classify(e, cfg.timeout))?;
    let status = resp.status().as_u16();
    let text = resp.into_body().read_to_string().map_err(|e| classify(e, cfg.timeout))?;
    if !(200..300).contains(&status) {
        return Err(EndpointError::NonSuccessStatus { status, body: text });
    }
    let value: Value =
        serde_json::from_str(&text).map_err(|e| EndpointError::MalformedResponse(e.to_string()))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| EndpointError::MalformedResponse("missing choices[0].message.content".into()))
}

fn classify(e: ureq::Error, timeout: Duration) -> EndpointError {
    match e {
        ureq::Error::Timeout(_) => EndpointError::Timeout(timeout),
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => EndpointError::Timeout(timeout),
        other => EndpointError::TransportError(other.to_string()),
    }
}

/// Sends the prompt and returns the model's text verbatim.
pub fn llm_infer(
    cfg: &EndpointConfig,
    prompt: &ChatPrompt,
    image: Option<&[u8]>,
) -> Result<String, EndpointError> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(cfg.timeout))
        .http_status_as_error(false)
        .build()
        .into();
    let url = format!("{}/chat/completions", cfg.base_url.trim_end_matches('/'));
    let body = request_body(cfg, prompt, image).to_string();
    let mut last = None;
    for n in 0..=cfg.retries {
        debug!("endpoint request {} to {url}", n + 1);
        match attempt(&agent, cfg, &url, &body) {
            Ok(text) => return Ok(text),
            Err(e) if e.retryable() && n < cfg.retries => {
                warn!("endpoint attempt {} failed: {e}", n + 1);
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Resolver backed by a remote multimodal model.
#[derive(Debug, Clone)]
pub struct LlmResolver {
    pub endpoint: EndpointConfig,
    pub template: PromptTemplate,
}

impl LlmResolver {
    pub const NAME: &'static str = "endpoint";

    pub fn new(endpoint: EndpointConfig) -> Self {
        Self { endpoint, template: PromptTemplate::default() }
    }
}

impl IntentResolver for LlmResolver {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn resolve(&self, query: &IntentQuery, catalog: &ToolCatalog) -> Result<TaskDescription, IntentError> {
        let prompt = build_prompt(query, catalog, &self.template)?;
        let image = match &query.image {
            Some(path) => {
                Some(fs::read(path).map_err(|e| IntentError::Io(format!("{}: {e}", path.display())))?)
            }
            None => None,
        };
        let raw = llm_infer(&self.endpoint, &prompt, image.as_deref())?;
        parse_task_description(&raw, catalog)
    }
}
