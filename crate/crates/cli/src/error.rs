//! Exit codes and machine-readable error reports.

use handover_core::grasp::GraspError;
use handover_core::hand_model::HandModelError;
use handover_core::intent::IntentError;
use handover_core::io::IoError;
use handover_core::pipeline::PipelineError;
use handover_core::registry::RegistryError;
use serde_json::{json, Value};

/// Output was produced and checks passed.
pub const EXIT_OK: u8 = 0;
/// The inputs were readable but the result failed a check.
pub const EXIT_VALIDATION: u8 = 1;
/// Unreadable, malformed or missing input.
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
    pub details: Option<Value>,
}

impl CliError {
    pub fn input(kind: &'static str, message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, kind, message: message.into(), details: None }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "error": {
                "kind": self.kind,
                "message": self.message,
                "exit_code": self.code,
            }
        });
        if let Some(d) = &self.details {
            v["error"]["details"] = d.clone();
        }
        v
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        let kind = match &e {
            IoError::Read { .. } => "ReadError",
            IoError::Write { .. } => "WriteError",
            IoError::MalformedHeader(_) => "MalformedHeader",
            IoError::UnsupportedEncoding(_) => "UnsupportedEncoding",
            IoError::MalformedBody(_) => "MalformedBody",
            IoError::Parse { .. } => "ParseError",
            IoError::Invalid(_) => "InvalidInput",
        };
        CliError::input(kind, e.to_string())
    }
}

impl From<HandModelError> for CliError {
    fn from(e: HandModelError) -> Self {
        let kind = match &e {
            HandModelError::AmbiguousHandedness(_) => "AmbiguousHandedness",
            HandModelError::DegenerateDirection(_) | HandModelError::DegenerateNormal => {
                "DegenerateObservation"
            }
            _ => "InvalidHandInput",
        };
        CliError::input(kind, e.to_string())
    }
}

impl From<GraspError> for CliError {
    fn from(e: GraspError) -> Self {
        match e {
            GraspError::NoCandidatesFound => CliError {
                code: EXIT_VALIDATION,
                kind: "NoCandidatesFound",
                message: e.to_string(),
                details: None,
            },
            GraspError::WidthOutOfRange(_) => CliError::input("WidthOutOfRange", e.to_string()),
            other => CliError::input("InvalidGraspInput", other.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let message = e.to_string();
        let validation =
            |kind, details| CliError { code: EXIT_VALIDATION, kind, message: message.clone(), details };
        match e {
            PipelineError::AllCandidatesCollide(ref list) => {
                let d = list
                    .iter()
                    .map(|(index, min_distance)| json!({ "index": index, "min_distance": min_distance }))
                    .collect();
                validation("AllCandidatesCollide", Some(Value::Array(d)))
            }
            PipelineError::ValidationFailed(ref report) => {
                validation("ValidationFailed", serde_json::to_value(report.as_ref()).ok())
            }
            PipelineError::HandednessMismatch { .. } => validation("HandednessMismatch", None),
            PipelineError::MatchingResidual(ref r) => {
                validation("MatchingResidual", serde_json::to_value(r).ok())
            }
            PipelineError::ProviderEmpty(_) => validation("ProviderEmpty", None),
            PipelineError::DegenerateObservation(_) => CliError::input("DegenerateObservation", message),
            PipelineError::Schema(_) => CliError::input("UnsupportedSchema", message),
            PipelineError::Io(io) => io.into(),
            PipelineError::Hand(h) => h.into(),
            PipelineError::Grasp(g) => g.into(),
            PipelineError::Cloud(_) => CliError::input("InvalidCloud", message),
        }
    }
}

impl From<IntentError> for CliError {
    fn from(e: IntentError) -> Self {
        let message = e.to_string();
        let unresolved =
            |kind| CliError { code: EXIT_VALIDATION, kind, message: message.clone(), details: None };
        match e {
            IntentError::TemplateMismatch(_) => unresolved("TemplateMismatch"),
            IntentError::UnknownObject(_) => unresolved("UnknownObject"),
            IntentError::NoObjectResolved => unresolved("NoObjectResolved"),
            IntentError::EmptyText => CliError::input("EmptyText", message),
            IntentError::MissingHandedness => CliError::input("MissingHandedness", message),
            IntentError::InvalidCatalog(_) => CliError::input("InvalidCatalog", message),
            IntentError::EmptyCorpus => CliError::input("EmptyCorpus", message),
            IntentError::Hand(h) => h.into(),
            IntentError::Endpoint(_) => CliError::input("EndpointError", message),
            IntentError::Io(_) => CliError::input("ReadError", message),
        }
    }
}

impl From<RegistryError> for CliError {
    fn from(e: RegistryError) -> Self {
        match e {
            RegistryError::Io(io) => io.into(),
            other => CliError::input("UnknownStrategy", other.to_string()),
        }
    }
}
