//! Handover intent: which object to pass and to which hand.
//!
//! The structured output the model is asked to produce, and which every
//! resolver ultimately returns, is the sentence
//! `Pass the <object> to <left|right> hand of human`.

mod endpoint;
mod eval;
mod prompt;
mod wrist;

pub use endpoint::{llm_infer, EndpointConfig, EndpointError, LlmResolver};
pub use eval::{
    average_accuracy, evaluate_corpus, load_corpus, EvalCorpusItem, EvalReport, ItemResult, Tier, TierStats,
};
pub use prompt::{build_prompt, ChatPrompt, PromptTemplate};
pub use wrist::{
    canonical_wrist_poses, sample_wrist_pose, GripType, SampledWristPose, WristAngles, WristBounds,
};

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec3;
use crate::hand_model::{classify_handedness, HandModelError, Handedness};

#[derive(Debug, Error)]
pub enum IntentError {
    #[error("query text is empty")]
    EmptyText,
    #[error("output does not follow the task template: {0:?}")]
    TemplateMismatch(String),
    #[error("object '{0}' is not in the catalog")]
    UnknownObject(String),
    #[error("no catalog object matches the request")]
    NoObjectResolved,
    #[error("no keypoints or handedness given for the receiving hand")]
    MissingHandedness,
    #[error("invalid catalog: {0}")]
    InvalidCatalog(String),
    #[error("evaluation corpus is empty")]
    EmptyCorpus,
    #[error(transparent)]
    Hand(#[from] HandModelError),
    #[error(transparent)]
    Endpoint(#[from] EndpointError),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolEntry {
    pub name: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub use_cases: Vec<String>,
}

/// Objects the robot can hand over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ToolEntry>", into = "Vec<ToolEntry>")]
pub struct ToolCatalog {
    entries: Vec<ToolEntry>,
}

impl TryFrom<Vec<ToolEntry>> for ToolCatalog {
    type Error = IntentError;

    fn try_from(entries: Vec<ToolEntry>) -> Result<Self, Self::Error> {
        ToolCatalog::new(entries)
    }
}

impl From<ToolCatalog> for Vec<ToolEntry> {
    fn from(c: ToolCatalog) -> Self {
        c.entries
    }
}

impl ToolCatalog {
    pub fn new(entries: Vec<ToolEntry>) -> Result<Self, IntentError> {
        let mut seen = HashSet::new();
        for e in &entries {
            let key = normalize_text(&e.name);
            if key.is_empty() {
                return Err(IntentError::InvalidCatalog("empty canonical name".into()));
            }
            if !seen.insert(key) {
                return Err(IntentError::InvalidCatalog(format!("duplicate name '{}'", e.name)));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_json(text: &str) -> Result<Self, IntentError> {
        serde_json::from_str(text).map_err(|e| IntentError::InvalidCatalog(e.to_string()))
    }

    /// The 16-object catalog shipped with the crate.
    pub fn fixture() -> Self {
        Self::from_json(include_str!("../../fixtures/catalog.json")).expect("fixture catalog")
    }

    pub fn entries(&self) -> &[ToolEntry] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.canonical(name).is_some()
    }

    /// Canonical spelling of `name`, compared case- and punctuation-insensitively.
    pub fn canonical(&self, name: &str) -> Option<&str> {
        let key = normalize_text(name);
        self.entries.iter().find(|e| normalize_text(&e.name) == key).map(|e| e.name.as_str())
    }

    /// Resolves an object phrase: exact name, exact synonym, then the longest
    /// name or synonym contained in the phrase.
    fn match_object(&self, phrase: &str) -> Option<&str> {
        let key = normalize_text(phrase);
        if let Some(name) = self.canonical(&key) {
            return Some(name);
        }
        for e in &self.entries {
            if e.synonyms.iter().any(|s| normalize_text(s) == key) {
                return Some(&e.name);
            }
        }
        let longest = |terms: &dyn Fn(&ToolEntry) -> Vec<String>| {
            let mut best: Option<(usize, &str)> = None;
            for e in &self.entries {
                for t in terms(e) {
                    let t = normalize_text(&t);
                    if !t.is_empty() && contains_phrase(&key, &t) && best.is_none_or(|(len, _)| t.len() > len)
                    {
                        best = Some((t.len(), e.name.as_str()));
                    }
                }
            }
            best.map(|(_, n)| n)
        };
        longest(&|e| vec![e.name.clone()]).or_else(|| longest(&|e| e.synonyms.clone()))
    }
}

/// Lowercase, punctuation to spaces, single spaces.
pub(crate) fn normalize_text(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Word-boundary containment on normalized text.
pub(crate) fn contains_phrase(text: &str, phrase: &str) -> bool {
    format!(" {text} ").contains(&format!(" {phrase} "))
}

/// Parsed handover intent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaskDescription {
    pub object: String,
    pub hand: Handedness,
}

impl TaskDescription {
    pub fn new(object: impl Into<String>, hand: Handedness) -> Self {
        Self { object: object.into(), hand }
    }

    pub fn render(&self) -> String {
        format!("Pass the {} to {} hand of human", self.object, self.hand)
    }
}

impl fmt::Display for TaskDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn template_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?is)^\s*pass\s+the\s+(.+)\s+to\s+(left|right)\s+hand\s+of\s+human\s*\.?\s*$")
            .expect("template regex")
    })
}

/// Parses `Pass the <object> to <left|right> hand of human`, case-insensitive,
/// allowing surrounding whitespace and a trailing period.
pub fn parse_task_description(raw: &str, catalog: &ToolCatalog) -> Result<TaskDescription, IntentError> {
    let caps =
        template_regex().captures(raw).ok_or_else(|| IntentError::TemplateMismatch(raw.to_string()))?;
    let phrase = caps[1].trim();
    let hand: Handedness = caps[2].parse().map_err(|_| IntentError::TemplateMismatch(raw.into()))?;
    let object =
        catalog.match_object(phrase).ok_or_else(|| IntentError::UnknownObject(phrase.to_string()))?;
    Ok(TaskDescription::new(object, hand))
}

/// Text plus whatever is known about the receiving hand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntentQuery {
    pub text: String,
    pub keypoints: Option<Vec<Vec3>>,
    /// Opaque image reference, forwarded to the endpoint.
    pub image: Option<PathBuf>,
    pub handedness: Option<Handedness>,
}

impl IntentQuery {
    pub fn text(text: impl Into<String>) -> Self {
        Self { text: text.into(), ..Default::default() }
    }

    pub fn with_keypoints(mut self, keypoints: Vec<Vec3>) -> Self {
        self.keypoints = Some(keypoints);
        self
    }

    pub fn with_handedness(mut self, hand: Handedness) -> Self {
        self.handedness = Some(hand);
        self
    }

    pub fn with_image(mut self, image: PathBuf) -> Self {
        self.image = Some(image);
        self
    }

    pub fn validate(&self) -> Result<(), IntentError> {
        if self.text.trim().is_empty() {
            return Err(IntentError::EmptyText);
        }
        Ok(())
    }

    /// Handedness from keypoints when present, else the explicit hint.
    pub fn receiving_hand(&self) -> Result<Handedness, IntentError> {
        match (&self.keypoints, self.handedness) {
            (Some(k), _) => Ok(classify_handedness(k)?),
            (None, Some(h)) => Ok(h),
            (None, None) => Err(IntentError::MissingHandedness),
        }
    }
}

/// A strategy that turns a query into a task description.
pub trait IntentResolver: Send + Sync {
    fn name(&self) -> &str;
    fn resolve(&self, query: &IntentQuery, catalog: &ToolCatalog) -> Result<TaskDescription, IntentError>;
}

/// Offline resolver: phrase matching against the catalog.
///
/// An exact canonical name outranks a synonym, which outranks a use-case
/// phrase; ties go to the earlier catalog entry.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleResolver;

impl RuleResolver {
    pub const NAME: &'static str = "rules";

    pub fn resolve_object<'c>(&self, text: &str, catalog: &'c ToolCatalog) -> Option<&'c str> {
        let text = normalize_text(text);
        let hit = |terms: &[String]| {
            terms.iter().any(|t| {
                let t = normalize_text(t);
                !t.is_empty() && contains_phrase(&text, &t)
            })
        };
        let mut best: Option<(u8, &str)> = None;
        for e in catalog.entries() {
            let score = if hit(std::slice::from_ref(&e.name)) {
                3
            } else if hit(&e.synonyms) {
                2
            } else if hit(&e.use_cases) {
                1
            } else {
                0
            };
            if score > 0 && best.is_none_or(|(s, _)| score > s) {
                best = Some((score, e.name.as_str()));
            }
        }
        best.map(|(_, n)| n)
    }
}

impl IntentResolver for RuleResolver {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn resolve(&self, query: &IntentQuery, catalog: &ToolCatalog) -> Result<TaskDescription, IntentError> {
        query.validate()?;
        let object = self.resolve_object(&query.text, catalog).ok_or(IntentError::NoObjectResolved)?;
        let hand = query.receiving_hand()?;
        Ok(TaskDescription::new(object, hand))
    }
}
