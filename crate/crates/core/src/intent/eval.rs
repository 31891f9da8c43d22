//! Accuracy of a resolver over a corpus of requests at three ambiguity tiers.
//!
//! An item passes only if both the object and the receiving hand are right.
//! Tier accuracy is `100 · passes / items`; the average is the unweighted mean
//! over the tiers present in the corpus.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{IntentError, IntentQuery, IntentResolver, TaskDescription, ToolCatalog};
use crate::geometry::Vec3;
use crate::hand_model::Handedness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// Object named explicitly.
    Clear,
    /// Use case given, object not named.
    Foggy,
    /// Only the scene is described.
    Fuzzy,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Clear, Tier::Foggy, Tier::Fuzzy];

    pub fn as_str(&self) -> &'static str {
        match self {
            Tier::Clear => "clear",
            Tier::Foggy => "foggy",
            Tier::Fuzzy => "fuzzy",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One corpus record. The receiving hand is given by inline keypoints, a
/// keypoint file (relative to the corpus file), an image, or a bare hint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCorpusItem {
    pub text: String,
    pub tier: Tier,
    pub truth: TaskDescription,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keypoints: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keypoints_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hand: Option<Handedness>,
}

impl EvalCorpusItem {
    pub fn query(&self) -> IntentQuery {
        IntentQuery {
            text: self.text.clone(),
            keypoints: self.keypoints.as_ref().map(|k| k.iter().map(|p| Vec3::from(*p)).collect()),
            image: self.image.clone(),
            handedness: self.hand,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum KeypointFile {
    Bare(Vec<[f64; 3]>),
    Wrapped { joints: Vec<[f64; 3]> },
}

/// Reads a corpus and inlines any referenced keypoint files.
pub fn load_corpus(path: &Path) -> Result<Vec<EvalCorpusItem>, IntentError> {
    let text = fs::read_to_string(path).map_err(|e| IntentError::Io(format!("{}: {e}", path.display())))?;
    let mut items: Vec<EvalCorpusItem> =
        serde_json::from_str(&text).map_err(|e| IntentError::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    for item in &mut items {
        if let Some(rel) = item.keypoints_file.take() {
            let p = base.join(&rel);
            let raw = fs::read_to_string(&p).map_err(|e| IntentError::Io(format!("{}: {e}", p.display())))?;
            let kp: KeypointFile =
                serde_json::from_str(&raw).map_err(|e| IntentError::Io(format!("{}: {e}", p.display())))?;
            item.keypoints = Some(match kp {
                KeypointFile::Bare(j) | KeypointFile::Wrapped { joints: j } => j,
            });
            item.keypoints_file = Some(rel);
        }
    }
    Ok(items)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierStats {
    pub tier: Tier,
    pub items: usize,
    pub passes: usize,
    pub accuracy: f64,
}

impl TierStats {
    pub fn new(tier: Tier, items: usize, passes: usize) -> Self {
        let accuracy = if items == 0 { 0.0 } else { 100.0 * passes as f64 / items as f64 };
        Self { tier, items, passes, accuracy }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemResult {
    pub index: usize,
    pub tier: Tier,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<TaskDescription>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub resolver: String,
    /// Present tiers, in clear/foggy/fuzzy order.
    pub tiers: Vec<TierStats>,
    pub absent_tiers: Vec<Tier>,
    pub average_accuracy: f64,
    pub items: Vec<ItemResult>,
}

/// Unweighted mean of per-tier accuracies.
pub fn average_accuracy(accuracies: &[f64]) -> f64 {
    if accuracies.is_empty() {
        return 0.0;
    }
    accuracies.iter().sum::<f64>() / accuracies.len() as f64
}

impl EvalReport {
    pub fn from_results(resolver: &str, items: Vec<ItemResult>) -> Self {
        let mut tiers = Vec::new();
        let mut absent_tiers = Vec::new();
        for tier in Tier::ALL {
            let of_tier: Vec<&ItemResult> = items.iter().filter(|r| r.tier == tier).collect();
            if of_tier.is_empty() {
                absent_tiers.push(tier);
            } else {
                let passes = of_tier.iter().filter(|r| r.passed).count();
                tiers.push(TierStats::new(tier, of_tier.len(), passes));
            }
        }
        let accs: Vec<f64> = tiers.iter().map(|t| t.accuracy).collect();
        Self {
            resolver: resolver.to_string(),
            average_accuracy: average_accuracy(&accs),
            tiers,
            absent_tiers,
            items,
        }
    }

    /// `tier,items,passes,accuracy` rows plus a final `average` row.
    pub fn to_csv(&self) -> Result<String, IntentError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| IntentError::Io(e.to_string());
        w.write_record(["tier", "items", "passes", "accuracy"]).map_err(io)?;
        for t in &self.tiers {
            w.write_record([
                t.tier.as_str().to_string(),
                t.items.to_string(),
                t.passes.to_string(),
                format!("{:.2}", t.accuracy),
            ])
            .map_err(io)?;
        }
        let items: usize = self.tiers.iter().map(|t| t.items).sum();
        let passes: usize = self.tiers.iter().map(|t| t.passes).sum();
        w.write_record([
            "average".to_string(),
            items.to_string(),
            passes.to_string(),
            format!("{:.2}", self.average_accuracy),
        ])
        .map_err(io)?;
        let bytes = w.into_inner().map_err(|e| IntentError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// Runs the resolver over every item (in parallel) and aggregates.
pub fn evaluate_corpus(
    corpus: &[EvalCorpusItem],
    resolver: &dyn IntentResolver,
    catalog: &ToolCatalog,
) -> Result<EvalReport, IntentError> {
    if corpus.is_empty() {
        return Err(IntentError::EmptyCorpus);
    }
    let results: Vec<ItemResult> = corpus
        .par_iter()
        .enumerate()
        .map(|(index, item)| {
            let truth_object = catalog.canonical(&item.truth.object).unwrap_or(&item.truth.object);
            match resolver.resolve(&item.query(), catalog) {
                Ok(pred) => ItemResult {
                    index,
                    tier: item.tier,
                    passed: pred.object == truth_object && pred.hand == item.truth.hand,
                    predicted: Some(pred),
                    error: None,
                },
                Err(e) => ItemResult {
                    index,
                    tier: item.tier,
                    passed: false,
                    predicted: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(EvalReport::from_results(resolver.name(), results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intent::RuleResolver;

    fn item(text: &str, tier: Tier, object: &str, hand: Handedness, hint: Handedness) -> EvalCorpusItem {
        EvalCorpusItem {
            text: text.into(),
            tier,
            truth: TaskDescription::new(object, hand),
            keypoints: None,
            keypoints_file: None,
            image: None,
            hand: Some(hint),
        }
    }

    #[test]
    fn published_tier_average() {
        let avg = average_accuracy(&[50.11, 40.51, 42.09]);
        assert!((avg - 44.24).abs() <= 0.005, "{avg}");
    }

    #[test]
    fn all_correct_is_100() {
        use Handedness::*;
        let corpus = vec![
            item("I need a knife", Tier::Clear, "knife", Right, Right),
            item("I want to play games", Tier::Foggy, "game controller", Left, Left),
            item("it is too dark in here", Tier::Fuzzy, "flashlight", Right, Right),
        ];
        let r = evaluate_corpus(&corpus, &RuleResolver, &ToolCatalog::fixture()).unwrap();
        assert!(r.tiers.iter().all(|t| t.accuracy == 100.0));
        assert_eq!(r.average_accuracy, 100.0);
        assert!(r.absent_tiers.is_empty());
    }

    #[test]
    fn wrong_hand_fails_and_absent_tier_reported() {
        use Handedness::*;
        let corpus = vec![
            item("I need a knife", Tier::Clear, "knife", Right, Left),
            item("I need a mug", Tier::Clear, "mug", Right, Right),
        ];
        let r = evaluate_corpus(&corpus, &RuleResolver, &ToolCatalog::fixture()).unwrap();
        assert!(!r.items[0].passed);
        assert_eq!(r.tiers, vec![TierStats::new(Tier::Clear, 2, 1)]);
        assert_eq!(r.absent_tiers, vec![Tier::Foggy, Tier::Fuzzy]);
        assert_eq!(r.average_accuracy, 50.0);
        let csv = r.to_csv().unwrap();
        assert_eq!(csv, "tier,items,passes,accuracy\nclear,2,1,50.00\naverage,2,1,50.00\n");
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            evaluate_corpus(&[], &RuleResolver, &ToolCatalog::fixture()),
            Err(IntentError::EmptyCorpus)
        ));
    }
}
