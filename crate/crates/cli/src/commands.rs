//! Subcommand bodies.

use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use handover_core::cloud::ObjectCloud;
use handover_core::grasp::AntipodalParams;
use handover_core::hand_model::load_hand_model;
use handover_core::intent::{
    evaluate_corpus, load_corpus, IntentQuery, LlmResolver, RuleResolver, TaskDescription, ToolCatalog,
};
use handover_core::io::{load_observation, load_ply, read_json, scene_obj, to_json_string};
use handover_core::pipeline::{
    imagine_configuration, match_to_observation, AntipodalProvider, CannedPoseLibrary, FileGraspProvider,
    HandModels, HandoverConfiguration, ImagineConfig, PalmUpPlacement,
};
use handover_core::registry::{ProviderContext, StrategyRegistry};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::settings::FileSettings;
use crate::{Cli, Command, EndpointArgs, EvaluateArgs, ExportArgs, ImagineArgs, InferArgs, MatchArgs};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let settings = match &cli.settings {
        Some(p) => FileSettings::load(p)?,
        None => FileSettings::default(),
    };
    match &cli.command {
        Command::Infer(a) => infer(a, &settings),
        Command::Imagine(a) => imagine(a, &settings),
        Command::Match(a) => match_cmd(a),
        Command::Evaluate(a) => evaluate(a, &settings),
        Command::Export(a) => export(a),
    }
}

/// Writes to `path` when given, else stdout.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| CliError::input("WriteError", format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(to_json_string(value)?)
}

fn load_catalog(path: Option<&Path>) -> Result<ToolCatalog, CliError> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::input("ReadError", format!("{}: {e}", p.display())))?;
            Ok(ToolCatalog::from_json(&text)?)
        }
        None => Ok(ToolCatalog::fixture()),
    }
}

fn load_models(path: Option<&Path>) -> Result<HandModels, CliError> {
    Ok(match path {
        Some(p) => HandModels::from_model(load_hand_model(p)?),
        None => HandModels::synthetic(),
    })
}

fn load_cloud(path: &Path) -> Result<ObjectCloud, CliError> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    Ok(if is_json { read_json(path)? } else { load_ply(path)? })
}

fn provider_context(settings: &FileSettings, endpoint: &EndpointArgs) -> Result<ProviderContext, CliError> {
    Ok(ProviderContext {
        endpoint: settings.endpoint(endpoint.endpoint.as_deref(), endpoint.model.as_deref())?,
        ..ProviderContext::default()
    })
}

fn resolver_name(endpoint: &EndpointArgs) -> &str {
    match (&endpoint.resolver, &endpoint.endpoint) {
        (Some(r), _) => r,
        (None, Some(_)) => LlmResolver::NAME,
        (None, None) => RuleResolver::NAME,
    }
}

fn infer(a: &InferArgs, settings: &FileSettings) -> Result<(), CliError> {
    let catalog = load_catalog(a.endpoint.catalog.as_deref())?;
    let ctx = provider_context(settings, &a.endpoint)?;
    let resolver = StrategyRegistry::with_builtins().resolver(resolver_name(&a.endpoint), &ctx)?;
    let mut query = IntentQuery::text(&a.text);
    if let Some(p) = &a.keypoints {
        query = query.with_keypoints(load_observation(p)?.joints);
    }
    if let Some(h) = a.hand {
        query = query.with_handedness(h);
    }
    if let Some(img) = &a.image {
        query = query.with_image(img.clone());
    }
    log::info!("resolving with '{}'", resolver.name());
    let task = resolver.resolve(&query, &catalog)?;
    emit(a.out.as_deref(), &pretty(&task)?)
}

fn imagine(a: &ImagineArgs, settings: &FileSettings) -> Result<(), CliError> {
    let task: TaskDescription = read_json(&a.task)?;
    let cloud = load_cloud(&a.cloud)?;
    let models = Arc::new(load_models(a.hand_model.as_deref())?);
    let ctx = ProviderContext {
        models: models.clone(),
        pose_library: a.poses.clone(),
        grasp_file: a.grasps.clone(),
        antipodal: AntipodalParams { seed: a.seed, count: a.count, ..AntipodalParams::default() },
        ..ProviderContext::default()
    };
    let hand_name = match (&a.hand_provider, &a.poses) {
        (Some(n), _) => n.as_str(),
        (None, Some(_)) => CannedPoseLibrary::NAME,
        (None, None) => PalmUpPlacement::NAME,
    };
    let grasp_name = match (&a.grasp_provider, &a.grasps) {
        (Some(n), _) => n.as_str(),
        (None, Some(_)) if !a.sample_antipodal => FileGraspProvider::NAME,
        _ => AntipodalProvider::NAME,
    };
    let registry = StrategyRegistry::with_builtins();
    let hands = registry.hand_provider(hand_name, &ctx)?;
    let grasps = registry.grasp_provider(grasp_name, &ctx)?;
    let s = &a.selection;
    let cfg = ImagineConfig {
        selection: settings.selection(s.lambda, s.clearance, s.cosine_mode),
        ..ImagineConfig::default()
    };
    log::info!("imagining '{}' for the {} hand with {hand_name} / {grasp_name}", task.object, task.hand);

    let start = Instant::now();
    let config = imagine_configuration(&task, &cloud, hands.as_ref(), grasps.as_ref(), &models, &cfg)?;
    let elapsed = start.elapsed();
    let text = if a.timing {
        with_timing(&config, json!({ "imagination_ms": elapsed.as_secs_f64() * 1e3 }))?
    } else {
        pretty(&config)?
    };
    emit(a.out.as_deref(), &text)
}

fn with_timing<T: Serialize>(value: &T, timing: Value) -> Result<String, CliError> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::input("SerializeError", e.to_string()))?;
    v["timing"] = timing;
    pretty(&v)
}

fn match_cmd(a: &MatchArgs) -> Result<(), CliError> {
    let config = HandoverConfiguration::load(&a.config)?;
    let observed = load_observation(&a.observed_keypoints)?;
    let start = Instant::now();
    let target = match_to_observation(&config, &observed.joints)?;
    let elapsed = start.elapsed();
    let text = if a.timing {
        with_timing(&target, json!({ "execution_ms": elapsed.as_secs_f64() * 1e3 }))?
    } else {
        pretty(&target)?
    };
    emit(a.out.as_deref(), &text)
}

fn evaluate(a: &EvaluateArgs, settings: &FileSettings) -> Result<(), CliError> {
    let catalog = load_catalog(a.endpoint.catalog.as_deref())?;
    let corpus = load_corpus(&a.corpus)?;
    let ctx = provider_context(settings, &a.endpoint)?;
    let resolver = StrategyRegistry::with_builtins().resolver(resolver_name(&a.endpoint), &ctx)?;
    let report = evaluate_corpus(&corpus, resolver.as_ref(), &catalog)?;
    for t in &report.tiers {
        log::info!("{}: {}/{} ({:.2}%)", t.tier, t.passes, t.items, t.accuracy);
    }
    let Some(path) = &a.report else {
        return emit(None, &pretty(&report)?);
    };
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = if is_csv { report.to_csv()? } else { pretty(&report)? };
    emit(Some(path), &text)?;
    println!("average accuracy {:.2}% over {} items", report.average_accuracy, corpus.len());
    Ok(())
}

fn export(a: &ExportArgs) -> Result<(), CliError> {
    let config = HandoverConfiguration::load(&a.config)?;
    let models = load_models(a.hand_model.as_deref())?;
    let text = scene_obj(&config, &models.get(config.task.hand).faces)?;
    emit(Some(&a.out), &text)
}
