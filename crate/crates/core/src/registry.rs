//! Named strategies, selectable at runtime.
//!
//! Hand providers, grasp providers and intent resolvers are registered under
//! a name and built on demand from a [`ProviderContext`].

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use crate::grasp::AntipodalParams;
use crate::intent::{EndpointConfig, IntentResolver, LlmResolver, RuleResolver};
use crate::io::IoError;
use crate::pipeline::{
    AntipodalProvider, CannedPoseLibrary, FileGraspProvider, GraspCandidateProvider, HandModels,
    PalmUpPlacement, ReceivingHandProvider,
};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown {kind} strategy '{name}' (available: {available})")]
    Unknown { kind: &'static str, name: String, available: String },
    #[error("strategy '{0}' needs {1}")]
    MissingInput(String, &'static str),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Inputs a factory may draw on.
#[derive(Debug, Clone)]
pub struct ProviderContext {
    pub models: Arc<HandModels>,
    pub pose_library: Option<PathBuf>,
    pub grasp_file: Option<PathBuf>,
    pub antipodal: AntipodalParams,
    pub endpoint: EndpointConfig,
}

impl Default for ProviderContext {
    fn default() -> Self {
        Self {
            models: Arc::new(HandModels::synthetic()),
            pose_library: None,
            grasp_file: None,
            antipodal: AntipodalParams::default(),
            endpoint: EndpointConfig::default(),
        }
    }
}

type Factory<T> = Box<dyn Fn(&ProviderContext) -> Result<Box<T>, RegistryError> + Send + Sync>;

struct Table<T: ?Sized> {
    kind: &'static str,
    factories: BTreeMap<String, Factory<T>>,
}

impl<T: ?Sized> Table<T> {
    fn new(kind: &'static str) -> Self {
        Self { kind, factories: BTreeMap::new() }
    }

    fn build(&self, name: &str, ctx: &ProviderContext) -> Result<Box<T>, RegistryError> {
        let f = self.factories.get(name).ok_or_else(|| RegistryError::Unknown {
            kind: self.kind,
            name: name.to_string(),
            available: self.factories.keys().cloned().collect::<Vec<_>>().join(", "),
        })?;
        f(ctx)
    }

    fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }
}

pub struct StrategyRegistry {
    hands: Table<dyn ReceivingHandProvider>,
    grasps: Table<dyn GraspCandidateProvider>,
    resolvers: Table<dyn IntentResolver>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self {
            hands: Table::new("hand provider"),
            grasps: Table::new("grasp provider"),
            resolvers: Table::new("intent resolver"),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register_hand_provider(CannedPoseLibrary::NAME, |ctx| {
            let path = ctx
                .pose_library
                .as_ref()
                .ok_or(RegistryError::MissingInput(CannedPoseLibrary::NAME.into(), "a pose library file"))?;
            Ok(Box::new(CannedPoseLibrary::load(path)?))
        });
        r.register_hand_provider(PalmUpPlacement::NAME, |ctx| {
            Ok(Box::new(PalmUpPlacement::new(ctx.models.clone())))
        });
        r.register_grasp_provider(AntipodalProvider::NAME, |ctx| {
            Ok(Box::new(AntipodalProvider { params: ctx.antipodal }))
        });
        r.register_grasp_provider(FileGraspProvider::NAME, |ctx| {
            let path = ctx
                .grasp_file
                .as_ref()
                .ok_or(RegistryError::MissingInput(FileGraspProvider::NAME.into(), "a grasp file"))?;
            Ok(Box::new(FileGraspProvider::load(path)?))
        });
        r.register_resolver(RuleResolver::NAME, |_| Ok(Box::new(RuleResolver)));
        r.register_resolver(LlmResolver::NAME, |ctx| Ok(Box::new(LlmResolver::new(ctx.endpoint.clone()))));
        r
    }

    pub fn register_hand_provider<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&ProviderContext) -> Result<Box<dyn ReceivingHandProvider>, RegistryError>
            + Send
            + Sync
            + 'static,
    {
        self.hands.factories.insert(name.to_string(), Box::new(f));
    }

    pub fn register_grasp_provider<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&ProviderContext) -> Result<Box<dyn GraspCandidateProvider>, RegistryError>
            + Send
            + Sync
            + 'static,
    {
        self.grasps.factories.insert(name.to_string(), Box::new(f));
    }

    pub fn register_resolver<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&ProviderContext) -> Result<Box<dyn IntentResolver>, RegistryError> + Send + Sync + 'static,
    {
        self.resolvers.factories.insert(name.to_string(), Box::new(f));
    }

    pub fn hand_provider(
        &self,
        name: &str,
        ctx: &ProviderContext,
    ) -> Result<Box<dyn ReceivingHandProvider>, RegistryError> {
        self.hands.build(name, ctx)
    }

    pub fn grasp_provider(
        &self,
        name: &str,
        ctx: &ProviderContext,
    ) -> Result<Box<dyn GraspCandidateProvider>, RegistryError> {
        self.grasps.build(name, ctx)
    }

    pub fn resolver(
        &self,
        name: &str,
        ctx: &ProviderContext,
    ) -> Result<Box<dyn IntentResolver>, RegistryError> {
        self.resolvers.build(name, ctx)
    }

    pub fn hand_provider_names(&self) -> Vec<&str> {
        self.hands.names()
    }

    pub fn grasp_provider_names(&self) -> Vec<&str> {
        self.grasps.names()
    }

    pub fn resolver_names(&self) -> Vec<&str> {
        self.resolvers.names()
    }
}
