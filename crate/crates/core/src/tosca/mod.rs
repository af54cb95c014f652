//! TOSCA topology mapping, YAML emission and CSAR packaging.

mod emit;
mod map;
mod profile;

use indexmap::IndexMap;
use serde_json::Value;
use thiserror::Error;

pub use emit::{emit_yaml, package_csar, CsarManifest, PackageError, ENTRY_DEFINITIONS};
pub use map::map_to_topology;
pub use profile::{builtin_profile, ProviderProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MappingMode {
    #[default]
    Orchestration,
    EventDriven,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapOptions {
    pub profile: ProviderProfile,
    pub aggregate_stores: bool,
    pub mode: MappingMode,
}

impl MapOptions {
    pub fn new(profile: ProviderProfile) -> Self {
        MapOptions { profile, aggregate_stores: false, mode: MappingMode::Orchestration }
    }
}

/// What a node template stands for in the source model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeRole {
    Task(String),
    /// One store, or several when aggregated.
    Store(Vec<String>),
    Orchestrator,
    Platform(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactRef {
    pub name: String,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeTemplate {
    pub name: String,
    pub type_name: String,
    pub role: NodeRole,
    pub properties: IndexMap<String, Value>,
    pub artifacts: Vec<ArtifactRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Orchestrates,
    ConnectsTo,
    HostedOn,
}

impl RelationKind {
    /// Requirement name used when the relationship is written on its source node.
    pub fn requirement(self) -> &'static str {
        match self {
            RelationKind::Orchestrates => "orchestrates",
            RelationKind::ConnectsTo => "connection",
            RelationKind::HostedOn => "host",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationshipTemplate {
    pub kind: RelationKind,
    pub type_name: String,
    pub source: String,
    pub target: String,
    pub properties: IndexMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ToscaTopology {
    pub node_templates: Vec<NodeTemplate>,
    pub relationships: Vec<RelationshipTemplate>,
    /// Mapping remarks, emitted as the topology description.
    pub notes: Vec<String>,
    /// Archive path the state machine document is packaged under.
    pub orchestration_path: Option<String>,
}

impl ToscaTopology {
    pub fn node(&self, name: &str) -> Option<&NodeTemplate> {
        self.node_templates.iter().find(|n| n.name == name)
    }

    pub fn relationships_of(&self, kind: RelationKind) -> impl Iterator<Item = &RelationshipTemplate> {
        self.relationships.iter().filter(move |r| r.kind == kind)
    }

    pub fn count_type(&self, type_name: &str) -> usize {
        self.node_templates.iter().filter(|n| n.type_name == type_name).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("process has no tasks to deploy")]
    EmptyProcess,
    #[error("no node type for ML platform `{0}`")]
    UnknownMlPlatform(String),
    #[error("`{0}` cannot be mapped in event-driven mode")]
    UnsupportedEventDriven(String),
    #[error("no hosting platform can be determined")]
    MissingPlatform,
    #[error("unknown provider profile `{0}`")]
    UnknownProfile(String),
    #[error("orchestration mode requires a state machine")]
    MissingStateMachine,
}
