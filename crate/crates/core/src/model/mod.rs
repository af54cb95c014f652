//! In-memory BPMN4sML process graph.
//!
//! A [`Model`] is only obtainable through [`assemble`], which checks the
//! structural invariants (identifier uniqueness, referential closure, lane
//! membership, gateway degrees, condition placement). Kind/attribute coupling
//! rules are left to the validator so they can be reported as findings.

mod kinds;

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

pub use kinds::*;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowNode {
    pub id: String,
    pub name: String,
    pub variant: NodeVariant,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeVariant {
    Task(TaskNode),
    Event(EventNode),
    Gateway(GatewayNode),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskNode {
    pub kind: TaskKind,
    pub execution: ExecutionBinding,
    /// Target environment; meaningful for deployment tasks only.
    pub environment: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionBinding {
    pub mode: ExecutionMode,
    pub platform: Option<String>,
    /// JSON object literal with function configuration.
    pub faas_configuration: Option<String>,
    pub offloading_technology: Option<String>,
    pub ml_platform: Option<String>,
    /// Relative path of the code artifact.
    pub script: Option<String>,
}

impl ExecutionBinding {
    pub fn faas(platform: impl Into<String>, configuration: impl Into<String>) -> Self {
        ExecutionBinding {
            mode: ExecutionMode::FaaS,
            platform: Some(platform.into()),
            faas_configuration: Some(configuration.into()),
            offloading_technology: None,
            ml_platform: None,
            script: None,
        }
    }

    pub fn offloaded(technology: impl Into<String>, ml_platform: Option<String>) -> Self {
        ExecutionBinding {
            mode: ExecutionMode::Offloaded,
            platform: None,
            faas_configuration: None,
            offloading_technology: Some(technology.into()),
            ml_platform,
            script: None,
        }
    }

    pub fn with_script(mut self, script: impl Into<String>) -> Self {
        self.script = Some(script.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventNode {
    pub kind: EventKind,
    pub position: EventPosition,
    /// Name of the data item the event carries.
    pub payload_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GatewayNode {
    pub kind: GatewayKind,
    pub direction: GatewayDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFlow {
    pub id: String,
    pub source: String,
    pub target: String,
    pub condition: Option<Condition>,
}

/// Branch condition of a flow leaving an exclusive gateway.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Default,
    /// `<path> == <literal>` over the process payload.
    Equals { path: String, literal: Literal },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Text(String),
    Number(serde_json::Number),
    Bool(bool),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) => write!(f, "{}", serde_json::Value::String(s.clone())),
            Literal::Number(n) => write!(f, "{n}"),
            Literal::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Default => f.write_str("default"),
            Condition::Equals { path, literal } => write!(f, "{path} == {literal}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataObjectDecl {
    pub id: String,
    pub name: String,
    pub kind: DataObjectKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataObjectKind {
    MlModel {
        identifier: String,
        status: Option<ModelStatus>,
    },
    MlData {
        identifier: String,
        object_type: DataObjectType,
        data_set_type: Option<DataSetType>,
    },
    Code {
        identifier: String,
        operation: String,
    },
    LearningConfiguration {
        identifier: String,
        configuration: String,
        config_type: ConfigType,
    },
    Log {
        log_content: String,
    },
    Metadata {
        association: String,
        location: String,
        description: Option<String>,
    },
    Document {
        identifier: String,
        document_content: String,
        document_type: DocumentType,
    },
}

impl DataObjectKind {
    pub fn category(&self) -> DataObjectCategory {
        match self {
            DataObjectKind::MlModel { .. } => DataObjectCategory::MlModel,
            DataObjectKind::MlData { .. } => DataObjectCategory::MlData,
            DataObjectKind::Code { .. } => DataObjectCategory::Code,
            DataObjectKind::LearningConfiguration { .. } => DataObjectCategory::LearningConfiguration,
            DataObjectKind::Log { .. } => DataObjectCategory::Log,
            DataObjectKind::Metadata { .. } => DataObjectCategory::Metadata,
            DataObjectKind::Document { .. } => DataObjectCategory::Document,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataStoreDecl {
    pub id: String,
    pub name: String,
    pub kind: StoreKind,
    pub placement: String,
    pub platform: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StoreKind {
    ModelRegistry,
    LogStore,
    MetadataRepository,
    DataRepository(RepositoryType),
}

impl StoreKind {
    pub fn category(self) -> StoreCategory {
        match self {
            StoreKind::ModelRegistry => StoreCategory::ModelRegistry,
            StoreKind::LogStore => StoreCategory::LogStore,
            StoreKind::MetadataRepository => StoreCategory::MetadataRepository,
            StoreKind::DataRepository(_) => StoreCategory::DataRepository,
        }
    }

    pub fn repository_type(self) -> Option<RepositoryType> {
        match self {
            StoreKind::DataRepository(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataAssociation {
    pub id: String,
    pub task: String,
    /// Data object or data store identifier.
    pub artifact: String,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lane {
    pub id: String,
    pub name: String,
    pub members: Vec<String>,
}

/// Raw element collections, as gathered by ingest or built by hand.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParts {
    pub process_id: String,
    pub name: String,
    pub nodes: Vec<FlowNode>,
    pub flows: Vec<SequenceFlow>,
    pub data_objects: Vec<DataObjectDecl>,
    pub data_stores: Vec<DataStoreDecl>,
    pub associations: Vec<DataAssociation>,
    pub lanes: Vec<Lane>,
}

impl Default for ModelParts {
    fn default() -> Self {
        ModelParts::new("process", "")
    }
}

impl ModelParts {
    pub fn new(process_id: impl Into<String>, name: impl Into<String>) -> Self {
        ModelParts {
            process_id: process_id.into(),
            name: name.into(),
            nodes: Vec::new(),
            flows: Vec::new(),
            data_objects: Vec::new(),
            data_stores: Vec::new(),
            associations: Vec::new(),
            lanes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssemblyError {
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("`{from}` references unknown element `{to}`")]
    DanglingReference { from: String, to: String },
    #[error("node `{0}` belongs to more than one lane")]
    LaneConflict(String),
    #[error("data association `{association}` is attached to `{node}`, which is not a task")]
    NotATask { association: String, node: String },
    #[error("gateway `{0}` does not have at least two branches on its split/merge side")]
    GatewayDegree(String),
    #[error("flow `{0}` carries a condition but does not leave a diverging exclusive gateway")]
    MisplacedCondition(String),
    #[error("gateway `{0}` has more than one default flow")]
    DuplicateDefault(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("`{0}` is not a task")]
    NotATask(String),
}

/// Data object or data store resolved from an association target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Artifact<'a> {
    Object(&'a DataObjectDecl),
    Store(&'a DataStoreDecl),
}

/// Assembled, immutable process graph.
#[derive(Debug, Clone)]
pub struct Model {
    parts: ModelParts,
    node_index: HashMap<String, usize>,
    object_index: HashMap<String, usize>,
    store_index: HashMap<String, usize>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

pub fn assemble(mut parts: ModelParts) -> Result<Model, AssemblyError> {
    let mut seen = HashSet::new();
    let ids = parts
        .nodes
        .iter()
        .map(|n| &n.id)
        .chain(parts.flows.iter().map(|f| &f.id))
        .chain(parts.data_objects.iter().map(|o| &o.id))
        .chain(parts.data_stores.iter().map(|s| &s.id))
        .chain(parts.lanes.iter().map(|l| &l.id))
        .chain(parts.associations.iter().map(|a| &a.id));
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(AssemblyError::DuplicateId(id.clone()));
        }
    }

    let node_index: HashMap<String, usize> =
        parts.nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
    let object_index: HashMap<String, usize> =
        parts.data_objects.iter().enumerate().map(|(i, o)| (o.id.clone(), i)).collect();
    let store_index: HashMap<String, usize> =
        parts.data_stores.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();

    for flow in &parts.flows {
        for end in [&flow.source, &flow.target] {
            if !node_index.contains_key(end) {
                return Err(AssemblyError::DanglingReference { from: flow.id.clone(), to: end.clone() });
            }
        }
    }

    let mut defaults: HashSet<&str> = HashSet::new();
    for flow in &parts.flows {
        let Some(condition) = &flow.condition else { continue };
        let source = &parts.nodes[node_index[&flow.source]];
        let diverging_xor = matches!(
            source.variant,
            NodeVariant::Gateway(GatewayNode { kind: GatewayKind::Exclusive, direction: GatewayDirection::Diverging })
        );
        if !diverging_xor {
            return Err(AssemblyError::MisplacedCondition(flow.id.clone()));
        }
        if *condition == Condition::Default && !defaults.insert(flow.source.as_str()) {
            return Err(AssemblyError::DuplicateDefault(flow.source.clone()));
        }
    }

    for node in &parts.nodes {
        let NodeVariant::Gateway(gw) = &node.variant else { continue };
        let degree = match gw.direction {
            GatewayDirection::Diverging => parts.flows.iter().filter(|f| f.source == node.id).count(),
            GatewayDirection::Converging => parts.flows.iter().filter(|f| f.target == node.id).count(),
        };
        if degree < 2 {
            return Err(AssemblyError::GatewayDegree(node.id.clone()));
        }
    }

    for assoc in &parts.associations {
        let Some(&idx) = node_index.get(&assoc.task) else {
            return Err(AssemblyError::DanglingReference { from: assoc.id.clone(), to: assoc.task.clone() });
        };
        if !matches!(parts.nodes[idx].variant, NodeVariant::Task(_)) {
            return Err(AssemblyError::NotATask { association: assoc.id.clone(), node: assoc.task.clone() });
        }
        if !object_index.contains_key(&assoc.artifact) && !store_index.contains_key(&assoc.artifact) {
            return Err(AssemblyError::DanglingReference { from: assoc.id.clone(), to: assoc.artifact.clone() });
        }
    }

    let mut laned = HashSet::new();
    for lane in &parts.lanes {
        for member in &lane.members {
            if !node_index.contains_key(member) {
                return Err(AssemblyError::DanglingReference { from: lane.id.clone(), to: member.clone() });
            }
            if !laned.insert(member.as_str()) {
                return Err(AssemblyError::LaneConflict(member.clone()));
            }
        }
    }

    // Canonical association order: grouped by task in node order, stable within a task.
    parts.associations.sort_by_key(|a| node_index[&a.task]);

    Ok(Model { parts, node_index, object_index, store_index })
}

impl Model {
    pub fn process_id(&self) -> &str {
        &self.parts.process_id
    }

    pub fn name(&self) -> &str {
        &self.parts.name
    }

    pub fn nodes(&self) -> &[FlowNode] {
        &self.parts.nodes
    }

    pub fn flows(&self) -> &[SequenceFlow] {
        &self.parts.flows
    }

    pub fn data_objects(&self) -> &[DataObjectDecl] {
        &self.parts.data_objects
    }

    pub fn data_stores(&self) -> &[DataStoreDecl] {
        &self.parts.data_stores
    }

    pub fn associations(&self) -> &[DataAssociation] {
        &self.parts.associations
    }

    pub fn lanes(&self) -> &[Lane] {
        &self.parts.lanes
    }

    pub fn parts(&self) -> &ModelParts {
        &self.parts
    }

    pub fn into_parts(self) -> ModelParts {
        self.parts
    }

    pub fn node(&self, id: &str) -> Option<&FlowNode> {
        self.node_index.get(id).map(|&i| &self.parts.nodes[i])
    }

    /// Document position of a node.
    pub fn node_position(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn task(&self, id: &str) -> Option<&TaskNode> {
        match &self.node(id)?.variant {
            NodeVariant::Task(t) => Some(t),
            _ => None,
        }
    }

    pub fn tasks(&self) -> impl Iterator<Item = (&FlowNode, &TaskNode)> {
        self.parts.nodes.iter().filter_map(|n| match &n.variant {
            NodeVariant::Task(t) => Some((n, t)),
            _ => None,
        })
    }

    pub fn events(&self) -> impl Iterator<Item = (&FlowNode, &EventNode)> {
        self.parts.nodes.iter().filter_map(|n| match &n.variant {
            NodeVariant::Event(e) => Some((n, e)),
            _ => None,
        })
    }

    pub fn data_object(&self, id: &str) -> Option<&DataObjectDecl> {
        self.object_index.get(id).map(|&i| &self.parts.data_objects[i])
    }

    pub fn data_store(&self, id: &str) -> Option<&DataStoreDecl> {
        self.store_index.get(id).map(|&i| &self.parts.data_stores[i])
    }

    pub fn artifact(&self, id: &str) -> Option<Artifact<'_>> {
        self.data_object(id)
            .map(Artifact::Object)
            .or_else(|| self.data_store(id).map(Artifact::Store))
    }

    /// Flows leaving `node`, in document order.
    pub fn outgoing(&self, node: &str) -> Result<Vec<&SequenceFlow>, ModelError> {
        self.require_node(node)?;
        Ok(self.parts.flows.iter().filter(|f| f.source == node).collect())
    }

    /// Flows entering `node`, in document order.
    pub fn incoming(&self, node: &str) -> Result<Vec<&SequenceFlow>, ModelError> {
        self.require_node(node)?;
        Ok(self.parts.flows.iter().filter(|f| f.target == node).collect())
    }

    pub fn associations_of(
        &self,
        task: &str,
        direction: Option<Direction>,
    ) -> Result<Vec<&DataAssociation>, ModelError> {
        let node = self.require_node(task)?;
        if !matches!(node.variant, NodeVariant::Task(_)) {
            return Err(ModelError::NotATask(task.to_string()));
        }
        Ok(self
            .parts
            .associations
            .iter()
            .filter(|a| a.task == task && direction.is_none_or(|d| a.direction == d))
            .collect())
    }

    pub fn lane_of(&self, node: &str) -> Option<&Lane> {
        self.parts.lanes.iter().find(|l| l.members.iter().any(|m| m == node))
    }

    fn require_node(&self, id: &str) -> Result<&FlowNode, ModelError> {
        self.node(id).ok_or_else(|| ModelError::UnknownElement(id.to_string()))
    }
}
