use std::collections::{HashMap, HashSet};

use indexmap::{IndexMap, IndexSet};
use serde_json::Value;

use super::*;
use crate::model::{Artifact, EventPosition, ExecutionMode, EventKind, Model, NodeVariant};
use crate::naming::{sanitize, task_names, UniqueNamer};
use crate::orchestration::StateMachine;

/// Map a model (and, in orchestration mode, its state machine) onto a
/// provider topology.
pub fn map_to_topology(model: &Model, sm: Option<&StateMachine>, opts: &MapOptions) -> Result<ToscaTopology, MapError> {
    if model.tasks().next().is_none() {
        return Err(MapError::EmptyProcess);
    }
    let orchestrated = match opts.mode {
        MappingMode::Orchestration => Some(sm.ok_or(MapError::MissingStateMachine)?),
        MappingMode::EventDriven => None,
    };

    let (names, namer) = task_names(model);
    let mut m = Mapper {
        model,
        profile: &opts.profile,
        names,
        namer,
        topology: ToscaTopology::default(),
        hosting: Vec::new(),
    };

    m.tasks()?;
    let store_nodes = m.stores(opts.aggregate_stores)?;
    if let Some(sm) = orchestrated {
        m.orchestrator(sm)?;
    }
    m.connections(&store_nodes);
    if opts.mode == MappingMode::EventDriven {
        m.triggers(&store_nodes)?;
    }
    m.platforms();
    Ok(m.topology)
}

struct Mapper<'a> {
    model: &'a Model,
    profile: &'a ProviderProfile,
    /// task id -> node name
    names: HashMap<String, String>,
    namer: UniqueNamer,
    topology: ToscaTopology,
    /// (node name, hosting platform value) in node order
    hosting: Vec<(String, String)>,
}

impl Mapper<'_> {
    /// Platform of the first FaaS task, else of the first store with one.
    fn default_platform(&self) -> Result<String, MapError> {
        self.model
            .tasks()
            .filter(|(_, t)| t.execution.mode == ExecutionMode::FaaS)
            .find_map(|(_, t)| t.execution.platform.clone())
            .or_else(|| self.model.data_stores().iter().find_map(|s| s.platform.clone()))
            .filter(|p| !p.trim().is_empty())
            .ok_or(MapError::MissingPlatform)
    }

    fn push(&mut self, node: NodeTemplate, platform: String) {
        self.hosting.push((node.name.clone(), platform));
        self.topology.node_templates.push(node);
    }

    fn tasks(&mut self) -> Result<(), MapError> {
        for (node, task) in self.model.tasks() {
            let b = &task.execution;
            let name = self.names[&node.id].clone();
            let mut properties = IndexMap::new();
            let mut artifacts = Vec::new();
            let (type_name, platform) = match b.mode {
                ExecutionMode::FaaS => {
                    if let Some(Ok(Value::Object(cfg))) =
                        b.faas_configuration.as_deref().map(serde_json::from_str::<Value>)
                    {
                        properties.extend(cfg);
                    }
                    if let Some(script) = &b.script {
                        artifacts.push(ArtifactRef { name: "code".into(), path: script.clone() });
                    }
                    let platform = match b.platform.clone().filter(|p| !p.trim().is_empty()) {
                        Some(p) => p,
                        None => self.default_platform()?,
                    };
                    (self.profile.function_node_type.clone(), platform)
                }
                ExecutionMode::Offloaded => {
                    if let Some(script) = &b.script {
                        properties.insert("script".into(), Value::String(script.clone()));
                    }
                    let tech = b.offloading_technology.clone().unwrap_or_default();
                    match &b.ml_platform {
                        Some(ml) => {
                            let t = self
                                .profile
                                .ml_platform_type(ml)
                                .ok_or_else(|| MapError::UnknownMlPlatform(ml.clone()))?;
                            (t.to_string(), self.default_platform()?)
                        }
                        None => (format!("Offloaded_{}", sanitize(&tech)), tech),
                    }
                }
            };
            self.push(
                NodeTemplate { name, type_name, role: NodeRole::Task(node.id.clone()), properties, artifacts },
                platform,
            );
        }
        Ok(())
    }

    /// Store node per data store, or one shared node per (type, platform).
    /// Returns store id -> node name.
    fn stores(&mut self, aggregate: bool) -> Result<HashMap<String, String>, MapError> {
        let mut by_store = HashMap::new();
        let mut groups: IndexMap<(String, String), Vec<usize>> = IndexMap::new();
        for (i, store) in self.model.data_stores().iter().enumerate() {
            let type_name = self.profile.store_type(store.kind.category()).to_string();
            let platform = match store.platform.clone().filter(|p| !p.trim().is_empty()) {
                Some(p) => p,
                None => self.default_platform()?,
            };
            groups.entry((type_name, platform)).or_default().push(i);
        }

        let stores = self.model.data_stores();
        for ((type_name, platform), members) in groups {
            if aggregate {
                let name = self.namer.claim(&format!("shared_{type_name}"));
                let mut properties = IndexMap::new();
                for &i in &members {
                    let label = sanitize(crate::naming::element_label(&stores[i].name, &stores[i].id));
                    properties.insert(format!("directory_{label}"), Value::String(format!("{label}/")));
                    by_store.insert(stores[i].id.clone(), name.clone());
                }
                let ids = members.iter().map(|&i| stores[i].id.clone()).collect();
                self.push(
                    NodeTemplate { name, type_name, role: NodeRole::Store(ids), properties, artifacts: Vec::new() },
                    platform,
                );
            } else {
                for &i in &members {
                    let store = &stores[i];
                    let name = self.namer.claim(crate::naming::element_label(&store.name, &store.id));
                    let mut properties = IndexMap::new();
                    properties.insert("store_kind".to_string(), Value::String(store.kind.category().to_string()));
                    by_store.insert(store.id.clone(), name.clone());
                    self.push(
                        NodeTemplate {
                            name,
                            type_name: type_name.clone(),
                            role: NodeRole::Store(vec![store.id.clone()]),
                            properties,
                            artifacts: Vec::new(),
                        },
                        platform.clone(),
                    );
                }
            }
        }
        Ok(by_store)
    }

    fn orchestrator(&mut self, sm: &StateMachine) -> Result<(), MapError> {
        let name = self.namer.claim(&format!("{}_orchestrator", sm.name));
        let path = format!("orchestration/{}.asl.json", sm.name);
        self.topology.orchestration_path = Some(path.clone());
        let platform = self.default_platform()?;
        self.push(
            NodeTemplate {
                name: name.clone(),
                type_name: self.profile.orchestrator_node_type.clone(),
                role: NodeRole::Orchestrator,
                properties: IndexMap::new(),
                artifacts: vec![ArtifactRef { name: "orchestration".into(), path }],
            },
            platform,
        );
        for (node, _) in self.model.tasks() {
            self.relate(RelationKind::Orchestrates, &name, &self.names[&node.id].clone(), IndexMap::new());
        }
        Ok(())
    }

    fn relate(&mut self, kind: RelationKind, source: &str, target: &str, properties: IndexMap<String, Value>) {
        let type_name = match kind {
            RelationKind::Orchestrates => &self.profile.orchestrates_rel_type,
            RelationKind::ConnectsTo => &self.profile.connects_to_rel_type,
            RelationKind::HostedOn => &self.profile.hosted_on_rel_type,
        };
        self.topology.relationships.push(RelationshipTemplate {
            kind,
            type_name: type_name.clone(),
            source: source.to_string(),
            target: target.to_string(),
            properties,
        });
    }

    fn connections(&mut self, store_nodes: &HashMap<String, String>) {
        let mut seen = HashSet::new();
        for assoc in self.model.associations() {
            let Some(Artifact::Store(store)) = self.model.artifact(&assoc.artifact) else { continue };
            let task = self.names[&assoc.task].clone();
            let target = store_nodes[&store.id].clone();
            if seen.insert((task.clone(), target.clone())) {
                self.relate(RelationKind::ConnectsTo, &task, &target, IndexMap::new());
            }
        }
    }

    /// Store-update start events become store -> function connections
    /// annotated with the event kind.
    fn triggers(&mut self, store_nodes: &HashMap<String, String>) -> Result<(), MapError> {
        let mut triggered = HashSet::new();
        for (node, event) in self.model.events() {
            let unsupported = || MapError::UnsupportedEventDriven(node.id.clone());
            match event.position {
                EventPosition::End if event.kind == EventKind::PlainNone => continue,
                EventPosition::Start => {}
                _ => return Err(unsupported()),
            }
            let repo = event.kind.updated_repository().ok_or_else(unsupported)?;
            let stores = self.model.data_stores();
            let store = match event.payload_name.as_deref() {
                Some(p) => stores.iter().find(|s| s.id == p || s.name == p),
                None => {
                    let matching: Vec<_> = stores.iter().filter(|s| s.kind.repository_type() == Some(repo)).collect();
                    (matching.len() == 1).then(|| matching[0])
                }
            }
            .ok_or_else(unsupported)?;
            let out = self.model.outgoing(&node.id).expect("known node");
            let [flow] = out.as_slice() else { return Err(unsupported()) };
            if !matches!(self.model.node(&flow.target).map(|n| &n.variant), Some(NodeVariant::Task(_))) {
                return Err(unsupported());
            }
            let task = self.names[&flow.target].clone();
            let mut properties = IndexMap::new();
            properties.insert("trigger".to_string(), Value::String(event.kind.to_string()));
            self.relate(RelationKind::ConnectsTo, &store_nodes[&store.id], &task, properties);
            triggered.insert(flow.target.clone());
        }
        for (node, _) in self.model.tasks() {
            if !triggered.contains(&node.id) {
                self.topology.notes.push(format!(
                    "{} is not triggered by a store update; function-to-function events are not mapped",
                    self.names[&node.id]
                ));
            }
        }
        Ok(())
    }

    /// One platform node per distinct hosting value, and a hostedOn from
    /// every other node.
    fn platforms(&mut self) {
        let values: IndexSet<String> = self.hosting.iter().map(|(_, p)| p.clone()).collect();
        let mut platform_nodes = HashMap::new();
        for value in values {
            let name = self.namer.claim(&format!("{value}_platform"));
            platform_nodes.insert(value.clone(), name.clone());
            self.topology.node_templates.push(NodeTemplate {
                name,
                type_name: self.profile.platform_node_type.clone(),
                role: NodeRole::Platform(value),
                properties: IndexMap::new(),
                artifacts: Vec::new(),
            });
        }
        for (node, platform) in std::mem::take(&mut self.hosting) {
            self.relate(RelationKind::HostedOn, &node, &platform_nodes[&platform], IndexMap::new());
        }
    }
}
