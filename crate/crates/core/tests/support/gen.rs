//! proptest generators: arbitrary valid models for round-trips, and
//! block-structured processes for the orchestration and topology suites.

use bpmn4sml::model::*;
use bpmn4sml::validate::event_position_legal;
use bpmn4sml::{assemble, Model};
use proptest::prelude::*;
use proptest::sample::select;
use strum::IntoEnumIterator;

fn text() -> impl Strategy<Value = String> {
    "[ -~\t\n\u{e9}\u{3b1}\u{4e2d}]{0,10}"
}

fn opt_text() -> impl Strategy<Value = Option<String>> {
    prop::option::of(text())
}

fn all<T: IntoEnumIterator + Clone + std::fmt::Debug + 'static>() -> impl Strategy<Value = T> {
    select(T::iter().collect::<Vec<_>>())
}

fn arb_task() -> impl Strategy<Value = TaskNode> {
    (
        all::<TaskKind>(),
        all::<ExecutionMode>(),
        (opt_text(), opt_text(), opt_text(), opt_text(), opt_text()),
        opt_text(),
    )
        .prop_map(|(kind, mode, (platform, faas_configuration, offloading_technology, ml_platform, script), environment)| {
            TaskNode {
                kind,
                execution: ExecutionBinding { mode, platform, faas_configuration, offloading_technology, ml_platform, script },
                environment,
            }
        })
}

fn arb_event() -> impl Strategy<Value = EventNode> {
    let legal: Vec<(EventKind, EventPosition)> = EventKind::iter()
        .flat_map(|k| EventPosition::iter().map(move |p| (k, p)))
        .filter(|&(k, p)| event_position_legal(k, p))
        .collect();
    (select(legal), opt_text()).prop_map(|((kind, position), payload_name)| EventNode { kind, position, payload_name })
}

fn arb_variant() -> impl Strategy<Value = NodeVariant> {
    prop_oneof![
        3 => arb_task().prop_map(NodeVariant::Task),
        2 => arb_event().prop_map(NodeVariant::Event),
        1 => (all::<GatewayKind>(), all::<GatewayDirection>())
            .prop_map(|(kind, direction)| NodeVariant::Gateway(GatewayNode { kind, direction })),
    ]
}

fn arb_literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        text().prop_map(Literal::Text),
        any::<i64>().prop_map(|i| Literal::Number(i.into())),
        (-100_000i32..100_000).prop_map(|i| Literal::Number(serde_json::Number::from_f64(i as f64 / 8.0).unwrap())),
        any::<bool>().prop_map(Literal::Bool),
    ]
}

fn arb_condition() -> impl Strategy<Value = Option<Condition>> {
    prop_oneof![
        Just(None),
        Just(Some(Condition::Default)),
        ("[A-Za-z_][A-Za-z0-9_]{0,4}(\\.[A-Za-z0-9_]{1,4}){0,2}", arb_literal())
            .prop_map(|(path, literal)| Some(Condition::Equals { path, literal })),
    ]
}

fn arb_object_kind() -> impl Strategy<Value = DataObjectKind> {
    prop_oneof![
        (text(), prop::option::of(all::<ModelStatus>()))
            .prop_map(|(identifier, status)| DataObjectKind::MlModel { identifier, status }),
        (text(), all::<DataObjectType>(), prop::option::of(all::<DataSetType>())).prop_map(
            |(identifier, object_type, data_set_type)| DataObjectKind::MlData { identifier, object_type, data_set_type }
        ),
        (text(), text()).prop_map(|(identifier, operation)| DataObjectKind::Code { identifier, operation }),
        (text(), text(), all::<ConfigType>()).prop_map(|(identifier, configuration, config_type)| {
            DataObjectKind::LearningConfiguration { identifier, configuration, config_type }
        }),
        text().prop_map(|log_content| DataObjectKind::Log { log_content }),
        (text(), text(), opt_text())
            .prop_map(|(association, location, description)| DataObjectKind::Metadata { association, location, description }),
        (text(), text(), all::<DocumentType>()).prop_map(|(identifier, document_content, document_type)| {
            DataObjectKind::Document { identifier, document_content, document_type }
        }),
    ]
}

fn arb_store_kind() -> impl Strategy<Value = StoreKind> {
    prop_oneof![
        Just(StoreKind::ModelRegistry),
        Just(StoreKind::LogStore),
        Just(StoreKind::MetadataRepository),
        all::<RepositoryType>().prop_map(StoreKind::DataRepository),
    ]
}

/// Arbitrary models that pass assembly, covering every element and attribute
/// the encoding carries.
pub fn arb_model() -> impl Strategy<Value = Model> {
    (
        ("[a-zA-Z_][a-zA-Z0-9_]{0,8}", text()),
        prop::collection::vec((text(), arb_variant()), 1..10),
        prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>(), arb_condition()), 0..14),
        prop::collection::vec((text(), arb_object_kind()), 0..4),
        prop::collection::vec((text(), arb_store_kind(), text(), opt_text()), 0..3),
        prop::collection::vec(
            (any::<prop::sample::Index>(), any::<prop::sample::Index>(), all::<Direction>()),
            0..8,
        ),
        (0usize..3, prop::collection::vec(any::<prop::sample::Index>(), 10), prop::collection::vec(text(), 3)),
    )
        .prop_map(|((pid, pname), nodes, flows, objects, stores, assocs, (lane_count, lane_of, lane_names))| {
            let mut parts = ModelParts::new(pid, pname);
            parts.nodes = nodes
                .into_iter()
                .enumerate()
                .map(|(i, (name, variant))| FlowNode { id: format!("n{i}"), name, variant })
                .collect();
            let n = parts.nodes.len();

            let mut edges: Vec<(usize, usize, Option<Condition>)> =
                flows.into_iter().map(|(a, b, c)| (a.index(n), b.index(n), c)).collect();
            for (i, node) in parts.nodes.iter().enumerate() {
                let NodeVariant::Gateway(gw) = &node.variant else { continue };
                let other = (i + 1) % n;
                loop {
                    let degree = match gw.direction {
                        GatewayDirection::Diverging => edges.iter().filter(|e| e.0 == i).count(),
                        GatewayDirection::Converging => edges.iter().filter(|e| e.1 == i).count(),
                    };
                    if degree >= 2 {
                        break;
                    }
                    match gw.direction {
                        GatewayDirection::Diverging => edges.push((i, other, None)),
                        GatewayDirection::Converging => edges.push((other, i, None)),
                    }
                }
            }
            let mut has_default = vec![false; n];
            for (k, (s, t, cond)) in edges.into_iter().enumerate() {
                let diverging_xor = matches!(
                    parts.nodes[s].variant,
                    NodeVariant::Gateway(GatewayNode { kind: GatewayKind::Exclusive, direction: GatewayDirection::Diverging })
                );
                let condition = match cond {
                    _ if !diverging_xor => None,
                    Some(Condition::Default) if has_default[s] => None,
                    Some(Condition::Default) => {
                        has_default[s] = true;
                        Some(Condition::Default)
                    }
                    other => other,
                };
                parts.flows.push(SequenceFlow {
                    id: format!("f{k}"),
                    source: parts.nodes[s].id.clone(),
                    target: parts.nodes[t].id.clone(),
                    condition,
                });
            }

            parts.data_objects = objects
                .into_iter()
                .enumerate()
                .map(|(i, (name, kind))| DataObjectDecl { id: format!("o{i}"), name, kind })
                .collect();
            parts.data_stores = stores
                .into_iter()
                .enumerate()
                .map(|(i, (name, kind, placement, platform))| DataStoreDecl {
                    id: format!("s{i}"),
                    name,
                    kind,
                    placement,
                    platform,
                })
                .collect();

            let tasks: Vec<String> = parts
                .nodes
                .iter()
                .filter(|n| matches!(n.variant, NodeVariant::Task(_)))
                .map(|n| n.id.clone())
                .collect();
            let artifacts: Vec<String> = parts
                .data_objects
                .iter()
                .map(|o| o.id.clone())
                .chain(parts.data_stores.iter().map(|s| s.id.clone()))
                .collect();
            if !tasks.is_empty() && !artifacts.is_empty() {
                parts.associations = assocs
                    .into_iter()
                    .enumerate()
                    .map(|(k, (t, a, direction))| DataAssociation {
                        id: format!("a{k}"),
                        task: tasks[t.index(tasks.len())].clone(),
                        artifact: artifacts[a.index(artifacts.len())].clone(),
                        direction,
                    })
                    .collect();
            }

            for (l, name) in lane_names.iter().take(lane_count).enumerate() {
                parts.lanes.push(Lane { id: format!("l{l}"), name: name.clone(), members: Vec::new() });
            }
            if lane_count > 0 {
                for (i, node) in parts.nodes.iter().enumerate() {
                    let slot = lane_of[i].index(lane_count + 1);
                    if slot < lane_count {
                        parts.lanes[slot].members.push(node.id.clone());
                    }
                }
            }

            assemble(parts).expect("generator only produces assemblable parts")
        })
}

/// Block-structured control flow.
#[derive(Debug, Clone)]
pub enum Block {
    Task,
    Event,
    Seq(Vec<Block>),
    Xor(Vec<Block>),
    And(Vec<Block>),
    /// Body runs once, then an exclusive split loops back or exits.
    Loop(Box<Block>),
}

impl Block {
    pub fn flow_nodes(&self) -> usize {
        match self {
            Block::Task | Block::Event => 1,
            Block::Seq(items) => items.iter().map(Block::flow_nodes).sum(),
            Block::Xor(b) | Block::And(b) => 2 + b.iter().map(Block::flow_nodes).sum::<usize>(),
            Block::Loop(body) => 2 + body.flow_nodes(),
        }
    }

    pub fn tasks(&self) -> usize {
        match self {
            Block::Task => 1,
            Block::Event => 0,
            Block::Seq(b) | Block::Xor(b) | Block::And(b) => b.iter().map(Block::tasks).sum(),
            Block::Loop(body) => body.tasks(),
        }
    }
}

fn arb_block() -> impl Strategy<Value = Block> {
    let leaf = prop_oneof![4 => Just(Block::Task), 1 => Just(Block::Event)];
    leaf.prop_recursive(3, 12, 3, |inner| {
        let branch = prop_oneof![4 => inner.clone(), 1 => Just(Block::Seq(Vec::new()))];
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(Block::Seq),
            prop::collection::vec(branch.clone(), 2..4).prop_map(Block::Xor),
            prop::collection::vec(branch, 2..4).prop_map(Block::And),
            inner.prop_map(|b| Block::Loop(Box::new(Block::Seq(vec![Block::Task, b])))),
        ]
    })
}

/// Process bodies with at most `max_nodes` flow nodes, start and end included.
pub fn arb_structured(max_nodes: usize) -> impl Strategy<Value = Block> {
    arb_block().prop_filter("too many flow nodes", move |b| b.flow_nodes() + 2 <= max_nodes)
}

struct Builder {
    parts: ModelParts,
    counter: usize,
}

impl Builder {
    fn fresh(&mut self, prefix: &str) -> String {
        self.counter += 1;
        format!("{prefix}{}", self.counter)
    }

    fn node(&mut self, prefix: &str, variant: NodeVariant) -> String {
        let id = self.fresh(prefix);
        self.parts.nodes.push(FlowNode { id: id.clone(), name: String::new(), variant });
        id
    }

    fn flow(&mut self, source: &str, target: &str, condition: Option<Condition>) {
        let id = self.fresh("f");
        self.parts.flows.push(SequenceFlow { id, source: source.into(), target: target.into(), condition });
    }

    fn gateway(&mut self, prefix: &str, kind: GatewayKind, direction: GatewayDirection) -> String {
        self.node(prefix, NodeVariant::Gateway(GatewayNode { kind, direction }))
    }

    /// Emit `block` after `from`; returns the exit node and the condition its
    /// outgoing flow must carry.
    fn emit(&mut self, block: &Block, from: &str, cond: Option<Condition>) -> (String, Option<Condition>) {
        match block {
            Block::Task => {
                let id = self.node(
                    "t",
                    NodeVariant::Task(TaskNode {
                        kind: TaskKind::GenericFaaS,
                        execution: ExecutionBinding::faas("aws", "{}"),
                        environment: None,
                    }),
                );
                self.flow(from, &id, cond);
                (id, None)
            }
            Block::Event => {
                let id = self.node(
                    "e",
                    NodeVariant::Event(EventNode {
                        kind: EventKind::Message,
                        position: EventPosition::IntermediateCatch,
                        payload_name: None,
                    }),
                );
                self.flow(from, &id, cond);
                (id, None)
            }
            Block::Seq(items) => {
                let mut cur = (from.to_string(), cond);
                for item in items {
                    cur = self.emit(item, &cur.0, cur.1);
                }
                cur
            }
            Block::Xor(branches) | Block::And(branches) => {
                let kind = if matches!(block, Block::Xor(_)) { GatewayKind::Exclusive } else { GatewayKind::Parallel };
                let prefix = if kind == GatewayKind::Exclusive { "x" } else { "p" };
                let split = self.gateway(prefix, kind, GatewayDirection::Diverging);
                self.flow(from, &split, cond);
                let join = self.gateway(&format!("{prefix}j"), kind, GatewayDirection::Converging);
                for (i, branch) in branches.iter().enumerate() {
                    let branch_cond = match kind {
                        GatewayKind::Parallel => None,
                        _ if i + 1 == branches.len() => Some(Condition::Default),
                        _ => Some(Condition::Equals { path: "route".into(), literal: Literal::Number((i as u64).into()) }),
                    };
                    let (exit, exit_cond) = self.emit(branch, &split, branch_cond);
                    self.flow(&exit, &join, exit_cond);
                }
                (join, None)
            }
            Block::Loop(body) => {
                let head = self.gateway("lj", GatewayKind::Exclusive, GatewayDirection::Converging);
                self.flow(from, &head, cond);
                let (exit, exit_cond) = self.emit(body, &head, None);
                let test = self.gateway("ls", GatewayKind::Exclusive, GatewayDirection::Diverging);
                self.flow(&exit, &test, exit_cond);
                self.flow(&test, &head, Some(Condition::Equals { path: "again".into(), literal: Literal::Bool(true) }));
                (test, Some(Condition::Default))
            }
        }
    }
}

/// start -> block -> end, with every task a generic FaaS task.
pub fn build_process(block: &Block) -> ModelParts {
    let mut b = Builder { parts: ModelParts::new("generated", "generated"), counter: 0 };
    let start = b.node(
        "start",
        NodeVariant::Event(EventNode { kind: EventKind::PlainNone, position: EventPosition::Start, payload_name: None }),
    );
    let (exit, cond) = b.emit(block, &start, None);
    let end = b.node(
        "end",
        NodeVariant::Event(EventNode { kind: EventKind::PlainNone, position: EventPosition::End, payload_name: None }),
    );
    b.flow(&exit, &end, cond);
    b.parts
}

/// How a generated task is deployed.
#[derive(Debug, Clone)]
pub enum Flavor {
    FaaS { platform: &'static str, memory: u32, script: bool },
    OffloadedMl { script: bool },
    OffloadedEdge,
}

fn arb_flavor() -> impl Strategy<Value = Flavor> {
    prop_oneof![
        3 => (select(vec!["aws", "gcp"]), 128u32..4096, any::<bool>())
            .prop_map(|(platform, memory, script)| Flavor::FaaS { platform, memory, script }),
        1 => any::<bool>().prop_map(|script| Flavor::OffloadedMl { script }),
        1 => Just(Flavor::OffloadedEdge),
    ]
}

/// Structured processes with varied bindings, stores and store associations.
pub fn arb_deployable(max_nodes: usize) -> impl Strategy<Value = Model> {
    (
        arb_structured(max_nodes).prop_filter("no tasks", |b| b.tasks() > 0),
        prop::collection::vec(arb_flavor(), 12),
        prop::collection::vec((arb_store_kind(), prop::option::of(select(vec!["aws", "gcp"]))), 0..4),
        prop::collection::vec(
            (any::<prop::sample::Index>(), any::<prop::sample::Index>(), all::<Direction>()),
            0..10,
        ),
    )
        .prop_map(|(block, flavors, stores, assocs)| {
            let mut parts = build_process(&block);
            let mut k = 0;
            let mut first = true;
            for node in &mut parts.nodes {
                let NodeVariant::Task(task) = &mut node.variant else { continue };
                // The first task is always FaaS so a default platform exists.
                let flavor = if first { Flavor::FaaS { platform: "aws", memory: 256, script: true } } else { flavors[k].clone() };
                first = false;
                k += 1;
                node.name = format!("Step {k}");
                let script = format!("code/{}.py", node.id);
                task.execution = match flavor {
                    Flavor::FaaS { platform, memory, script: s } => {
                        let b = ExecutionBinding::faas(platform, format!(r#"{{"memory": {memory}, "runtime": "python3.9"}}"#));
                        if s { b.with_script(script) } else { b }
                    }
                    Flavor::OffloadedMl { script: s } => {
                        let b = ExecutionBinding::offloaded("cloud", Some("SageMaker".into()));
                        if s { b.with_script(script) } else { b }
                    }
                    Flavor::OffloadedEdge => ExecutionBinding::offloaded("edge", None),
                };
            }
            parts.data_stores = stores
                .into_iter()
                .enumerate()
                .map(|(i, (kind, platform))| DataStoreDecl {
                    id: format!("s{i}"),
                    name: format!("Store {i}"),
                    kind,
                    placement: "cloud".into(),
                    platform: platform.map(str::to_string),
                })
                .collect();
            let tasks: Vec<String> = parts
                .nodes
                .iter()
                .filter(|n| matches!(n.variant, NodeVariant::Task(_)))
                .map(|n| n.id.clone())
                .collect();
            if !tasks.is_empty() && !parts.data_stores.is_empty() {
                let n_stores = parts.data_stores.len();
                parts.associations = assocs
                    .into_iter()
                    .enumerate()
                    .map(|(i, (t, s, direction))| DataAssociation {
                        id: format!("a{i}"),
                        task: tasks[t.index(tasks.len())].clone(),
                        artifact: format!("s{}", s.index(n_stores)),
                        direction,
                    })
                    .collect();
            }
            assemble(parts).expect("deployable generator assembles")
        })
}
