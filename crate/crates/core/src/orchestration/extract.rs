//! Structured traversal of the process graph.
//!
//! Tasks, diverging exclusive gateways and diverging parallel gateways become
//! states. Converging exclusive gateways and intermediate events are
//! transparent: transitions pass through them. A parallel split is matched to
//! the unique parallel join all its branches close on, and each branch is
//! translated as its own sub-machine. Anything outside these patterns is
//! rejected rather than approximated.

use std::collections::{HashMap, HashSet, VecDeque};

use indexmap::IndexMap;

use super::*;
use crate::model::{Condition, EventPosition, GatewayDirection, GatewayKind, Model, NodeVariant};
use crate::naming::{element_label, task_names, UniqueNamer};

type Result<T> = std::result::Result<T, ExtractError>;

fn unsupported(element: &str, reason: impl Into<String>) -> ExtractError {
    ExtractError::UnsupportedTopology { element: element.to_string(), reason: reason.into() }
}

/// Derive the orchestration state machine of a process.
pub fn extract(model: &Model) -> Result<StateMachine> {
    let starts: Vec<_> = model.events().filter(|(_, e)| e.position == EventPosition::Start).collect();
    let (start_node, start_event) = match starts.as_slice() {
        [] => return Err(ExtractError::NoStartEvent),
        [one] => *one,
        many => return Err(ExtractError::MultipleStartEvents(many.iter().map(|(n, _)| n.id.clone()).collect())),
    };

    let mut x = Extractor::new(model);
    let entry = x.single_successor(&start_node.id)?;
    let mut machine = x.region(model.process_id().to_string(), &entry, None)?;

    for (node, _) in model.tasks() {
        if !x.state_of.contains_key(&node.id) {
            return Err(unsupported(&node.id, "task is not reachable from the start event"));
        }
    }

    machine.trigger = Some(Trigger {
        event_id: start_node.id.clone(),
        kind: start_event.kind,
        payload_name: start_event.payload_name.clone(),
    });
    machine.annotations = x.annotations.into_values().collect();
    machine.check().map_err(|d| unsupported(model.process_id(), d.0))?;
    Ok(machine)
}

#[derive(Debug, Clone)]
struct Block {
    join: String,
    /// Entry nodes of branches that contain at least one state.
    branches: Vec<String>,
}

struct RegionCtx {
    id: usize,
    stop: Option<String>,
    states: IndexMap<String, Option<State>>,
    pending: VecDeque<String>,
    /// Succeed state closing a parallel branch, created on demand.
    done: Option<String>,
}

struct Extractor<'m> {
    model: &'m Model,
    task_names: HashMap<String, String>,
    namer: UniqueNamer,
    /// node id -> (state name, owning region)
    state_of: HashMap<String, (String, usize)>,
    regions: usize,
    blocks: HashMap<String, Block>,
    analysing: HashSet<String>,
    transparent: HashSet<String>,
    annotations: IndexMap<String, EventAnnotation>,
}

impl<'m> Extractor<'m> {
    fn new(model: &'m Model) -> Self {
        let (task_names, namer) = task_names(model);
        Extractor {
            model,
            task_names,
            namer,
            state_of: HashMap::new(),
            regions: 0,
            blocks: HashMap::new(),
            analysing: HashSet::new(),
            transparent: HashSet::new(),
            annotations: IndexMap::new(),
        }
    }

    fn variant(&self, id: &str) -> &'m NodeVariant {
        &self.model.node(id).expect("flows reference existing nodes").variant
    }

    fn single_successor(&self, id: &str) -> Result<String> {
        let out = self.model.outgoing(id).expect("known node");
        match out.as_slice() {
            [f] => Ok(f.target.clone()),
            _ => Err(unsupported(id, format!("expected exactly one outgoing flow, found {}", out.len()))),
        }
    }

    fn region(&mut self, name: String, entry: &str, stop: Option<&str>) -> Result<StateMachine> {
        let mut cx = RegionCtx {
            id: self.regions,
            stop: stop.map(str::to_string),
            states: IndexMap::new(),
            pending: VecDeque::new(),
            done: None,
        };
        self.regions += 1;

        let start_state = self.resolve(entry, &mut cx)?;
        while let Some(node_id) = cx.pending.pop_front() {
            let state = self.build_state(&node_id, &mut cx)?;
            let name = self.state_of[&node_id].0.clone();
            cx.states[&name] = Some(state);
        }

        Ok(StateMachine {
            name,
            start_state,
            states: cx.states.into_iter().map(|(k, v)| (k, v.expect("every allocated state is built"))).collect(),
            trigger: None,
            annotations: Vec::new(),
        })
    }

    /// Follow transparent nodes from `entry` to the state that executes next.
    fn resolve(&mut self, entry: &str, cx: &mut RegionCtx) -> Result<String> {
        let mut current = entry.to_string();
        let mut passed = Vec::new();
        let mut visited = HashSet::new();
        let name = loop {
            if !visited.insert(current.clone()) {
                return Err(unsupported(&current, "cycle without any task or decision"));
            }
            if cx.stop.as_deref() == Some(current.as_str()) {
                break self.branch_done(cx);
            }
            match self.variant(&current) {
                NodeVariant::Event(e) => match e.position {
                    EventPosition::IntermediateCatch | EventPosition::IntermediateThrow => {
                        passed.push(current.clone());
                        current = self.single_successor(&current)?;
                    }
                    EventPosition::Start => return Err(unsupported(&current, "sequence flow into a start event")),
                    EventPosition::End => {
                        if cx.stop.is_some() {
                            return Err(unsupported(&current, "end event inside a parallel branch"));
                        }
                        break self.end_state(&current, cx)?;
                    }
                },
                NodeVariant::Gateway(gw) => match (gw.kind, gw.direction) {
                    (GatewayKind::Exclusive, GatewayDirection::Converging) => {
                        current = self.single_successor(&current)?;
                    }
                    (GatewayKind::Parallel, GatewayDirection::Converging) => {
                        if !self.transparent.contains(&current) {
                            return Err(ExtractError::UnmatchedParallelJoin(current));
                        }
                        current = self.single_successor(&current)?;
                    }
                    (GatewayKind::Parallel, GatewayDirection::Diverging) => {
                        let block = self.block(&current)?;
                        if block.branches.len() >= 2 {
                            break self.allocate(&current, cx)?;
                        }
                        self.transparent.insert(current.clone());
                        self.transparent.insert(block.join.clone());
                        current = block.branches.first().cloned().unwrap_or(block.join);
                    }
                    (GatewayKind::Exclusive, GatewayDirection::Diverging) => break self.allocate(&current, cx)?,
                },
                NodeVariant::Task(_) => break self.allocate(&current, cx)?,
            }
        };

        for event_id in passed {
            if self.annotations.contains_key(&event_id) {
                continue;
            }
            let NodeVariant::Event(e) = self.variant(&event_id) else { unreachable!() };
            self.annotations.insert(
                event_id.clone(),
                EventAnnotation { event_id, kind: e.kind, position: e.position, leads_to: Some(name.clone()) },
            );
        }
        Ok(name)
    }

    fn allocate(&mut self, node_id: &str, cx: &mut RegionCtx) -> Result<String> {
        if let Some((name, region)) = self.state_of.get(node_id) {
            if *region != cx.id {
                return Err(unsupported(node_id, "control flow crosses a parallel block boundary"));
            }
            return Ok(name.clone());
        }
        let name = match self.task_names.get(node_id) {
            Some(n) => n.clone(),
            None => {
                let node = self.model.node(node_id).expect("known node");
                self.namer.claim(element_label(&node.name, &node.id))
            }
        };
        self.state_of.insert(node_id.to_string(), (name.clone(), cx.id));
        cx.states.insert(name.clone(), None);
        cx.pending.push_back(node_id.to_string());
        Ok(name)
    }

    fn end_state(&mut self, node_id: &str, cx: &mut RegionCtx) -> Result<String> {
        if let Some((name, _)) = self.state_of.get(node_id) {
            return Ok(name.clone());
        }
        let node = self.model.node(node_id).expect("known node");
        let NodeVariant::Event(event) = &node.variant else { unreachable!() };
        let (label, state) = if event.kind == EventKind::Error {
            let cause = event
                .payload_name
                .clone()
                .or_else(|| (!node.name.is_empty()).then(|| node.name.clone()))
                .unwrap_or_else(|| "Error".to_string());
            (element_label(&node.name, &node.id).to_string(), State::Fail { cause })
        } else {
            let label = if node.name.trim().is_empty() { "Done" } else { node.name.as_str() };
            (label.to_string(), State::Succeed)
        };
        let name = self.namer.claim(&label);
        if event.kind == EventKind::Error {
            self.annotations.insert(
                node.id.clone(),
                EventAnnotation { event_id: node.id.clone(), kind: event.kind, position: event.position, leads_to: None },
            );
        }
        self.state_of.insert(node_id.to_string(), (name.clone(), cx.id));
        cx.states.insert(name.clone(), Some(state));
        Ok(name)
    }

    fn branch_done(&mut self, cx: &mut RegionCtx) -> String {
        if let Some(name) = &cx.done {
            return name.clone();
        }
        let join = cx.stop.clone().expect("branch region");
        let name = self.namer.claim(&format!("{join}_branch_done"));
        cx.states.insert(name.clone(), Some(State::Succeed));
        cx.done = Some(name.clone());
        name
    }

    fn build_state(&mut self, node_id: &str, cx: &mut RegionCtx) -> Result<State> {
        match self.variant(node_id) {
            NodeVariant::Task(_) => {
                let target = self.single_successor(node_id)?;
                let next = self.resolve(&target, cx)?;
                Ok(State::Task {
                    task_id: node_id.to_string(),
                    resource_ref: self.task_names[node_id].clone(),
                    next: Transition::Next(next),
                })
            }
            NodeVariant::Gateway(gw) if gw.kind == GatewayKind::Exclusive => {
                let flows: Vec<_> = self.model.outgoing(node_id).expect("known node").into_iter().cloned().collect();
                let mut rules = Vec::new();
                let mut defaults = Vec::new();
                for flow in flows {
                    let next = self.resolve(&flow.target, cx)?;
                    match flow.condition {
                        Some(Condition::Equals { path, literal }) => rules.push(ChoiceRule { path, literal, next }),
                        Some(Condition::Default) | None => defaults.push(next),
                    }
                }
                if defaults.len() != 1 {
                    return Err(unsupported(
                        node_id,
                        format!("exclusive split needs exactly one default flow, found {}", defaults.len()),
                    ));
                }
                if rules.is_empty() {
                    return Err(unsupported(node_id, "exclusive split has no conditional flow"));
                }
                Ok(State::Choice { rules, default: defaults.remove(0) })
            }
            NodeVariant::Gateway(_) => {
                let block = self.block(node_id)?;
                let base = self.state_of[node_id].0.clone();
                let mut branches = Vec::new();
                for (k, entry) in block.branches.iter().enumerate() {
                    branches.push(self.region(format!("{base}_branch_{}", k + 1), entry, Some(&block.join))?);
                }
                let after = self.single_successor(&block.join)?;
                let next = self.resolve(&after, cx)?;
                Ok(State::Parallel { branches, next: Transition::Next(next) })
            }
            NodeVariant::Event(_) => unreachable!("events never become pending states"),
        }
    }

    /// Match a parallel split with its join.
    fn block(&mut self, split: &str) -> Result<Block> {
        if let Some(b) = self.blocks.get(split) {
            return Ok(b.clone());
        }
        if !self.analysing.insert(split.to_string()) {
            return Err(unsupported(split, "parallel split is re-entered from inside its own block"));
        }

        let outs: Vec<_> = self.model.outgoing(split).expect("known node").into_iter().cloned().collect();
        let mut join: Option<String> = None;
        let mut entering = HashSet::new();
        for flow in &outs {
            let hits = self.explore(&flow.target, &flow.id)?;
            if hits.is_empty() {
                return Err(ExtractError::UnmatchedParallelJoin(split.to_string()));
            }
            if hits.len() > 1 {
                return Err(unsupported(split, "a parallel branch reaches the join along several paths"));
            }
            let (j, via) = hits.into_iter().next().expect("one hit");
            if *join.get_or_insert_with(|| j.clone()) != j {
                return Err(unsupported(split, "parallel branches close at different joins"));
            }
            entering.insert(via);
        }
        let join = join.expect("diverging gateway has outgoing flows");
        let incoming = self.model.incoming(&join).expect("known node").len();
        if incoming != outs.len() || entering.len() != outs.len() {
            return Err(ExtractError::UnmatchedParallelJoin(join));
        }
        self.single_successor(&join)?;

        let branches = outs
            .iter()
            .filter(|f| !self.is_empty_branch(&f.target, &join))
            .map(|f| f.target.clone())
            .collect();
        let block = Block { join, branches };
        self.analysing.remove(split);
        self.blocks.insert(split.to_string(), block.clone());
        Ok(block)
    }

    /// Parallel joins reached from `start` (entered via `via`), skipping
    /// nested blocks. Each hit is (join, entering flow).
    fn explore(&mut self, start: &str, via: &str) -> Result<Vec<(String, String)>> {
        let mut hits: Vec<(String, String)> = Vec::new();
        let mut visited = HashSet::new();
        let mut stack = vec![(start.to_string(), via.to_string())];
        while let Some((node, entered_by)) = stack.pop() {
            match self.variant(&node) {
                NodeVariant::Gateway(gw) if gw.kind == GatewayKind::Parallel && gw.direction == GatewayDirection::Converging => {
                    let hit = (node, entered_by);
                    if !hits.contains(&hit) {
                        hits.push(hit);
                    }
                    continue;
                }
                _ => {}
            }
            if !visited.insert(node.clone()) {
                continue;
            }
            match self.variant(&node) {
                NodeVariant::Event(e) if e.position == EventPosition::End => {
                    return Err(unsupported(&node, "parallel branch ends before reaching its join"));
                }
                NodeVariant::Event(e) if e.position == EventPosition::Start => {
                    return Err(unsupported(&node, "sequence flow into a start event"));
                }
                NodeVariant::Gateway(gw) if gw.kind == GatewayKind::Parallel => {
                    let inner = self.block(&node)?;
                    let out = self.model.outgoing(&inner.join).expect("known node");
                    stack.push((out[0].target.clone(), out[0].id.clone()));
                }
                _ => {
                    for f in self.model.outgoing(&node).expect("known node") {
                        stack.push((f.target.clone(), f.id.clone()));
                    }
                }
            }
        }
        Ok(hits)
    }

    fn is_empty_branch(&self, entry: &str, join: &str) -> bool {
        let mut current = entry.to_string();
        let mut steps = 0;
        loop {
            if current == join {
                return true;
            }
            let transparent = match self.variant(&current) {
                NodeVariant::Event(e) => {
                    matches!(e.position, EventPosition::IntermediateCatch | EventPosition::IntermediateThrow)
                }
                NodeVariant::Gateway(gw) => gw.kind == GatewayKind::Exclusive && gw.direction == GatewayDirection::Converging,
                NodeVariant::Task(_) => false,
            };
            steps += 1;
            if !transparent || steps > self.model.nodes().len() {
                return false;
            }
            match self.single_successor(&current) {
                Ok(next) => current = next,
                Err(_) => return false,
            }
        }
    }
}
