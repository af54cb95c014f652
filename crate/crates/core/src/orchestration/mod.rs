//! Function-orchestration state machines derived from process control flow.

mod asl;
mod extract;

use std::collections::{HashSet, VecDeque};

use indexmap::IndexMap;
use thiserror::Error;

use crate::model::{EventKind, EventPosition, Literal};

pub use asl::serialize_asl;
pub use extract::extract;

#[derive(Debug, Clone, PartialEq)]
pub enum Transition {
    Next(String),
    End,
}

impl Transition {
    pub fn target(&self) -> Option<&str> {
        match self {
            Transition::Next(s) => Some(s),
            Transition::End => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceRule {
    /// Dot-separated payload selector.
    pub path: String,
    pub literal: Literal,
    pub next: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Task { task_id: String, resource_ref: String, next: Transition },
    Choice { rules: Vec<ChoiceRule>, default: String },
    Parallel { branches: Vec<StateMachine>, next: Transition },
    Succeed,
    Fail { cause: String },
}

impl State {
    fn successors(&self) -> Vec<&str> {
        match self {
            State::Task { next, .. } | State::Parallel { next, .. } => next.target().into_iter().collect(),
            State::Choice { rules, default } => {
                rules.iter().map(|r| r.next.as_str()).chain(std::iter::once(default.as_str())).collect()
            }
            State::Succeed | State::Fail { .. } => Vec::new(),
        }
    }
}

/// The event that starts the process.
#[derive(Debug, Clone, PartialEq)]
pub struct Trigger {
    pub event_id: String,
    pub kind: EventKind,
    pub payload_name: Option<String>,
}

/// An intermediate or error event folded into a transition.
#[derive(Debug, Clone, PartialEq)]
pub struct EventAnnotation {
    pub event_id: String,
    pub kind: EventKind,
    pub position: EventPosition,
    /// State entered after the event, if any.
    pub leads_to: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateMachine {
    pub name: String,
    pub start_state: String,
    pub states: IndexMap<String, State>,
    pub trigger: Option<Trigger>,
    pub annotations: Vec<EventAnnotation>,
}

impl StateMachine {
    /// Task states, including those nested in parallel branches.
    pub fn task_states(&self) -> Vec<(&str, &State)> {
        let mut out = Vec::new();
        for (name, state) in &self.states {
            match state {
                State::Task { .. } => out.push((name.as_str(), state)),
                State::Parallel { branches, .. } => {
                    for b in branches {
                        out.extend(b.task_states());
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// Structural invariants: start exists, targets resolve, choices and
    /// parallels are well formed, a terminal state exists, every state is
    /// reachable. Applied recursively to branches.
    pub fn check(&self) -> Result<(), MachineDefect> {
        let defect = |msg: String| Err(MachineDefect(format!("{}: {msg}", self.name)));
        if !self.states.contains_key(&self.start_state) {
            return defect(format!("start state `{}` missing", self.start_state));
        }
        for (name, state) in &self.states {
            for target in state.successors() {
                if !self.states.contains_key(target) {
                    return defect(format!("`{name}` targets unknown state `{target}`"));
                }
            }
            match state {
                State::Choice { rules, .. } if rules.is_empty() => {
                    return defect(format!("choice `{name}` has no rules"));
                }
                State::Parallel { branches, .. } => {
                    if branches.len() < 2 {
                        return defect(format!("parallel `{name}` has fewer than two branches"));
                    }
                    for b in branches {
                        b.check()?;
                    }
                }
                _ => {}
            }
        }
        if !self.states.values().any(|s| matches!(s, State::Succeed | State::Fail { .. })) {
            return defect("no terminal state".into());
        }
        let mut seen: HashSet<&str> = HashSet::from([self.start_state.as_str()]);
        let mut queue = VecDeque::from([self.start_state.as_str()]);
        while let Some(name) = queue.pop_front() {
            for next in self.states[name].successors() {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        if let Some(orphan) = self.states.keys().find(|k| !seen.contains(k.as_str())) {
            return defect(format!("state `{orphan}` unreachable"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid state machine: {0}")]
pub struct MachineDefect(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("process has no start event")]
    NoStartEvent,
    #[error("process has several start events: {0:?}")]
    MultipleStartEvents(Vec<String>),
    #[error("parallel gateway `{0}` has no matching split/join partner")]
    UnmatchedParallelJoin(String),
    #[error("unsupported topology at `{element}`: {reason}")]
    UnsupportedTopology { element: String, reason: String },
}
