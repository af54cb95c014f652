//! Amazon States Language rendering.

use serde_json::{json, Map, Value};

use super::{ChoiceRule, State, StateMachine, Transition};
use crate::model::{EventKind, Literal};

/// Render a machine as pretty-printed ASL JSON. Task resources are
/// `${name}` placeholders resolved at deployment time.
pub fn serialize_asl(sm: &StateMachine) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(&to_value(sm, true)).expect("ASL serializes");
    bytes.push(b'\n');
    bytes
}

fn to_value(sm: &StateMachine, top: bool) -> Value {
    let mut root = Map::new();
    if top {
        if let Some(comment) = comment(sm) {
            root.insert("Comment".into(), comment.into());
        }
    }
    root.insert("StartAt".into(), sm.start_state.clone().into());
    let states: Map<String, Value> = sm.states.iter().map(|(name, s)| (name.clone(), state(s))).collect();
    root.insert("States".into(), Value::Object(states));
    Value::Object(root)
}

fn comment(sm: &StateMachine) -> Option<String> {
    let mut parts = Vec::new();
    if let Some(t) = sm.trigger.as_ref().filter(|t| t.kind != EventKind::PlainNone) {
        let payload = t.payload_name.as_deref().map(|p| format!(" ({p})")).unwrap_or_default();
        parts.push(format!("started by {} `{}`{payload}", t.kind, t.event_id));
    }
    for a in &sm.annotations {
        match &a.leads_to {
            Some(next) => parts.push(format!("{} `{}` before {next}", a.kind, a.event_id)),
            None => parts.push(format!("{} `{}`", a.kind, a.event_id)),
        }
    }
    (!parts.is_empty()).then(|| parts.join("; "))
}

fn with_transition(mut obj: Map<String, Value>, next: &Transition) -> Value {
    match next {
        Transition::Next(n) => obj.insert("Next".into(), n.clone().into()),
        Transition::End => obj.insert("End".into(), true.into()),
    };
    Value::Object(obj)
}

fn state(s: &State) -> Value {
    match s {
        State::Task { task_id, resource_ref, next } => {
            let mut obj = Map::new();
            obj.insert("Type".into(), "Task".into());
            obj.insert("Resource".into(), format!("${{{resource_ref}}}").into());
            obj.insert("Comment".into(), task_id.clone().into());
            with_transition(obj, next)
        }
        State::Choice { rules, default } => json!({
            "Type": "Choice",
            "Choices": rules.iter().map(choice_rule).collect::<Vec<_>>(),
            "Default": default,
        }),
        State::Parallel { branches, next } => {
            let mut obj = Map::new();
            obj.insert("Type".into(), "Parallel".into());
            obj.insert("Branches".into(), branches.iter().map(|b| to_value(b, false)).collect());
            with_transition(obj, next)
        }
        State::Succeed => json!({ "Type": "Succeed" }),
        State::Fail { cause } => json!({ "Type": "Fail", "Cause": cause }),
    }
}

fn choice_rule(rule: &ChoiceRule) -> Value {
    let (op, value) = match &rule.literal {
        Literal::Text(s) => ("StringEquals", Value::String(s.clone())),
        Literal::Number(n) => ("NumericEquals", Value::Number(n.clone())),
        Literal::Bool(b) => ("BooleanEquals", Value::Bool(*b)),
    };
    let mut obj = Map::new();
    obj.insert("Variable".into(), format!("$.{}", rule.path).into());
    obj.insert(op.into(), value);
    obj.insert("Next".into(), rule.next.clone().into());
    Value::Object(obj)
}
