//! Stable names shared by topology node templates and orchestration states.

use std::collections::{HashMap, HashSet};

use crate::model::Model;

/// Replace every non-alphanumeric character with `_`.
pub fn sanitize(raw: &str) -> String {
    let s: String = raw.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    if s.is_empty() {
        "_".to_string()
    } else {
        s
    }
}

/// Hands out unique names, suffixing `_2`, `_3`, ... on collision.
#[derive(Debug, Default, Clone)]
pub struct UniqueNamer {
    taken: HashSet<String>,
}

impl UniqueNamer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn claim(&mut self, raw: &str) -> String {
        let base = sanitize(raw);
        if self.taken.insert(base.clone()) {
            return base;
        }
        (2..)
            .map(|i| format!("{base}_{i}"))
            .find(|candidate| self.taken.insert(candidate.clone()))
            .expect("unbounded suffix search")
    }
}

fn display_name<'a>(name: &'a str, id: &'a str) -> &'a str {
    if name.trim().is_empty() {
        id
    } else {
        name
    }
}

/// Task id -> unique sanitized task name, claimed in document order. Returns
/// the namer so callers can keep allocating from the same namespace.
pub fn task_names(model: &Model) -> (HashMap<String, String>, UniqueNamer) {
    let mut namer = UniqueNamer::new();
    let names = model
        .tasks()
        .map(|(node, _)| (node.id.clone(), namer.claim(display_name(&node.name, &node.id))))
        .collect();
    (names, namer)
}

pub(crate) fn element_label<'a>(name: &'a str, id: &'a str) -> &'a str {
    display_name(name, id)
}
