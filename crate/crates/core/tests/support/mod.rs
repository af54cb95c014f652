//! Shared fixtures, generators and independent oracles for the integration tests.
#![allow(dead_code)]

pub mod checks;
pub mod gen;

use std::path::PathBuf;

use bpmn4sml::{parse, Model, SourceDocument};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_bytes(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn load_fixture(name: &str) -> Model {
    let doc = SourceDocument::new(fixture_bytes(name));
    parse(&doc).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}
