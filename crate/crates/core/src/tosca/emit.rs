use std::collections::BTreeMap;
use std::io::{Cursor, Write};
use std::path::{Component, Path};

use serde_json::{Map, Value};
use thiserror::Error;
use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, DateTime, ZipWriter};

use super::ToscaTopology;

pub const TOSCA_VERSION: &str = "tosca_simple_yaml_1_3";
pub const ENTRY_DEFINITIONS: &str = "definitions/service.yaml";
const META_PATH: &str = "TOSCA-Metadata/TOSCA.meta";

/// Render the topology as a TOSCA Simple Profile service template.
pub fn emit_yaml(topology: &ToscaTopology) -> Vec<u8> {
    let mut nodes = Map::new();
    for node in &topology.node_templates {
        let mut body = Map::new();
        body.insert("type".into(), node.type_name.clone().into());
        if !node.properties.is_empty() {
            let props: Map<String, Value> = node.properties.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            body.insert("properties".into(), Value::Object(props));
        }
        let requirements: Vec<Value> = topology
            .relationships
            .iter()
            .filter(|r| r.source == node.name)
            .map(|r| {
                let relationship = if r.properties.is_empty() {
                    Value::String(r.type_name.clone())
                } else {
                    let props: Map<String, Value> = r.properties.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                    serde_json::json!({ "type": r.type_name, "properties": props })
                };
                serde_json::json!({ r.kind.requirement(): { "node": r.target, "relationship": relationship } })
            })
            .collect();
        if !requirements.is_empty() {
            body.insert("requirements".into(), Value::Array(requirements));
        }
        if !node.artifacts.is_empty() {
            let artifacts: Map<String, Value> = node
                .artifacts
                .iter()
                .map(|a| (a.name.clone(), serde_json::json!({ "file": a.path })))
                .collect();
            body.insert("artifacts".into(), Value::Object(artifacts));
        }
        nodes.insert(node.name.clone(), Value::Object(body));
    }

    let mut template = Map::new();
    if !topology.notes.is_empty() {
        template.insert("description".into(), topology.notes.join("\n").into());
    }
    template.insert("node_templates".into(), Value::Object(nodes));

    let mut doc = Map::new();
    doc.insert("tosca_definitions_version".into(), TOSCA_VERSION.into());
    doc.insert("topology_template".into(), Value::Object(template));
    serde_yaml::to_string(&Value::Object(doc)).expect("YAML serializes").into_bytes()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsarManifest {
    pub meta_file_version: String,
    pub csar_version: String,
    pub created_by: String,
    pub entry_definitions: String,
}

impl CsarManifest {
    pub fn new(created_by: impl Into<String>) -> Self {
        CsarManifest {
            meta_file_version: "1.0".into(),
            csar_version: "1.1".into(),
            created_by: created_by.into(),
            entry_definitions: ENTRY_DEFINITIONS.into(),
        }
    }

    pub fn render(&self) -> String {
        format!(
            "TOSCA-Meta-File-Version: {}\nCSAR-Version: {}\nCreated-By: {}\nEntry-Definitions: {}\n",
            self.meta_file_version, self.csar_version, self.created_by, self.entry_definitions
        )
    }

    /// Parse a manifest holding exactly the four keys, in order.
    pub fn parse(text: &str) -> Option<Self> {
        let lines: Vec<_> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let value = |i: usize, key: &str| -> Option<String> {
            lines.get(i)?.strip_prefix(key)?.strip_prefix(": ").map(str::to_string)
        };
        if lines.len() != 4 {
            return None;
        }
        Some(CsarManifest {
            meta_file_version: value(0, "TOSCA-Meta-File-Version")?,
            csar_version: value(1, "CSAR-Version")?,
            created_by: value(2, "Created-By")?,
            entry_definitions: value(3, "Entry-Definitions")?,
        })
    }
}

#[derive(Debug, Error)]
pub enum PackageError {
    #[error("artifact `{0}` is missing")]
    MissingArtifact(String),
    #[error("artifact path `{0}` must be relative and stay inside the archive")]
    InvalidArtifactPath(String),
    #[error("cannot write archive: {0}")]
    Zip(#[from] zip::result::ZipError),
    #[error("cannot write archive: {0}")]
    Io(#[from] std::io::Error),
}

fn check_path(path: &str) -> Result<(), PackageError> {
    let ok = !path.is_empty()
        && Path::new(path).components().all(|c| matches!(c, Component::Normal(_)))
        && !path.contains('\\');
    if ok {
        Ok(())
    } else {
        Err(PackageError::InvalidArtifactPath(path.to_string()))
    }
}

/// Bundle the service template, state machine and artifacts into a CSAR.
/// Entry order and timestamps are fixed, so identical inputs give identical bytes.
pub fn package_csar(
    topology: &ToscaTopology,
    state_machine: Option<&[u8]>,
    artifact_files: &BTreeMap<String, Vec<u8>>,
    created_by: &str,
) -> Result<Vec<u8>, PackageError> {
    let mut entries: Vec<(String, Vec<u8>)> = vec![
        (META_PATH.into(), CsarManifest::new(created_by).render().into_bytes()),
        (ENTRY_DEFINITIONS.into(), emit_yaml(topology)),
    ];
    if let Some(path) = &topology.orchestration_path {
        check_path(path)?;
        let doc = state_machine.ok_or_else(|| PackageError::MissingArtifact(path.clone()))?;
        entries.push((path.clone(), doc.to_vec()));
    }
    for artifact in topology.node_templates.iter().flat_map(|n| &n.artifacts) {
        if entries.iter().any(|(p, _)| *p == artifact.path) {
            continue;
        }
        check_path(&artifact.path)?;
        let bytes = artifact_files
            .get(&artifact.path)
            .ok_or_else(|| PackageError::MissingArtifact(artifact.path.clone()))?;
        entries.push((artifact.path.clone(), bytes.clone()));
    }

    let options = SimpleFileOptions::default()
        .compression_method(CompressionMethod::Deflated)
        .last_modified_time(DateTime::default())
        .unix_permissions(0o644);
    let mut zip = ZipWriter::new(Cursor::new(Vec::new()));
    for (path, bytes) in entries {
        zip.start_file(path, options)?;
        zip.write_all(&bytes)?;
    }
    Ok(zip.finish()?.into_inner())
}
