//! Compiler and validator for BPMN4sML serverless machine-learning workflow
//! models.
//!
//! The pipeline is `xml::parse` -> `validate::validate` ->
//! `orchestration::extract` -> `tosca::map_to_topology` ->
//! `tosca::emit_yaml` / `tosca::package_csar`.

pub mod model;
pub mod naming;
pub mod orchestration;
pub mod tosca;
pub mod validate;
pub mod xml;

pub use model::{assemble, Model, ModelParts};
pub use xml::{parse, serialize, SourceDocument};
