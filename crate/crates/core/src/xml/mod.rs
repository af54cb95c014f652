//! XML encoding of BPMN4sML models.
//!
//! Base elements live in the BPMN 2.0 model namespace; everything the
//! extension adds is carried by attributes and `extensionElements` children in
//! the [`SML_NS`] namespace, so files remain openable by stock BPMN tools.
//!
//! | model element  | encoding                                                              |
//! |----------------|-----------------------------------------------------------------------|
//! | task           | `serviceTask` with `sml:kind`, `sml:execution`, binding attributes    |
//! | event          | start/intermediate/end event, `<sml:event kind payloadName/>`         |
//! | data object    | `dataObject` with `<sml:artifact kind .../>`                          |
//! | data store     | `dataStoreReference` with `<sml:artifact kind .../>`                  |
//! | association    | `dataInputAssociation`/`dataOutputAssociation` nested in the task     |
//! | condition      | `conditionExpression` holding `<path> == <literal>` or `default`      |

mod parse;
mod write;

use thiserror::Error;

use crate::model::AssemblyError;

pub use parse::parse;
pub use write::serialize;

pub const BPMN_NS: &str = "http://www.omg.org/spec/BPMN/20100524/MODEL";
pub const SML_NS: &str = "http://bpmn4sml.org/ns/v1";
pub const XSI_NS: &str = "http://www.w3.org/2001/XMLSchema-instance";

/// Raw XML document plus where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDocument {
    pub bytes: Vec<u8>,
    pub uri: Option<String>,
}

impl SourceDocument {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Self {
        SourceDocument { bytes: bytes.into(), uri: None }
    }

    pub fn with_uri(mut self, uri: impl Into<String>) -> Self {
        self.uri = Some(uri.into());
        self
    }

    pub fn as_str(&self) -> Result<&str, std::str::Utf8Error> {
        std::str::from_utf8(&self.bytes)
    }
}

/// Machine-readable form of an ingest failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestDiagnostic {
    pub code: String,
    pub element_path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("malformed XML: {message}")]
    MalformedXml { message: String },
    #[error("{path}: root element is not a BPMN 2.0 `definitions`")]
    NotBpmn { path: String },
    #[error("{path}: expected exactly one process, found {found}")]
    ProcessCount { found: usize, path: String },
    #[error("{path}: unknown value `{value}`")]
    UnknownKind { value: String, path: String },
    #[error("{path}: missing attribute `{name}`")]
    MissingAttribute { name: String, path: String },
    #[error("{path}: attribute `{name}` {message}")]
    InvalidAttribute { name: String, path: String, message: String },
    #[error("{path}: malformed condition `{text}`")]
    MalformedCondition { text: String, path: String },
    #[error("{path}: unsupported construct `{construct}`")]
    UnsupportedConstruct { construct: String, path: String },
    #[error("{path}: {source}")]
    Assembly {
        #[source]
        source: AssemblyError,
        path: String,
    },
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::MalformedXml { .. } => "MalformedXml",
            IngestError::NotBpmn { .. } => "NotBpmn",
            IngestError::ProcessCount { .. } => "ProcessCount",
            IngestError::UnknownKind { .. } => "UnknownKind",
            IngestError::MissingAttribute { .. } => "MissingAttribute",
            IngestError::InvalidAttribute { .. } => "InvalidAttribute",
            IngestError::MalformedCondition { .. } => "MalformedCondition",
            IngestError::UnsupportedConstruct { .. } => "UnsupportedConstruct",
            IngestError::Assembly { source, .. } => match source {
                AssemblyError::DuplicateId(_) => "DuplicateId",
                AssemblyError::DanglingReference { .. } => "DanglingReference",
                AssemblyError::LaneConflict(_) => "LaneConflict",
                AssemblyError::NotATask { .. } => "NotATask",
                AssemblyError::GatewayDegree(_) => "GatewayDegree",
                AssemblyError::MisplacedCondition(_) => "MisplacedCondition",
                AssemblyError::DuplicateDefault(_) => "DuplicateDefault",
            },
        }
    }

    pub fn element_path(&self) -> &str {
        match self {
            IngestError::MalformedXml { .. } => "/",
            IngestError::NotBpmn { path }
            | IngestError::ProcessCount { path, .. }
            | IngestError::UnknownKind { path, .. }
            | IngestError::MissingAttribute { path, .. }
            | IngestError::InvalidAttribute { path, .. }
            | IngestError::MalformedCondition { path, .. }
            | IngestError::UnsupportedConstruct { path, .. }
            | IngestError::Assembly { path, .. } => path,
        }
    }

    pub fn diagnostic(&self) -> IngestDiagnostic {
        IngestDiagnostic {
            code: self.code().to_string(),
            element_path: self.element_path().to_string(),
            message: self.to_string(),
        }
    }
}
