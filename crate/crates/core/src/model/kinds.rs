//! Closed enumerations of the metamodel. String forms are the names used in
//! the XML encoding and in diagnostics.

use strum::{AsRefStr, Display, EnumIter, EnumString, IntoStaticStr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum TaskKind {
    #[strum(serialize = "FaaSTask")]
    GenericFaaS,
    #[strum(serialize = "OffloadedTask")]
    GenericOffloaded,
    #[strum(serialize = "JobConfigurationTask")]
    JobConfiguration,
    #[strum(serialize = "DataSourcingTask")]
    DataSourcing,
    #[strum(serialize = "DataValidationTask")]
    DataValidation,
    #[strum(serialize = "DataFusionTask")]
    DataFusion,
    #[strum(serialize = "PreprocessingTask")]
    Preprocessing,
    #[strum(serialize = "FeatureEngineeringTask")]
    FeatureEngineering,
    #[strum(serialize = "FeatureEnrichmentTask")]
    FeatureEnrichment,
    #[strum(serialize = "DataSplitTask")]
    DataSplit,
    #[strum(serialize = "TrainingTask")]
    Training,
    #[strum(serialize = "ScoringTask")]
    Scoring,
    #[strum(serialize = "EvaluationTask")]
    Evaluation,
    #[strum(serialize = "TuningTask")]
    Tuning,
    #[strum(serialize = "TransferLearningTask")]
    TransferLearning,
    #[strum(serialize = "VotingTask")]
    Voting,
    #[strum(serialize = "VerificationTask")]
    Verification,
    #[strum(serialize = "DeploymentTask")]
    Deployment,
    #[strum(serialize = "DeprecationTask")]
    Deprecation,
    #[strum(serialize = "InferenceTask")]
    Inference,
    #[strum(serialize = "ModelSelectionTask")]
    ModelSelection,
    #[strum(serialize = "ExplanationTask")]
    Explanation,
    #[strum(serialize = "MonitoringTask")]
    Monitoring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum ExecutionMode {
    #[strum(serialize = "faas")]
    FaaS,
    #[strum(serialize = "offloaded")]
    Offloaded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum EventKind {
    #[strum(serialize = "DataSourceEvent")]
    DataSource,
    #[strum(serialize = "RawDataUpdateEvent")]
    RawDataUpdate,
    #[strum(serialize = "FeatureSetUpdateEvent")]
    FeatureSetUpdate,
    #[strum(serialize = "DatasetUpdateEvent")]
    DatasetUpdate,
    #[strum(serialize = "RequirementUpdateEvent")]
    RequirementUpdate,
    #[strum(serialize = "DataDriftEvent")]
    DataDrift,
    #[strum(serialize = "ConceptDriftEvent")]
    ConceptDrift,
    #[strum(serialize = "PerformanceDeficitEvent")]
    PerformanceDeficit,
    #[strum(serialize = "VerificationEvent")]
    Verification,
    #[strum(serialize = "VerificationFailureEvent")]
    VerificationFailure,
    #[strum(serialize = "DeploymentEvent")]
    Deployment,
    #[strum(serialize = "DeprecationEvent")]
    Deprecation,
    #[strum(serialize = "InferenceEvent")]
    Inference,
    #[strum(serialize = "OperationDegradationEvent")]
    OperationDegradation,
    #[strum(serialize = "JobOffloadingEvent")]
    JobOffloading,
    #[strum(serialize = "NoneEvent")]
    PlainNone,
    #[strum(serialize = "TimerEvent")]
    Timer,
    #[strum(serialize = "MessageEvent")]
    Message,
    #[strum(serialize = "SignalEvent")]
    Signal,
    #[strum(serialize = "ErrorEvent")]
    Error,
}

impl EventKind {
    /// True for the fifteen ML-specific event definitions.
    pub fn is_extension(self) -> bool {
        !matches!(
            self,
            EventKind::PlainNone | EventKind::Timer | EventKind::Message | EventKind::Signal | EventKind::Error
        )
    }

    /// Repository type whose update this event signals, if any.
    pub fn updated_repository(self) -> Option<RepositoryType> {
        match self {
            EventKind::RawDataUpdate => Some(RepositoryType::RawData),
            EventKind::FeatureSetUpdate => Some(RepositoryType::FeatureSet),
            EventKind::DatasetUpdate => Some(RepositoryType::DataSet),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum EventPosition {
    Start,
    IntermediateCatch,
    IntermediateThrow,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum GatewayKind {
    Exclusive,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum GatewayDirection {
    Diverging,
    Converging,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum ModelStatus {
    #[strum(serialize = "trained")]
    Trained,
    #[strum(serialize = "verified")]
    Verified,
    #[strum(serialize = "deployed")]
    Deployed,
    #[strum(serialize = "deprecated")]
    Deprecated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum DataObjectType {
    RawData,
    FeatureSet,
    FullDataSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum DataSetType {
    Training,
    Validation,
    Verification,
    InferenceRequest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum ConfigType {
    Training,
    Evaluation,
    Tuning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum DocumentType {
    RequirementDocument,
    TuningResult,
    EvaluationResult,
    DeficitReport,
    VerificationResult,
    InferenceResult,
    ModelAndDataStatistics,
    ModelExplanation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum RepositoryType {
    RawData,
    FeatureSet,
    DataSet,
}

/// Store kind without the repository payload; keys provider profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum StoreCategory {
    ModelRegistry,
    LogStore,
    MetadataRepository,
    DataRepository,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum DataObjectCategory {
    #[strum(serialize = "MLModelObject")]
    MlModel,
    #[strum(serialize = "MLDataObject")]
    MlData,
    #[strum(serialize = "CodeObject")]
    Code,
    LearningConfiguration,
    #[strum(serialize = "LogObject")]
    Log,
    #[strum(serialize = "MetadataObject")]
    Metadata,
    Document,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Display, EnumString, EnumIter, AsRefStr, IntoStaticStr)]
pub enum Direction {
    Read,
    Write,
}
