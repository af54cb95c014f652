use std::collections::BTreeSet;

use super::{rule_info, Finding};
use crate::model::*;

/// Position legality for every event kind. Extension kinds follow the
/// per-event semantics; standard kinds follow BPMN.
pub fn event_position_legal(kind: EventKind, position: EventPosition) -> bool {
    use EventKind::*;
    use EventPosition::*;
    match kind {
        DataSource | RawDataUpdate | FeatureSetUpdate | DatasetUpdate | RequirementUpdate | Verification
        | Inference => matches!(position, Start | IntermediateCatch),
        DataDrift | ConceptDrift | Deployment | Deprecation | OperationDegradation => {
            matches!(position, Start | IntermediateCatch | IntermediateThrow)
        }
        PerformanceDeficit | VerificationFailure | JobOffloading => position == IntermediateCatch,
        PlainNone => matches!(position, Start | End),
        Timer => matches!(position, Start | IntermediateCatch),
        Message | Signal => true,
        Error => position == End,
    }
}

struct Ctx<'m> {
    model: &'m Model,
    findings: Vec<Finding>,
}

impl<'m> Ctx<'m> {
    fn report(&mut self, rule: &str, element: &str, message: impl Into<String>) {
        let info = rule_info(rule).expect("registered rule");
        self.findings.push(Finding {
            rule: rule.to_string(),
            element: element.to_string(),
            severity: info.severity,
            message: message.into(),
        });
    }

    /// Distinct artifacts the task touches in `direction` (any direction when None).
    fn touched(&self, task: &str, direction: Option<Direction>) -> Vec<Artifact<'m>> {
        let mut seen = BTreeSet::new();
        self.model
            .associations()
            .iter()
            .filter(|a| a.task == task && direction.is_none_or(|d| a.direction == d))
            .filter(|a| seen.insert(a.artifact.as_str()))
            .filter_map(|a| self.model.artifact(&a.artifact))
            .collect()
    }
}

fn is_ml_data(a: &Artifact) -> bool {
    matches!(a, Artifact::Object(DataObjectDecl { kind: DataObjectKind::MlData { .. }, .. }))
}

fn is_data_repository(a: &Artifact, wanted: Option<RepositoryType>) -> bool {
    match a {
        Artifact::Store(s) => match s.kind {
            StoreKind::DataRepository(t) => wanted.is_none_or(|w| w == t),
            _ => false,
        },
        _ => false,
    }
}

fn is_dataset(a: &Artifact, wanted: DataSetType) -> bool {
    matches!(
        a,
        Artifact::Object(DataObjectDecl {
            kind: DataObjectKind::MlData { object_type: DataObjectType::FullDataSet, data_set_type: Some(t), .. },
            ..
        }) if *t == wanted
    )
}

pub(super) fn evaluate(model: &Model) -> Vec<Finding> {
    let mut cx = Ctx { model, findings: Vec::new() };

    for (node, task) in model.tasks() {
        check_binding(&mut cx, node, task);
        check_cardinalities(&mut cx, node, task);

        if task.environment.is_some() && task.kind != TaskKind::Deployment {
            cx.report("R-V16", &node.id, format!("{} declares an environment; only DeploymentTask may", task.kind));
        }

        let connected = model.flows().iter().any(|f| f.source == node.id || f.target == node.id);
        if !connected {
            cx.report("R-V17", &node.id, "task has no incoming or outgoing sequence flow");
        }

        let expected_config = match task.kind {
            TaskKind::Training => Some(ConfigType::Training),
            TaskKind::Evaluation => Some(ConfigType::Evaluation),
            TaskKind::Tuning => Some(ConfigType::Tuning),
            _ => None,
        };
        if let Some(expected) = expected_config {
            for a in cx.touched(&node.id, Some(Direction::Read)) {
                if let Artifact::Object(DataObjectDecl {
                    id,
                    kind: DataObjectKind::LearningConfiguration { config_type, .. },
                    ..
                }) = a
                {
                    if *config_type != expected {
                        cx.report(
                            "R-V18",
                            &node.id,
                            format!("{} reads {config_type} configuration `{id}`", task.kind),
                        );
                    }
                }
            }
        }
    }

    for (node, event) in model.events() {
        if !event_position_legal(event.kind, event.position) {
            cx.report("R-V4", &node.id, format!("{} is not allowed as a {} event", event.kind, event.position));
        }
    }

    for object in model.data_objects() {
        if let DataObjectKind::MlData { object_type, data_set_type: Some(set), .. } = &object.kind {
            if *object_type != DataObjectType::FullDataSet {
                cx.report(
                    "R-V3",
                    &object.id,
                    format!("dataSetType {set} requires dataObjectType FullDataSet, found {object_type}"),
                );
            }
        }
    }

    cx.findings
}

fn check_binding(cx: &mut Ctx, node: &FlowNode, task: &TaskNode) {
    let b = &task.execution;
    let filled = |v: &Option<String>| v.as_deref().is_some_and(|s| !s.trim().is_empty());
    let mut problems = Vec::new();
    match b.mode {
        ExecutionMode::FaaS => {
            if !filled(&b.platform) {
                problems.push("platform is required".to_string());
            }
            match b.faas_configuration.as_deref() {
                Some(cfg) if !cfg.trim().is_empty() => {
                    if !matches!(serde_json::from_str::<serde_json::Value>(cfg), Ok(serde_json::Value::Object(_))) {
                        problems.push("faasConfiguration is not a JSON object".to_string());
                    }
                }
                _ => problems.push("faasConfiguration is required".to_string()),
            }
            if b.offloading_technology.is_some() {
                problems.push("offloadingTechnology is not allowed".to_string());
            }
            if b.ml_platform.is_some() {
                problems.push("mlPlatform is not allowed".to_string());
            }
        }
        ExecutionMode::Offloaded => {
            if !filled(&b.offloading_technology) {
                problems.push("offloadingTechnology is required".to_string());
            }
            if b.platform.is_some() {
                problems.push("platform is not allowed".to_string());
            }
            if b.faas_configuration.is_some() {
                problems.push("faasConfiguration is not allowed".to_string());
            }
        }
    }
    if !problems.is_empty() {
        cx.report("R-V1", &node.id, format!("{} binding: {}", b.mode, problems.join("; ")));
    }

    if task.kind == TaskKind::JobConfiguration && b.mode != ExecutionMode::FaaS {
        cx.report("R-V2", &node.id, "JobConfigurationTask must run as a FaaS task");
    }
}

fn check_cardinalities(cx: &mut Ctx, node: &FlowNode, task: &TaskNode) {
    let id = node.id.as_str();
    let reads = cx.touched(id, Some(Direction::Read));
    let count = |pred: &dyn Fn(&Artifact) -> bool, set: &[Artifact]| set.iter().filter(|a| pred(a)).count();
    let data_sources = count(&|a| is_ml_data(a) || is_data_repository(a, None), &reads);

    match task.kind {
        TaskKind::DataFusion => {
            let writes = cx.touched(id, Some(Direction::Write));
            let inputs = count(&is_ml_data, &reads);
            let outputs = count(&is_ml_data, &writes);
            if inputs < 2 || outputs != 1 {
                cx.report(
                    "R-V5",
                    id,
                    format!("DataFusionTask reads {inputs} MLDataObject(s) and writes {outputs}; needs >=2 and exactly 1"),
                );
            }
        }
        TaskKind::Preprocessing | TaskKind::FeatureEngineering if data_sources != 1 => {
            let rule = if task.kind == TaskKind::Preprocessing { "R-V6" } else { "R-V7" };
            cx.report(rule, id, format!("{} has {data_sources} ML data input source(s); needs exactly 1", task.kind));
        }
        TaskKind::FeatureEnrichment if data_sources < 2 => {
            cx.report("R-V8", id, format!("FeatureEnrichmentTask has {data_sources} ML data input source(s); needs >=2"));
        }
        TaskKind::DataSplit => {
            let touched = cx.touched(id, None);
            let repos = count(&|a| is_data_repository(a, Some(RepositoryType::DataSet)), &touched);
            if repos != 1 {
                cx.report("R-V9", id, format!("DataSplitTask is connected to {repos} dataset repositories; needs exactly 1"));
            }
        }
        TaskKind::Voting => {
            let results = count(
                &|a| {
                    matches!(
                        a,
                        Artifact::Object(DataObjectDecl {
                            kind: DataObjectKind::Document { document_type: DocumentType::InferenceResult, .. },
                            ..
                        })
                    )
                },
                &reads,
            );
            if results < 2 {
                cx.report("R-V10", id, format!("VotingTask reads {results} InferenceResult document(s); needs >=2"));
            }
        }
        TaskKind::Training => source_rule(cx, "R-V11", node, task, &reads, DataSetType::Training),
        TaskKind::Scoring => source_rule(cx, "R-V12", node, task, &reads, DataSetType::Validation),
        TaskKind::Evaluation => source_rule(cx, "R-V13", node, task, &reads, DataSetType::Training),
        TaskKind::Tuning => source_rule(cx, "R-V14", node, task, &reads, DataSetType::Training),
        TaskKind::Inference if task.execution.mode == ExecutionMode::FaaS => {
            let registry = reads
                .iter()
                .any(|a| matches!(a, Artifact::Store(DataStoreDecl { kind: StoreKind::ModelRegistry, .. })));
            if !registry {
                cx.report("R-V15", id, "FaaS InferenceTask does not read from a ModelRegistry");
            }
        }
        _ => {}
    }
}

/// A data source is a read of an explicit dataset object of the wanted type
/// or a read of a dataset repository. At most one explicit object, at least
/// one source overall.
fn source_rule(cx: &mut Ctx, rule: &str, node: &FlowNode, task: &TaskNode, reads: &[Artifact], wanted: DataSetType) {
    let explicit = reads.iter().filter(|a| is_dataset(a, wanted)).count();
    let repos = reads.iter().filter(|a| is_data_repository(a, Some(RepositoryType::DataSet))).count();
    let label = match wanted {
        DataSetType::Validation => "validation",
        _ => "training",
    };
    if explicit > 1 {
        cx.report(rule, &node.id, format!("{} has {explicit} explicit {label} dataset inputs; at most one allowed", task.kind));
    } else if explicit + repos == 0 {
        cx.report(rule, &node.id, format!("{} has no {label} data source", task.kind));
    }
}
