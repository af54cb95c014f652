//! Metamodel constraint checking.
//!
//! Every rule in [`RULES`] is evaluated independently over an assembled
//! model; faults become [`Finding`]s, never errors.

mod rules;

use std::fmt::Write as _;

use serde::Serialize;

use crate::model::Model;

pub use rules::event_position_legal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationRule {
    pub rule_id: &'static str,
    pub severity: Severity,
    pub description: &'static str,
}

const fn rule(rule_id: &'static str, severity: Severity, description: &'static str) -> ValidationRule {
    ValidationRule { rule_id, severity, description }
}

pub const RULES: &[ValidationRule] = &[
    rule("R-V1", Severity::Error, "execution binding attributes complete for the task's execution mode"),
    rule("R-V2", Severity::Error, "JobConfigurationTask must be executed as a FaaS task"),
    rule("R-V3", Severity::Error, "MLDataObject dataSetType requires dataObjectType FullDataSet"),
    rule("R-V4", Severity::Error, "event kind is legal at its position"),
    rule("R-V5", Severity::Error, "DataFusionTask reads at least two MLDataObjects and writes exactly one"),
    rule("R-V6", Severity::Error, "PreprocessingTask has exactly one ML data input source"),
    rule("R-V7", Severity::Error, "FeatureEngineeringTask has exactly one ML data input source"),
    rule("R-V8", Severity::Error, "FeatureEnrichmentTask has at least two ML data input sources"),
    rule("R-V9", Severity::Error, "DataSplitTask is connected to exactly one dataset repository"),
    rule("R-V10", Severity::Error, "VotingTask reads at least two InferenceResult documents"),
    rule("R-V11", Severity::Error, "TrainingTask has exactly one training data source"),
    rule("R-V12", Severity::Error, "ScoringTask has exactly one validation data source"),
    rule("R-V13", Severity::Error, "EvaluationTask has exactly one training data source"),
    rule("R-V14", Severity::Error, "TuningTask has exactly one training data source"),
    rule("R-V15", Severity::Error, "FaaS InferenceTask reads its model from a ModelRegistry"),
    rule("R-V16", Severity::Error, "environment attribute is only allowed on DeploymentTask"),
    rule("R-V17", Severity::Warning, "task is not connected by any sequence flow"),
    rule("R-V18", Severity::Warning, "learning configuration type matches the consuming task"),
];

pub fn rule_info(rule_id: &str) -> Option<&'static ValidationRule> {
    RULES.iter().find(|r| r.rule_id == rule_id)
}

fn rule_rank(rule_id: &str) -> usize {
    RULES.iter().position(|r| r.rule_id == rule_id).unwrap_or(usize::MAX)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub rule: String,
    pub element: String,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    fn from_findings(mut findings: Vec<Finding>) -> Self {
        findings.sort_by(|a, b| {
            a.element
                .cmp(&b.element)
                .then_with(|| rule_rank(&a.rule).cmp(&rule_rank(&b.rule)))
        });
        let passed = findings.iter().all(|f| f.severity != Severity::Error);
        ValidationReport { passed, findings }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    pub fn rule_ids(&self) -> Vec<&str> {
        self.findings.iter().map(|f| f.rule.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = if self.passed { "passed" } else { "failed" };
        let _ = writeln!(
            out,
            "{status}: {} error(s), {} warning(s)",
            self.errors().count(),
            self.warnings().count()
        );
        for f in &self.findings {
            let _ = writeln!(out, "{:<7} {:<6} {}: {}", f.severity.as_str(), f.rule, f.element, f.message);
        }
        out
    }
}

/// Evaluate the full rule registry.
pub fn validate(model: &Model) -> ValidationReport {
    ValidationReport::from_findings(rules::evaluate(model))
}
