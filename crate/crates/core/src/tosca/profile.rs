use indexmap::IndexMap;

use super::MapError;
use crate::model::StoreCategory;

/// Provider-specific type names for each mapped element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderProfile {
    pub name: String,
    pub function_node_type: String,
    pub orchestrator_node_type: String,
    pub platform_node_type: String,
    pub store_node_type: IndexMap<StoreCategory, String>,
    /// Keyed by lowercase platform name.
    pub ml_platform_node_type: IndexMap<String, String>,
    pub orchestrates_rel_type: String,
    pub connects_to_rel_type: String,
    pub hosted_on_rel_type: String,
}

impl ProviderProfile {
    pub fn store_type(&self, category: StoreCategory) -> &str {
        &self.store_node_type[&category]
    }

    pub fn ml_platform_type(&self, platform: &str) -> Option<&str> {
        self.ml_platform_node_type.get(&platform.trim().to_lowercase()).map(String::as_str)
    }
}

fn all_stores(type_name: &str) -> IndexMap<StoreCategory, String> {
    [
        StoreCategory::ModelRegistry,
        StoreCategory::LogStore,
        StoreCategory::MetadataRepository,
        StoreCategory::DataRepository,
    ]
    .into_iter()
    .map(|c| (c, type_name.to_string()))
    .collect()
}

fn platforms(names: &[&str], type_name: &str) -> IndexMap<String, String> {
    names.iter().map(|n| (n.to_string(), type_name.to_string())).collect()
}

pub fn builtin_profile(name: &str) -> Result<ProviderProfile, MapError> {
    match name {
        "aws" => Ok(ProviderProfile {
            name: "aws".into(),
            function_node_type: "AwsLambdaFunction".into(),
            orchestrator_node_type: "AwsSFOrchestration".into(),
            platform_node_type: "AwsPlatform".into(),
            store_node_type: all_stores("AwsS3Bucket"),
            ml_platform_node_type: platforms(&["sagemaker", "aws sagemaker", "amazon sagemaker"], "AwsSageMaker"),
            orchestrates_rel_type: "AwsSFOrchestrates".into(),
            connects_to_rel_type: "connectsTo".into(),
            hosted_on_rel_type: "hostedOn".into(),
        }),
        "generic" => Ok(ProviderProfile {
            name: "generic".into(),
            function_node_type: "ServerlessFunction".into(),
            orchestrator_node_type: "FunctionOrchestrator".into(),
            platform_node_type: "CloudPlatform".into(),
            store_node_type: all_stores("ObjectStore"),
            ml_platform_node_type: platforms(
                &["sagemaker", "aws sagemaker", "amazon sagemaker", "vertex ai", "azure machine learning", "azure ml"],
                "MachineLearningPlatform",
            ),
            orchestrates_rel_type: "orchestrates".into(),
            connects_to_rel_type: "connectsTo".into(),
            hosted_on_rel_type: "hostedOn".into(),
        }),
        other => Err(MapError::UnknownProfile(other.to_string())),
    }
}
