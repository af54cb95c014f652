use std::collections::HashMap;
use std::str::FromStr;

use roxmltree::{Document, Node};

use super::{IngestError, SourceDocument, BPMN_NS, SML_NS};
use crate::model::*;

type Result<T> = std::result::Result<T, IngestError>;

/// Parse a BPMN4sML document into an assembled model.
pub fn parse(doc: &SourceDocument) -> Result<Model> {
    let text = doc
        .as_str()
        .map_err(|e| IngestError::MalformedXml { message: format!("not UTF-8: {e}") })?;
    let xml = Document::parse(text).map_err(|e| IngestError::MalformedXml { message: e.to_string() })?;
    let root = xml.root_element();
    if !is_bpmn(root, "definitions") {
        return Err(IngestError::NotBpmn { path: path_of(root) });
    }

    let mut processes = Vec::new();
    for child in root.children().filter(Node::is_element) {
        if is_bpmn(child, "process") {
            processes.push(child);
        } else if is_bpmn(child, "collaboration") {
            if let Some(mf) = child.descendants().find(|n| is_bpmn(*n, "messageFlow")) {
                return Err(unsupported(mf));
            }
        }
    }
    if processes.len() != 1 {
        return Err(IngestError::ProcessCount { found: processes.len(), path: path_of(root) });
    }
    let process = processes[0];
    let parts = read_process(process)?;
    assemble(parts).map_err(|source| IngestError::Assembly { source, path: path_of(process) })
}

fn read_process(process: Node) -> Result<ModelParts> {
    let mut parts = ModelParts::new(required_attr(process, "id")?, process.attribute("name").unwrap_or(""));
    // Gateways without an explicit direction are resolved once all flows are known.
    let mut undirected: Vec<(usize, GatewayKind)> = Vec::new();

    for el in process.children().filter(Node::is_element) {
        if el.tag_name().namespace() != Some(BPMN_NS) {
            continue;
        }
        match el.tag_name().name() {
            "laneSet" => read_lanes(el, &mut parts.lanes)?,
            "serviceTask" => {
                let (node, assocs) = read_task(el)?;
                parts.nodes.push(node);
                parts.associations.extend(assocs);
            }
            "startEvent" | "intermediateCatchEvent" | "intermediateThrowEvent" | "endEvent" => {
                parts.nodes.push(read_event(el)?)
            }
            "exclusiveGateway" | "parallelGateway" => {
                let kind = if el.tag_name().name() == "exclusiveGateway" {
                    GatewayKind::Exclusive
                } else {
                    GatewayKind::Parallel
                };
                let direction = match el.attribute("gatewayDirection") {
                    Some("Diverging") => Some(GatewayDirection::Diverging),
                    Some("Converging") => Some(GatewayDirection::Converging),
                    None | Some("Unspecified") => None,
                    Some(other) => {
                        return Err(IngestError::UnsupportedConstruct {
                            construct: format!("gatewayDirection={other}"),
                            path: path_of(el),
                        })
                    }
                };
                if direction.is_none() {
                    undirected.push((parts.nodes.len(), kind));
                }
                parts.nodes.push(FlowNode {
                    id: required_attr(el, "id")?,
                    name: name_of(el),
                    variant: NodeVariant::Gateway(GatewayNode {
                        kind,
                        direction: direction.unwrap_or(GatewayDirection::Converging),
                    }),
                });
            }
            "sequenceFlow" => parts.flows.push(read_flow(el)?),
            "dataObject" | "dataObjectReference" => parts.data_objects.push(read_data_object(el)?),
            "dataStoreReference" => parts.data_stores.push(read_data_store(el)?),
            "textAnnotation" | "association" | "documentation" | "extensionElements" | "property"
            | "ioSpecification" => {}
            _ => return Err(unsupported(el)),
        }
    }

    for (idx, kind) in undirected {
        let id = &parts.nodes[idx].id;
        let fan_out = parts.flows.iter().filter(|f| &f.source == id).count();
        let direction =
            if fan_out >= 2 { GatewayDirection::Diverging } else { GatewayDirection::Converging };
        parts.nodes[idx].variant = NodeVariant::Gateway(GatewayNode { kind, direction });
    }
    Ok(parts)
}

fn read_lanes(lane_set: Node, lanes: &mut Vec<Lane>) -> Result<()> {
    for lane in lane_set.children().filter(Node::is_element) {
        if !is_bpmn(lane, "lane") {
            continue;
        }
        if let Some(nested) = lane.children().find(|c| is_bpmn(*c, "childLaneSet")) {
            return Err(unsupported(nested));
        }
        lanes.push(Lane {
            id: required_attr(lane, "id")?,
            name: name_of(lane),
            members: lane
                .children()
                .filter(|c| is_bpmn(*c, "flowNodeRef"))
                .map(|c| c.text().unwrap_or("").trim().to_string())
                .collect(),
        });
    }
    Ok(())
}

const TASK_ATTRS: &[&str] = &[
    "kind",
    "execution",
    "platform",
    "faasConfiguration",
    "offloadingTechnology",
    "mlPlatform",
    "script",
    "environment",
];

fn read_task(el: Node) -> Result<(FlowNode, Vec<DataAssociation>)> {
    let id = required_attr(el, "id")?;
    check_sml_attrs(el, TASK_ATTRS)?;
    let kind = parse_enum::<TaskKind>(el, required_sml(el, "kind")?)?;
    let mode = parse_enum::<ExecutionMode>(el, required_sml(el, "execution")?)?;
    let sml = |name: &str| el.attribute((SML_NS, name)).map(str::to_string);
    let task = TaskNode {
        kind,
        execution: ExecutionBinding {
            mode,
            platform: sml("platform"),
            faas_configuration: sml("faasConfiguration"),
            offloading_technology: sml("offloadingTechnology"),
            ml_platform: sml("mlPlatform"),
            script: sml("script"),
        },
        environment: sml("environment"),
    };

    let mut assocs = Vec::new();
    for child in el.children().filter(Node::is_element) {
        let (direction, ref_tag) = if is_bpmn(child, "dataInputAssociation") {
            (Direction::Read, "sourceRef")
        } else if is_bpmn(child, "dataOutputAssociation") {
            (Direction::Write, "targetRef")
        } else {
            continue;
        };
        let artifact = child
            .children()
            .find(|c| is_bpmn(*c, ref_tag))
            .and_then(|c| c.text())
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .ok_or_else(|| IngestError::MissingAttribute { name: ref_tag.to_string(), path: path_of(child) })?;
        assocs.push(DataAssociation { id: required_attr(child, "id")?, task: id.clone(), artifact, direction });
    }

    Ok((FlowNode { id, name: name_of(el), variant: NodeVariant::Task(task) }, assocs))
}

fn read_event(el: Node) -> Result<FlowNode> {
    let position = match el.tag_name().name() {
        "startEvent" => EventPosition::Start,
        "intermediateCatchEvent" => EventPosition::IntermediateCatch,
        "intermediateThrowEvent" => EventPosition::IntermediateThrow,
        _ => EventPosition::End,
    };

    let mut standard: Option<EventKind> = None;
    let mut extension: Option<Node> = None;
    for child in el.children().filter(Node::is_element) {
        if child.tag_name().namespace() != Some(BPMN_NS) {
            continue;
        }
        let tag = child.tag_name().name();
        if tag.ends_with("EventDefinition") {
            let kind = match tag {
                "timerEventDefinition" => EventKind::Timer,
                "messageEventDefinition" => EventKind::Message,
                "signalEventDefinition" => EventKind::Signal,
                "errorEventDefinition" => EventKind::Error,
                _ => return Err(unsupported(child)),
            };
            if standard.replace(kind).is_some() {
                return Err(IngestError::UnsupportedConstruct {
                    construct: "multiple event definitions".into(),
                    path: path_of(el),
                });
            }
        } else if tag == "extensionElements" {
            extension = child.children().find(|c| is_sml(*c, "event"));
        } else if tag == "dataInputAssociation" || tag == "dataOutputAssociation" {
            return Err(unsupported(child));
        }
    }

    let mut kind = standard.unwrap_or(EventKind::PlainNone);
    let mut payload_name = None;
    if let Some(ext) = extension {
        check_plain_attrs(ext, &["kind", "payloadName"])?;
        if let Some(value) = ext.attribute("kind") {
            let declared = parse_enum::<EventKind>(ext, value)?;
            if !declared.is_extension() && declared != kind {
                return Err(IngestError::InvalidAttribute {
                    name: "kind".into(),
                    path: path_of(ext),
                    message: format!("`{declared}` disagrees with the event definition (`{kind}`)"),
                });
            }
            if declared.is_extension() && standard.is_some() {
                return Err(IngestError::InvalidAttribute {
                    name: "kind".into(),
                    path: path_of(ext),
                    message: format!("`{declared}` cannot be combined with a standard event definition"),
                });
            }
            kind = declared;
        }
        payload_name = ext.attribute("payloadName").map(str::to_string);
    }

    Ok(FlowNode {
        id: required_attr(el, "id")?,
        name: name_of(el),
        variant: NodeVariant::Event(EventNode { kind, position, payload_name }),
    })
}

fn read_flow(el: Node) -> Result<SequenceFlow> {
    let condition = match el.children().find(|c| is_bpmn(*c, "conditionExpression")) {
        None => None,
        Some(expr) => {
            let text = expr.text().unwrap_or("");
            Some(parse_condition(text).ok_or_else(|| IngestError::MalformedCondition {
                text: text.to_string(),
                path: path_of(expr),
            })?)
        }
    };
    Ok(SequenceFlow {
        id: required_attr(el, "id")?,
        source: required_attr(el, "sourceRef")?,
        target: required_attr(el, "targetRef")?,
        condition,
    })
}

/// `default` or `<path> == <literal>`, where the literal is a JSON string,
/// number or boolean.
pub(crate) fn parse_condition(text: &str) -> Option<Condition> {
    let text = text.trim();
    if text == "default" {
        return Some(Condition::Default);
    }
    let (path, literal) = text.split_once("==")?;
    let path = path.trim();
    let valid_path = !path.is_empty()
        && path
            .split('.')
            .all(|seg| !seg.is_empty() && seg.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'));
    if !valid_path {
        return None;
    }
    let literal = match serde_json::from_str::<serde_json::Value>(literal.trim()).ok()? {
        serde_json::Value::String(s) => Literal::Text(s),
        serde_json::Value::Number(n) => Literal::Number(n),
        serde_json::Value::Bool(b) => Literal::Bool(b),
        _ => return None,
    };
    Some(Condition::Equals { path: path.to_string(), literal })
}

fn artifact_ext<'a, 'i>(el: Node<'a, 'i>) -> Result<Node<'a, 'i>> {
    el.children()
        .filter(|c| is_bpmn(*c, "extensionElements"))
        .flat_map(|c| c.children())
        .find(|c| is_sml(*c, "artifact"))
        .ok_or_else(|| IngestError::MissingAttribute { name: "sml:artifact".into(), path: path_of(el) })
}

fn read_data_object(el: Node) -> Result<DataObjectDecl> {
    let ext = artifact_ext(el)?;
    let category = parse_enum::<DataObjectCategory>(ext, required_plain(ext, "kind")?)?;
    let req = |name: &str| required_plain(ext, name).map(str::to_string);
    let opt = |name: &str| ext.attribute(name).map(str::to_string);
    let kind = match category {
        DataObjectCategory::MlModel => {
            check_plain_attrs(ext, &["kind", "identifier", "status"])?;
            DataObjectKind::MlModel {
                identifier: req("identifier")?,
                status: ext.attribute("status").map(|v| parse_enum(ext, v)).transpose()?,
            }
        }
        DataObjectCategory::MlData => {
            check_plain_attrs(ext, &["kind", "identifier", "dataObjectType", "dataSetType"])?;
            DataObjectKind::MlData {
                identifier: req("identifier")?,
                object_type: parse_enum(ext, required_plain(ext, "dataObjectType")?)?,
                data_set_type: ext.attribute("dataSetType").map(|v| parse_enum(ext, v)).transpose()?,
            }
        }
        DataObjectCategory::Code => {
            check_plain_attrs(ext, &["kind", "identifier", "operation"])?;
            DataObjectKind::Code { identifier: req("identifier")?, operation: req("operation")? }
        }
        DataObjectCategory::LearningConfiguration => {
            check_plain_attrs(ext, &["kind", "identifier", "configuration", "configType"])?;
            DataObjectKind::LearningConfiguration {
                identifier: req("identifier")?,
                configuration: req("configuration")?,
                config_type: parse_enum(ext, required_plain(ext, "configType")?)?,
            }
        }
        DataObjectCategory::Log => {
            check_plain_attrs(ext, &["kind", "logContent"])?;
            DataObjectKind::Log { log_content: req("logContent")? }
        }
        DataObjectCategory::Metadata => {
            check_plain_attrs(ext, &["kind", "association", "location", "description"])?;
            DataObjectKind::Metadata {
                association: req("association")?,
                location: req("location")?,
                description: opt("description"),
            }
        }
        DataObjectCategory::Document => {
            check_plain_attrs(ext, &["kind", "identifier", "documentContent", "documentType"])?;
            DataObjectKind::Document {
                identifier: req("identifier")?,
                document_content: req("documentContent")?,
                document_type: parse_enum(ext, required_plain(ext, "documentType")?)?,
            }
        }
    };
    Ok(DataObjectDecl { id: required_attr(el, "id")?, name: name_of(el), kind })
}

fn read_data_store(el: Node) -> Result<DataStoreDecl> {
    let ext = artifact_ext(el)?;
    let category = parse_enum::<StoreCategory>(ext, required_plain(ext, "kind")?)?;
    let kind = match category {
        StoreCategory::ModelRegistry => StoreKind::ModelRegistry,
        StoreCategory::LogStore => StoreKind::LogStore,
        StoreCategory::MetadataRepository => StoreKind::MetadataRepository,
        StoreCategory::DataRepository => {
            StoreKind::DataRepository(parse_enum(ext, required_plain(ext, "repositoryType")?)?)
        }
    };
    if category == StoreCategory::DataRepository {
        check_plain_attrs(ext, &["kind", "placement", "platform", "repositoryType"])?;
    } else {
        check_plain_attrs(ext, &["kind", "placement", "platform"])?;
    }
    Ok(DataStoreDecl {
        id: required_attr(el, "id")?,
        name: name_of(el),
        kind,
        placement: required_plain(ext, "placement")?.to_string(),
        platform: ext.attribute("platform").map(str::to_string),
    })
}

fn is_bpmn(node: Node, local: &str) -> bool {
    node.is_element() && node.tag_name().namespace() == Some(BPMN_NS) && node.tag_name().name() == local
}

fn is_sml(node: Node, local: &str) -> bool {
    node.is_element() && node.tag_name().namespace() == Some(SML_NS) && node.tag_name().name() == local
}

fn name_of(el: Node) -> String {
    el.attribute("name").unwrap_or("").to_string()
}

fn required_attr(el: Node, name: &str) -> Result<String> {
    el.attribute(name)
        .map(str::to_string)
        .ok_or_else(|| IngestError::MissingAttribute { name: name.to_string(), path: path_of(el) })
}

fn required_sml<'a>(el: Node<'a, '_>, name: &str) -> Result<&'a str> {
    el.attribute((SML_NS, name))
        .ok_or_else(|| IngestError::MissingAttribute { name: format!("sml:{name}"), path: path_of(el) })
}

fn required_plain<'a>(el: Node<'a, '_>, name: &str) -> Result<&'a str> {
    el.attribute(name)
        .ok_or_else(|| IngestError::MissingAttribute { name: name.to_string(), path: path_of(el) })
}

fn parse_enum<T: FromStr>(el: Node, value: &str) -> Result<T> {
    T::from_str(value).map_err(|_| IngestError::UnknownKind { value: value.to_string(), path: path_of(el) })
}

fn check_sml_attrs(el: Node, allowed: &[&str]) -> Result<()> {
    for attr in el.attributes() {
        if attr.namespace() == Some(SML_NS) && !allowed.contains(&attr.name()) {
            return Err(IngestError::InvalidAttribute {
                name: format!("sml:{}", attr.name()),
                path: path_of(el),
                message: "is not defined for this element".into(),
            });
        }
    }
    Ok(())
}

fn check_plain_attrs(el: Node, allowed: &[&str]) -> Result<()> {
    for attr in el.attributes() {
        if attr.namespace().is_none() && !allowed.contains(&attr.name()) {
            return Err(IngestError::InvalidAttribute {
                name: attr.name().to_string(),
                path: path_of(el),
                message: "is not defined for this artifact kind".into(),
            });
        }
    }
    Ok(())
}

fn unsupported(el: Node) -> IngestError {
    IngestError::UnsupportedConstruct { construct: el.tag_name().name().to_string(), path: path_of(el) }
}

/// Absolute element path, e.g. `/definitions/process[@id='p']/serviceTask[@id='t1']`.
pub(crate) fn path_of(node: Node) -> String {
    let mut segments: Vec<String> = node
        .ancestors()
        .filter(Node::is_element)
        .map(|n| {
            let tag = n.tag_name().name();
            match n.attribute("id") {
                Some(id) => format!("{tag}[@id='{id}']"),
                None => {
                    let mut counts: HashMap<&str, usize> = HashMap::new();
                    let parent_children = n.parent().map(|p| p.children().filter(Node::is_element));
                    let mut index = 1;
                    if let Some(children) = parent_children {
                        for sibling in children {
                            let c = counts.entry(sibling.tag_name().name()).or_default();
                            *c += 1;
                            if sibling == n {
                                index = *c;
                            }
                        }
                    }
                    if n.parent().is_none_or(|p| !p.is_element()) {
                        tag.to_string()
                    } else {
                        format!("{tag}[{index}]")
                    }
                }
            }
        })
        .collect();
    segments.reverse();
    format!("/{}", segments.join("/"))
}
