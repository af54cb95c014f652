use std::borrow::Cow;

use quick_xml::events::attributes::Attribute;
use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::name::QName;
use quick_xml::Writer;

use super::{SourceDocument, BPMN_NS, SML_NS, XSI_NS};
use crate::model::*;

/// Canonical serialization: fixed element and attribute order, 2-space
/// indent, LF line endings.
pub fn serialize(model: &Model) -> SourceDocument {
    let mut out = Out { w: Writer::new_with_indent(Vec::new(), b' ', 2) };
    out.event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)));

    let defs_id = format!("Definitions_{}", model.process_id());
    out.open(
        "bpmn:definitions",
        &[
            ("xmlns:bpmn", Some(BPMN_NS)),
            ("xmlns:sml", Some(SML_NS)),
            ("xmlns:xsi", Some(XSI_NS)),
            ("id", Some(&defs_id)),
            ("targetNamespace", Some("http://bpmn4sml.org/models")),
        ],
    );

    let process_attrs = [
        ("id", Some(model.process_id())),
        ("name", non_empty(model.name())),
        ("isExecutable", Some("false")),
    ];
    let empty = model.nodes().is_empty()
        && model.flows().is_empty()
        && model.data_objects().is_empty()
        && model.data_stores().is_empty()
        && model.lanes().is_empty();
    if empty {
        out.empty("bpmn:process", &process_attrs);
    } else {
        out.open("bpmn:process", &process_attrs);
        write_body(&mut out, model);
        out.close("bpmn:process");
    }

    out.close("bpmn:definitions");
    let mut bytes = out.w.into_inner();
    bytes.push(b'\n');
    SourceDocument::new(bytes)
}

fn write_body(out: &mut Out, model: &Model) {
    if !model.lanes().is_empty() {
        let set_id = format!("{}_lanes", model.process_id());
        out.open("bpmn:laneSet", &[("id", Some(&set_id))]);
        for lane in model.lanes() {
            let attrs = [("id", Some(lane.id.as_str())), ("name", non_empty(&lane.name))];
            if lane.members.is_empty() {
                out.empty("bpmn:lane", &attrs);
                continue;
            }
            out.open("bpmn:lane", &attrs);
            for member in &lane.members {
                out.text_element("bpmn:flowNodeRef", member);
            }
            out.close("bpmn:lane");
        }
        out.close("bpmn:laneSet");
    }

    for node in model.nodes() {
        match &node.variant {
            NodeVariant::Task(task) => write_task(out, model, node, task),
            NodeVariant::Event(event) => write_event(out, node, event),
            NodeVariant::Gateway(gw) => {
                let tag = match gw.kind {
                    GatewayKind::Exclusive => "bpmn:exclusiveGateway",
                    GatewayKind::Parallel => "bpmn:parallelGateway",
                };
                out.empty(
                    tag,
                    &[
                        ("id", Some(&node.id)),
                        ("name", non_empty(&node.name)),
                        ("gatewayDirection", Some(gw.direction.as_ref())),
                    ],
                );
            }
        }
    }

    for flow in model.flows() {
        let attrs = [
            ("id", Some(flow.id.as_str())),
            ("sourceRef", Some(flow.source.as_str())),
            ("targetRef", Some(flow.target.as_str())),
        ];
        match &flow.condition {
            None => out.empty("bpmn:sequenceFlow", &attrs),
            Some(condition) => {
                out.open("bpmn:sequenceFlow", &attrs);
                let text = condition.to_string();
                out.open_with_text(
                    "bpmn:conditionExpression",
                    &[("xsi:type", Some("bpmn:tFormalExpression"))],
                    &text,
                );
                out.close("bpmn:sequenceFlow");
            }
        }
    }

    for object in model.data_objects() {
        out.open("bpmn:dataObject", &[("id", Some(&object.id)), ("name", non_empty(&object.name))]);
        out.open("bpmn:extensionElements", &[]);
        out.empty("sml:artifact", &object_attrs(&object.kind));
        out.close("bpmn:extensionElements");
        out.close("bpmn:dataObject");
    }

    for store in model.data_stores() {
        out.open("bpmn:dataStoreReference", &[("id", Some(&store.id)), ("name", non_empty(&store.name))]);
        out.open("bpmn:extensionElements", &[]);
        out.empty(
            "sml:artifact",
            &[
                ("kind", Some(store.kind.category().as_ref())),
                ("placement", Some(&store.placement)),
                ("platform", store.platform.as_deref()),
                ("repositoryType", store.kind.repository_type().map(<&str>::from)),
            ],
        );
        out.close("bpmn:extensionElements");
        out.close("bpmn:dataStoreReference");
    }
}

fn write_task(out: &mut Out, model: &Model, node: &FlowNode, task: &TaskNode) {
    let b = &task.execution;
    let attrs = [
        ("id", Some(node.id.as_str())),
        ("name", non_empty(&node.name)),
        ("sml:kind", Some(task.kind.as_ref())),
        ("sml:execution", Some(b.mode.as_ref())),
        ("sml:platform", b.platform.as_deref()),
        ("sml:faasConfiguration", b.faas_configuration.as_deref()),
        ("sml:offloadingTechnology", b.offloading_technology.as_deref()),
        ("sml:mlPlatform", b.ml_platform.as_deref()),
        ("sml:script", b.script.as_deref()),
        ("sml:environment", task.environment.as_deref()),
    ];
    let assocs: Vec<_> = model.associations().iter().filter(|a| a.task == node.id).collect();
    if assocs.is_empty() {
        out.empty("bpmn:serviceTask", &attrs);
        return;
    }
    out.open("bpmn:serviceTask", &attrs);
    for assoc in assocs {
        let (tag, ref_tag) = match assoc.direction {
            Direction::Read => ("bpmn:dataInputAssociation", "bpmn:sourceRef"),
            Direction::Write => ("bpmn:dataOutputAssociation", "bpmn:targetRef"),
        };
        out.open(tag, &[("id", Some(&assoc.id))]);
        out.text_element(ref_tag, &assoc.artifact);
        out.close(tag);
    }
    out.close("bpmn:serviceTask");
}

fn write_event(out: &mut Out, node: &FlowNode, event: &EventNode) {
    let tag = match event.position {
        EventPosition::Start => "bpmn:startEvent",
        EventPosition::IntermediateCatch => "bpmn:intermediateCatchEvent",
        EventPosition::IntermediateThrow => "bpmn:intermediateThrowEvent",
        EventPosition::End => "bpmn:endEvent",
    };
    let definition = match event.kind {
        EventKind::Timer => Some("bpmn:timerEventDefinition"),
        EventKind::Message => Some("bpmn:messageEventDefinition"),
        EventKind::Signal => Some("bpmn:signalEventDefinition"),
        EventKind::Error => Some("bpmn:errorEventDefinition"),
        _ => None,
    };
    let needs_ext = event.kind.is_extension() || event.payload_name.is_some();
    let attrs = [("id", Some(node.id.as_str())), ("name", non_empty(&node.name))];
    if !needs_ext && definition.is_none() {
        out.empty(tag, &attrs);
        return;
    }
    out.open(tag, &attrs);
    if needs_ext {
        out.open("bpmn:extensionElements", &[]);
        out.empty(
            "sml:event",
            &[("kind", Some(event.kind.as_ref())), ("payloadName", event.payload_name.as_deref())],
        );
        out.close("bpmn:extensionElements");
    }
    if let Some(def) = definition {
        out.empty(def, &[]);
    }
    out.close(tag);
}

fn object_attrs(kind: &DataObjectKind) -> Vec<(&'static str, Option<&str>)> {
    let mut attrs = vec![("kind", Some(<&str>::from(kind.category())))];
    match kind {
        DataObjectKind::MlModel { identifier, status } => {
            attrs.push(("identifier", Some(identifier)));
            attrs.push(("status", status.as_ref().map(|s| s.as_ref())));
        }
        DataObjectKind::MlData { identifier, object_type, data_set_type } => {
            attrs.push(("identifier", Some(identifier)));
            attrs.push(("dataObjectType", Some(object_type.as_ref())));
            attrs.push(("dataSetType", data_set_type.as_ref().map(|s| s.as_ref())));
        }
        DataObjectKind::Code { identifier, operation } => {
            attrs.push(("identifier", Some(identifier)));
            attrs.push(("operation", Some(operation)));
        }
        DataObjectKind::LearningConfiguration { identifier, configuration, config_type } => {
            attrs.push(("identifier", Some(identifier)));
            attrs.push(("configuration", Some(configuration)));
            attrs.push(("configType", Some(config_type.as_ref())));
        }
        DataObjectKind::Log { log_content } => attrs.push(("logContent", Some(log_content))),
        DataObjectKind::Metadata { association, location, description } => {
            attrs.push(("association", Some(association)));
            attrs.push(("location", Some(location)));
            attrs.push(("description", description.as_deref()));
        }
        DataObjectKind::Document { identifier, document_content, document_type } => {
            attrs.push(("identifier", Some(identifier)));
            attrs.push(("documentContent", Some(document_content)));
            attrs.push(("documentType", Some(document_type.as_ref())));
        }
    }
    attrs
}

fn non_empty(s: &str) -> Option<&str> {
    (!s.is_empty()).then_some(s)
}

/// XML escaping that also protects whitespace characters a parser would
/// otherwise normalize away.
fn escape(raw: &str) -> String {
    let mut s = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '&' => s.push_str("&amp;"),
            '<' => s.push_str("&lt;"),
            '>' => s.push_str("&gt;"),
            '"' => s.push_str("&quot;"),
            '\'' => s.push_str("&apos;"),
            '\n' => s.push_str("&#10;"),
            '\r' => s.push_str("&#13;"),
            '\t' => s.push_str("&#9;"),
            c => s.push(c),
        }
    }
    s
}

struct Out {
    w: Writer<Vec<u8>>,
}

impl Out {
    fn event(&mut self, event: Event) {
        // Writing into a Vec cannot fail.
        self.w.write_event(event).expect("in-memory write");
    }

    fn start<'a>(tag: &'a str, attrs: &[(&'a str, Option<&str>)]) -> BytesStart<'a> {
        let mut start = BytesStart::new(tag);
        for (key, value) in attrs {
            if let Some(value) = value {
                start.push_attribute(Attribute {
                    key: QName(key.as_bytes()),
                    value: Cow::Owned(escape(value).into_bytes()),
                });
            }
        }
        start
    }

    fn open(&mut self, tag: &str, attrs: &[(&str, Option<&str>)]) {
        self.event(Event::Start(Self::start(tag, attrs)));
    }

    fn empty(&mut self, tag: &str, attrs: &[(&str, Option<&str>)]) {
        self.event(Event::Empty(Self::start(tag, attrs)));
    }

    fn close(&mut self, tag: &str) {
        self.event(Event::End(BytesEnd::new(tag)));
    }

    fn open_with_text(&mut self, tag: &str, attrs: &[(&str, Option<&str>)], text: &str) {
        self.open(tag, attrs);
        let escaped = escape(text);
        self.event(Event::Text(BytesText::from_escaped(escaped.as_str())));
        self.close(tag);
    }

    fn text_element(&mut self, tag: &str, text: &str) {
        self.open_with_text(tag, &[], text);
    }
}
