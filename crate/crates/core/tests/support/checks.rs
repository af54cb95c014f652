//! Topology, YAML and CSAR property checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Cursor, Read};

use bpmn4sml::model::{ExecutionMode, Model};
use bpmn4sml::orchestration::{extract, serialize_asl};
use bpmn4sml::tosca::*;
use serde_json::Value;

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Platform value each element should be hosted on, derived from the model
/// alone: FaaS tasks use their platform, offloaded tasks without an ML
/// platform their offloading technology, everything else the first FaaS
/// platform (or first store platform).
fn expected_platforms(model: &Model, orchestrated: bool) -> BTreeSet<String> {
    let default = model
        .tasks()
        .filter(|(_, t)| t.execution.mode == ExecutionMode::FaaS)
        .find_map(|(_, t)| t.execution.platform.clone())
        .or_else(|| model.data_stores().iter().find_map(|s| s.platform.clone()));
    let mut out = BTreeSet::new();
    for (_, t) in model.tasks() {
        let b = &t.execution;
        let p = match b.mode {
            ExecutionMode::FaaS => b.platform.clone(),
            ExecutionMode::Offloaded if b.ml_platform.is_none() => b.offloading_technology.clone(),
            ExecutionMode::Offloaded => default.clone(),
        };
        out.extend(p);
    }
    for s in model.data_stores() {
        out.extend(s.platform.clone().or_else(|| default.clone()));
    }
    if orchestrated {
        out.extend(default);
    }
    out
}

/// Structural invariants of a mapped topology.
pub fn topology_invariants(model: &Model, topo: &ToscaTopology, opts: &MapOptions) -> Check {
    let p = &opts.profile;
    let names: BTreeSet<&str> = topo.node_templates.iter().map(|n| n.name.as_str()).collect();
    ensure(names.len() == topo.node_templates.len(), || "duplicate node template names".into())?;
    for r in &topo.relationships {
        ensure(names.contains(r.source.as_str()) && names.contains(r.target.as_str()), || {
            format!("dangling relationship {} -> {}", r.source, r.target)
        })?;
    }

    let store_types: BTreeSet<&str> = p.store_node_type.values().map(String::as_str).collect();
    let is_platform = |t: &str| t == p.platform_node_type;
    let is_infra = |t: &str| is_platform(t) || t == p.orchestrator_node_type || store_types.contains(t);

    // hostedOn totality
    for node in &topo.node_templates {
        let hosted = topo
            .relationships
            .iter()
            .filter(|r| r.source == node.name && r.type_name == p.hosted_on_rel_type)
            .count();
        let want = if is_platform(&node.type_name) { 0 } else { 1 };
        ensure(hosted == want, || format!("{} has {hosted} hostedOn, expected {want}", node.name))?;
    }

    // task bijection onto non-infrastructure nodes
    let task_nodes: Vec<&NodeTemplate> = topo.node_templates.iter().filter(|n| !is_infra(&n.type_name)).collect();
    let task_ids: BTreeSet<String> = model.tasks().map(|(n, _)| n.id.clone()).collect();
    let mapped: BTreeSet<String> = task_nodes
        .iter()
        .filter_map(|n| match &n.role {
            NodeRole::Task(id) => Some(id.clone()),
            _ => None,
        })
        .collect();
    ensure(task_nodes.len() == task_ids.len() && mapped == task_ids, || {
        format!("task bijection broken: {} task nodes for {} tasks", task_nodes.len(), task_ids.len())
    })?;

    // orchestrates degree
    let orchestrators: Vec<&NodeTemplate> =
        topo.node_templates.iter().filter(|n| n.type_name == p.orchestrator_node_type).collect();
    match opts.mode {
        MappingMode::Orchestration => {
            ensure(orchestrators.len() == 1, || format!("{} orchestrators", orchestrators.len()))?;
            let targets: Vec<&str> = topo
                .relationships
                .iter()
                .filter(|r| r.source == orchestrators[0].name && r.type_name == p.orchestrates_rel_type)
                .map(|r| r.target.as_str())
                .collect();
            let distinct: BTreeSet<&str> = targets.iter().copied().collect();
            let task_names: BTreeSet<&str> = task_nodes.iter().map(|n| n.name.as_str()).collect();
            ensure(targets.len() == task_ids.len() && distinct == task_names, || {
                format!("orchestrator relates to {} nodes for {} tasks", targets.len(), task_ids.len())
            })?;
        }
        MappingMode::EventDriven => ensure(orchestrators.is_empty(), || "orchestrator in event-driven mode".into())?,
    }

    // one platform node per platform value
    let platforms = topo.node_templates.iter().filter(|n| is_platform(&n.type_name)).count();
    let expected = expected_platforms(model, opts.mode == MappingMode::Orchestration);
    ensure(platforms == expected.len(), || format!("{platforms} platform nodes, expected {expected:?}"))?;

    // store count
    let stores: Vec<&NodeTemplate> =
        topo.node_templates.iter().filter(|n| store_types.contains(n.type_name.as_str())).collect();
    if opts.aggregate_stores {
        let directories: usize = stores
            .iter()
            .map(|n| n.properties.keys().filter(|k| k.starts_with("directory_")).count())
            .sum();
        ensure(directories == model.data_stores().len(), || {
            format!("{directories} directory properties for {} stores", model.data_stores().len())
        })?;
    } else {
        ensure(stores.len() == model.data_stores().len(), || {
            format!("{} store nodes for {} stores", stores.len(), model.data_stores().len())
        })?;
    }
    Ok(())
}

type NodeKey = (String, String, String, String);
type RelKey = (String, String, String, String);

fn canonical(v: &Value) -> String {
    serde_json::to_string(v).unwrap()
}

fn topology_multisets(topo: &ToscaTopology) -> (Vec<NodeKey>, Vec<RelKey>) {
    let mut nodes: Vec<NodeKey> = topo
        .node_templates
        .iter()
        .map(|n| {
            let props: serde_json::Map<String, Value> = n.properties.clone().into_iter().collect();
            let arts: BTreeMap<&str, &str> = n.artifacts.iter().map(|a| (a.name.as_str(), a.path.as_str())).collect();
            (n.name.clone(), n.type_name.clone(), canonical(&Value::Object(props)), format!("{arts:?}"))
        })
        .collect();
    let mut rels: Vec<RelKey> = topo
        .relationships
        .iter()
        .map(|r| {
            let props: serde_json::Map<String, Value> = r.properties.clone().into_iter().collect();
            (r.type_name.clone(), r.source.clone(), r.target.clone(), canonical(&Value::Object(props)))
        })
        .collect();
    nodes.sort();
    rels.sort();
    (nodes, rels)
}

/// Read node and relationship multisets back out of an emitted template with
/// a generic YAML reader.
fn yaml_multisets(yaml: &[u8]) -> Result<(Vec<NodeKey>, Vec<RelKey>), String> {
    let doc: Value = serde_yaml::from_slice(yaml).map_err(|e| format!("YAML does not re-parse: {e}"))?;
    if doc["tosca_definitions_version"] != "tosca_simple_yaml_1_3" {
        return Err("missing tosca_definitions_version".into());
    }
    let templates = doc["topology_template"]["node_templates"]
        .as_object()
        .ok_or("node_templates is not a mapping")?;
    let mut nodes = Vec::new();
    let mut rels = Vec::new();
    for (name, body) in templates {
        let props = body.get("properties").cloned().unwrap_or(Value::Object(Default::default()));
        let mut arts = BTreeMap::new();
        if let Some(a) = body.get("artifacts").and_then(Value::as_object) {
            for (k, v) in a {
                arts.insert(k.as_str(), v["file"].as_str().ok_or("artifact without file")?);
            }
        }
        nodes.push((
            name.clone(),
            body["type"].as_str().ok_or("node without type")?.to_string(),
            canonical(&props),
            format!("{arts:?}"),
        ));
        for req in body.get("requirements").and_then(Value::as_array).into_iter().flatten() {
            let (_, spec) = req.as_object().and_then(|o| o.iter().next()).ok_or("empty requirement")?;
            let target = spec["node"].as_str().ok_or("requirement without node")?.to_string();
            let (type_name, props) = match &spec["relationship"] {
                Value::String(t) => (t.clone(), Value::Object(Default::default())),
                Value::Object(o) => (
                    o["type"].as_str().ok_or("relationship without type")?.to_string(),
                    o.get("properties").cloned().unwrap_or(Value::Object(Default::default())),
                ),
                _ => return Err("malformed relationship".into()),
            };
            rels.push((type_name, name.clone(), target, canonical(&props)));
        }
    }
    nodes.sort();
    rels.sort();
    Ok((nodes, rels))
}

pub fn yaml_fidelity(topo: &ToscaTopology, yaml: &[u8]) -> Check {
    let parsed = yaml_multisets(yaml)?;
    ensure(parsed == topology_multisets(topo), || "re-parsed YAML differs from the topology".into())
}

/// Unpack a CSAR and check manifest, entry definitions and artifacts.
pub fn csar_validity(topo: &ToscaTopology, archive: &[u8]) -> Check {
    let mut zip = zip::ZipArchive::new(Cursor::new(archive)).map_err(|e| format!("not a zip: {e}"))?;
    let mut members: HashMap<String, Vec<u8>> = HashMap::new();
    for i in 0..zip.len() {
        let mut f = zip.by_index(i).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        f.read_to_end(&mut buf).map_err(|e| e.to_string())?;
        members.insert(f.name().to_string(), buf);
    }
    let meta = members.get("TOSCA-Metadata/TOSCA.meta").ok_or("TOSCA.meta missing")?;
    let meta = String::from_utf8(meta.clone()).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = meta.lines().collect();
    let keys: Vec<&str> = lines.iter().map(|l| l.split(": ").next().unwrap_or("")).collect();
    ensure(keys == ["TOSCA-Meta-File-Version", "CSAR-Version", "Created-By", "Entry-Definitions"], || {
        format!("manifest keys {keys:?}")
    })?;
    ensure(lines[0] == "TOSCA-Meta-File-Version: 1.0" && lines[1] == "CSAR-Version: 1.1", || {
        format!("manifest versions {:?}", &lines[..2])
    })?;
    let entry = lines[3].trim_start_matches("Entry-Definitions: ");
    let definitions = members.get(entry).ok_or_else(|| format!("entry definitions `{entry}` not in archive"))?;
    yaml_fidelity(topo, definitions)?;
    for path in topo.node_templates.iter().flat_map(|n| n.artifacts.iter().map(|a| &a.path)) {
        ensure(members.contains_key(path.as_str()), || format!("artifact `{path}` not in archive"))?;
    }
    Ok(())
}

/// Artifact bytes for every artifact a topology references, other than the
/// state machine.
pub fn synthetic_artifacts(topo: &ToscaTopology) -> BTreeMap<String, Vec<u8>> {
    topo.node_templates
        .iter()
        .flat_map(|n| &n.artifacts)
        .filter(|a| Some(&a.path) != topo.orchestration_path.as_ref())
        .map(|a| (a.path.clone(), format!("# {}\n", a.path).into_bytes()))
        .collect()
}

/// Full pipeline over one model and option set, checking every topology
/// property along the way.
pub fn pipeline_properties(model: &Model, opts: &MapOptions) -> Check {
    let sm = match opts.mode {
        MappingMode::Orchestration => Some(extract(model).map_err(|e| format!("extract: {e}"))?),
        MappingMode::EventDriven => None,
    };
    let topo = map_to_topology(model, sm.as_ref(), opts).map_err(|e| format!("map: {e}"))?;
    topology_invariants(model, &topo, opts)?;
    let yaml = emit_yaml(&topo);
    yaml_fidelity(&topo, &yaml)?;
    let asl = sm.as_ref().map(serialize_asl);
    let archive = package_csar(&topo, asl.as_deref(), &synthetic_artifacts(&topo), "checks")
        .map_err(|e| format!("package: {e}"))?;
    csar_validity(&topo, &archive)
}
