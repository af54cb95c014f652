use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bpmn4sml::orchestration::{extract, serialize_asl};
use bpmn4sml::tosca::{builtin_profile, emit_yaml, map_to_topology, package_csar, MapOptions, MappingMode};
use bpmn4sml::validate::validate;
use bpmn4sml::{parse, SourceDocument};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bpmn4smlc", version, about = "Validate and compile BPMN4sML workflow models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model against the validation rules.
    Validate(Common),
    /// Emit service.yaml and the state machine.
    Compile(Build),
    /// Compile and bundle everything into a CSAR.
    Package(Build),
}

#[derive(Args)]
struct Common {
    /// BPMN 2.0 XML document.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct Build {
    #[command(flatten)]
    common: Common,
    /// Output directory, created if absent.
    #[arg(short, long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value = "aws")]
    profile: String,
    /// Merge stores of the same type and platform into one node.
    #[arg(long)]
    aggregate_stores: bool,
    #[arg(long, value_enum, default_value_t = Mode::Orchestration)]
    mode: Mode,
    #[arg(long, default_value = concat!("bpmn4smlc ", env!("CARGO_PKG_VERSION")))]
    created_by: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Orchestration,
    EventDriven,
}

enum Failure {
    Usage(anyhow::Error),
    Invalid,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid) => ExitCode::from(2),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    let (build, package) = match command {
        Command::Validate(common) => {
            load_and_validate(&common)?;
            return Ok(());
        }
        Command::Compile(build) => (build, false),
        Command::Package(build) => (build, true),
    };
    let model = load_and_validate(&build.common)?;

    let mut opts = MapOptions::new(builtin_profile(&build.profile).map_err(|e| anyhow!(e))?);
    opts.aggregate_stores = build.aggregate_stores;
    opts.mode = match build.mode {
        Mode::Orchestration => MappingMode::Orchestration,
        Mode::EventDriven => MappingMode::EventDriven,
    };
    let sm = match opts.mode {
        MappingMode::Orchestration => Some(extract(&model).map_err(|e| anyhow!(e))?),
        MappingMode::EventDriven => None,
    };
    let topology = map_to_topology(&model, sm.as_ref(), &opts).map_err(|e| anyhow!(e))?;
    let name = sm.as_ref().map_or(model.process_id(), |sm| sm.name.as_str()).to_string();

    // Everything is rendered in memory first so nothing is written on failure.
    let mut outputs: Vec<(String, Vec<u8>)> = vec![("service.yaml".into(), emit_yaml(&topology))];
    let asl = sm.as_ref().map(serialize_asl);
    if let Some(asl) = &asl {
        outputs.push((format!("{name}.asl.json"), asl.clone()));
    }
    if package {
        let base = build.common.input.parent().unwrap_or(Path::new(""));
        let files = read_artifacts(base, &topology)?;
        let archive = package_csar(&topology, asl.as_deref(), &files, &build.created_by).map_err(|e| anyhow!(e))?;
        outputs.push((format!("{name}.csar"), archive));
    }

    fs::create_dir_all(&build.out).with_context(|| format!("creating {}", build.out.display()))?;
    for (file, bytes) in outputs {
        let path = build.out.join(file);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn load_and_validate(common: &Common) -> Result<bpmn4sml::Model, Failure> {
    let bytes = fs::read(&common.input).with_context(|| format!("reading {}", common.input.display()))?;
    let doc = SourceDocument::new(bytes).with_uri(common.input.display().to_string());
    let model = parse(&doc).map_err(|e| anyhow!("{}: {e} [{}]", common.input.display(), e.code()))?;
    let report = validate(&model);
    match common.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    if report.passed {
        Ok(model)
    } else {
        Err(Failure::Invalid)
    }
}

/// Reads every non-orchestration artifact the topology references. Missing
/// files are left out so packaging reports them by path.
fn read_artifacts(
    base: &Path,
    topology: &bpmn4sml::tosca::ToscaTopology,
) -> anyhow::Result<BTreeMap<String, Vec<u8>>> {
    let mut files = BTreeMap::new();
    for artifact in topology.node_templates.iter().flat_map(|n| &n.artifacts) {
        if Some(&artifact.path) == topology.orchestration_path.as_ref() || files.contains_key(&artifact.path) {
            continue;
        }
        let path = base.join(&artifact.path);
        if path.is_file() {
            let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            files.insert(artifact.path.clone(), bytes);
        }
    }
    Ok(files)
}
