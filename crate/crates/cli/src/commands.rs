//! One function per subcommand. Each writes its outputs under `out_dir` and
//! embeds the resolved config and seed in every file it writes.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use symdis_core::composer::{audit_pairs, read_jsonl, write_jsonl, DatasetManifest};
use symdis_core::experiments::{
    decode_accuracy, dim_ablation, metric_objects, noise_sweep, run_metrics, verify_exchanges,
    AblationSettings,
};
use symdis_core::{
    build_memory, generate_pairs, iou, render, Exclusion, Image, ItemMemory, RenderConfig,
    SpaceConfig, SymbolicObject, TemplateClassifier,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;

const FRAME: usize = 64;

/// Wraps a command's result with the config that produced it.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(cfg: &ExperimentConfig, body: T) -> Envelope<'_, T> {
    Envelope {
        config: cfg,
        seed: cfg.master_seed,
        body,
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(symdis_core::Error::from)?;
    text.push('\n');
    write(path, text)
}

/// `# config=` line heading CSV and PGM outputs.
fn config_line(cfg: &ExperimentConfig) -> Result<String, CliError> {
    Ok(serde_json::to_string(cfg).map_err(symdis_core::Error::from)?)
}

fn memory(cfg: &ExperimentConfig) -> Result<ItemMemory, CliError> {
    let space = SpaceConfig::new(cfg.dim, cfg.master_seed)?;
    Ok(build_memory(cfg.schema(), space))
}

/// Renderer for the config's schema; refuses schemas whose factor values do
/// not all render distinctly.
fn renderer(cfg: &ExperimentConfig) -> Result<RenderConfig, CliError> {
    let rc = RenderConfig::new(cfg.schema().clone(), FRAME, FRAME)?;
    rc.audit().map_err(|e| CliError::Audit(e.to_string()))?;
    Ok(rc)
}

/// `pairs.jsonl` → `pairs.manifest.json`
pub fn manifest_path(dataset: &Path) -> PathBuf {
    dataset.with_extension("manifest.json")
}

#[derive(Serialize)]
struct PairsManifest<'a> {
    #[serde(flatten)]
    dataset: &'a DatasetManifest,
    config: &'a ExperimentConfig,
}

pub fn gen_pairs(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let schema = cfg.schema();
    let exclusion = if cfg.exclusion {
        Some(Exclusion::square_right_half(schema)?)
    } else {
        None
    };
    let pairs = generate_pairs(schema, cfg.count, cfg.difference, exclusion.as_ref(), cfg.master_seed)?;
    audit_pairs(&pairs, schema, Some(cfg.difference)).map_err(|e| CliError::Audit(e.to_string()))?;
    if let Some(ex) = &exclusion {
        if let Some(p) = pairs.iter().find(|p| ex.excludes(&p.first) || ex.excludes(&p.second)) {
            return Err(CliError::Audit(format!("excluded object in pair {p:?}")));
        }
    }
    let manifest = DatasetManifest {
        schema: schema.clone(),
        seed: cfg.master_seed,
        mode: cfg.difference,
        exclusion,
        count: pairs.len(),
    };
    let mut lines = Vec::new();
    write_jsonl(&pairs, &mut lines)?;
    let data = write(&out_dir.join("pairs.jsonl"), lines)?;
    let meta = write_json(
        &manifest_path(&data),
        &PairsManifest {
            dataset: &manifest,
            config: cfg,
        },
    )?;
    Ok(vec![data, meta])
}

pub fn roundtrip(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    save_memory: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let m = memory(cfg)?;
    let report = decode_accuracy(&m, cfg.trials, 0.0, cfg.master_seed)?;
    let mut written = vec![write_json(
        &out_dir.join("roundtrip.json"),
        &envelope(cfg, json!({ "report": report })),
    )?];
    if save_memory {
        let path = out_dir.join("memory.bin");
        let sidecar = m.save(&path)?;
        written.extend([path, sidecar]);
    }
    Ok(written)
}

pub fn exchange(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    dataset: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let schema = cfg.schema();
    let mut mode = None;
    let sidecar = manifest_path(dataset);
    if sidecar.exists() {
        let text = fs::read_to_string(&sidecar).map_err(|e| CliError::io(&sidecar, e))?;
        let manifest: DatasetManifest =
            serde_json::from_str(&text).map_err(symdis_core::Error::from)?;
        if &manifest.schema != schema {
            return Err(CliError::Config(format!(
                "dataset schema in {} differs from the configured schema",
                sidecar.display()
            )));
        }
        mode = Some(manifest.mode);
    }
    let file = fs::File::open(dataset).map_err(|e| CliError::io(dataset, e))?;
    let pairs = read_jsonl(BufReader::new(file), schema, mode)?;
    let report = verify_exchanges(&memory(cfg)?, &pairs)?;
    let path = write_json(
        &out_dir.join("exchange.json"),
        &envelope(cfg, json!({ "dataset": dataset, "report": report })),
    )?;
    Ok(vec![path])
}

pub fn metrics(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rc = renderer(cfg)?;
    let m = memory(cfg)?;
    let objects = metric_objects(&rc, cfg.metric_objects, cfg.object_set, cfg.master_seed);
    let classifier = TemplateClassifier::new(rc);
    let metadata = json!({
        "schema": cfg.schema(),
        "dim": cfg.dim,
        "master_seed": cfg.master_seed,
        "object_count": objects.len(),
        "reconstruction": cfg.reconstruction,
        "policy": cfg.policy,
    });
    let (table, report) = run_metrics(&m, &classifier, cfg.reconstruction, &objects, cfg.policy, metadata)?;
    let report_path = write_json(&out_dir.join("metrics.json"), &envelope(cfg, json!({ "report": report })))?;
    let mut csv = format!("# config={}\n", config_line(cfg)?).into_bytes();
    table.write_csv(&mut csv)?;
    let table_path = write(&out_dir.join("change_table.csv"), csv)?;
    Ok(vec![report_path, table_path])
}

pub fn noise(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let m = memory(cfg)?;
    let rows = noise_sweep(&m, cfg.sigmas(), cfg.trials, cfg.master_seed)?;
    let names: Vec<&str> = cfg.schema().factors().iter().map(|f| f.name.as_str()).collect();
    let mut csv = format!("# config={}\nsigma,{}\n", config_line(cfg)?, names.join(","));
    for r in &rows {
        let accs: Vec<String> = r.report.per_factor.iter().map(f64::to_string).collect();
        csv.push_str(&format!("{},{}\n", r.sigma, accs.join(",")));
    }
    Ok(vec![write(&out_dir.join("noise_sweep.csv"), csv)?])
}

pub fn ablation(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let metric_cfg = RenderConfig::metric();
    let settings = AblationSettings {
        schema: cfg.schema().clone(),
        trials: cfg.ablation_trials,
        metric_objects: cfg.metric_objects,
        object_set: cfg.object_set,
        policy: cfg.policy,
        seed: cfg.master_seed,
    };
    let rows = dim_ablation(&cfg.dims, &settings, &TemplateClassifier::new(metric_cfg))?;
    let mut csv = format!("# config={}\ndim,accuracy,dmm,dcm\n", config_line(cfg)?);
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.dim, r.accuracy, r.dmm, r.dcm));
    }
    Ok(vec![write(&out_dir.join("dim_ablation.csv"), csv)?])
}

/// Parses `"0,1,2,3,4"`.
pub fn parse_object(s: &str) -> Result<SymbolicObject, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map(SymbolicObject::new)
        .map_err(|e| CliError::Config(format!("object '{s}': {e}")))
}

pub fn render_objects(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    objects: &[SymbolicObject],
    batch: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let rc = renderer(cfg)?;
    let comment = format!("config={}", config_line(cfg)?);
    if !batch {
        let [obj] = objects else {
            return Err(CliError::Config("render needs exactly one object outside batch mode".into()));
        };
        let img = render(obj, &rc)?;
        return Ok(vec![write(&out_dir.join("render.pgm"), img.to_pgm_with_comment(&comment))?]);
    }
    let dir = out_dir.join("renders");
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut written = Vec::new();
    let mut index = Vec::new();
    for (i, obj) in objects.iter().enumerate() {
        let name = format!("{i:05}.pgm");
        let img = render(obj, &rc)?;
        written.push(write(&dir.join(&name), img.to_pgm_with_comment(&comment))?);
        index.push(json!({ "file": name, "object": obj }));
    }
    written.push(write_json(&dir.join("index.json"), &envelope(cfg, json!({ "images": index })))?);
    Ok(written)
}

/// Objects listed in a JSON array file: `[[0,1,2,3,4], ...]`.
pub fn read_object_list(path: &Path) -> Result<Vec<SymbolicObject>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(serde_json::from_str(&text).map_err(symdis_core::Error::from)?)
}

pub fn classify(cfg: &ExperimentConfig, out_dir: &Path, image: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rc = renderer(cfg)?;
    let file = fs::File::open(image).map_err(|e| CliError::io(image, e))?;
    let img = Image::read_pgm(BufReader::new(file))?;
    let classifier = TemplateClassifier::new(rc);
    let object = classifier.classify(&img)?;
    let score = iou(&img, &render(&object, classifier.config())?)?;
    let path = write_json(
        &out_dir.join("classify.json"),
        &envelope(cfg, json!({ "image": image, "object": object, "iou": score })),
    )?;
    Ok(vec![path])
}
