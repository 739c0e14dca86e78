//! Seeded experiment drivers shared by the CLI, the acceptance suite and
//! the benchmarks. Random objects and noise come from dedicated streams, and
//! all reductions are integer counts, so results do not depend on thread
//! scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composer::{
    decode_object, encode_object, exchange_latent, exchange_symbolic, PairedExample,
    SymbolicObject,
};
use crate::error::{Error, Result};
use crate::hv::{add_noise, SpaceConfig};
use crate::memory::{build_memory, FactorSchema, ItemMemory};
use crate::metrics::{
    build_change_table, ChangeTable, LatentUnitSpec, MetricReport, ProbePolicy, Reconstruction,
    SymbolicPipeline,
};
use crate::scene::{RenderConfig, TemplateClassifier};
use crate::stream::{mix_stream, stream_rng};

const OBJECT_STREAM: u64 = 4;
const NOISE_STREAM: u64 = 5;

/// `count` uniformly random objects, deterministic per `seed`.
pub fn random_objects(schema: &FactorSchema, count: usize, seed: u64) -> Vec<SymbolicObject> {
    let mut rng = stream_rng(seed, mix_stream(&[OBJECT_STREAM]));
    (0..count)
        .map(|_| SymbolicObject::random(schema, &mut rng))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectSet {
    #[default]
    Random,
    /// Random objects with orientation canonical under every shape.
    SymmetrySafe,
}

/// Objects scored by the metric runs.
pub fn metric_objects(
    cfg: &RenderConfig,
    count: usize,
    set: ObjectSet,
    seed: u64,
) -> Vec<SymbolicObject> {
    let objects = random_objects(&cfg.schema, count, seed);
    match set {
        ObjectSet::Random => objects,
        ObjectSet::SymmetrySafe => objects.iter().map(|o| cfg.symmetry_safe(o)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub trials: usize,
    /// Fraction of trials decoding each factor correctly.
    pub per_factor: Vec<f64>,
    /// Mean of `per_factor`.
    pub accuracy: f64,
    /// Fraction of trials decoding every factor correctly.
    pub object_accuracy: f64,
}

impl AccuracyReport {
    fn from_counts(trials: usize, per_factor: &[usize], whole: usize) -> Self {
        let per_factor: Vec<f64> = per_factor
            .iter()
            .map(|&c| c as f64 / trials as f64)
            .collect();
        let accuracy = per_factor.iter().sum::<f64>() / per_factor.len() as f64;
        Self {
            trials,
            per_factor,
            accuracy,
            object_accuracy: whole as f64 / trials as f64,
        }
    }
}

/// Encodes `trials` random objects, optionally adds noise of standard
/// deviation `sigma`, and decodes them again.
pub fn decode_accuracy(
    memory: &ItemMemory,
    trials: usize,
    sigma: f64,
    seed: u64,
) -> Result<AccuracyReport> {
    if trials == 0 {
        return Err(Error::InvalidMode("trials must be at least 1".into()));
    }
    let schema = memory.schema();
    let objects = random_objects(schema, trials, seed);
    let outcomes = objects
        .par_iter()
        .enumerate()
        .map(|(t, obj)| {
            let clean = encode_object(obj, memory)?;
            // one noise direction per trial, shared across sigmas
            let noisy = add_noise(&clean, sigma, mix_stream(&[NOISE_STREAM, seed, t as u64]))?;
            let got = decode_object(&noisy, memory)?;
            Ok(got
                .values
                .iter()
                .zip(&obj.values)
                .map(|(a, b)| a == b)
                .collect::<Vec<bool>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = vec![0usize; schema.len()];
    let mut whole = 0;
    for hits in &outcomes {
        for (c, &h) in counts.iter_mut().zip(hits) {
            *c += usize::from(h);
        }
        whole += usize::from(hits.iter().all(|&h| h));
    }
    Ok(AccuracyReport::from_counts(trials, &counts, whole))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRow {
    pub sigma: f64,
    pub report: AccuracyReport,
}

pub fn noise_sweep(
    memory: &ItemMemory,
    sigmas: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<NoiseRow>> {
    sigmas
        .iter()
        .map(|&sigma| {
            Ok(NoiseRow {
                sigma,
                report: decode_accuracy(memory, trials, sigma, seed)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeFailure {
    pub pair: usize,
    pub expected: (SymbolicObject, SymbolicObject),
    pub decoded: (SymbolicObject, SymbolicObject),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeReport {
    pub pairs: usize,
    pub passed: usize,
    pub pass_rate: f64,
    /// Up to the first 20 failing pairs.
    pub failures: Vec<ExchangeFailure>,
}

/// Applies the exchange vector of each pair in latent space, from both
/// sides, and checks the decoded results against the symbolic swap.
pub fn verify_exchanges(memory: &ItemMemory, pairs: &[PairedExample]) -> Result<ExchangeReport> {
    let outcomes = pairs
        .par_iter()
        .map(|p| {
            let expected = exchange_symbolic(&p.first, &p.second, &p.exchange)?;
            let swap = |target: &SymbolicObject, donor: &SymbolicObject| -> Result<SymbolicObject> {
                let mut o = encode_object(target, memory)?;
                for (f, _) in p.exchange.iter().enumerate().filter(|(_, &e)| e == 1) {
                    o = exchange_latent(&o, target.values[f], donor.values[f], f, memory)?;
                }
                decode_object(&o, memory)
            };
            let decoded = (swap(&p.first, &p.second)?, swap(&p.second, &p.first)?);
            Ok((expected, decoded))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut passed = 0;
    let mut failures = Vec::new();
    for (i, (expected, decoded)) in outcomes.into_iter().enumerate() {
        if expected == decoded {
            passed += 1;
        } else if failures.len() < 20 {
            failures.push(ExchangeFailure {
                pair: i,
                expected,
                decoded,
            });
        }
    }
    Ok(ExchangeReport {
        pairs: pairs.len(),
        passed,
        pass_rate: if pairs.is_empty() {
            0.0
        } else {
            passed as f64 / pairs.len() as f64
        },
        failures,
    })
}

/// Change table and report for one symbolic pipeline.
pub fn run_metrics(
    memory: &ItemMemory,
    classifier: &TemplateClassifier,
    reconstruction: Reconstruction,
    objects: &[SymbolicObject],
    policy: ProbePolicy,
    metadata: serde_json::Value,
) -> Result<(ChangeTable, MetricReport)> {
    let pipeline = SymbolicPipeline::new(memory, classifier, reconstruction)?;
    let units = LatentUnitSpec::filler_units(memory.schema());
    let table = build_change_table(&pipeline, memory.schema(), objects, &units, policy)?;
    let report = MetricReport::from_table(&table, metadata)?;
    Ok((table, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub dim: usize,
    pub accuracy: f64,
    pub dmm: f64,
    pub dcm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationSettings {
    /// Schema for the round-trip accuracy column.
    pub schema: FactorSchema,
    pub trials: usize,
    /// Objects scored by the metric columns (reduced schema).
    pub metric_objects: usize,
    pub object_set: ObjectSet,
    pub policy: ProbePolicy,
    pub seed: u64,
}

/// Round-trip accuracy and ideal-pipeline DMM/DCM for each dimension.
pub fn dim_ablation(
    dims: &[usize],
    settings: &AblationSettings,
    classifier: &TemplateClassifier,
) -> Result<Vec<AblationRow>> {
    let metric_schema = &classifier.config().schema;
    let objects = metric_objects(
        classifier.config(),
        settings.metric_objects,
        settings.object_set,
        settings.seed,
    );
    dims.iter()
        .map(|&dim| {
            let space = SpaceConfig::new(dim, settings.seed)?;
            let memory = build_memory(&settings.schema, space);
            let acc = decode_accuracy(&memory, settings.trials, 0.0, settings.seed)?;
            let metric_memory = build_memory(metric_schema, space);
            let (_, report) = run_metrics(
                &metric_memory,
                classifier,
                Reconstruction::Faithful,
                &objects,
                settings.policy,
                serde_json::Value::Null,
            )?;
            Ok(AblationRow {
                dim,
                accuracy: acc.accuracy,
                dmm: report.dmm,
                dcm: report.dcm,
            })
        })
        .collect()
}

/// Round-trip accuracy under each master seed.
pub fn seed_stability(
    schema: &FactorSchema,
    dim: usize,
    seeds: &[u64],
    trials: usize,
) -> Result<Vec<(u64, f64)>> {
    seeds
        .iter()
        .map(|&seed| {
            let memory = build_memory(schema, SpaceConfig::new(dim, seed)?);
            Ok((seed, decode_accuracy(&memory, trials, 0.0, seed)?.accuracy))
        })
        .collect()
}
