//! Change-table disentanglement metrics.
//!
//! For every evaluated object the pipeline's own reconstruction is classified
//! once to get the baseline prediction. Each probe then sets one latent unit
//! to one of its values, reconstructs, classifies, and records which factor
//! predictions flipped. Ground-truth labels are never consulted.
//!
//! A probe group is one (object, unit). Modularity (DMM) is the entropy, in
//! nats, of the softmax of the group's per-factor flip counts. Compactness
//! (DCM) is the group mean of `|flips in probe − 1|`. Both are averaged over
//! all non-empty groups.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composer::{decode_object, encode_object, exchange_latent_decoded, SymbolicObject};
use crate::error::{Error, Result};
use crate::hv::Hypervector;
use crate::memory::{softmax, FactorSchema, ItemMemory};
use crate::scene::{render, Image, TemplateClassifier};

/// Encode / modify-unit / reconstruct / classify.
pub trait Pipeline: Sync {
    type Latent: Send;

    fn encode(&self, obj: &SymbolicObject) -> Result<Self::Latent>;
    fn modify(&self, latent: &Self::Latent, unit: usize, value: usize) -> Result<Self::Latent>;
    fn reconstruct(&self, latent: &Self::Latent) -> Result<Image>;
    fn classify(&self, img: &Image) -> Result<SymbolicObject>;
}

/// A latent unit and the values it is probed with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatentUnitSpec {
    pub unit: usize,
    pub values: Vec<usize>,
}

impl LatentUnitSpec {
    pub fn new(unit: usize, values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidMode(format!("unit {unit} has no probe values")));
        }
        Ok(Self { unit, values })
    }

    /// One unit per factor, probed with every filler of that factor.
    pub fn filler_units(schema: &FactorSchema) -> Vec<Self> {
        schema
            .factors()
            .iter()
            .enumerate()
            .map(|(i, f)| Self {
                unit: i,
                values: (0..f.cardinality).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbePolicy {
    /// Every value of every unit is probed.
    #[default]
    All,
    /// Probes whose reconstruction equals the baseline reconstruction pixel
    /// for pixel are dropped.
    SkipIdenticalReconstruction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub object: usize,
    pub unit: usize,
    pub value: usize,
    /// 1 where the factor prediction differs from the baseline.
    pub changed: Vec<u8>,
}

impl ProbeRow {
    pub fn flips(&self) -> usize {
        self.changed.iter().filter(|&&c| c == 1).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeTable {
    pub factors: Vec<String>,
    pub baselines: Vec<SymbolicObject>,
    pub rows: Vec<ProbeRow>,
}

impl ChangeTable {
    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// Rows grouped by (object, unit), in ascending key order.
    pub fn groups(&self) -> BTreeMap<(usize, usize), Vec<&ProbeRow>> {
        let mut g: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for r in &self.rows {
            g.entry((r.object, r.unit)).or_default().push(r);
        }
        g
    }

    /// CSV with one probe per line: object, unit, value, one 0/1 column per
    /// factor.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "object,unit,value,{}", self.factors.join(","))?;
        for r in &self.rows {
            let cols: Vec<String> = r.changed.iter().map(u8::to_string).collect();
            writeln!(w, "{},{},{},{}", r.object, r.unit, r.value, cols.join(","))?;
        }
        Ok(())
    }
}

fn xor_predictions(a: &SymbolicObject, b: &SymbolicObject) -> Vec<u8> {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| u8::from(x != y))
        .collect()
}

/// Runs every probe of `units` on every object.
pub fn build_change_table<P: Pipeline>(
    pipeline: &P,
    schema: &FactorSchema,
    objects: &[SymbolicObject],
    units: &[LatentUnitSpec],
    policy: ProbePolicy,
) -> Result<ChangeTable> {
    for o in objects {
        o.validate(schema)?;
    }
    for u in units {
        if u.values.is_empty() {
            return Err(Error::InvalidMode(format!("unit {} has no probe values", u.unit)));
        }
    }
    let per_object = objects
        .par_iter()
        .enumerate()
        .map(|(oi, obj)| {
            let probe_err = |unit: Option<usize>, value: Option<usize>| {
                move |e: Error| Error::Probe {
                    object: oi,
                    unit,
                    value,
                    source: Box::new(e),
                }
            };
            let latent = pipeline.encode(obj).map_err(probe_err(None, None))?;
            let base_img = pipeline
                .reconstruct(&latent)
                .map_err(probe_err(None, None))?;
            let baseline = pipeline
                .classify(&base_img)
                .map_err(probe_err(None, None))?;
            let mut rows = Vec::new();
            for spec in units {
                for &value in &spec.values {
                    let err = probe_err(Some(spec.unit), Some(value));
                    let modified = pipeline.modify(&latent, spec.unit, value).map_err(&err)?;
                    let img = pipeline.reconstruct(&modified).map_err(&err)?;
                    if policy == ProbePolicy::SkipIdenticalReconstruction && img == base_img {
                        continue;
                    }
                    let pred = pipeline.classify(&img).map_err(&err)?;
                    if pred.values.len() != baseline.values.len() {
                        return Err(err(Error::ArityMismatch {
                            expected: baseline.values.len(),
                            found: pred.values.len(),
                        }));
                    }
                    rows.push(ProbeRow {
                        object: oi,
                        unit: spec.unit,
                        value,
                        changed: xor_predictions(&baseline, &pred),
                    });
                }
            }
            Ok((baseline, rows))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ChangeTable {
        factors: schema.factors().iter().map(|f| f.name.clone()).collect(),
        baselines: Vec::with_capacity(objects.len()),
        rows: Vec::new(),
    };
    for (baseline, rows) in per_object {
        table.baselines.push(baseline);
        table.rows.extend(rows);
    }
    Ok(table)
}

/// Shannon entropy (nats) of the softmax of `counts`.
pub fn softmax_entropy(counts: &[f64]) -> f64 {
    softmax(counts)
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

fn group_dmm(rows: &[&ProbeRow], n: usize) -> f64 {
    let mut counts = vec![0.0; n];
    for r in rows {
        for (c, &x) in counts.iter_mut().zip(&r.changed) {
            *c += f64::from(x);
        }
    }
    softmax_entropy(&counts)
}

fn group_dcm(rows: &[&ProbeRow]) -> f64 {
    let total: f64 = rows.iter().map(|r| (r.flips() as f64 - 1.0).abs()).sum();
    total / rows.len() as f64
}

/// Modularity: mean over probe groups of the flip-count softmax entropy.
pub fn dmm(table: &ChangeTable) -> Result<f64> {
    let groups = table.groups();
    if groups.is_empty() {
        return Err(Error::EmptyTable);
    }
    let n = table.factor_count();
    let total: f64 = groups.values().map(|rows| group_dmm(rows, n)).sum();
    Ok(total / groups.len() as f64)
}

/// Compactness: mean over probe groups of the mean `|flips − 1|`.
pub fn dcm(table: &ChangeTable) -> Result<f64> {
    let groups = table.groups();
    if groups.is_empty() {
        return Err(Error::EmptyTable);
    }
    let total: f64 = groups.values().map(|rows| group_dcm(rows)).sum();
    Ok(total / groups.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitScore {
    pub unit: usize,
    pub dmm: f64,
    pub dcm: f64,
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub dmm: f64,
    pub dcm: f64,
    pub per_unit: Vec<UnitScore>,
    pub objects: usize,
    pub probes: usize,
    pub metadata: serde_json::Value,
}

impl MetricReport {
    pub fn from_table(table: &ChangeTable, metadata: serde_json::Value) -> Result<Self> {
        let n = table.factor_count();
        let mut per_unit: BTreeMap<usize, (f64, f64, usize, usize)> = BTreeMap::new();
        for ((_, unit), rows) in table.groups() {
            let e = per_unit.entry(unit).or_default();
            e.0 += group_dmm(&rows, n);
            e.1 += group_dcm(&rows);
            e.2 += 1;
            e.3 += rows.len();
        }
        Ok(Self {
            dmm: dmm(table)?,
            dcm: dcm(table)?,
            per_unit: per_unit
                .into_iter()
                .map(|(unit, (m, c, groups, probes))| UnitScore {
                    unit,
                    dmm: m / groups as f64,
                    dcm: c / groups as f64,
                    probes,
                })
                .collect(),
            objects: table.baselines.len(),
            probes: table.rows.len(),
            metadata,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reconstruction {
    /// Render the decoded object.
    Faithful,
    /// Render an object whose every factor reads the sum of all decoded
    /// indices modulo its cardinality, entangling all factors.
    Scrambled,
}

/// encode → exchange_latent → decode → render → template classify.
pub struct SymbolicPipeline<'a> {
    memory: &'a ItemMemory,
    classifier: &'a TemplateClassifier,
    reconstruction: Reconstruction,
}

impl<'a> SymbolicPipeline<'a> {
    pub fn new(
        memory: &'a ItemMemory,
        classifier: &'a TemplateClassifier,
        reconstruction: Reconstruction,
    ) -> Result<Self> {
        if memory.schema() != &classifier.config().schema {
            return Err(Error::InvalidSchema(
                "memory and renderer schemas differ".into(),
            ));
        }
        Ok(Self {
            memory,
            classifier,
            reconstruction,
        })
    }

    pub fn scramble(&self, obj: &SymbolicObject) -> SymbolicObject {
        let total: usize = obj.values.iter().sum();
        SymbolicObject::new(
            self.memory
                .schema()
                .factors()
                .iter()
                .map(|f| total % f.cardinality)
                .collect(),
        )
    }
}

impl Pipeline for SymbolicPipeline<'_> {
    type Latent = Hypervector;

    fn encode(&self, obj: &SymbolicObject) -> Result<Hypervector> {
        encode_object(obj, self.memory)
    }

    fn modify(&self, latent: &Hypervector, unit: usize, value: usize) -> Result<Hypervector> {
        exchange_latent_decoded(latent, value, unit, self.memory)
    }

    fn reconstruct(&self, latent: &Hypervector) -> Result<Image> {
        let decoded = decode_object(latent, self.memory)?;
        let shown = match self.reconstruction {
            Reconstruction::Faithful => decoded,
            Reconstruction::Scrambled => self.scramble(&decoded),
        };
        render(&shown, self.classifier.config())
    }

    fn classify(&self, img: &Image) -> Result<SymbolicObject> {
        self.classifier.classify(img)
    }
}
