//! Object composition, decoding, feature exchange and paired-example
//! generation.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hv::{bundle, unbind, Hypervector};
use crate::memory::{cleanup, FactorSchema, ItemMemory};
use crate::stream::{mix_stream, stream_rng};

/// One value index per schema factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolicObject {
    pub values: Vec<usize>,
}

impl SymbolicObject {
    pub fn new(values: Vec<usize>) -> Self {
        Self { values }
    }

    pub fn validate(&self, schema: &FactorSchema) -> Result<()> {
        if self.values.len() != schema.len() {
            return Err(Error::ArityMismatch {
                expected: schema.len(),
                found: self.values.len(),
            });
        }
        for (factor, (&value, f)) in self.values.iter().zip(schema.factors()).enumerate() {
            if value >= f.cardinality {
                return Err(Error::ValueOutOfRange {
                    factor,
                    value,
                    cardinality: f.cardinality,
                });
            }
        }
        Ok(())
    }

    /// Mixed-radix rank, factor 0 most significant.
    pub fn rank(&self, schema: &FactorSchema) -> u128 {
        self.values
            .iter()
            .zip(schema.factors())
            .fold(0u128, |acc, (&v, f)| acc * f.cardinality as u128 + v as u128)
    }

    pub fn unrank(mut rank: u128, schema: &FactorSchema) -> Self {
        let mut values = vec![0; schema.len()];
        for (slot, f) in values.iter_mut().zip(schema.factors()).rev() {
            let c = f.cardinality as u128;
            *slot = (rank % c) as usize;
            rank /= c;
        }
        Self { values }
    }

    /// Uniformly random object.
    pub fn random<R: Rng>(schema: &FactorSchema, rng: &mut R) -> Self {
        Self {
            values: schema
                .factors()
                .iter()
                .map(|f| rng.random_range(0..f.cardinality))
                .collect(),
        }
    }
}

/// `e_i = 1` exactly where the two objects differ.
pub fn exchange_vector(a: &SymbolicObject, b: &SymbolicObject) -> Result<Vec<u8>> {
    if a.values.len() != b.values.len() {
        return Err(Error::ArityMismatch {
            expected: a.values.len(),
            found: b.values.len(),
        });
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| u8::from(x != y))
        .collect())
}

/// Superposition `(1/N) Σ_i role_i ⊛ filler_(i, obj[i])`.
pub fn encode_object(obj: &SymbolicObject, memory: &ItemMemory) -> Result<Hypervector> {
    obj.validate(memory.schema())?;
    let pairs = obj
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| memory.bound_pair(i, v))
        .collect::<Result<Vec<_>>>()?;
    bundle(pairs)
}

/// Unbinds the factor's role from `o` and cleans up against its fillers.
pub fn decode_factor(o: &Hypervector, factor: usize, memory: &ItemMemory) -> Result<(usize, f64)> {
    let role = memory.role(factor)?;
    cleanup(&unbind(o, role)?, memory.fillers(factor)?)
}

/// Per-factor `(value, similarity)` for every factor of the schema.
pub fn decode_factors(o: &Hypervector, memory: &ItemMemory) -> Result<Vec<(usize, f64)>> {
    memory
        .unbind_all(o)?
        .iter()
        .enumerate()
        .map(|(i, q)| cleanup(q, memory.fillers(i)?))
        .collect()
}

pub fn decode_object(o: &Hypervector, memory: &ItemMemory) -> Result<SymbolicObject> {
    Ok(SymbolicObject::new(
        decode_factors(o, memory)?.into_iter().map(|(v, _)| v).collect(),
    ))
}

/// Swaps the factor values of `a` and `b` wherever `e_i = 1`.
pub fn exchange_symbolic(
    a: &SymbolicObject,
    b: &SymbolicObject,
    e: &[u8],
) -> Result<(SymbolicObject, SymbolicObject)> {
    for other in [b.values.len(), e.len()] {
        if other != a.values.len() {
            return Err(Error::ArityMismatch {
                expected: a.values.len(),
                found: other,
            });
        }
    }
    let (mut a2, mut b2) = (a.clone(), b.clone());
    for (i, &flag) in e.iter().enumerate() {
        match flag {
            0 => {}
            1 => std::mem::swap(&mut a2.values[i], &mut b2.values[i]),
            _ => return Err(Error::InvalidMode(format!("exchange entry {flag} is not 0/1"))),
        }
    }
    Ok((a2, b2))
}

/// Replaces one factor's binding inside a superposition:
/// `o − (1/N)·role⊛filler_target + (1/N)·role⊛filler_donor`.
pub fn exchange_latent(
    o: &Hypervector,
    target_val: usize,
    donor_val: usize,
    factor: usize,
    memory: &ItemMemory,
) -> Result<Hypervector> {
    let old = memory.bound_pair(factor, target_val)?;
    let new = memory.bound_pair(factor, donor_val)?;
    if target_val == donor_val {
        return Ok(o.clone());
    }
    let w = 1.0 / memory.schema().len() as f64;
    o.add_scaled(-w, old)?.add_scaled(w, new)
}

/// [`exchange_latent`] with the target's current value read off by
/// [`decode_factor`].
pub fn exchange_latent_decoded(
    o: &Hypervector,
    donor_val: usize,
    factor: usize,
    memory: &ItemMemory,
) -> Result<Hypervector> {
    let (current, _) = decode_factor(o, factor, memory)?;
    exchange_latent(o, current, donor_val, factor, memory)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DifferenceMode {
    /// Pairs differ in exactly one factor.
    Single,
    /// Pairs differ in exactly `k` factors.
    Multi { k: usize },
}

impl DifferenceMode {
    pub fn differing_factors(self) -> usize {
        match self {
            Self::Single => 1,
            Self::Multi { k } => k,
        }
    }
}

/// Drops objects whose shape is `shape_value` and whose position index lies
/// in the upper half of its range (normalised coordinate > 0.5).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub shape_factor: usize,
    pub shape_value: usize,
    pub position_factor: usize,
    pub min_position: usize,
}

impl Exclusion {
    /// Square (shape 0) with posX > 0.5, located by factor name.
    pub fn square_right_half(schema: &FactorSchema) -> Result<Self> {
        let find = |name: &str| {
            schema
                .index_of(name)
                .ok_or_else(|| Error::InvalidSchema(format!("exclusion needs a '{name}' factor")))
        };
        let shape_factor = find("shape")?;
        let position_factor = find("posX")?;
        let card = schema.cardinality(position_factor)?;
        Ok(Self {
            shape_factor,
            shape_value: 0,
            position_factor,
            // smallest i with i / (card - 1) > 0.5
            min_position: (card - 1) / 2 + 1,
        })
    }

    pub fn excludes(&self, obj: &SymbolicObject) -> bool {
        obj.values[self.shape_factor] == self.shape_value
            && obj.values[self.position_factor] >= self.min_position
    }

    fn depends_on(&self) -> Vec<usize> {
        let mut deps = vec![self.shape_factor, self.position_factor];
        deps.dedup();
        deps
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairedExample {
    #[serde(rename = "a")]
    pub first: SymbolicObject,
    #[serde(rename = "b")]
    pub second: SymbolicObject,
    #[serde(rename = "e")]
    pub exchange: Vec<u8>,
}

impl PairedExample {
    pub fn new(first: SymbolicObject, second: SymbolicObject) -> Result<Self> {
        let exchange = exchange_vector(&first, &second)?;
        Ok(Self {
            first,
            second,
            exchange,
        })
    }
}

/// Elementary symmetric polynomials e_0..=e_n of `xs`.
fn elementary_symmetric(xs: &[u128]) -> Vec<u128> {
    let mut e = vec![0u128; xs.len() + 1];
    e[0] = 1;
    for (n, &x) in xs.iter().enumerate() {
        for m in (1..=n + 1).rev() {
            e[m] = e[m].saturating_add(e[m - 1].saturating_mul(x));
        }
    }
    e
}

/// Exact number of unordered pairs of allowed objects differing in exactly
/// `k` factors.
pub fn available_pairs(schema: &FactorSchema, k: usize, exclusion: Option<&Exclusion>) -> u128 {
    let cards = schema.cardinalities();
    let deps = exclusion.map(Exclusion::depends_on).unwrap_or_default();
    let others: Vec<u128> = (0..cards.len())
        .filter(|i| !deps.contains(i))
        .map(|i| cards[i] as u128)
        .collect();
    let other_objects = others.iter().fold(1u128, |a, &c| a.saturating_mul(c));
    let esym = elementary_symmetric(&others.iter().map(|c| c - 1).collect::<Vec<_>>());
    let other_pairs = |m: usize| if m < esym.len() { esym[m] } else { 0 };

    // enumerate assignments of the factors the exclusion looks at
    let dep_cards: Vec<usize> = deps.iter().map(|&i| cards[i]).collect();
    let dep_total: usize = dep_cards.iter().product();
    let assignment = |mut r: usize| {
        let mut full = vec![0usize; cards.len()];
        for (&i, &c) in deps.iter().zip(&dep_cards).rev() {
            full[i] = r % c;
            r /= c;
        }
        SymbolicObject::new(full)
    };
    let allowed: Vec<SymbolicObject> = (0..dep_total)
        .map(assignment)
        .filter(|o| !exclusion.is_some_and(|x| x.excludes(o)))
        .collect();

    let mut ordered = 0u128;
    for a in &allowed {
        for b in &allowed {
            let h = deps.iter().filter(|&&i| a.values[i] != b.values[i]).count();
            if h <= k {
                ordered = ordered.saturating_add(other_objects.saturating_mul(other_pairs(k - h)));
            }
        }
    }
    ordered / 2
}

const PAIR_STREAM: u64 = 3;
const ENUMERATE_LIMIT: u128 = 2_000_000;

/// Samples `count` distinct unordered pairs differing in exactly the
/// number of factors `mode` asks for. Deterministic per `seed`.
pub fn generate_pairs(
    schema: &FactorSchema,
    count: usize,
    mode: DifferenceMode,
    exclusion: Option<&Exclusion>,
    seed: u64,
) -> Result<Vec<PairedExample>> {
    let k = mode.differing_factors();
    if count == 0 {
        return Err(Error::InvalidMode("pair count must be at least 1".into()));
    }
    if k == 0 || k > schema.len() {
        return Err(Error::InvalidMode(format!(
            "cannot differ in {k} of {} factors",
            schema.len()
        )));
    }
    if let Some(x) = exclusion {
        for f in x.depends_on() {
            schema.cardinality(f)?;
        }
    }
    let available = available_pairs(schema, k, exclusion);
    if (count as u128) > available {
        return Err(Error::InsufficientPairs {
            requested: count as u128,
            available,
        });
    }
    let mut rng = stream_rng(seed, mix_stream(&[PAIR_STREAM, k as u64]));
    let excluded = |o: &SymbolicObject| exclusion.is_some_and(|x| x.excludes(o));

    if available <= ENUMERATE_LIMIT && (count as u128) * 4 > available {
        let mut all = enumerate_pairs(schema, k, &excluded);
        // partial Fisher–Yates
        for i in 0..count {
            let j = rng.random_range(i..all.len());
            all.swap(i, j);
        }
        all.truncate(count);
        return all
            .into_iter()
            .map(|(a, b)| {
                if rng.random::<bool>() {
                    PairedExample::new(b, a)
                } else {
                    PairedExample::new(a, b)
                }
            })
            .collect();
    }

    let eligible: Vec<usize> = schema
        .factors()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.cardinality >= 2)
        .map(|(i, _)| i)
        .collect();
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = SymbolicObject::random(schema, &mut rng);
        if excluded(&a) {
            continue;
        }
        let mut pool = eligible.clone();
        let mut b = a.clone();
        for slot in 0..k {
            let pick = rng.random_range(slot..pool.len());
            pool.swap(slot, pick);
            let f = pool[slot];
            let card = schema.factors()[f].cardinality;
            let step = rng.random_range(1..card);
            b.values[f] = (a.values[f] + step) % card;
        }
        if excluded(&b) {
            continue;
        }
        let (ra, rb) = (a.rank(schema), b.rank(schema));
        if seen.insert((ra.min(rb), ra.max(rb))) {
            out.push(PairedExample::new(a, b)?);
        }
    }
    Ok(out)
}

fn enumerate_pairs(
    schema: &FactorSchema,
    k: usize,
    excluded: &dyn Fn(&SymbolicObject) -> bool,
) -> Vec<(SymbolicObject, SymbolicObject)> {
    fn extend(
        schema: &FactorSchema,
        a: &SymbolicObject,
        b: &mut SymbolicObject,
        from: usize,
        left: usize,
        out: &mut Vec<SymbolicObject>,
    ) {
        if left == 0 {
            out.push(b.clone());
            return;
        }
        for f in from..schema.len() {
            let card = schema.factors()[f].cardinality;
            for v in (0..card).filter(|&v| v != a.values[f]) {
                b.values[f] = v;
                extend(schema, a, b, f + 1, left - 1, out);
            }
            b.values[f] = a.values[f];
        }
    }
    let mut pairs = Vec::new();
    let mut neighbours = Vec::new();
    for r in 0..schema.object_count() {
        let a = SymbolicObject::unrank(r, schema);
        if excluded(&a) {
            continue;
        }
        neighbours.clear();
        extend(schema, &a, &mut a.clone(), 0, k, &mut neighbours);
        for b in neighbours.drain(..) {
            if !excluded(&b) && b.rank(schema) > r {
                pairs.push((a.clone(), b));
            }
        }
    }
    pairs
}

/// Checks objects against the schema, recomputes every exchange vector, and
/// rejects pairs of identical objects. In `mode`, the flag count must match.
pub fn audit_pairs(
    pairs: &[PairedExample],
    schema: &FactorSchema,
    mode: Option<DifferenceMode>,
) -> Result<()> {
    for (line, p) in pairs.iter().enumerate() {
        let bad = |reason: String| Error::InvalidDataset {
            line: line + 1,
            reason,
        };
        p.first.validate(schema).map_err(|e| bad(e.to_string()))?;
        p.second.validate(schema).map_err(|e| bad(e.to_string()))?;
        let e = exchange_vector(&p.first, &p.second)?;
        if e != p.exchange {
            return Err(bad(format!(
                "stored e {:?} does not match objects ({:?})",
                p.exchange, e
            )));
        }
        let flips = e.iter().filter(|&&x| x == 1).count();
        if flips == 0 {
            return Err(bad("e is all zero (identical objects)".into()));
        }
        if let Some(m) = mode {
            if flips != m.differing_factors() {
                return Err(bad(format!(
                    "pair differs in {flips} factors, mode requires {}",
                    m.differing_factors()
                )));
            }
        }
    }
    Ok(())
}

/// Header written next to a JSON Lines dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema: FactorSchema,
    pub seed: u64,
    pub mode: DifferenceMode,
    pub exclusion: Option<Exclusion>,
    pub count: usize,
}

pub fn write_jsonl<W: Write>(pairs: &[PairedExample], mut w: W) -> Result<()> {
    for p in pairs {
        serde_json::to_writer(&mut w, p)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses and audits a JSON Lines dataset.
pub fn read_jsonl<R: BufRead>(
    r: R,
    schema: &FactorSchema,
    mode: Option<DifferenceMode>,
) -> Result<Vec<PairedExample>> {
    let mut pairs = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: PairedExample = serde_json::from_str(&line).map_err(|e| Error::InvalidDataset {
            line: i + 1,
            reason: e.to_string(),
        })?;
        pairs.push(p);
    }
    audit_pairs(&pairs, schema, mode)?;
    Ok(pairs)
}
