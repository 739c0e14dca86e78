//! Frozen item memory: one role vector per generative factor and one filler
//! codebook per factor, plus similarity cleanup and softmax readout.
//!
//! Stream ids: role `i` is sampled from `mix_stream(&[1, i])`, filler
//! `(i, j)` from `mix_stream(&[2, i, j])`. Ids depend only on the indices,
//! never on construction order.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use realfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hv::{self, bind, cosine, dot, sample_seed, Hypervector, SpaceConfig};
use crate::stream::mix_stream;

pub const MEMORY_MAGIC: &[u8; 7] = b"ARSYD01";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub cardinality: usize,
}

/// Ordered generative factors and their cardinalities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Factor>", into = "Vec<Factor>")]
pub struct FactorSchema {
    factors: Vec<Factor>,
}

impl TryFrom<Vec<Factor>> for FactorSchema {
    type Error = Error;

    fn try_from(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidSchema("schema has no factors".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.cardinality == 0 {
                return Err(Error::InvalidSchema(format!(
                    "factor '{}' has cardinality 0",
                    f.name
                )));
            }
            if factors[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate factor name '{}'",
                    f.name
                )));
            }
        }
        Ok(Self { factors })
    }
}

impl From<FactorSchema> for Vec<Factor> {
    fn from(s: FactorSchema) -> Self {
        s.factors
    }
}

impl FactorSchema {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        factors
            .into_iter()
            .map(|(name, cardinality)| Factor {
                name: name.into(),
                cardinality,
            })
            .collect::<Vec<_>>()
            .try_into()
    }

    /// shape 3, scale 6, orientation 40, posX 32, posY 32.
    pub fn dsprites() -> Self {
        Self::new([
            ("shape", 3),
            ("scale", 6),
            ("orientation", 40),
            ("posX", 32),
            ("posY", 32),
        ])
        .expect("valid preset")
    }

    /// Reduced schema (3, 4, 8, 8, 8) small enough for exhaustive rendering.
    pub fn metric() -> Self {
        Self::new([
            ("shape", 3),
            ("scale", 4),
            ("orientation", 8),
            ("posX", 8),
            ("posY", 8),
        ])
        .expect("valid preset")
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.cardinality).collect()
    }

    pub fn cardinality(&self, factor: usize) -> Result<usize> {
        self.factors
            .get(factor)
            .map(|f| f.cardinality)
            .ok_or(Error::UnknownFactor(factor))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    /// Number of distinct objects, saturating at `u128::MAX`.
    pub fn object_count(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, f| acc.saturating_mul(f.cardinality as u128))
    }
}

/// Key (or query) projection applied inside the attention readout.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum KeyProjection {
    #[default]
    Identity,
    /// Row-major D×D matrix.
    Matrix { dim: usize, entries: Vec<f64> },
}

impl KeyProjection {
    pub fn matrix(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self::Matrix { dim, entries })
    }

    /// Loads a raw little-endian f64 row-major D×D file.
    pub fn load(path: &Path, dim: usize) -> Result<Self> {
        let bytes = fs::read(path)?;
        let bad = |reason: String| Error::MalformedProjection {
            path: path.to_path_buf(),
            reason,
        };
        if bytes.len() != dim * dim * 8 {
            return Err(bad(format!(
                "expected {} bytes for D={dim}, found {}",
                dim * dim * 8,
                bytes.len()
            )));
        }
        let entries: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::matrix(dim, entries).map_err(|e| bad(e.to_string()))
    }

    pub fn apply(&self, v: &Hypervector) -> Result<Hypervector> {
        match self {
            Self::Identity => Ok(v.clone()),
            Self::Matrix { dim, entries } => {
                if v.dim() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        found: v.dim(),
                    });
                }
                let x = v.as_slice();
                Hypervector::new(entries.chunks_exact(*dim).map(|row| dot(row, x)).collect())
            }
        }
    }
}

/// Projections used by [`attention_readout_with`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReadoutProjections {
    pub query: KeyProjection,
    pub key: KeyProjection,
}

/// Softmax weights over one factor's fillers and the resulting convex
/// combination of those fillers.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    pub weights: Vec<f64>,
    pub vstar: Hypervector,
}

/// Frozen codebooks. There is no mutating method.
#[derive(Debug, Clone)]
pub struct ItemMemory {
    space: SpaceConfig,
    schema: FactorSchema,
    roles: Vec<Hypervector>,
    fillers: Vec<Vec<Hypervector>>,
    // derived caches, rebuilt on load
    bound: Vec<Vec<Hypervector>>,
    role_spectra: Vec<Vec<Complex<f64>>>,
}

impl PartialEq for ItemMemory {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.schema == other.schema
            && self.roles == other.roles
            && self.fillers == other.fillers
    }
}

pub fn role_stream(factor: usize) -> u64 {
    mix_stream(&[1, factor as u64])
}

pub fn filler_stream(factor: usize, value: usize) -> u64 {
    mix_stream(&[2, factor as u64, value as u64])
}

/// Samples roles and fillers for `schema` in `space`.
pub fn build_memory(schema: &FactorSchema, space: SpaceConfig) -> ItemMemory {
    let roles = (0..schema.len())
        .map(|i| sample_seed(space, role_stream(i)))
        .collect();
    let fillers = schema
        .factors()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            (0..f.cardinality)
                .map(|j| sample_seed(space, filler_stream(i, j)))
                .collect()
        })
        .collect();
    ItemMemory::from_parts(space, schema.clone(), roles, fillers)
        .expect("sampled vectors have the space dimension")
}

impl ItemMemory {
    fn from_parts(
        space: SpaceConfig,
        schema: FactorSchema,
        roles: Vec<Hypervector>,
        fillers: Vec<Vec<Hypervector>>,
    ) -> Result<Self> {
        let d = space.dim();
        let all = roles.iter().chain(fillers.iter().flatten());
        if let Some(v) = all.into_iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        let bound = roles
            .iter()
            .zip(&fillers)
            .map(|(r, fs)| fs.iter().map(|f| bind(r, f)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let role_spectra = roles
            .iter()
            .map(|r| hv::forward(r.as_slice()).iter().map(|c| c.conj()).collect())
            .collect();
        Ok(Self {
            space,
            schema,
            roles,
            fillers,
            bound,
            role_spectra,
        })
    }

    pub fn space(&self) -> SpaceConfig {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn schema(&self) -> &FactorSchema {
        &self.schema
    }

    pub fn role(&self, factor: usize) -> Result<&Hypervector> {
        self.roles.get(factor).ok_or(Error::UnknownFactor(factor))
    }

    pub fn roles(&self) -> &[Hypervector] {
        &self.roles
    }

    pub fn fillers(&self, factor: usize) -> Result<&[Hypervector]> {
        self.fillers
            .get(factor)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownFactor(factor))
    }

    pub fn filler(&self, factor: usize, value: usize) -> Result<&Hypervector> {
        let fs = self.fillers(factor)?;
        fs.get(value).ok_or(Error::ValueOutOfRange {
            factor,
            value,
            cardinality: fs.len(),
        })
    }

    /// `role_factor ⊛ filler_(factor, value)`, precomputed.
    pub fn bound_pair(&self, factor: usize, value: usize) -> Result<&Hypervector> {
        let cardinality = self.schema.cardinality(factor)?;
        self.bound[factor]
            .get(value)
            .ok_or(Error::ValueOutOfRange {
                factor,
                value,
                cardinality,
            })
    }

    pub fn filler_count(&self) -> usize {
        self.fillers.iter().map(Vec::len).sum()
    }

    /// Unbinds every role from `o` with a single forward transform of `o`.
    pub(crate) fn unbind_all(&self, o: &Hypervector) -> Result<Vec<Hypervector>> {
        if o.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: o.dim(),
            });
        }
        let spectrum = hv::forward(o.as_slice());
        self.role_spectra
            .iter()
            .map(|rs| {
                let prod = spectrum.iter().zip(rs).map(|(x, y)| x * y).collect();
                Hypervector::new(hv::inverse(prod, self.dim()))
            })
            .collect()
    }

    /// Binary container: magic, u32 D, u64 seed, schema block, raw f64
    /// roles then fillers, all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MEMORY_MAGIC)?;
        w.write_all(&(self.dim() as u32).to_le_bytes())?;
        w.write_all(&self.space.master_seed().to_le_bytes())?;
        w.write_all(&(self.schema.len() as u32).to_le_bytes())?;
        for f in self.schema.factors() {
            w.write_all(&(f.name.len() as u32).to_le_bytes())?;
            w.write_all(f.name.as_bytes())?;
            w.write_all(&(f.cardinality as u32).to_le_bytes())?;
        }
        for v in self.roles.iter().chain(self.fillers.iter().flatten()) {
            for x in v.as_slice() {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_binary(&mut buf).expect("writing to a Vec");
        buf
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        fn bad(msg: &str) -> Error {
            Error::MalformedMemory(msg.to_string())
        }
        fn take<R: Read, const K: usize>(r: &mut R) -> Result<[u8; K]> {
            let mut buf = [0u8; K];
            r.read_exact(&mut buf)
                .map_err(|_| bad("unexpected end of file"))?;
            Ok(buf)
        }
        if &take::<_, 7>(&mut r)? != MEMORY_MAGIC {
            return Err(bad("bad magic"));
        }
        let dim = u32::from_le_bytes(take(&mut r)?) as usize;
        let seed = u64::from_le_bytes(take(&mut r)?);
        let space = SpaceConfig::new(dim, seed)?;
        let n = u32::from_le_bytes(take(&mut r)?) as usize;
        let mut factors = Vec::with_capacity(n.min(1024));
        for _ in 0..n {
            let len = u32::from_le_bytes(take(&mut r)?) as usize;
            let mut name = vec![0u8; len];
            r.read_exact(&mut name)
                .map_err(|_| bad("unexpected end of file"))?;
            let name = String::from_utf8(name).map_err(|_| bad("factor name is not UTF-8"))?;
            let cardinality = u32::from_le_bytes(take(&mut r)?) as usize;
            factors.push(Factor { name, cardinality });
        }
        let schema = FactorSchema::try_from(factors)?;
        let read_vec = |r: &mut R| -> Result<Hypervector> {
            let mut comps = Vec::with_capacity(dim);
            for _ in 0..dim {
                comps.push(f64::from_le_bytes(take(r)?));
            }
            Hypervector::new(comps)
        };
        let roles = (0..n)
            .map(|_| read_vec(&mut r))
            .collect::<Result<Vec<_>>>()?;
        let fillers = schema
            .cardinalities()
            .into_iter()
            .map(|k| (0..k).map(|_| read_vec(&mut r)).collect())
            .collect::<Result<Vec<_>>>()?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(bad("trailing bytes"));
        }
        Self::from_parts(space, schema, roles, fillers)
    }

    pub fn manifest(&self) -> MemoryManifest {
        MemoryManifest {
            format: String::from_utf8_lossy(MEMORY_MAGIC).into_owned(),
            dim: self.dim(),
            master_seed: self.space.master_seed(),
            schema: self.schema.clone(),
            role_stream: "mix_stream([1, factor])".into(),
            filler_stream: "mix_stream([2, factor, value])".into(),
        }
    }

    /// Writes `path` and a JSON sidecar next to it; returns the sidecar path.
    pub fn save(&self, path: &Path) -> Result<PathBuf> {
        fs::write(path, self.to_bytes())?;
        let sidecar = sidecar_path(path);
        fs::write(&sidecar, serde_json::to_string_pretty(&self.manifest())?)?;
        Ok(sidecar)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let memory = Self::read_binary(fs::File::open(path)?)?;
        let sidecar = sidecar_path(path);
        if sidecar.exists() {
            let manifest: MemoryManifest = serde_json::from_slice(&fs::read(&sidecar)?)?;
            if manifest.dim != memory.dim()
                || manifest.master_seed != memory.space.master_seed()
                || manifest.schema != memory.schema
            {
                return Err(Error::MalformedMemory(
                    "sidecar does not match binary container".into(),
                ));
            }
        }
        Ok(memory)
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryManifest {
    pub format: String,
    pub dim: usize,
    pub master_seed: u64,
    pub schema: FactorSchema,
    pub role_stream: String,
    pub filler_stream: String,
}

/// Index and cosine of the most similar codebook entry; ties go to the
/// lowest index.
pub fn cleanup(query: &Hypervector, codebook: &[Hypervector]) -> Result<(usize, f64)> {
    if codebook.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    let qn = query.norm();
    if qn == 0.0 {
        return Err(Error::DegenerateVector);
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, entry) in codebook.iter().enumerate() {
        if entry.dim() != query.dim() {
            return Err(Error::DimensionMismatch {
                expected: query.dim(),
                found: entry.dim(),
            });
        }
        let en = entry.norm();
        if en == 0.0 {
            return Err(Error::DegenerateVector);
        }
        let sim = (dot(query.as_slice(), entry.as_slice()) / (qn * en)).clamp(-1.0, 1.0);
        if sim > best.1 {
            best = (i, sim);
        }
    }
    Ok(best)
}

/// The `k` most similar entries, by non-increasing similarity then index.
pub fn top_k(query: &Hypervector, codebook: &[Hypervector], k: usize) -> Result<Vec<(usize, f64)>> {
    if k == 0 || k > codebook.len() {
        return Err(Error::TopKOutOfRange {
            k,
            size: codebook.len(),
        });
    }
    let mut ranked = codebook
        .iter()
        .enumerate()
        .map(|(i, e)| cosine(query, e).map(|s| (i, s)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(ranked)
}

/// Softmax attention of `query` over one factor's fillers with projected keys.
pub fn attention_readout(
    query: &Hypervector,
    factor: usize,
    memory: &ItemMemory,
    proj: &KeyProjection,
) -> Result<Readout> {
    attention_readout_with(
        query,
        factor,
        memory,
        &ReadoutProjections {
            query: KeyProjection::Identity,
            key: proj.clone(),
        },
    )
}

/// Logits are `⟨Q·query, K·filler_j⟩ / √D`.
pub fn attention_readout_with(
    query: &Hypervector,
    factor: usize,
    memory: &ItemMemory,
    proj: &ReadoutProjections,
) -> Result<Readout> {
    let fillers = memory.fillers(factor)?;
    let q = proj.query.apply(query)?;
    if q.dim() != memory.dim() {
        return Err(Error::DimensionMismatch {
            expected: memory.dim(),
            found: q.dim(),
        });
    }
    let scale = 1.0 / (memory.dim() as f64).sqrt();
    let logits = fillers
        .iter()
        .map(|f| Ok(q.dot(&proj.key.apply(f)?)? * scale))
        .collect::<Result<Vec<f64>>>()?;
    let weights = softmax(&logits);
    let mut acc = vec![0.0; memory.dim()];
    for (w, f) in weights.iter().zip(fillers) {
        acc.iter_mut()
            .zip(f.as_slice())
            .for_each(|(a, x)| *a += w * x);
    }
    Ok(Readout {
        weights,
        vstar: Hypervector::new(acc)?,
    })
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|x| (x - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::add_noise;

    fn mem(schema: &FactorSchema, dim: usize) -> ItemMemory {
        build_memory(schema, SpaceConfig::new(dim, 11).unwrap())
    }

    #[test]
    fn schema_validation() {
        assert!(FactorSchema::new(Vec::<(&str, usize)>::new()).is_err());
        assert!(FactorSchema::new([("a", 0)]).is_err());
        assert!(FactorSchema::new([("a", 2), ("a", 3)]).is_err());
        assert_eq!(FactorSchema::dsprites().object_count(), 3 * 6 * 40 * 32 * 32);
    }

    #[test]
    fn schema_json_roundtrip_validates() {
        let s = FactorSchema::metric();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<FactorSchema>(&json).unwrap(), s);
        assert!(serde_json::from_str::<FactorSchema>(r#"[{"name":"a","cardinality":0}]"#).is_err());
    }

    #[test]
    fn dsprites_memory_sizes() {
        let m = mem(&FactorSchema::dsprites(), 1024);
        assert_eq!(m.roles().len(), 5);
        assert_eq!(m.filler_count(), 113);
        assert!(m.roles().iter().all(|r| r.dim() == 1024));
    }

    #[test]
    fn memory_is_deterministic() {
        let s = FactorSchema::metric();
        assert_eq!(mem(&s, 256), mem(&s, 256));
        assert_eq!(mem(&s, 256).to_bytes(), mem(&s, 256).to_bytes());
    }

    #[test]
    fn single_value_factor_cleans_up_to_zero() {
        let m = mem(&FactorSchema::new([("only", 1)]).unwrap(), 128);
        let q = crate::hv::sample_seed(m.space(), 999);
        assert_eq!(cleanup(&q, m.fillers(0).unwrap()).unwrap().0, 0);
    }

    #[test]
    fn cleanup_exact_and_ties() {
        let m = mem(&FactorSchema::metric(), 256);
        let book = m.fillers(3).unwrap();
        for (k, v) in book.iter().enumerate() {
            let (i, s) = cleanup(v, book).unwrap();
            assert_eq!(i, k);
            assert!((s - 1.0).abs() < 1e-12);
        }
        let dup = vec![book[2].clone(), book[2].clone(), book[1].clone()];
        assert_eq!(cleanup(&book[2], &dup).unwrap().0, 0);
        assert!(matches!(cleanup(&book[0], &[]), Err(Error::EmptyCodebook)));
    }

    #[test]
    fn cleanup_is_scale_invariant() {
        let m = mem(&FactorSchema::metric(), 256);
        let book = m.fillers(2).unwrap();
        let q = add_noise(&book[5], 0.05, 1).unwrap();
        for c in [1e-6, 0.3, 7.0, 1e6] {
            assert_eq!(cleanup(&q.scaled(c), book).unwrap().0, cleanup(&q, book).unwrap().0);
        }
    }

    #[test]
    fn top_k_contract() {
        let m = mem(&FactorSchema::metric(), 256);
        let book = m.fillers(2).unwrap();
        let q = add_noise(&book[3], 0.03, 2).unwrap();
        let full = top_k(&q, book, book.len()).unwrap();
        assert_eq!(full.len(), book.len());
        assert!(full.windows(2).all(|w| w[0].1 >= w[1].1));
        let one = top_k(&q, book, 1).unwrap();
        let (ci, cs) = cleanup(&q, book).unwrap();
        assert_eq!(one, vec![(ci, cs)]);
        assert!(top_k(&q, book, 0).is_err());
        assert!(top_k(&q, book, book.len() + 1).is_err());
    }

    #[test]
    fn top_k_orthogonal_query_orders_by_index() {
        // Gram–Schmidt a random vector against the codebook span.
        let m = mem(&FactorSchema::metric(), 64);
        let book = m.fillers(1).unwrap();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in book {
            let mut u = v.as_slice().to_vec();
            for b in &basis {
                let p = dot(&u, b);
                u.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
            let n = dot(&u, &u).sqrt();
            basis.push(u.into_iter().map(|x| x / n).collect());
        }
        let mut q = crate::hv::sample_seed(m.space(), 77).into_vec();
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&q, b);
                q.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
        }
        let q = Hypervector::new(q).unwrap();
        let ranked = top_k(&q, book, book.len()).unwrap();
        assert!(ranked.iter().all(|(_, s)| s.abs() < 1e-12));
        // round-off residues still decide that order, so check the index
        // tie-break on exactly zero similarities
        let deltas: Vec<_> = (0..4).map(|_| Hypervector::identity(64)).collect();
        let mut e1 = vec![0.0; 64];
        e1[1] = 1.0;
        let r = top_k(&Hypervector::new(e1).unwrap(), &deltas, 4).unwrap();
        assert_eq!(r.iter().map(|p| p.0).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn readout_zero_query_is_uniform() {
        let m = mem(&FactorSchema::metric(), 128);
        let r = attention_readout(&Hypervector::zeros(128), 2, &m, &KeyProjection::Identity).unwrap();
        assert!(r.weights.iter().all(|w| (w - 1.0 / 8.0).abs() < 1e-15));
        let mean = bundle_all(m.fillers(2).unwrap());
        assert!(r.vstar.max_abs_diff(&mean).unwrap() < 1e-12);
    }

    fn bundle_all(v: &[Hypervector]) -> Hypervector {
        crate::hv::bundle(v).unwrap()
    }

    #[test]
    fn readout_unknown_factor() {
        let m = mem(&FactorSchema::metric(), 64);
        assert!(matches!(
            attention_readout(&Hypervector::zeros(64), 9, &m, &KeyProjection::Identity),
            Err(Error::UnknownFactor(9))
        ));
    }

    #[test]
    fn readout_with_matrix_identity_equals_identity_marker() {
        let d = 32;
        let m = mem(&FactorSchema::metric(), d);
        let mut eye = vec![0.0; d * d];
        (0..d).for_each(|i| eye[i * d + i] = 1.0);
        let proj = KeyProjection::matrix(d, eye).unwrap();
        let q = m.filler(2, 3).unwrap().scaled(10.0);
        let a = attention_readout(&q, 2, &m, &proj).unwrap();
        let b = attention_readout(&q, 2, &m, &KeyProjection::Identity).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_file_roundtrip_and_size_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.f64");
        let entries: Vec<f64> = (0..16).map(|i| i as f64 * 0.5).collect();
        let bytes: Vec<u8> = entries.iter().flat_map(|x| x.to_le_bytes()).collect();
        fs::write(&path, &bytes).unwrap();
        let p = KeyProjection::load(&path, 4).unwrap();
        assert_eq!(p, KeyProjection::matrix(4, entries).unwrap());
        assert!(KeyProjection::load(&path, 5).is_err());
    }

    #[test]
    fn binary_container_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let m = mem(&FactorSchema::metric(), 64);
        let path = dir.path().join("memory.bin");
        let sidecar = m.save(&path).unwrap();
        assert!(sidecar.ends_with("memory.bin.json"));
        let bytes = fs::read(&path).unwrap();
        assert_eq!(&bytes[..7], b"ARSYD01");
        assert_eq!(u32::from_le_bytes(bytes[7..11].try_into().unwrap()), 64);
        let back = ItemMemory::load(&path).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.bound_pair(1, 2).unwrap(), m.bound_pair(1, 2).unwrap());
    }

    #[test]
    fn binary_container_rejects_corruption() {
        let m = mem(&FactorSchema::metric(), 16);
        let mut bytes = m.to_bytes();
        assert!(ItemMemory::read_binary(&bytes[..bytes.len() - 1]).is_err());
        bytes.push(0);
        assert!(ItemMemory::read_binary(&bytes[..]).is_err());
        let mut bad = m.to_bytes();
        bad[0] = b'X';
        assert!(ItemMemory::read_binary(&bad[..]).is_err());
    }
}
