//! Real-valued holographic reduced representations.
//!
//! Seeds are drawn from N(0, 1/D), bundling is the component-wise mean,
//! binding is circular convolution evaluated through a real-to-complex FFT,
//! and unbinding convolves with the involution (approximate inverse) of the
//! role.

use std::cell::RefCell;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use realfft::num_complex::Complex;
use realfft::RealFftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream::{mix_stream, stream_rng};

/// Dimension and master seed of a vector space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceConfig {
    dim: usize,
    master_seed: u64,
}

impl SpaceConfig {
    pub fn new(dim: usize, master_seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self { dim, master_seed })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }
}

/// A dense real hypervector with finite components.
#[derive(Clone, PartialEq)]
pub struct Hypervector(Vec<f64>);

impl fmt::Debug for Hypervector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<_> = self.0.iter().take(4).collect();
        write!(f, "Hypervector(D={}, {:?}..)", self.0.len(), head)
    }
}

impl Hypervector {
    /// Wraps `components`, rejecting NaN/Inf and dimensions below 2.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::InvalidDimension(components.len()));
        }
        if let Some(i) = components.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(components))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The convolution identity δ = (1, 0, …, 0).
    pub fn identity(dim: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[0] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        dot(&self.0, &self.0).sqrt()
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        check_dims(self, other)?;
        Ok(dot(&self.0, &other.0))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|x| x * c).collect())
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| x + c * y)
                .collect(),
        ))
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self, other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

fn check_dims(a: &Hypervector, b: &Hypervector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Eight independent partial sums so the loop vectorises.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    acc.iter().sum::<f64>() + tail
}

/// Seed vector for `stream_id`, components i.i.d. N(0, 1/D).
pub fn sample_seed(space: SpaceConfig, stream_id: u64) -> Hypervector {
    let mut rng = stream_rng(space.master_seed, stream_id);
    let sd = 1.0 / (space.dim as f64).sqrt();
    Hypervector(
        (0..space.dim)
            .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )
}

/// Component-wise mean of a nonempty set of vectors.
pub fn bundle<'a, I>(vectors: I) -> Result<Hypervector>
where
    I: IntoIterator<Item = &'a Hypervector>,
{
    let mut iter = vectors.into_iter();
    let first = iter.next().ok_or(Error::EmptyBundle)?;
    let mut acc = first.0.clone();
    let mut n = 1usize;
    for v in iter {
        check_dims(first, v)?;
        acc.iter_mut().zip(&v.0).for_each(|(a, x)| *a += x);
        n += 1;
    }
    let inv = 1.0 / n as f64;
    acc.iter_mut().for_each(|a| *a *= inv);
    Ok(Hypervector(acc))
}

thread_local! {
    static PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

/// Half spectrum (D/2 + 1 bins) of a real signal.
pub(crate) fn forward(x: &[f64]) -> Vec<Complex<f64>> {
    PLANNER.with(|p| {
        let r2c = p.borrow_mut().plan_fft_forward(x.len());
        let mut input = x.to_vec();
        let mut output = r2c.make_output_vec();
        r2c.process(&mut input, &mut output)
            .expect("buffer sizes come from the plan");
        output
    })
}

/// Inverse of [`forward`], normalised so `inverse(forward(x)) == x`.
pub(crate) fn inverse(mut spectrum: Vec<Complex<f64>>, len: usize) -> Vec<f64> {
    // A product of real-signal spectra is real at DC and Nyquist up to
    // round-off; the inverse transform requires those bins to be exactly real.
    spectrum[0].im = 0.0;
    if len.is_multiple_of(2) {
        if let Some(last) = spectrum.last_mut() {
            last.im = 0.0;
        }
    }
    PLANNER.with(|p| {
        let c2r = p.borrow_mut().plan_fft_inverse(len);
        let mut output = c2r.make_output_vec();
        c2r.process(&mut spectrum, &mut output)
            .expect("buffer sizes come from the plan");
        let scale = 1.0 / len as f64;
        output.iter_mut().for_each(|x| *x *= scale);
        output
    })
}

/// Circular convolution `a ⊛ b`.
pub fn bind(a: &Hypervector, b: &Hypervector) -> Result<Hypervector> {
    check_dims(a, b)?;
    let fa = forward(&a.0);
    let fb = forward(&b.0);
    let prod = fa.into_iter().zip(fb).map(|(x, y)| x * y).collect();
    Ok(Hypervector(inverse(prod, a.dim())))
}

/// `x[(D - j) mod D]`, the HRR approximate inverse.
pub fn involution(x: &Hypervector) -> Hypervector {
    let d = x.dim();
    Hypervector((0..d).map(|j| x.0[(d - j) % d]).collect())
}

/// Approximate inverse of [`bind`]: `unbind(bind(r, f), r) ≈ f`.
///
/// Convolving with the involution is circular correlation, which in the
/// frequency domain is multiplication by the conjugate spectrum.
pub fn unbind(c: &Hypervector, role: &Hypervector) -> Result<Hypervector> {
    check_dims(c, role)?;
    let fc = forward(&c.0);
    let fr = forward(&role.0);
    let prod = fc.into_iter().zip(fr).map(|(x, y)| x * y.conj()).collect();
    Ok(Hypervector(inverse(prod, c.dim())))
}

/// Cosine similarity; errors on a zero-norm input.
pub fn cosine(a: &Hypervector, b: &Hypervector) -> Result<f64> {
    check_dims(a, b)?;
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateVector);
    }
    Ok((dot(&a.0, &b.0) / (na * nb)).clamp(-1.0, 1.0))
}

/// Domain tag separating noise streams from codebook streams.
const NOISE_DOMAIN: u64 = 0x006E_6F69_7365; // "noise"

/// `a + ε`, ε i.i.d. N(0, σ²), deterministic per `stream_id`.
pub fn add_noise(a: &Hypervector, sigma: f64, stream_id: u64) -> Result<Hypervector> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    if sigma == 0.0 {
        return Ok(a.clone());
    }
    let mut rng = stream_rng(NOISE_DOMAIN, mix_stream(&[NOISE_DOMAIN, stream_id]));
    Ok(Hypervector(
        a.0.iter()
            .map(|x| x + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect(),
    ))
}
