//! Seeded samplers whose laws match the exact layer.
//!
//! Every random draw goes through an [`RngStream`], a ChaCha8 generator keyed by
//! `(seed, stream_id)`. Replication `r` of an experiment uses stream `r`, so
//! replications can run on any number of threads and still reproduce the same
//! draws.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::combinatorics::{CombinatoricsError, Urn};
use crate::measures::{Atom, DiscreteMeasure, MeasureError};
use crate::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamplingError {
    #[error("mixture needs at least one component")]
    EmptyMixture,
    #[error("mixture weights sum to {0}, expected 1")]
    WeightsNotNormalized(String),
    #[error("mixture weight {0} is negative")]
    NegativeWeight(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic random stream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream for sub-task `label`; a pure function of
    /// `(seed, stream_id, label)`, independent of how much of `self` was used.
    pub fn fork(&self, label: u64) -> RngStream {
        let child_seed = splitmix64(self.seed ^ splitmix64(self.stream_id).rotate_left(23));
        RngStream::new(child_seed, label)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// The first `k` slots of a Fisher–Yates shuffle of `0..n`.
pub fn sample_indices_without_replacement<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k.min(n));
    idx
}

/// `k` ordered draws without replacement; distributed as `λ^{N,k}`.
pub fn sample_without_replacement<R: Rng + ?Sized>(
    urn: &Urn,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Atom>, CombinatoricsError> {
    if k == 0 || k > urn.len() {
        return Err(CombinatoricsError::KOutOfRange { n: urn.len(), k });
    }
    let idx = sample_indices_without_replacement(urn.len(), k, rng);
    Ok(idx.into_iter().map(|i| urn.points()[i].clone()).collect())
}

/// Uniform permutation of `0..n` (0-based).
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    sample_indices_without_replacement(n, n, rng)
}

/// Inverse-CDF sampler over the support of a measure. The exact weights are
/// converted to doubles once, at construction.
#[derive(Debug, Clone)]
pub struct Categorical {
    outcomes: Vec<Vec<Atom>>,
    cumulative: Vec<f64>,
}

impl Categorical {
    pub fn new(mu: &DiscreteMeasure) -> Self {
        let mut outcomes = Vec::with_capacity(mu.support_len());
        let mut cumulative = Vec::with_capacity(mu.support_len());
        let mut acc = rational::zero();
        for (t, w) in mu.iter() {
            acc += w;
            outcomes.push(t.clone());
            cumulative.push(rational::to_f64(&acc));
        }
        Categorical { outcomes, cumulative }
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("measures are non-empty");
        let u: f64 = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.outcomes.len() - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &[Atom] {
        &self.outcomes[self.sample_index(rng)]
    }
}

/// `k` i.i.d. draws from an arity-1 measure.
pub fn sample_iid<R: Rng + ?Sized>(mu: &DiscreteMeasure, k: usize, rng: &mut R) -> Result<Vec<Atom>, MeasureError> {
    if mu.arity() != 1 {
        return Err(MeasureError::ArityNotOne(mu.arity()));
    }
    let cat = Categorical::new(mu);
    Ok((0..k).map(|_| cat.sample(rng)[0].clone()).collect())
}

/// Finitely supported prior over probability vectors on an alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureModel {
    components: Vec<MixtureComponent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureComponent {
    pub weight: Rational,
    pub law: DiscreteMeasure,
}

impl MixtureModel {
    /// Zero-weight components are dropped; negative weights are rejected.
    pub fn new(mut components: Vec<MixtureComponent>) -> Result<Self, SamplingError> {
        if let Some(c) = components.iter().find(|c| c.weight < rational::zero()) {
            return Err(SamplingError::NegativeWeight(rational::to_string(&c.weight)));
        }
        components.retain(|c| c.weight > rational::zero());
        if components.is_empty() {
            return Err(SamplingError::EmptyMixture);
        }
        let mut total = rational::zero();
        for c in &components {
            if c.law.arity() != 1 {
                return Err(MeasureError::ArityNotOne(c.law.arity()).into());
            }
            total += &c.weight;
        }
        if total != rational::one() {
            return Err(SamplingError::WeightsNotNormalized(rational::to_string(&total)));
        }
        Ok(MixtureModel { components })
    }

    pub fn single(law: DiscreteMeasure) -> Result<Self, SamplingError> {
        Self::new(vec![MixtureComponent { weight: rational::one(), law }])
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    /// Law of the first `k` coordinates of the exchangeable sequence this
    /// prior directs: `Σ_c w_c P_c^{⊗k}`.
    pub fn prefix_law(&self, k: usize) -> Result<DiscreteMeasure, MeasureError> {
        let powers =
            self.components.iter().map(|c| crate::measures::tensor_power(&c.law, k)).collect::<Result<Vec<_>, _>>()?;
        DiscreteMeasure::mixture(self.components.iter().map(|c| &c.weight).zip(powers.iter()))
    }
}

/// Picks component `i` with probability `weight_i`; returns its index and law.
pub fn sample_directing_measure<'m, R: Rng + ?Sized>(m: &'m MixtureModel, rng: &mut R) -> (usize, &'m DiscreteMeasure) {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, c) in m.components.iter().enumerate() {
        acc += rational::to_f64(&c.weight);
        if u < acc {
            return (i, &c.law);
        }
    }
    let last = m.components.len() - 1;
    (last, &m.components[last].law)
}

/// `{"a": "1/3", "b": "2/3"}` for an arity-1 measure.
pub(crate) fn probs_to_map(mu: &DiscreteMeasure) -> BTreeMap<String, String> {
    mu.iter().map(|(t, w)| (t[0].as_str().to_owned(), rational::to_string(w))).collect()
}

pub(crate) fn probs_from_map(map: &BTreeMap<String, String>) -> Result<DiscreteMeasure, String> {
    let mut pairs = Vec::with_capacity(map.len());
    for (symbol, text) in map {
        let w = rational::parse(text).ok_or_else(|| format!("invalid rational {text:?}"))?;
        pairs.push((vec![Atom::new(symbol)], w));
    }
    DiscreteMeasure::new(pairs).map_err(|e| e.to_string())
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    weight: String,
    probs: BTreeMap<String, String>,
}

impl Serialize for MixtureModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<ComponentRepr> = self
            .components
            .iter()
            .map(|c| ComponentRepr { weight: rational::to_string(&c.weight), probs: probs_to_map(&c.law) })
            .collect();
        reprs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MixtureModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let reprs = Vec::<ComponentRepr>::deserialize(d)?;
        let mut components = Vec::with_capacity(reprs.len());
        for r in reprs {
            let weight = rational::parse(&r.weight)
                .ok_or_else(|| D::Error::custom(format!("invalid rational {:?}", r.weight)))?;
            let law = probs_from_map(&r.probs).map_err(D::Error::custom)?;
            components.push(MixtureComponent { weight, law });
        }
        MixtureModel::new(components).map_err(D::Error::custom)
    }
}
