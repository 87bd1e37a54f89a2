//! Exact probability measures on tuples over a finite alphabet.
//!
//! A [`DiscreteMeasure`] stores a canonical map from `k`-tuples of [`Atom`]s to
//! strictly positive rational weights that sum to exactly one. Iteration is in
//! lexicographic tuple order, so anything derived from a measure (reports,
//! pushed-forward measures, sums) is deterministic.
//!
//! The total-variation value returned by [`tv_distance`] is the L1 norm of the
//! difference, in `[0, 2]`, not the halved statistical convention.

mod json;
mod pattern;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};

pub use pattern::{stirling2, IndexPattern, PatternError};

/// One symbol of a finite, ordered alphabet.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(symbol: &str) -> Self {
        Atom(Arc::from(symbol))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Atom {
    fn from(symbol: &str) -> Self {
        Atom::new(symbol)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Builds a tuple from single-character or comma separated symbols:
/// `tuple("aab")` and `tuple("a,a,b")` both give `(a, a, b)`.
pub fn tuple(symbols: &str) -> Vec<Atom> {
    if symbols.contains(',') {
        symbols.split(',').map(|s| Atom::new(s.trim())).collect()
    } else {
        symbols.chars().map(|c| Atom::new(&c.to_string())).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("weights sum to {total}, expected 1")]
    NonNormalized { total: String },
    #[error("tuples of arity {found} mixed with arity {expected}")]
    MixedArity { expected: usize, found: usize },
    #[error("measure has arity {0}, expected 1")]
    ArityNotOne(usize),
    #[error("measure arity {measure} does not match pattern image size {pattern}")]
    ArityMismatch { measure: usize, pattern: usize },
    #[error("negative weight {0}")]
    NegativeWeight(String),
    #[error("tuples must be non-empty")]
    EmptyTuple,
    #[error("tensor power must be at least 1")]
    ZeroPower,
    #[error("coordinate {index} out of range for arity {arity}")]
    CoordinateOutOfRange { index: usize, arity: usize },
}

/// A probability measure on `arity`-tuples with exact weights.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiscreteMeasure {
    arity: usize,
    weights: BTreeMap<Vec<Atom>, Rational>,
}

impl DiscreteMeasure {
    /// Canonicalizes `(tuple, weight)` pairs: duplicates merged, zeros dropped,
    /// total mass checked to be exactly one.
    pub fn new<I>(pairs: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (Vec<Atom>, Rational)>,
    {
        let mut arity = None;
        let mut weights: BTreeMap<Vec<Atom>, Rational> = BTreeMap::new();
        for (t, w) in pairs {
            if t.is_empty() {
                return Err(MeasureError::EmptyTuple);
            }
            match arity {
                None => arity = Some(t.len()),
                Some(a) if a != t.len() => return Err(MeasureError::MixedArity { expected: a, found: t.len() }),
                _ => {}
            }
            if w.is_negative() {
                return Err(MeasureError::NegativeWeight(rational::to_string(&w)));
            }
            *weights.entry(t).or_insert_with(Rational::zero) += w;
        }
        weights.retain(|_, w| !w.is_zero());
        let total: Rational = weights.values().sum();
        if !total.is_one() {
            return Err(MeasureError::NonNormalized { total: rational::to_string(&total) });
        }
        Ok(DiscreteMeasure { arity: arity.unwrap_or(0), weights })
    }

    /// Builds from non-negative integer counts, normalizing by their total.
    pub fn from_counts<I>(counts: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (Vec<Atom>, u64)>,
    {
        let counts: Vec<_> = counts.into_iter().collect();
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        if total == 0 {
            return Err(MeasureError::NonNormalized { total: "0/1".into() });
        }
        let total = rational::int(total);
        Self::new(counts.into_iter().map(|(t, c)| (t, rational::int(c) / &total)))
    }

    pub fn dirac(t: Vec<Atom>) -> Result<Self, MeasureError> {
        Self::new([(t, Rational::one())])
    }

    /// Uniform over the listed tuples, counted with multiplicity.
    pub fn uniform<I>(tuples: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = Vec<Atom>>,
    {
        Self::from_counts(tuples.into_iter().map(|t| (t, 1)))
    }

    /// Skips validation for weights already known to be canonical.
    pub(crate) fn from_canonical(arity: usize, weights: BTreeMap<Vec<Atom>, Rational>) -> Self {
        debug_assert!(weights.values().all(|w| w.is_positive()));
        debug_assert!(weights.keys().all(|t| t.len() == arity));
        debug_assert!(weights.values().sum::<Rational>().is_one());
        DiscreteMeasure { arity, weights }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn weight(&self, t: &[Atom]) -> Rational {
        self.weights.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<Atom>> {
        self.weights.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Atom>, &Rational)> {
        self.weights.iter()
    }

    pub fn is_dirac(&self) -> bool {
        self.weights.len() == 1
    }

    /// Weight of a single atom for an arity-1 measure.
    pub fn atom_weight(&self, a: &Atom) -> Rational {
        self.weights.get(std::slice::from_ref(a)).cloned().unwrap_or_else(Rational::zero)
    }

    /// `⟨f, μ⟩` for a rational valued test function.
    pub fn expectation<F>(&self, mut f: F) -> Rational
    where
        F: FnMut(&[Atom]) -> Rational,
    {
        self.weights.iter().map(|(t, w)| f(t) * w).sum()
    }

    /// Image of the measure under a tuple map; the image arity must be constant.
    pub fn map_tuples<F>(&self, mut f: F) -> Result<Self, MeasureError>
    where
        F: FnMut(&[Atom]) -> Vec<Atom>,
    {
        let mut out: BTreeMap<Vec<Atom>, Rational> = BTreeMap::new();
        let mut arity = None;
        for (t, w) in &self.weights {
            let image = f(t);
            match arity {
                None => arity = Some(image.len()),
                Some(a) if a != image.len() => {
                    return Err(MeasureError::MixedArity { expected: a, found: image.len() })
                }
                _ => {}
            }
            if image.is_empty() {
                return Err(MeasureError::EmptyTuple);
            }
            *out.entry(image).or_insert_with(Rational::zero) += w;
        }
        Ok(Self::from_canonical(arity.unwrap_or(0), out))
    }

    /// Marginal on the listed coordinates, in the listed order.
    pub fn marginal(&self, coords: &[usize]) -> Result<Self, MeasureError> {
        if coords.is_empty() {
            return Err(MeasureError::EmptyTuple);
        }
        if let Some(&index) = coords.iter().find(|&&c| c >= self.arity) {
            return Err(MeasureError::CoordinateOutOfRange { index, arity: self.arity });
        }
        self.map_tuples(|t| coords.iter().map(|&c| t[c].clone()).collect())
    }

    /// Product measure on concatenated tuples `(x, y)`.
    pub fn product(&self, other: &DiscreteMeasure) -> DiscreteMeasure {
        let mut out = BTreeMap::new();
        for (x, wx) in &self.weights {
            for (y, wy) in &other.weights {
                let mut t = Vec::with_capacity(x.len() + y.len());
                t.extend_from_slice(x);
                t.extend_from_slice(y);
                out.insert(t, wx * wy);
            }
        }
        Self::from_canonical(self.arity + other.arity, out)
    }

    /// Convex combination `Σ w_i μ_i`; weights must sum to one.
    pub fn mixture<'a, I>(parts: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (&'a Rational, &'a DiscreteMeasure)>,
    {
        let mut pairs = Vec::new();
        for (w, mu) in parts {
            for (t, x) in mu.iter() {
                pairs.push((t.clone(), w * x));
            }
        }
        Self::new(pairs)
    }
}

impl fmt::Debug for DiscreteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (t, w)) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            for a in t {
                write!(f, "{a}")?;
            }
            write!(f, ": {}", rational::to_string(w))?;
        }
        write!(f, "}}")
    }
}

/// `Σ_x |μ(x) − ν(x)|` over the union of supports, in `[0, 2]`.
pub fn tv_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Rational, MeasureError> {
    if mu.arity != nu.arity {
        return Err(MeasureError::MixedArity { expected: mu.arity, found: nu.arity });
    }
    let mut total = Rational::zero();
    for (t, w) in &mu.weights {
        total += (w - nu.weight(t)).abs();
    }
    for (t, w) in &nu.weights {
        if !mu.weights.contains_key(t) {
            total += w;
        }
    }
    Ok(total)
}

/// `μ^{⊗k}` for an arity-1 measure.
pub fn tensor_power(mu: &DiscreteMeasure, k: usize) -> Result<DiscreteMeasure, MeasureError> {
    if mu.arity != 1 {
        return Err(MeasureError::ArityNotOne(mu.arity));
    }
    if k == 0 {
        return Err(MeasureError::ZeroPower);
    }
    let mut current: BTreeMap<Vec<Atom>, Rational> = mu.weights.clone();
    for _ in 1..k {
        let mut next = BTreeMap::new();
        for (t, w) in &current {
            for (a, x) in &mu.weights {
                let mut ext = t.clone();
                ext.push(a[0].clone());
                next.insert(ext, w * x);
            }
        }
        current = next;
    }
    Ok(DiscreteMeasure::from_canonical(k, current))
}

/// Pushes an arity-`j` measure through the slot map of a pattern with image size `j`:
/// `(y_1..y_j) ↦ (y_{p(1)}, …, y_{p(k)})`.
pub fn push_forward_pattern(mu: &DiscreteMeasure, pattern: &IndexPattern) -> Result<DiscreteMeasure, MeasureError> {
    if mu.arity != pattern.image_size() {
        return Err(MeasureError::ArityMismatch { measure: mu.arity, pattern: pattern.image_size() });
    }
    mu.map_tuples(|t| pattern.apply(t))
}

/// Sparse signed weights, used transiently for differences and partial sums.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct SignedWeights(pub BTreeMap<Vec<Atom>, Rational>);

impl SignedWeights {
    pub fn add_scaled(&mut self, mu: &DiscreteMeasure, scale: &Rational) {
        for (t, w) in mu.iter() {
            *self.0.entry(t.clone()).or_insert_with(Rational::zero) += w * scale;
        }
    }

    pub fn add_signed(&mut self, other: &SignedWeights, scale: &Rational) {
        for (t, w) in &other.0 {
            *self.0.entry(t.clone()).or_insert_with(Rational::zero) += w * scale;
        }
    }

    pub fn prune(mut self) -> Self {
        self.0.retain(|_, w| !w.is_zero());
        self
    }

    /// Converts to a probability measure, failing if any weight is negative or
    /// the mass is not one.
    pub fn into_measure(self) -> Result<DiscreteMeasure, MeasureError> {
        DiscreteMeasure::new(self.0)
    }
}
