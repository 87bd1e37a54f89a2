//! Multi-class systems `(X_{n,i})`, `1 ≤ n ≤ N_i`, `1 ≤ i ≤ C`, whose law is
//! invariant under permutations of particles within each class.
//!
//! Infinite classes are handled constructively: a class of size `∞` carries a
//! truncation `M`, and its law is a mixture of i.i.d. sequences, so that only
//! the first `M` particles and the directing measure of the realized mixture
//! component are ever materialized.
//!
//! The central object is the [`MeasureVector`]: per class, the empirical
//! measure of a finite class or the directing measure of an infinite one.
//! Given it, [`conditional_resample`] redraws every class independently:
//! a uniform permutation of a finite class, fresh i.i.d. draws for an infinite
//! one. [`verify_sufficiency`] checks exactly, by enumeration, that this
//! resampling leaves the joint law unchanged.

mod exact;
mod json;
mod shadow;

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use thiserror::Error;

use crate::combinatorics::CombinatoricsError;
use crate::measures::{Atom, DiscreteMeasure, MeasureError};
use crate::rational::{self, Rational};
use crate::sampling::{random_permutation, sample_iid, Categorical, MixtureModel, RngStream};

pub use exact::{
    augmented_law, check_augmented_exchangeability, check_multi_exchangeability, conditional_kernel, joint_law_exact,
    verify_sufficiency, AugmentedLaw, SufficiencyReport,
};
pub use json::SystemSpecDocument;
pub(crate) use shadow::words;
pub use shadow::{statistical_shadow, ClassTest, ShadowReport, ShadowRow, TestFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MulticlassError {
    #[error("a system needs at least one class")]
    NoClasses,
    #[error("class {class}: {reason}")]
    InvalidClass { class: String, reason: String },
    #[error("invalid law: {0}")]
    InvalidLaw(String),
    #[error("tuple must be non-empty")]
    EmptyTuple,
    #[error("class {0} is infinite but carries no directing measure")]
    MissingDirectingMeasure(usize),
    #[error("realization does not match the system layout: {0}")]
    LayoutMismatch(String),
    #[error("{count} outcomes exceed the enumeration limit {limit}")]
    TooLargeToEnumerate { count: String, limit: u128 },
    #[error("the law is only available as a sampler")]
    BlackBoxLaw,
    #[error("the law is not multi-exchangeable")]
    NotMultiExchangeable,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
}

/// `N_i`: a finite size, or `∞` materialized through its first `truncation`
/// particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassSize {
    Finite(usize),
    Infinite { truncation: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSpec {
    pub name: String,
    pub size: ClassSize,
    pub alphabet: Vec<Atom>,
}

impl ClassSpec {
    pub fn finite(name: &str, n: usize, alphabet: &[&str]) -> Self {
        ClassSpec { name: name.into(), size: ClassSize::Finite(n), alphabet: atoms(alphabet) }
    }

    pub fn infinite(name: &str, truncation: usize, alphabet: &[&str]) -> Self {
        ClassSpec { name: name.into(), size: ClassSize::Infinite { truncation }, alphabet: atoms(alphabet) }
    }

    /// Number of materialized particles: `N_i`, or `M` for an infinite class.
    pub fn sample_len(&self) -> usize {
        match self.size {
            ClassSize::Finite(n) => n,
            ClassSize::Infinite { truncation } => truncation,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.size, ClassSize::Finite(_))
    }

    fn validate(&self) -> Result<(), MulticlassError> {
        let bad = |reason: &str| MulticlassError::InvalidClass { class: self.name.clone(), reason: reason.into() };
        if self.sample_len() == 0 {
            return Err(bad(if self.is_finite() {
                "size must be at least 1"
            } else {
                "truncation must be at least 1"
            }));
        }
        if self.alphabet.is_empty() {
            return Err(bad("alphabet is empty"));
        }
        let mut sorted = self.alphabet.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.alphabet.len() {
            return Err(bad("alphabet has repeated symbols"));
        }
        Ok(())
    }

    fn contains(&self, a: &Atom) -> bool {
        self.alphabet.contains(a)
    }
}

fn atoms(symbols: &[&str]) -> Vec<Atom> {
    symbols.iter().map(|s| Atom::new(s)).collect()
}

/// One value of the latent mixture index. Given it, the finite classes follow
/// `finite_law` jointly (concatenated in class order) and each infinite class
/// is i.i.d. from its directing measure, independently of everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatentComponent {
    pub weight: Rational,
    pub finite_law: Option<DiscreteMeasure>,
    /// One arity-1 measure per infinite class, in class order.
    pub directing: Vec<DiscreteMeasure>,
}

/// Draws a realization; the only access to a black-box law.
pub trait SystemSampler: Send + Sync {
    fn sample(&self, rng: &mut RngStream) -> SystemRealization;
}

#[derive(Clone)]
pub enum SystemLaw {
    /// Finitely supported latent mixture; enumerable.
    Exact(Vec<LatentComponent>),
    BlackBox(Arc<dyn SystemSampler>),
}

impl fmt::Debug for SystemLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemLaw::Exact(c) => f.debug_tuple("Exact").field(c).finish(),
            SystemLaw::BlackBox(_) => f.write_str("BlackBox(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SystemSpec {
    classes: Vec<ClassSpec>,
    law: SystemLaw,
}

impl SystemSpec {
    /// Exact spec from a latent component table. Zero-weight components are
    /// dropped.
    pub fn exact(classes: Vec<ClassSpec>, mut components: Vec<LatentComponent>) -> Result<Self, MulticlassError> {
        validate_classes(&classes)?;
        components.retain(|c| c.weight != rational::zero());
        validate_components(&classes, &components)?;
        Ok(SystemSpec { classes, law: SystemLaw::Exact(components) })
    }

    /// Finite classes jointly distributed as `finite_law`, each infinite class
    /// directed by its own independent mixture (one per infinite class, in
    /// class order). The latent table is the product of the mixtures.
    pub fn independent(
        classes: Vec<ClassSpec>,
        finite_law: Option<DiscreteMeasure>,
        mixtures: Vec<MixtureModel>,
    ) -> Result<Self, MulticlassError> {
        let mut table = vec![LatentComponent { weight: rational::one(), finite_law, directing: vec![] }];
        for m in &mixtures {
            table = cross(&table, m);
        }
        Self::exact(classes, table)
    }

    pub fn black_box(classes: Vec<ClassSpec>, sampler: Arc<dyn SystemSampler>) -> Result<Self, MulticlassError> {
        validate_classes(&classes)?;
        Ok(SystemSpec { classes, law: SystemLaw::BlackBox(sampler) })
    }

    /// Same system, but only reachable through sampling.
    pub fn as_black_box(&self) -> Result<SystemSpec, MulticlassError> {
        let sampler = LatentSampler::new(self)?;
        Self::black_box(self.classes.clone(), Arc::new(sampler))
    }

    pub fn classes(&self) -> &[ClassSpec] {
        &self.classes
    }

    pub fn law(&self) -> &SystemLaw {
        &self.law
    }

    pub fn components(&self) -> Result<&[LatentComponent], MulticlassError> {
        match &self.law {
            SystemLaw::Exact(c) => Ok(c),
            SystemLaw::BlackBox(_) => Err(MulticlassError::BlackBoxLaw),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.law, SystemLaw::Exact(_))
    }

    /// Coordinate range of each class inside a flattened realization.
    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.classes
            .iter()
            .map(|c| {
                let r = start..start + c.sample_len();
                start = r.end;
                r
            })
            .collect()
    }

    pub fn flat_len(&self) -> usize {
        self.classes.iter().map(ClassSpec::sample_len).sum()
    }

    pub fn finite_len(&self) -> usize {
        self.classes.iter().filter(|c| c.is_finite()).map(ClassSpec::sample_len).sum()
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<SystemRealization, MulticlassError> {
        match &self.law {
            SystemLaw::Exact(_) => Ok(LatentSampler::new(self)?.sample(rng)),
            SystemLaw::BlackBox(s) => Ok(s.sample(rng)),
        }
    }

    /// Rebuilds a realization from a flattened tuple and, for infinite
    /// classes, their directing measures (in class order).
    pub fn realization_from_flat(
        &self,
        flat: &[Atom],
        directing: Option<&[DiscreteMeasure]>,
    ) -> Result<SystemRealization, MulticlassError> {
        if flat.len() != self.flat_len() {
            return Err(MulticlassError::LayoutMismatch(format!(
                "expected {} coordinates, got {}",
                self.flat_len(),
                flat.len()
            )));
        }
        let mut inf = 0;
        let mut classes = Vec::with_capacity(self.classes.len());
        for (c, block) in self.classes.iter().zip(self.blocks()) {
            let atoms = flat[block].to_vec();
            if c.is_finite() {
                classes.push(ClassRealization::Finite(atoms));
            } else {
                let d = directing.and_then(|d| d.get(inf)).cloned();
                inf += 1;
                classes.push(ClassRealization::Infinite { prefix: atoms, directing: d });
            }
        }
        Ok(SystemRealization { classes })
    }
}

fn cross(table: &[LatentComponent], m: &MixtureModel) -> Vec<LatentComponent> {
    let mut out = Vec::with_capacity(table.len() * m.components().len());
    for t in table {
        for c in m.components() {
            let mut directing = t.directing.clone();
            directing.push(c.law.clone());
            out.push(LatentComponent { weight: &t.weight * &c.weight, finite_law: t.finite_law.clone(), directing });
        }
    }
    out
}

fn validate_classes(classes: &[ClassSpec]) -> Result<(), MulticlassError> {
    if classes.is_empty() {
        return Err(MulticlassError::NoClasses);
    }
    for c in classes {
        c.validate()?;
    }
    Ok(())
}

fn validate_components(classes: &[ClassSpec], components: &[LatentComponent]) -> Result<(), MulticlassError> {
    let bad = |s: String| Err(MulticlassError::InvalidLaw(s));
    if components.is_empty() {
        return bad("no latent components".into());
    }
    let finite: Vec<&ClassSpec> = classes.iter().filter(|c| c.is_finite()).collect();
    let infinite: Vec<&ClassSpec> = classes.iter().filter(|c| !c.is_finite()).collect();
    let finite_len: usize = finite.iter().map(|c| c.sample_len()).sum();
    let mut total = rational::zero();
    for (ci, comp) in components.iter().enumerate() {
        if comp.weight <= rational::zero() {
            return bad(format!("component {ci} has negative weight"));
        }
        total += &comp.weight;
        match (&comp.finite_law, finite_len) {
            (None, 0) => {}
            (None, _) => return bad(format!("component {ci} lacks a finite-class law")),
            (Some(_), 0) => return bad(format!("component {ci} has a finite-class law but no finite classes exist")),
            (Some(law), len) => {
                if law.arity() != len {
                    return bad(format!("component {ci}: finite law arity {} != {len}", law.arity()));
                }
                for t in law.support() {
                    let mut pos = 0;
                    for c in &finite {
                        for a in &t[pos..pos + c.sample_len()] {
                            if !c.contains(a) {
                                return bad(format!("component {ci}: atom {a} not in alphabet of {}", c.name));
                            }
                        }
                        pos += c.sample_len();
                    }
                }
            }
        }
        if comp.directing.len() != infinite.len() {
            return bad(format!(
                "component {ci} has {} directing measures for {} infinite classes",
                comp.directing.len(),
                infinite.len()
            ));
        }
        for (d, c) in comp.directing.iter().zip(&infinite) {
            if d.arity() != 1 {
                return bad(format!("component {ci}: directing measure of {} has arity {}", c.name, d.arity()));
            }
            if let Some(t) = d.support().find(|t| !c.contains(&t[0])) {
                return bad(format!("component {ci}: atom {} not in alphabet of {}", t[0], c.name));
            }
        }
    }
    if total != rational::one() {
        return bad(format!("component weights sum to {}", rational::to_string(&total)));
    }
    Ok(())
}

/// Realized particles of one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassRealization {
    Finite(Vec<Atom>),
    /// First `M` particles of an infinite class and, when the generator
    /// exposes it, the directing measure they were drawn from.
    Infinite {
        prefix: Vec<Atom>,
        directing: Option<DiscreteMeasure>,
    },
}

impl ClassRealization {
    pub fn atoms(&self) -> &[Atom] {
        match self {
            ClassRealization::Finite(a) => a,
            ClassRealization::Infinite { prefix, .. } => prefix,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemRealization {
    pub classes: Vec<ClassRealization>,
}

impl SystemRealization {
    pub fn flatten(&self) -> Vec<Atom> {
        self.classes.iter().flat_map(|c| c.atoms().iter().cloned()).collect()
    }

    /// Replaces every missing directing measure by the empirical measure of
    /// the prefix.
    pub fn with_estimated_directing(&self) -> Result<SystemRealization, MulticlassError> {
        let classes = self
            .classes
            .iter()
            .map(|c| match c {
                ClassRealization::Infinite { prefix, directing: None } => Ok(ClassRealization::Infinite {
                    prefix: prefix.clone(),
                    directing: Some(empirical_measure(prefix)?),
                }),
                other => Ok(other.clone()),
            })
            .collect::<Result<_, MulticlassError>>()?;
        Ok(SystemRealization { classes })
    }
}

/// Per class: empirical measure of a finite class, directing (or estimated
/// directing) measure of an infinite one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeasureVector(pub Vec<DiscreteMeasure>);

impl MeasureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, class: usize) -> &DiscreteMeasure {
        &self.0[class]
    }
}

/// `(1/N) Σ δ_{x_n}`.
pub fn empirical_measure(t: &[Atom]) -> Result<DiscreteMeasure, MulticlassError> {
    if t.is_empty() {
        return Err(MulticlassError::EmptyTuple);
    }
    Ok(DiscreteMeasure::uniform(t.iter().map(|a| vec![a.clone()]))?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectingEstimate {
    pub measure: DiscreteMeasure,
    /// `k(k−1)/M`: bound on the total variation between `k` draws without
    /// replacement from the prefix and `k` i.i.d. draws from its empirical
    /// measure.
    pub truncation_bound: Rational,
}

/// Empirical measure of a length-`M` prefix, with the truncation bound for
/// samples of arity `k`.
pub fn estimate_directing_measure(prefix: &[Atom], k: usize) -> Result<DirectingEstimate, MulticlassError> {
    let measure = empirical_measure(prefix)?;
    if k == 0 {
        return Err(MulticlassError::Combinatorics(CombinatoricsError::KOutOfRange { n: prefix.len(), k }));
    }
    let truncation_bound = rational::ratio((k * (k - 1)) as i64, prefix.len() as i64);
    Ok(DirectingEstimate { measure, truncation_bound })
}

pub fn measure_vector(r: &SystemRealization) -> Result<MeasureVector, MulticlassError> {
    r.classes
        .iter()
        .map(|c| match c {
            ClassRealization::Finite(t) => empirical_measure(t),
            ClassRealization::Infinite { directing: Some(d), .. } => Ok(d.clone()),
            ClassRealization::Infinite { prefix, directing: None } => empirical_measure(prefix),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(MeasureVector)
}

/// Redraws each class independently given the measure vector: finite classes
/// are uniformly permuted, infinite classes get `M` fresh i.i.d. draws from
/// their directing measure, which is carried over unchanged.
///
/// Class `i` uses substream `i` of a stream keyed by one draw from `rng`.
pub fn conditional_resample(r: &SystemRealization, rng: &mut RngStream) -> Result<SystemRealization, MulticlassError> {
    let base = RngStream::new(rng.next_u64(), rng.stream_id());
    let mut classes = Vec::with_capacity(r.classes.len());
    for (i, c) in r.classes.iter().enumerate() {
        let mut sub = base.fork(i as u64);
        classes.push(match c {
            ClassRealization::Finite(t) => {
                let perm = random_permutation(t.len(), &mut sub);
                ClassRealization::Finite(perm.into_iter().map(|p| t[p].clone()).collect())
            }
            ClassRealization::Infinite { prefix, directing: Some(d) } => ClassRealization::Infinite {
                prefix: sample_iid(d, prefix.len(), &mut sub)?,
                directing: Some(d.clone()),
            },
            ClassRealization::Infinite { directing: None, .. } => {
                return Err(MulticlassError::MissingDirectingMeasure(i))
            }
        });
    }
    Ok(SystemRealization { classes })
}

/// Sampler for an exact spec: draw the latent component, then the finite block
/// and the infinite prefixes given it.
pub struct LatentSampler {
    layout: Vec<ClassSpec>,
    weights: Categorical,
    finite: Vec<Option<Categorical>>,
    directing: Vec<Vec<(DiscreteMeasure, Categorical)>>,
}

impl LatentSampler {
    pub fn new(spec: &SystemSpec) -> Result<Self, MulticlassError> {
        let comps = spec.components()?;
        let index_law = DiscreteMeasure::new(
            comps.iter().enumerate().map(|(i, c)| (vec![Atom::new(&i.to_string())], c.weight.clone())),
        )?;
        // Component labels are decimal strings, parsed back when sampling.
        Ok(LatentSampler {
            layout: spec.classes.clone(),
            weights: Categorical::new(&index_law),
            finite: comps.iter().map(|c| c.finite_law.as_ref().map(Categorical::new)).collect(),
            directing: comps
                .iter()
                .map(|c| c.directing.iter().map(|d| (d.clone(), Categorical::new(d))).collect())
                .collect(),
        })
    }
}

impl SystemSampler for LatentSampler {
    fn sample(&self, rng: &mut RngStream) -> SystemRealization {
        let label = self.weights.sample(rng)[0].as_str().parse::<usize>().expect("numeric label");
        let finite_block: Vec<Atom> = self.finite[label].as_ref().map(|c| c.sample(rng).to_vec()).unwrap_or_default();
        let mut pos = 0;
        let mut inf = 0;
        let mut classes = Vec::with_capacity(self.layout.len());
        for c in &self.layout {
            if c.is_finite() {
                let n = c.sample_len();
                classes.push(ClassRealization::Finite(finite_block[pos..pos + n].to_vec()));
                pos += n;
            } else {
                let (d, cat) = &self.directing[label][inf];
                inf += 1;
                let prefix = (0..c.sample_len()).map(|_| cat.sample(rng)[0].clone()).collect();
                classes.push(ClassRealization::Infinite { prefix, directing: Some(d.clone()) });
            }
        }
        SystemRealization { classes }
    }
}
