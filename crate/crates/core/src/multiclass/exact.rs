//! Brute-force joint laws of small systems and the exact sufficiency check.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{empirical_measure, LatentComponent, MeasureVector, MulticlassError, SystemSpec};
use crate::combinatorics::{law_without_replacement, Urn};
use crate::measures::{tensor_power, Atom, DiscreteMeasure};
use crate::rational::{self, Rational};
use crate::ENUMERATION_LIMIT;

fn guard(spec: &SystemSpec) -> Result<(), MulticlassError> {
    let mut count = BigUint::zero();
    for c in spec.components()? {
        let mut n = BigUint::from(c.finite_law.as_ref().map_or(1, |l| l.support_len()));
        let infinite = spec.classes().iter().filter(|c| !c.is_finite());
        for (d, class) in c.directing.iter().zip(infinite) {
            n *= BigUint::from(d.support_len()).pow(class.sample_len() as u32);
        }
        count += n;
    }
    if count > BigUint::from(ENUMERATION_LIMIT) {
        return Err(MulticlassError::TooLargeToEnumerate { count: count.to_string(), limit: ENUMERATION_LIMIT });
    }
    Ok(())
}

/// Law of the flattened realization given one latent component.
fn component_law(spec: &SystemSpec, comp: &LatentComponent) -> Result<DiscreteMeasure, MulticlassError> {
    // Laid out as [finite block][infinite class 1][infinite class 2]...
    let mut law: Option<DiscreteMeasure> = comp.finite_law.clone();
    let infinite = spec.classes().iter().filter(|c| !c.is_finite());
    for (d, class) in comp.directing.iter().zip(infinite) {
        let block = tensor_power(d, class.sample_len())?;
        law = Some(match law {
            None => block,
            Some(l) => l.product(&block),
        });
    }
    let law = law.expect("at least one class");
    let order = layout_order(spec);
    if order.iter().enumerate().all(|(i, &j)| i == j) {
        return Ok(law);
    }
    Ok(law.map_tuples(|t| order.iter().map(|&j| t[j].clone()).collect())?)
}

/// For each flat (class order) coordinate, its index in the
/// finite-first layout used by [`component_law`].
fn layout_order(spec: &SystemSpec) -> Vec<usize> {
    let finite_len = spec.finite_len();
    let mut fin = 0;
    let mut inf = finite_len;
    let mut order = Vec::with_capacity(spec.flat_len());
    for c in spec.classes() {
        for _ in 0..c.sample_len() {
            if c.is_finite() {
                order.push(fin);
                fin += 1;
            } else {
                order.push(inf);
                inf += 1;
            }
        }
    }
    order
}

/// Exact law of the flattened realization (infinite classes truncated at
/// `M`), with the latent component marginalized out.
pub fn joint_law_exact(spec: &SystemSpec) -> Result<DiscreteMeasure, MulticlassError> {
    guard(spec)?;
    let comps = spec.components()?;
    let laws = comps.iter().map(|c| component_law(spec, c)).collect::<Result<Vec<_>, _>>()?;
    Ok(DiscreteMeasure::mixture(comps.iter().map(|c| &c.weight).zip(laws.iter()))?)
}

/// Joint law of `(measure vector, flattened realization)`, stored as
/// unnormalized cells keyed by the measure vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedLaw {
    pub cells: BTreeMap<MeasureVector, BTreeMap<Vec<Atom>, Rational>>,
}

impl AugmentedLaw {
    /// Law of the measure vector.
    pub fn measure_vector_law(&self) -> BTreeMap<MeasureVector, Rational> {
        self.cells.iter().map(|(mv, cell)| (mv.clone(), cell.values().sum())).collect()
    }

    /// Conditional law of the realization given a measure vector value.
    pub fn conditional(&self, mv: &MeasureVector) -> Option<DiscreteMeasure> {
        let cell = self.cells.get(mv)?;
        let total: Rational = cell.values().sum();
        DiscreteMeasure::new(cell.iter().map(|(t, w)| (t.clone(), w / &total))).ok()
    }

    /// Law of the realization alone.
    pub fn flat_law(&self) -> Result<DiscreteMeasure, MulticlassError> {
        let mut acc: BTreeMap<Vec<Atom>, Rational> = BTreeMap::new();
        for cell in self.cells.values() {
            for (t, w) in cell {
                *acc.entry(t.clone()).or_insert_with(rational::zero) += w;
            }
        }
        Ok(DiscreteMeasure::new(acc)?)
    }

    pub fn outcome_count(&self) -> usize {
        self.cells.values().map(BTreeMap::len).sum()
    }
}

/// Measure vector of a flattened outcome drawn under latent component `comp`.
fn outcome_measure_vector(
    spec: &SystemSpec,
    comp: &LatentComponent,
    flat: &[Atom],
) -> Result<MeasureVector, MulticlassError> {
    let mut inf = 0;
    let mut out = Vec::with_capacity(spec.classes().len());
    for (c, block) in spec.classes().iter().zip(spec.blocks()) {
        if c.is_finite() {
            out.push(empirical_measure(&flat[block])?);
        } else {
            out.push(comp.directing[inf].clone());
            inf += 1;
        }
    }
    Ok(MeasureVector(out))
}

pub fn augmented_law(spec: &SystemSpec) -> Result<AugmentedLaw, MulticlassError> {
    guard(spec)?;
    let mut cells: BTreeMap<MeasureVector, BTreeMap<Vec<Atom>, Rational>> = BTreeMap::new();
    for comp in spec.components()? {
        let law = component_law(spec, comp)?;
        for (t, w) in law.iter() {
            let mv = outcome_measure_vector(spec, comp, t)?;
            *cells.entry(mv).or_default().entry(t.clone()).or_insert_with(rational::zero) += w * &comp.weight;
        }
    }
    Ok(AugmentedLaw { cells })
}

/// The resampling kernel given a measure vector: per class, `λ^{N,N}` of the
/// atoms of a finite class counted with multiplicity, or `Λ^{⊗M}` for an
/// infinite one; independent across classes.
pub fn conditional_kernel(spec: &SystemSpec, mv: &MeasureVector) -> Result<DiscreteMeasure, MulticlassError> {
    if mv.len() != spec.classes().len() {
        return Err(MulticlassError::LayoutMismatch(format!(
            "{} measures for {} classes",
            mv.len(),
            spec.classes().len()
        )));
    }
    let mut kernel: Option<DiscreteMeasure> = None;
    for (c, lambda) in spec.classes().iter().zip(&mv.0) {
        let n = c.sample_len();
        let block = if c.is_finite() {
            law_without_replacement(&urn_of_empirical(lambda, n)?, n)?
        } else {
            tensor_power(lambda, n)?
        };
        kernel = Some(match kernel {
            None => block,
            Some(k) => k.product(&block),
        });
    }
    Ok(kernel.expect("at least one class"))
}

/// The `n` atoms of an empirical measure, counted with multiplicity.
fn urn_of_empirical(lambda: &DiscreteMeasure, n: usize) -> Result<Urn, MulticlassError> {
    let n_q = rational::int(n as u64);
    let mut points = Vec::with_capacity(n);
    for (t, w) in lambda.iter() {
        let count = w * &n_q;
        if !count.is_integer() {
            return Err(MulticlassError::LayoutMismatch(format!(
                "{lambda:?} is not the empirical measure of {n} points"
            )));
        }
        let count = count.to_integer().to_usize().expect("count fits in usize");
        points.extend(std::iter::repeat_n(t[0].clone(), count));
    }
    Ok(Urn::new(points)?)
}

fn swap_positions(spec: &SystemSpec) -> Vec<usize> {
    spec.blocks().into_iter().flat_map(|b| b.start..b.end.saturating_sub(1)).collect()
}

/// Invariance of the joint pmf under every adjacent transposition inside each
/// class block (these generate the within-class permutation groups).
pub fn check_multi_exchangeability(joint: &DiscreteMeasure, spec: &SystemSpec) -> Result<bool, MulticlassError> {
    if joint.arity() != spec.flat_len() {
        return Err(MulticlassError::LayoutMismatch(format!(
            "joint law has arity {}, system has {} coordinates",
            joint.arity(),
            spec.flat_len()
        )));
    }
    if joint.support_len() as u128 > ENUMERATION_LIMIT {
        return Err(MulticlassError::TooLargeToEnumerate {
            count: joint.support_len().to_string(),
            limit: ENUMERATION_LIMIT,
        });
    }
    for p in swap_positions(spec) {
        let swapped = joint.map_tuples(|t| {
            let mut s = t.to_vec();
            s.swap(p, p + 1);
            s
        })?;
        if &swapped != joint {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Invariance of the joint law of (directing measures, realization). Unlike
/// [`check_multi_exchangeability`] this does not depend on the truncation `M`
/// being large enough to separate distinct directing measures.
pub fn check_augmented_exchangeability(aug: &AugmentedLaw, spec: &SystemSpec) -> bool {
    let positions = swap_positions(spec);
    aug.cells.values().all(|cell| {
        positions.iter().all(|&p| {
            cell.iter().all(|(t, w)| {
                let mut s = t.clone();
                s.swap(p, p + 1);
                cell.get(&s) == Some(w)
            })
        })
    })
}

fn product_of_blocks(mu: &DiscreteMeasure, spec: &SystemSpec) -> Result<DiscreteMeasure, MulticlassError> {
    let mut out: Option<DiscreteMeasure> = None;
    for block in spec.blocks() {
        let coords: Vec<usize> = block.collect();
        let m = mu.marginal(&coords)?;
        out = Some(match out {
            None => m,
            Some(o) => o.product(&m),
        });
    }
    Ok(out.expect("at least one class"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SufficiencyReport {
    pub outcomes: usize,
    pub measure_vectors: usize,
    /// `P(Λ) K_Λ(x) = P(Λ, x)` for every measure vector value and outcome.
    pub kernel_reproduces_law: bool,
    /// `Σ_Λ P(Λ) K_Λ` equals the law of the realization.
    pub composed_law_matches: bool,
    /// Given each measure vector value, the realization's conditional law is
    /// the product of its class marginals.
    pub conditionally_factorizes: bool,
    /// Whether the unconditional law is the product of its class marginals.
    /// `false` for coupled systems: independence only appears after
    /// conditioning.
    pub unconditionally_factorizes: bool,
}

impl SufficiencyReport {
    pub fn holds(&self) -> bool {
        self.kernel_reproduces_law && self.composed_law_matches && self.conditionally_factorizes
    }
}

/// Exact check that resampling each class independently given the measure
/// vector reproduces the law of the system.
pub fn verify_sufficiency(spec: &SystemSpec) -> Result<SufficiencyReport, MulticlassError> {
    let joint = joint_law_exact(spec)?;
    let aug = augmented_law(spec)?;
    if !check_multi_exchangeability(&joint, spec)? || !check_augmented_exchangeability(&aug, spec) {
        return Err(MulticlassError::NotMultiExchangeable);
    }

    let mv_law = aug.measure_vector_law();
    let mut kernel_reproduces_law = true;
    let mut conditionally_factorizes = true;
    let mut composed: BTreeMap<Vec<Atom>, Rational> = BTreeMap::new();
    for (mv, p_mv) in &mv_law {
        let kernel = conditional_kernel(spec, mv)?;
        let cell = &aug.cells[mv];
        let matches =
            kernel.support_len() == cell.len() && kernel.iter().all(|(t, k)| cell.get(t) == Some(&(k * p_mv)));
        kernel_reproduces_law &= matches;
        for (t, k) in kernel.iter() {
            *composed.entry(t.clone()).or_insert_with(rational::zero) += k * p_mv;
        }

        let conditional = aug.conditional(mv).expect("cells have positive mass");
        conditionally_factorizes &= product_of_blocks(&conditional, spec)? == conditional;
    }
    let composed_law_matches = DiscreteMeasure::new(composed)? == joint;
    let unconditionally_factorizes = product_of_blocks(&joint, spec)? == joint;

    Ok(SufficiencyReport {
        outcomes: joint.support_len(),
        measure_vectors: mv_law.len(),
        kernel_reproduces_law,
        composed_law_matches,
        conditionally_factorizes,
        unconditionally_factorizes,
    })
}
