//! Laws of ordered sampling from an urn of `N` labelled, possibly equal points.
//!
//! * [`law_without_replacement`] is `λ^{N,k}`: the uniform law over the `(N)_k`
//!   ordered tuples of distinct indices, pushed to the points.
//! * [`law_with_replacement`] is the `k`-fold product of the empirical measure.
//! * [`decompose_product_power`] splits the product law by the number of
//!   distinct indices drawn, which is what makes `λ^{N,k}` a polynomial
//!   function of the empirical measure (see
//!   [`law_without_replacement_from_empirical`]).
//! * [`tv_gap_bounds`] and [`check_equality_condition`] measure how far apart
//!   the two sampling schemes are.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::measures::{
    push_forward_pattern, stirling2, tensor_power, tv_distance, Atom, DiscreteMeasure, IndexPattern, MeasureError,
    SignedWeights,
};
use crate::rational::{self, Rational};
use crate::ENUMERATION_LIMIT;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("k = {k} is outside 1..={n}")]
    KOutOfRange { n: usize, k: usize },
    #[error("an urn needs at least one point")]
    EmptyUrn,
    #[error("{count} index tuples exceed the enumeration limit {limit}")]
    TooLargeToEnumerate { count: String, limit: u128 },
    #[error("measure is not the empirical measure of {n} points")]
    NotEmpirical { n: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// `N` points in a fixed order; duplicates allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Urn {
    points: Vec<Atom>,
}

impl Urn {
    pub fn new(points: Vec<Atom>) -> Result<Self, CombinatoricsError> {
        if points.is_empty() {
            return Err(CombinatoricsError::EmptyUrn);
        }
        Ok(Urn { points })
    }

    /// `"a,a,b"` (or `"aab"` for single-character symbols).
    pub fn parse(text: &str) -> Result<Self, CombinatoricsError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(CombinatoricsError::EmptyUrn);
        }
        Self::new(crate::measures::tuple(text))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Atom] {
        &self.points
    }

    /// `λ^{N,1}`, the empirical measure of the points.
    pub fn empirical(&self) -> DiscreteMeasure {
        let mut counts: BTreeMap<Vec<Atom>, u64> = BTreeMap::new();
        for p in &self.points {
            *counts.entry(vec![p.clone()]).or_default() += 1;
        }
        DiscreteMeasure::from_counts(counts).expect("urn is non-empty")
    }

    pub fn has_distinct_points(&self) -> bool {
        let mut sorted = self.points.clone();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    fn check_k(&self, k: usize) -> Result<(), CombinatoricsError> {
        check_range(self.len(), k)
    }
}

impl std::fmt::Display for Urn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<&str> = self.points.iter().map(Atom::as_str).collect();
        f.write_str(&parts.join(","))
    }
}

fn check_range(n: usize, k: usize) -> Result<(), CombinatoricsError> {
    if k == 0 || k > n {
        return Err(CombinatoricsError::KOutOfRange { n, k });
    }
    Ok(())
}

/// Refuses exact enumeration when `N^k` exceeds [`ENUMERATION_LIMIT`].
pub fn guard_enumeration(n: usize, k: usize) -> Result<(), CombinatoricsError> {
    let count = BigUint::from(n).pow(k as u32);
    if count > BigUint::from(ENUMERATION_LIMIT) {
        return Err(CombinatoricsError::TooLargeToEnumerate { count: count.to_string(), limit: ENUMERATION_LIMIT });
    }
    Ok(())
}

/// `(N)_k = N (N-1) ⋯ (N-k+1)`.
pub fn falling_factorial(n: usize, k: usize) -> Result<BigUint, CombinatoricsError> {
    check_range(n, k)?;
    Ok(falling(n, k))
}

/// Unchecked falling factorial; `(N)_0 = 1` and `(N)_k = 0` for `k > N`.
pub(crate) fn falling(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    ((n - k + 1)..=n).fold(BigUint::one(), |acc, f| acc * BigUint::from(f))
}

fn big(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

/// Calls `visit` with every ordered tuple of `k` distinct indices below `n`.
fn for_each_distinct_indices(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(n: usize, k: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, k, used, cur, visit);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(n, k, &mut vec![false; n], &mut Vec::with_capacity(k), &mut visit);
}

/// `λ^{N,k}`: law of `k` ordered draws without replacement.
pub fn law_without_replacement(urn: &Urn, k: usize) -> Result<DiscreteMeasure, CombinatoricsError> {
    urn.check_k(k)?;
    guard_enumeration(urn.len(), k)?;
    let mut counts: BTreeMap<Vec<Atom>, u64> = BTreeMap::new();
    for_each_distinct_indices(urn.len(), k, |idx| {
        let t = idx.iter().map(|&i| urn.points[i].clone()).collect();
        *counts.entry(t).or_default() += 1;
    });
    Ok(DiscreteMeasure::from_counts(counts)?)
}

/// `(λ^{N,1})^{⊗k}`: law of `k` ordered draws with replacement.
pub fn law_with_replacement(urn: &Urn, k: usize) -> Result<DiscreteMeasure, CombinatoricsError> {
    if k == 0 {
        return Err(CombinatoricsError::KOutOfRange { n: urn.len(), k });
    }
    guard_enumeration(urn.len(), k)?;
    Ok(tensor_power(&urn.empirical(), k)?)
}

/// Rebuilds `λ^{N,k}` from `λ^{N,1}` and `N` alone, by running the
/// collision decomposition backwards one `k` at a time:
///
/// `(N)_k λ^{N,k} = N^k (λ^{N,1})^{⊗k} − Σ_{j<k} (N)_j Σ_{|p|=j} p_*(λ^{N,j})`.
pub fn law_without_replacement_from_empirical(
    empirical: &DiscreteMeasure,
    n: usize,
    k: usize,
) -> Result<DiscreteMeasure, CombinatoricsError> {
    check_range(n, k)?;
    guard_enumeration(n, k)?;
    if empirical.arity() != 1 {
        return Err(MeasureError::ArityNotOne(empirical.arity()).into());
    }
    let n_q = rational::int(n as u64);
    if empirical.iter().any(|(_, w)| !(w * &n_q).is_integer()) {
        return Err(CombinatoricsError::NotEmpirical { n });
    }
    let mut laws: Vec<DiscreteMeasure> = vec![empirical.clone()];
    for m in 2..=k {
        let mut acc = SignedWeights::default();
        let n_pow_m = n_q.pow(m as i32);
        acc.add_scaled(&tensor_power(empirical, m)?, &n_pow_m);
        for j in 1..m {
            let coeff = -big(&falling(n, j));
            for p in IndexPattern::with_image_size(m, j) {
                acc.add_scaled(&push_forward_pattern(&laws[j - 1], &p)?, &coeff);
            }
        }
        let scale = big(&falling(n, m)).recip();
        let mut out = SignedWeights::default();
        out.add_signed(&acc, &scale);
        laws.push(out.prune().into_measure()?);
    }
    Ok(laws.pop().expect("k >= 1"))
}

/// One summand of the collision decomposition: all index tuples with exactly
/// `image_size` distinct indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTerm {
    pub image_size: usize,
    /// Fraction of the `N^k` index tuples with this many distinct indices:
    /// `S(k, j) (N)_j / N^k`.
    pub coefficient: Rational,
    /// Normalized law of the drawn points given this collision count; the
    /// average over patterns `p` with `j` labels of `p_*(λ^{N,j})`.
    pub measure: DiscreteMeasure,
    pub patterns: Vec<IndexPattern>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub n: usize,
    pub k: usize,
    pub terms: Vec<DecompositionTerm>,
}

impl Decomposition {
    /// `Σ_j coefficient_j · measure_j`.
    pub fn reconstruct(&self) -> Result<DiscreteMeasure, MeasureError> {
        let mut acc = SignedWeights::default();
        for t in &self.terms {
            acc.add_scaled(&t.measure, &t.coefficient);
        }
        acc.prune().into_measure()
    }

    pub fn coefficient_sum(&self) -> Rational {
        self.terms.iter().map(|t| &t.coefficient).sum()
    }

    /// Term with all indices distinct, `((N)_k/N^k) λ^{N,k}`.
    pub fn distinct_term(&self) -> &DecompositionTerm {
        self.terms.last().expect("k >= 1")
    }
}

/// Splits `(λ^{N,1})^{⊗k}` by the number `j` of distinct indices drawn.
pub fn decompose_product_power(urn: &Urn, k: usize) -> Result<Decomposition, CombinatoricsError> {
    urn.check_k(k)?;
    guard_enumeration(urn.len(), k)?;
    let n = urn.len();
    let n_pow_k = rational::int(n as u64).pow(k as i32);
    let mut terms = Vec::with_capacity(k);
    for j in 1..=k {
        let base = law_without_replacement(urn, j)?;
        let patterns = IndexPattern::with_image_size(k, j);
        let mut acc = SignedWeights::default();
        let share = Rational::new(BigInt::one(), BigInt::from(patterns.len()));
        for p in &patterns {
            acc.add_scaled(&push_forward_pattern(&base, p)?, &share);
        }
        let measure = acc.prune().into_measure()?;
        let coefficient = rational::int(stirling2(k, j)) * big(&falling(n, j)) / &n_pow_k;
        terms.push(DecompositionTerm { image_size: j, coefficient, measure, patterns });
    }
    Ok(Decomposition { n, k, terms })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapBounds {
    pub n: usize,
    pub k: usize,
    /// `2 (N^k − (N)_k) / N^k`.
    pub exact_gap_bound: Rational,
    /// `k (k − 1) / N`.
    pub coarse_bound: Rational,
}

pub fn tv_gap_bounds(n: usize, k: usize) -> Result<GapBounds, CombinatoricsError> {
    check_range(n, k)?;
    let n_pow_k = BigUint::from(n).pow(k as u32);
    let exact_gap_bound = rational::int(2) * (big(&n_pow_k) - big(&falling(n, k))) / big(&n_pow_k);
    let coarse_bound = Rational::new(BigInt::from(k * (k - 1)), BigInt::from(n));
    Ok(GapBounds { n, k, exact_gap_bound, coarse_bound })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityCheck {
    pub bounds: GapBounds,
    /// `‖λ^{N,k} − (λ^{N,1})^{⊗k}‖`.
    pub actual_tv: Rational,
    pub is_equality: bool,
    pub points_distinct: bool,
}

impl EqualityCheck {
    /// Both inequalities hold and, for `k ≥ 2`, equality occurs exactly when
    /// the points are distinct. At `k = 1` both sides are zero for every urn.
    pub fn consistent(&self) -> bool {
        let ordered =
            self.actual_tv <= self.bounds.exact_gap_bound && self.bounds.exact_gap_bound <= self.bounds.coarse_bound;
        let iff = self.bounds.k < 2 || self.is_equality == self.points_distinct;
        ordered && iff
    }
}

pub fn check_equality_condition(urn: &Urn, k: usize) -> Result<EqualityCheck, CombinatoricsError> {
    let bounds = tv_gap_bounds(urn.len(), k)?;
    let without = law_without_replacement(urn, k)?;
    let with = law_with_replacement(urn, k)?;
    let actual_tv = tv_distance(&without, &with)?;
    Ok(EqualityCheck {
        is_equality: actual_tv == bounds.exact_gap_bound,
        actual_tv,
        points_distinct: urn.has_distinct_points(),
        bounds,
    })
}

/// Exact count `(N)_k` as `u128`, when it fits.
pub fn falling_factorial_u128(n: usize, k: usize) -> Option<u128> {
    falling_factorial(n, k).ok()?.to_u128()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::tuple;
    use crate::rational::ratio;

    fn m(pairs: &[(&str, (i64, i64))]) -> DiscreteMeasure {
        DiscreteMeasure::new(pairs.iter().map(|(t, (n, d))| (tuple(t), ratio(*n, *d)))).unwrap()
    }

    fn urn(s: &str) -> Urn {
        Urn::parse(s).unwrap()
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(7, 1).unwrap(), BigUint::from(7u32));
        assert_eq!(falling_factorial(5, 3).unwrap(), BigUint::from(60u32));
        assert_eq!(falling_factorial(4, 4).unwrap(), BigUint::from(24u32));
        assert_eq!(falling_factorial(3, 4), Err(CombinatoricsError::KOutOfRange { n: 3, k: 4 }));
        assert_eq!(falling_factorial(3, 0), Err(CombinatoricsError::KOutOfRange { n: 3, k: 0 }));
        assert_eq!(falling_factorial_u128(10, 3), Some(720));
    }

    #[test]
    fn without_replacement_examples() {
        assert_eq!(law_without_replacement(&urn("ab"), 2).unwrap(), m(&[("ab", (1, 2)), ("ba", (1, 2))]));
        assert_eq!(
            law_without_replacement(&urn("aab"), 2).unwrap(),
            m(&[("aa", (1, 3)), ("ab", (1, 3)), ("ba", (1, 3))])
        );
        let u = urn("abca");
        assert_eq!(law_without_replacement(&u, 1).unwrap(), u.empirical());
        assert!(matches!(law_without_replacement(&u, 5), Err(CombinatoricsError::KOutOfRange { .. })));
    }

    #[test]
    fn with_replacement_examples() {
        assert_eq!(
            law_with_replacement(&urn("aab"), 2).unwrap(),
            m(&[("aa", (4, 9)), ("ab", (2, 9)), ("ba", (2, 9)), ("bb", (1, 9))])
        );
        assert_eq!(law_with_replacement(&urn("a"), 4).unwrap(), DiscreteMeasure::dirac(tuple("aaaa")).unwrap());
        assert_eq!(law_with_replacement(&urn("ab"), 1).unwrap(), m(&[("a", (1, 2)), ("b", (1, 2))]));
        // With replacement has no k ≤ N restriction.
        assert_eq!(law_with_replacement(&urn("ab"), 3).unwrap().arity(), 3);
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_product_power(&urn("abc"), 1).unwrap();
        assert_eq!(d.terms.len(), 1);
        assert_eq!(d.terms[0].coefficient, ratio(1, 1));
        assert_eq!(d.terms[0].measure, urn("abc").empirical());

        let d = decompose_product_power(&urn("aab"), 2).unwrap();
        assert_eq!(d.terms[1].coefficient, ratio(6, 9));
        assert_eq!(d.terms[1].measure, m(&[("aa", (1, 3)), ("ab", (1, 3)), ("ba", (1, 3))]));
        assert_eq!(d.terms[0].coefficient, ratio(3, 9));
        assert_eq!(d.terms[0].measure, m(&[("aa", (2, 3)), ("bb", (1, 3))]));
        assert_eq!(d.reconstruct().unwrap(), m(&[("aa", (4, 9)), ("ab", (2, 9)), ("ba", (2, 9)), ("bb", (1, 9))]));

        let d = decompose_product_power(&urn("aaaa"), 4).unwrap();
        let point = DiscreteMeasure::dirac(tuple("aaaa")).unwrap();
        assert!(d.terms.iter().all(|t| t.measure == point));
        assert_eq!(d.reconstruct().unwrap(), point);
        assert_eq!(d.coefficient_sum(), ratio(1, 1));
    }

    #[test]
    fn gap_bound_examples() {
        let b = tv_gap_bounds(9, 1).unwrap();
        assert_eq!((b.exact_gap_bound, b.coarse_bound), (ratio(0, 1), ratio(0, 1)));
        let b = tv_gap_bounds(3, 2).unwrap();
        assert_eq!((b.exact_gap_bound, b.coarse_bound), (ratio(2, 3), ratio(2, 3)));
        let b = tv_gap_bounds(10, 3).unwrap();
        assert_eq!((b.exact_gap_bound, b.coarse_bound), (ratio(14, 25), ratio(3, 5)));
        assert!(tv_gap_bounds(2, 3).is_err());
    }

    #[test]
    fn equality_condition_examples() {
        let c = check_equality_condition(&urn("abc"), 2).unwrap();
        assert!(c.is_equality && c.points_distinct && c.consistent());
        assert_eq!(c.actual_tv, ratio(2, 3));

        let c = check_equality_condition(&urn("aab"), 2).unwrap();
        assert!(!c.is_equality && !c.points_distinct && c.consistent());
        assert_eq!(c.actual_tv, ratio(4, 9));

        let c = check_equality_condition(&urn("aab"), 1).unwrap();
        assert_eq!(c.actual_tv, ratio(0, 1));
        assert!(c.is_equality && !c.points_distinct && c.consistent());
    }

    #[test]
    fn from_empirical_matches_direct() {
        for s in ["aab", "abcab", "aaaa", "abcdef", "aabbb"] {
            let u = urn(s);
            for k in 1..=u.len() {
                assert_eq!(
                    law_without_replacement_from_empirical(&u.empirical(), u.len(), k).unwrap(),
                    law_without_replacement(&u, k).unwrap(),
                    "{s} k={k}"
                );
            }
        }
        let not_emp = m(&[("a", (1, 2)), ("b", (1, 2))]);
        assert_eq!(
            law_without_replacement_from_empirical(&not_emp, 3, 2),
            Err(CombinatoricsError::NotEmpirical { n: 3 })
        );
    }

    #[test]
    fn guard_refuses_large_enumerations() {
        let u = Urn::new(vec![Atom::new("a"); 60]).unwrap();
        assert!(matches!(law_without_replacement(&u, 4), Err(CombinatoricsError::TooLargeToEnumerate { .. })));
        assert!(law_without_replacement(&u, 3).is_ok());
    }

    #[test]
    fn urn_parsing() {
        assert_eq!(Urn::parse(""), Err(CombinatoricsError::EmptyUrn));
        assert_eq!(urn("a,bb,a").points().len(), 3);
        assert_eq!(urn("a,bb,a").to_string(), "a,bb,a");
        assert!(!urn("aba").has_distinct_points());
        assert!(urn("abc").has_distinct_points());
    }
}
