//! Convergence in law of a family of multi-exchangeable systems, tested on
//! finite moment batteries.
//!
//! A [`SystemFamily`] maps grid values `r` (and a `LIMIT` member) to exact
//! system specs with one common class structure. Two batteries are compared
//! against the limit member:
//!
//! * finite-dimensional moments `E[Π_i f_i(X_{1,i}, …, X_{k_i,i})]`, with
//!   `f_i` a coordinate indicator and `k_i = N_i` for finite classes, `k`
//!   for infinite ones;
//! * measure-vector moments `E[g(Λ_1, …, Λ_C)]` for monomials `g` in the atom
//!   weights.
//!
//! Every finite-dimensional moment is a fixed polynomial in the measure
//! vector ([`transfer_polynomial`]) and every measure-vector monomial is a
//! finite-dimensional moment ([`representing_test`]). Both identities are
//! checked exactly at every grid point, and they turn small gaps of one
//! battery into small gaps of the other.

mod json;
mod polynomial;

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::combinatorics::falling;
use crate::measures::Atom;
use crate::multiclass::{
    augmented_law, check_augmented_exchangeability, check_multi_exchangeability, measure_vector, words, AugmentedLaw,
    ClassSize, ClassSpec, ClassTest, MulticlassError, SystemSpec, TestFunction,
};
use crate::rational::{self, Rational};
use crate::sampling::RngStream;
use crate::stats::{Estimate, MeanAccumulator};

pub use json::{FamilyDocument, FamilyMemberDocument};
pub use polynomial::{Monomial, Polynomial, Variable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConvergenceError {
    #[error("inconsistent family: {0}")]
    InconsistentFamily(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Multiclass(#[from] MulticlassError),
}

fn invalid(msg: impl Into<String>) -> ConvergenceError {
    ConvergenceError::InvalidParameter(msg.into())
}

/// A grid value or the limit member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyIndex {
    At(Rational),
    Limit,
}

impl fmt::Display for FamilyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyIndex::At(r) => write!(f, "{}", rational::to_string(r)),
            FamilyIndex::Limit => write!(f, "LIMIT"),
        }
    }
}

/// Systems indexed by positive grid values `r` plus a limit member, all with
/// the same classes.
#[derive(Debug, Clone)]
pub struct SystemFamily {
    members: Vec<(Rational, SystemSpec)>,
    limit: SystemSpec,
}

impl SystemFamily {
    /// Members are sorted by `r`. Grid values must be positive and distinct,
    /// and every member must have the classes of the limit.
    pub fn new(mut members: Vec<(Rational, SystemSpec)>, limit: SystemSpec) -> Result<Self, ConvergenceError> {
        let inconsistent = |m: String| ConvergenceError::InconsistentFamily(m);
        members.sort_by(|a, b| a.0.cmp(&b.0));
        for w in members.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(inconsistent(format!("grid value {} appears twice", rational::to_string(&w[0].0))));
            }
        }
        for (r, spec) in &members {
            if *r <= rational::zero() {
                return Err(inconsistent(format!("grid value {} is not positive", rational::to_string(r))));
            }
            if spec.classes() != limit.classes() {
                return Err(inconsistent(format!(
                    "member r={} has a class structure different from the limit",
                    rational::to_string(r)
                )));
            }
        }
        Ok(SystemFamily { members, limit })
    }

    /// Every grid value mapped to the limit itself.
    pub fn constant(limit: SystemSpec, grid: &[Rational]) -> Result<Self, ConvergenceError> {
        Self::new(grid.iter().map(|r| (r.clone(), limit.clone())).collect(), limit)
    }

    pub fn grid(&self) -> Vec<Rational> {
        self.members.iter().map(|(r, _)| r.clone()).collect()
    }

    pub fn members(&self) -> &[(Rational, SystemSpec)] {
        &self.members
    }

    pub fn limit(&self) -> &SystemSpec {
        &self.limit
    }

    pub fn classes(&self) -> &[ClassSpec] {
        self.limit.classes()
    }

    pub fn spec_at(&self, index: &FamilyIndex) -> Option<&SystemSpec> {
        match index {
            FamilyIndex::Limit => Some(&self.limit),
            FamilyIndex::At(r) => self.members.iter().find(|(q, _)| q == r).map(|(_, s)| s),
        }
    }
}

/// `k_i`: `N_i` for a finite class, `k` for an infinite one (`k ≤ M`).
pub fn coordinate_counts(classes: &[ClassSpec], k: usize) -> Result<Vec<usize>, ConvergenceError> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    classes
        .iter()
        .map(|c| match c.size {
            ClassSize::Finite(n) => Ok(n),
            ClassSize::Infinite { truncation } if k <= truncation => Ok(k),
            ClassSize::Infinite { truncation } => {
                Err(invalid(format!("class {}: k = {k} exceeds the truncation {truncation}", c.name)))
            }
        })
        .collect()
}

/// Checks that `f` reads at most `k_i` coordinates of each class and, on
/// infinite classes, only coordinates.
fn check_fdd_test(classes: &[ClassSpec], f: &TestFunction, k: usize) -> Result<(), ConvergenceError> {
    if f.0.len() != classes.len() {
        return Err(invalid(format!("test function has {} factors for {} classes", f.0.len(), classes.len())));
    }
    let counts = coordinate_counts(classes, k)?;
    for ((t, c), k_i) in f.0.iter().zip(classes).zip(counts) {
        match t {
            ClassTest::One => {}
            ClassTest::Indicator(y) if y.len() <= k_i => {}
            ClassTest::Indicator(y) => {
                return Err(invalid(format!(
                    "class {}: indicator on {} coordinates, at most {k_i} allowed",
                    c.name,
                    y.len()
                )))
            }
            ClassTest::Moment(_) if c.is_finite() => {}
            ClassTest::Moment(_) => {
                return Err(invalid(format!("class {}: an infinite class has no empirical moment", c.name)))
            }
        }
    }
    Ok(())
}

fn check_polynomial(classes: &[ClassSpec], g: &Polynomial) -> Result<(), ConvergenceError> {
    for (m, _) in g.terms() {
        for (v, _) in m.powers() {
            if v.class >= classes.len() {
                return Err(invalid(format!("variable of class {} in a system of {} classes", v.class, classes.len())));
            }
        }
    }
    Ok(())
}

fn expect_test(spec: &SystemSpec, aug: &AugmentedLaw, f: &TestFunction) -> Result<Rational, ConvergenceError> {
    let mut acc = rational::zero();
    for (mv, cell) in &aug.cells {
        for (t, w) in cell {
            let r = spec.realization_from_flat(t, None)?;
            acc += w * f.eval(&r, mv);
        }
    }
    Ok(acc)
}

fn expect_polynomial(aug: &AugmentedLaw, g: &Polynomial) -> Rational {
    aug.measure_vector_law().iter().map(|(mv, w)| w * g.eval(mv)).sum()
}

/// `E[Π_i f_i(X_{1,i}, …, X_{k_i,i})]`, exactly.
pub fn fdd_moment(spec: &SystemSpec, f: &TestFunction, k: usize) -> Result<Rational, ConvergenceError> {
    check_fdd_test(spec.classes(), f, k)?;
    let aug = augmented_law(spec)?;
    expect_test(spec, &aug, f)
}

/// `E[g(Λ_1, …, Λ_C)]`, exactly.
pub fn vector_moment(spec: &SystemSpec, g: &Polynomial) -> Result<Rational, ConvergenceError> {
    check_polynomial(spec.classes(), g)?;
    let aug = augmented_law(spec)?;
    Ok(expect_polynomial(&aug, g))
}

const CHUNK: u64 = 2048;

/// Mean of `draw` over replications `0..reps`, replication `r` on stream
/// `(seed, r)`; chunks are merged in order, so the result does not depend
/// on the thread count.
fn monte_carlo<F>(reps: u64, seed: u64, draw: F) -> Result<Estimate, ConvergenceError>
where
    F: Fn(&mut RngStream) -> Result<f64, ConvergenceError> + Sync,
{
    if reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    let parts: Vec<MeanAccumulator> = (0..reps.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = MeanAccumulator::default();
            for rep in c * CHUNK..((c + 1) * CHUNK).min(reps) {
                acc.push(draw(&mut RngStream::new(seed, rep))?);
            }
            Ok(acc)
        })
        .collect::<Result<_, ConvergenceError>>()?;
    let mut total = MeanAccumulator::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.estimate())
}

/// Exact specs get their sampler built once rather than per draw.
fn sampling_form(spec: &SystemSpec) -> Result<SystemSpec, ConvergenceError> {
    Ok(if spec.is_exact() { spec.as_black_box()? } else { spec.clone() })
}

/// Monte Carlo estimate of [`fdd_moment`]; works for sampled specs.
pub fn fdd_moment_mc(
    spec: &SystemSpec,
    f: &TestFunction,
    k: usize,
    reps: u64,
    seed: u64,
) -> Result<Estimate, ConvergenceError> {
    check_fdd_test(spec.classes(), f, k)?;
    let spec = &sampling_form(spec)?;
    monte_carlo(reps, seed, |rng| {
        let x = spec.sample(rng)?;
        let mv = measure_vector(&x)?;
        Ok(f.eval_f64(&x, &mv))
    })
}

/// Monte Carlo estimate of [`vector_moment`]. Infinite classes whose
/// sampler hides the directing measure use the empirical measure of the
/// prefix.
pub fn vector_moment_mc(spec: &SystemSpec, g: &Polynomial, reps: u64, seed: u64) -> Result<Estimate, ConvergenceError> {
    check_polynomial(spec.classes(), g)?;
    let spec = &sampling_form(spec)?;
    monte_carlo(reps, seed, |rng| {
        let x = spec.sample(rng)?;
        Ok(rational::to_f64(&g.eval(&measure_vector(&x)?)))
    })
}

/// `Π_{t<m} (n·x − t)`.
fn falling_in(n: usize, x: &Polynomial, m: u32) -> Polynomial {
    let nx = x.scale(&rational::int(n));
    (0..m).fold(Polynomial::one(), |acc, t| acc.mul(&nx.add(&Polynomial::constant(rational::int(-(t as i64))))))
}

/// The polynomial `P` with `E[f(X) | Λ] = P(Λ)`.
///
/// An indicator of `y` on the first `m` particles of a finite class of size
/// `N` becomes `Π_a (N Λ(a))_{m_a} / (N)_m`, where `m_a` counts `a` in `y`:
/// the law of `m` draws without replacement from the class's own atoms. On
/// an infinite class it becomes `Π_a Λ(a)^{m_a}`.
pub fn transfer_polynomial(spec: &SystemSpec, f: &TestFunction) -> Result<Polynomial, ConvergenceError> {
    let classes = spec.classes();
    if f.0.len() != classes.len() {
        return Err(invalid(format!("test function has {} factors for {} classes", f.0.len(), classes.len())));
    }
    let mut out = Polynomial::one();
    for (i, (t, c)) in f.0.iter().zip(classes).enumerate() {
        let factor = match t {
            ClassTest::One => Polynomial::one(),
            ClassTest::Indicator(y) => {
                let mut counts: std::collections::BTreeMap<&Atom, u32> = Default::default();
                for a in y {
                    *counts.entry(a).or_insert(0) += 1;
                }
                match c.size {
                    ClassSize::Finite(n) => {
                        if y.len() > n {
                            return Err(invalid(format!("class {}: indicator longer than the class", c.name)));
                        }
                        let num = counts.iter().fold(Polynomial::one(), |acc, (a, m)| {
                            acc.mul(&falling_in(n, &Polynomial::monomial(Monomial::var(i, (*a).clone())), *m))
                        });
                        let den = Rational::from_integer(num_bigint::BigInt::from(falling(n, y.len())));
                        num.scale(&(rational::one() / den))
                    }
                    ClassSize::Infinite { .. } => counts.iter().fold(Polynomial::one(), |acc, (a, m)| {
                        (0..*m).fold(acc, |p, _| p.mul(&Polynomial::monomial(Monomial::var(i, (*a).clone()))))
                    }),
                }
            }
            ClassTest::Moment(powers) if c.is_finite() => powers.iter().fold(Polynomial::one(), |acc, (a, p)| {
                (0..*p).fold(acc, |q, _| q.mul(&Polynomial::monomial(Monomial::var(i, a.clone()))))
            }),
            ClassTest::Moment(_) => {
                return Err(invalid(format!("class {}: an infinite class has no empirical moment", c.name)))
            }
        };
        out = out.mul(&factor);
    }
    Ok(out)
}

/// A system test function with the same mean as the monomial `g`: the
/// empirical monomial of each finite class, and on each infinite class the
/// indicator that the first `deg` particles spell the atoms of `g` in order.
pub fn representing_test(spec: &SystemSpec, g: &Monomial) -> Result<TestFunction, ConvergenceError> {
    let mut tests = Vec::with_capacity(spec.classes().len());
    for (i, c) in spec.classes().iter().enumerate() {
        let powers = g.class_powers(i);
        tests.push(if powers.is_empty() {
            ClassTest::One
        } else {
            match c.size {
                ClassSize::Finite(_) => ClassTest::Moment(powers),
                ClassSize::Infinite { truncation } => {
                    let word: Vec<Atom> =
                        powers.iter().flat_map(|(a, p)| std::iter::repeat_n(a.clone(), *p as usize)).collect();
                    if word.len() > truncation {
                        return Err(invalid(format!(
                            "class {}: degree {} exceeds the truncation {truncation}",
                            c.name,
                            word.len()
                        )));
                    }
                    ClassTest::Indicator(word)
                }
            }
        });
    }
    if g.powers().any(|(v, _)| v.class >= spec.classes().len()) {
        return Err(invalid("monomial refers to a missing class"));
    }
    Ok(TestFunction(tests))
}

/// Products over classes of the constant and every indicator of the first
/// `k_i` particles; the all-constant product is omitted.
pub fn fdd_battery(classes: &[ClassSpec], k: usize) -> Result<Vec<TestFunction>, ConvergenceError> {
    let counts = coordinate_counts(classes, k)?;
    let mut out = vec![TestFunction(vec![])];
    for (c, k_i) in classes.iter().zip(counts) {
        let mut local = vec![ClassTest::One];
        local.extend(words(&c.alphabet, k_i).into_iter().map(ClassTest::Indicator));
        out = out
            .into_iter()
            .flat_map(|f| {
                local.iter().map(move |t| {
                    let mut g = f.0.clone();
                    g.push(t.clone());
                    TestFunction(g)
                })
            })
            .collect();
    }
    out.retain(|f| f.0.iter().any(|t| *t != ClassTest::One));
    Ok(out)
}

/// Every monomial of degree `1..=degree` in the atom weights of all classes.
pub fn vector_battery(classes: &[ClassSpec], degree: u32) -> Vec<Monomial> {
    let vars: Vec<Variable> = classes
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.alphabet.iter().map(move |a| Variable { class: i, atom: a.clone() }))
        .collect();
    Monomial::all_up_to(&vars, degree)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceOptions {
    pub k: usize,
    pub degree: u32,
    pub tolerance: Rational,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions { k: 2, degree: 3, tolerance: rational::ratio(1, 1000) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SupportsEquivalence,
    ContradictsEquivalence,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SupportsEquivalence => "SUPPORTS_EQUIVALENCE",
            Verdict::ContradictsEquivalence => "CONTRADICTS_EQUIVALENCE",
        })
    }
}

/// Values of one moment along the grid and at the limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentRow {
    pub label: String,
    pub limit: Rational,
    pub values: Vec<Rational>,
    pub gaps: Vec<Rational>,
}

/// Gaps at one grid value, all measured against the limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapRow {
    pub r: Rational,
    /// Max over the fdd battery.
    pub fdd_gap: Rational,
    /// Max over the vector battery.
    pub vector_gap: Rational,
    /// `max_f Σ_m |c_m| · gap_m`, from the transfer polynomials.
    pub fdd_bound: Rational,
    /// Max over the fdd battery and the representing tests of the vector
    /// battery.
    pub extended_fdd_gap: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub options: ConvergenceOptions,
    pub grid: Vec<Rational>,
    pub rows: Vec<GapRow>,
    pub fdd_moments: Vec<MomentRow>,
    pub vector_moments: Vec<MomentRow>,
    /// `L = max_f Σ |c_m|` over the non-constant terms of the transfer
    /// polynomials.
    pub transfer_constant: Rational,
    /// `L · tolerance`.
    pub derived_tolerance: Rational,
    /// Every fdd moment equals its transfer polynomial's vector moment, at
    /// every member.
    pub reconstruction_exact: bool,
    /// Every vector monomial equals the fdd moment of its representing test,
    /// at every member.
    pub representation_exact: bool,
    pub fdd_monotone: bool,
    pub vector_monotone: bool,
    /// `log(gap_i / gap_{i+1}) / log(r_{i+1} / r_i)` between consecutive
    /// grid values; `None` where a gap vanishes.
    pub fdd_rates: Vec<Option<f64>>,
    pub vector_rates: Vec<Option<f64>>,
    /// Small vector gaps force small fdd gaps.
    pub vector_to_system: Verdict,
    /// Small fdd gaps force small vector gaps.
    pub system_to_vector: Verdict,
}

impl ConvergenceReport {
    pub fn supports_equivalence(&self) -> bool {
        self.vector_to_system == Verdict::SupportsEquivalence && self.system_to_vector == Verdict::SupportsEquivalence
    }

    pub fn fdd_gaps_strictly_decrease(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].fdd_gap < w[0].fdd_gap)
    }

    pub fn fdd_row(&self, label: &str) -> Option<&MomentRow> {
        self.fdd_moments.iter().find(|m| m.label == label)
    }

    pub fn vector_row(&self, label: &str) -> Option<&MomentRow> {
        self.vector_moments.iter().find(|m| m.label == label)
    }
}

/// Exact moments of one member.
struct MemberMoments {
    fdd: Vec<Rational>,
    vector: Vec<Rational>,
    represented: Vec<Rational>,
    reconstruction_exact: bool,
}

fn member_moments(
    at: &FamilyIndex,
    spec: &SystemSpec,
    fdd: &[(TestFunction, Polynomial)],
    vector: &[(Monomial, TestFunction)],
) -> Result<MemberMoments, ConvergenceError> {
    let joint = crate::multiclass::joint_law_exact(spec)?;
    let aug = augmented_law(spec)?;
    if !check_multi_exchangeability(&joint, spec)? || !check_augmented_exchangeability(&aug, spec) {
        return Err(ConvergenceError::InconsistentFamily(format!("member {at} is not multi-exchangeable")));
    }
    let mut out = MemberMoments { fdd: vec![], vector: vec![], represented: vec![], reconstruction_exact: true };
    for (f, p) in fdd {
        let e = expect_test(spec, &aug, f)?;
        out.reconstruction_exact &= e == expect_polynomial(&aug, p);
        out.fdd.push(e);
    }
    for (g, h) in vector {
        out.vector.push(expect_polynomial(&aug, &Polynomial::monomial(g.clone())));
        out.represented.push(expect_test(spec, &aug, h)?);
    }
    Ok(out)
}

fn max_of<'a>(xs: impl Iterator<Item = &'a Rational>) -> Rational {
    xs.fold(rational::zero(), |m, x| if *x > m { x.clone() } else { m })
}

fn non_increasing(xs: &[Rational]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0])
}

fn rates(grid: &[Rational], gaps: &[Rational]) -> Vec<Option<f64>> {
    grid.windows(2)
        .zip(gaps.windows(2))
        .map(|(r, g)| {
            if g[0] == rational::zero() || g[1] == rational::zero() {
                return None;
            }
            let num = (rational::to_f64(&g[0]) / rational::to_f64(&g[1])).ln();
            let den = (rational::to_f64(&r[1]) / rational::to_f64(&r[0])).ln();
            Some(num / den)
        })
        .collect()
}

/// Evaluates both batteries on every member and on the limit, exactly.
///
/// The vector battery holds every monomial of degree at most `degree` and
/// every monomial that occurs in a transfer polynomial, so the vector gap
/// controls the fdd gap through `fdd_gap ≤ fdd_bound ≤ L · vector_gap`.
/// `vector_to_system` holds when the transfer identities are exact and every
/// grid value with `vector_gap < tolerance` has `fdd_gap < L · tolerance`.
/// `system_to_vector` holds when the representing identities are exact and
/// every grid value with `extended_fdd_gap < tolerance` has
/// `vector_gap < tolerance`.
pub fn convergence_report(
    family: &SystemFamily,
    options: &ConvergenceOptions,
) -> Result<ConvergenceReport, ConvergenceError> {
    if options.tolerance <= rational::zero() {
        return Err(invalid("tolerance must be positive"));
    }
    if options.degree == 0 {
        return Err(invalid("degree must be at least 1"));
    }
    let limit = family.limit();
    let fdd: Vec<(TestFunction, Polynomial)> = fdd_battery(family.classes(), options.k)?
        .into_iter()
        .map(|f| transfer_polynomial(limit, &f).map(|p| (f, p)))
        .collect::<Result<_, _>>()?;

    let mut monomials: std::collections::BTreeSet<Monomial> =
        vector_battery(family.classes(), options.degree).into_iter().collect();
    for (_, p) in &fdd {
        monomials.extend(p.terms().map(|(m, _)| m.clone()).filter(|m| !m.is_constant()));
    }
    let mut monomials: Vec<Monomial> = monomials.into_iter().collect();
    monomials.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
    let vector: Vec<(Monomial, TestFunction)> =
        monomials.into_iter().map(|g| representing_test(limit, &g).map(|h| (g, h))).collect::<Result<_, _>>()?;

    let indices: Vec<(FamilyIndex, &SystemSpec)> = family
        .members()
        .iter()
        .map(|(r, s)| (FamilyIndex::At(r.clone()), s))
        .chain(std::iter::once((FamilyIndex::Limit, limit)))
        .collect();
    let evaluated: Vec<MemberMoments> =
        indices.par_iter().map(|(at, spec)| member_moments(at, spec, &fdd, &vector)).collect::<Result<_, _>>()?;
    let (at_limit, at_grid) = evaluated.split_last().expect("the limit is always evaluated");

    let reconstruction_exact = evaluated.iter().all(|m| m.reconstruction_exact);
    let representation_exact = evaluated.iter().all(|m| m.vector == m.represented);

    let table = |labels: Vec<String>, pick: &dyn Fn(&MemberMoments) -> &Vec<Rational>| -> Vec<MomentRow> {
        labels
            .into_iter()
            .enumerate()
            .map(|(j, label)| {
                let lim = pick(at_limit)[j].clone();
                let values: Vec<Rational> = at_grid.iter().map(|m| pick(m)[j].clone()).collect();
                let gaps = values.iter().map(|v| rational::abs(&(v - &lim))).collect();
                MomentRow { label, limit: lim, values, gaps }
            })
            .collect()
    };
    let fdd_moments = table(fdd.iter().map(|(f, _)| f.label()).collect(), &|m| &m.fdd);
    let vector_moments = table(vector.iter().map(|(g, _)| g.to_string()).collect(), &|m| &m.vector);
    let represented = table(vector.iter().map(|(_, h)| h.label()).collect(), &|m| &m.represented);

    let vector_index: std::collections::BTreeMap<&Monomial, usize> =
        vector.iter().enumerate().map(|(j, (g, _))| (g, j)).collect();
    let grid = family.grid();
    let rows: Vec<GapRow> = grid
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let fdd_bound = max_of(
                fdd.iter()
                    .map(|(_, p)| {
                        p.terms()
                            .filter(|(m, _)| !m.is_constant())
                            .map(|(m, c)| rational::abs(c) * &vector_moments[vector_index[m]].gaps[i])
                            .sum::<Rational>()
                    })
                    .collect::<Vec<_>>()
                    .iter(),
            );
            let fdd_gap = max_of(fdd_moments.iter().map(|m| &m.gaps[i]));
            let extended_fdd_gap = max_of(represented.iter().map(|m| &m.gaps[i]).chain(std::iter::once(&fdd_gap)));
            GapRow {
                r: r.clone(),
                vector_gap: max_of(vector_moments.iter().map(|m| &m.gaps[i])),
                fdd_gap,
                fdd_bound,
                extended_fdd_gap,
            }
        })
        .collect();

    let transfer_constant = max_of(fdd.iter().map(|(_, p)| p.l1_norm()).collect::<Vec<_>>().iter());
    let derived_tolerance = &transfer_constant * &options.tolerance;
    let tol = &options.tolerance;

    let forward = reconstruction_exact
        && rows
            .iter()
            .all(|row| row.fdd_gap <= row.fdd_bound && (row.vector_gap >= *tol || row.fdd_gap < derived_tolerance));
    let backward = representation_exact
        && rows.iter().all(|row| {
            row.vector_gap <= row.extended_fdd_gap && (row.extended_fdd_gap >= *tol || row.vector_gap < *tol)
        });
    let verdict = |ok: bool| if ok { Verdict::SupportsEquivalence } else { Verdict::ContradictsEquivalence };

    let fdd_gaps: Vec<Rational> = rows.iter().map(|r| r.fdd_gap.clone()).collect();
    let vector_gaps: Vec<Rational> = rows.iter().map(|r| r.vector_gap.clone()).collect();
    Ok(ConvergenceReport {
        options: options.clone(),
        fdd_monotone: non_increasing(&fdd_gaps),
        vector_monotone: non_increasing(&vector_gaps),
        fdd_rates: rates(&grid, &fdd_gaps),
        vector_rates: rates(&grid, &vector_gaps),
        grid,
        rows,
        fdd_moments,
        vector_moments,
        transfer_constant,
        derived_tolerance,
        reconstruction_exact,
        representation_exact,
        vector_to_system: verdict(forward),
        system_to_vector: verdict(backward),
    })
}
