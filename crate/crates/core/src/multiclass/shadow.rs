//! Monte Carlo counterpart of the sufficiency check for laws that can only be
//! sampled: moments of original and conditionally resampled realizations must
//! agree within a few standard errors.

use rayon::prelude::*;

use super::{conditional_resample, measure_vector, MeasureVector, MulticlassError, SystemRealization, SystemSpec};
use crate::measures::{Atom, DiscreteMeasure};
use crate::rational::{self, Rational};
use crate::sampling::RngStream;
use crate::stats::{Estimate, MeanAccumulator};

/// A test function of one class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassTest {
    One,
    /// `1{X_1 = a_1, …, X_m = a_m}` on the first `m` particles.
    Indicator(Vec<Atom>),
    /// `Π_a Λ_i({a})^p_a` of the class's measure.
    Moment(Vec<(Atom, u32)>),
}

impl ClassTest {
    pub fn eval(&self, particles: &[Atom], lambda: &DiscreteMeasure) -> Rational {
        match self {
            ClassTest::One => rational::one(),
            ClassTest::Indicator(values) => {
                if particles.len() >= values.len() && particles[..values.len()] == values[..] {
                    rational::one()
                } else {
                    rational::zero()
                }
            }
            ClassTest::Moment(powers) => powers.iter().map(|(a, p)| lambda.atom_weight(a).pow(*p as i32)).product(),
        }
    }

    fn eval_weighted(&self, particles: &[Atom], weights: &[(Atom, f64)]) -> f64 {
        match self {
            ClassTest::One => 1.0,
            ClassTest::Indicator(values) => {
                let hit = particles.len() >= values.len() && particles[..values.len()] == values[..];
                if hit {
                    1.0
                } else {
                    0.0
                }
            }
            ClassTest::Moment(powers) => powers
                .iter()
                .map(|(a, p)| {
                    let w = weights.iter().find(|(b, _)| b == a).map_or(0.0, |(_, w)| *w);
                    w.powi(*p as i32)
                })
                .product(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ClassTest::One => "1".into(),
            ClassTest::Indicator(values) => {
                let v: Vec<&str> = values.iter().map(Atom::as_str).collect();
                format!("1[{}]", v.join(","))
            }
            ClassTest::Moment(powers) => powers
                .iter()
                .map(|(a, p)| if *p == 1 { format!("L({a})") } else { format!("L({a})^{p}") })
                .collect::<Vec<_>>()
                .join(""),
        }
    }
}

/// `Π_i f_i`, one factor per class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TestFunction(pub Vec<ClassTest>);

impl TestFunction {
    pub fn eval(&self, r: &SystemRealization, mv: &MeasureVector) -> Rational {
        let mut acc = rational::one();
        for ((f, c), lambda) in self.0.iter().zip(&r.classes).zip(&mv.0) {
            acc *= f.eval(c.atoms(), lambda);
            if acc == rational::zero() {
                break;
            }
        }
        acc
    }

    /// Double-precision value; weights are rounded once, products are
    /// taken in `f64`.
    pub fn eval_f64(&self, r: &SystemRealization, mv: &MeasureVector) -> f64 {
        self.eval_weighted(r, &weight_table(mv))
    }

    fn eval_weighted(&self, r: &SystemRealization, table: &[Vec<(Atom, f64)>]) -> f64 {
        let mut acc = 1.0;
        for ((f, c), w) in self.0.iter().zip(&r.classes).zip(table) {
            acc *= f.eval_weighted(c.atoms(), w);
            if acc == 0.0 {
                break;
            }
        }
        acc
    }

    pub fn label(&self) -> String {
        self.0.iter().map(ClassTest::label).collect::<Vec<_>>().join(" * ")
    }

    /// Products over classes of: the constant, every indicator of the first
    /// `min(k, len)` particles, and `Λ_i({a})`, `Λ_i({a})^2` for every atom.
    /// The all-constant product is omitted.
    pub fn shadow_battery(spec: &SystemSpec, k: usize) -> Vec<TestFunction> {
        let local: Vec<Vec<ClassTest>> = spec
            .classes()
            .iter()
            .map(|c| {
                let mut tests = vec![ClassTest::One];
                let m = k.min(c.sample_len());
                for t in words(&c.alphabet, m) {
                    tests.push(ClassTest::Indicator(t));
                }
                for a in &c.alphabet {
                    for power in 1..=2 {
                        tests.push(ClassTest::Moment(vec![(a.clone(), power)]));
                    }
                }
                tests
            })
            .collect();
        let mut out = vec![TestFunction(vec![])];
        for tests in &local {
            out = out
                .into_iter()
                .flat_map(|f| {
                    tests.iter().map(move |t| {
                        let mut g = f.0.clone();
                        g.push(t.clone());
                        TestFunction(g)
                    })
                })
                .collect();
        }
        out.retain(|f| f.0.iter().any(|t| *t != ClassTest::One));
        out
    }
}

/// Per class, the atom weights of the measure vector as doubles.
pub(crate) fn weight_table(mv: &MeasureVector) -> Vec<Vec<(Atom, f64)>> {
    mv.0.iter().map(|m| m.iter().map(|(t, w)| (t[0].clone(), rational::to_f64(w))).collect()).collect()
}

/// All words of length `m` over `alphabet`, in lexicographic order.
pub(crate) fn words(alphabet: &[Atom], m: usize) -> Vec<Vec<Atom>> {
    let mut sorted = alphabet.to_vec();
    sorted.sort();
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|w: Vec<Atom>| {
                sorted.iter().map(move |a| {
                    let mut v = w.clone();
                    v.push(a.clone());
                    v
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowRow {
    pub label: String,
    pub original: Estimate,
    pub resampled: Estimate,
    /// Paired difference `f(X) − f(X')`.
    pub difference: Estimate,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowReport {
    pub seed: u64,
    pub reps: u64,
    pub z: f64,
    pub rows: Vec<ShadowRow>,
}

impl ShadowReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

const CHUNK: u64 = 2048;

/// Replication `r` draws `X` from stream `(seed, r)`, then `X'` by
/// [`conditional_resample`]; each battery moment is compared through the
/// paired difference, which must lie within `z` standard errors of zero.
///
/// Infinite classes without an exposed directing measure use the empirical
/// measure of their prefix.
pub fn statistical_shadow(
    spec: &SystemSpec,
    battery: &[TestFunction],
    reps: u64,
    seed: u64,
    z: f64,
) -> Result<ShadowReport, MulticlassError> {
    let sampled;
    let spec = if spec.is_exact() {
        sampled = spec.as_black_box()?;
        &sampled
    } else {
        spec
    };
    let chunks: Vec<(u64, u64)> = (0..reps.div_ceil(CHUNK)).map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(reps))).collect();
    let partials: Vec<Vec<[MeanAccumulator; 3]>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = vec![[MeanAccumulator::default(); 3]; battery.len()];
            for rep in lo..hi {
                let mut rng = RngStream::new(seed, rep);
                let x = spec.sample(&mut rng)?.with_estimated_directing()?;
                let y = conditional_resample(&x, &mut rng)?;
                let wx = weight_table(&measure_vector(&x)?);
                let wy = weight_table(&measure_vector(&y)?);
                for (f, a) in battery.iter().zip(acc.iter_mut()) {
                    let fx = f.eval_weighted(&x, &wx);
                    let fy = f.eval_weighted(&y, &wy);
                    a[0].push(fx);
                    a[1].push(fy);
                    a[2].push(fx - fy);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_, MulticlassError>>()?;

    let mut total = vec![[MeanAccumulator::default(); 3]; battery.len()];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            for i in 0..3 {
                t[i].merge(&p[i]);
            }
        }
    }
    let rows = battery
        .iter()
        .zip(total)
        .map(|(f, [o, r, d])| {
            let difference = d.estimate();
            ShadowRow {
                label: f.label(),
                original: o.estimate(),
                resampled: r.estimate(),
                pass: difference.within(0.0, z),
                difference,
            }
        })
        .collect();
    Ok(ShadowReport { seed, reps, z, rows })
}
