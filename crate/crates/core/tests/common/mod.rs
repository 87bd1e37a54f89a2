//! Brute-force oracles shared by the integration tests. They work on plain
//! maps of strings to rationals and call nothing from the crate except the
//! rational type, so they can judge its exact layer independently.

#![allow(dead_code)]

use std::collections::BTreeMap;

use exchkit::rational::{self, Rational};

pub type Pmf = BTreeMap<Vec<String>, Rational>;

pub fn q(n: i64, d: i64) -> Rational {
    rational::ratio(n, d)
}

fn add(pmf: &mut Pmf, t: Vec<String>, w: Rational) {
    *pmf.entry(t).or_insert_with(rational::zero) += w;
}

/// Every index tuple in `0..n` of length `k`, as `n^k` odometer steps.
pub fn all_index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        out.push(idx.clone());
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn distinct_count(idx: &[usize]) -> usize {
    let mut v = idx.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Law of `k` draws from `urn`, by filtering all `n^k` index tuples.
pub fn draws(urn: &[&str], k: usize, with_replacement: bool) -> Pmf {
    let tuples: Vec<Vec<usize>> =
        all_index_tuples(urn.len(), k).into_iter().filter(|t| with_replacement || distinct_count(t) == k).collect();
    let share = q(1, tuples.len() as i64);
    let mut pmf = Pmf::new();
    for t in tuples {
        add(&mut pmf, t.iter().map(|&i| urn[i].to_owned()).collect(), share.clone());
    }
    pmf
}

/// The i.i.d. law split by the number `j` of distinct indices: for each
/// `j`, the fraction of index tuples with `j` distinct indices and the
/// normalized law of the points they pick.
pub fn collision_groups(urn: &[&str], k: usize) -> BTreeMap<usize, (Rational, Pmf)> {
    let all = all_index_tuples(urn.len(), k);
    let total = all.len() as i64;
    let mut counts: BTreeMap<usize, i64> = BTreeMap::new();
    let mut raw: BTreeMap<usize, BTreeMap<Vec<String>, i64>> = BTreeMap::new();
    for t in &all {
        let j = distinct_count(t);
        *counts.entry(j).or_default() += 1;
        *raw.entry(j).or_default().entry(t.iter().map(|&i| urn[i].to_owned()).collect()).or_default() += 1;
    }
    raw.into_iter()
        .map(|(j, pmf)| {
            let c = counts[&j];
            (j, (q(c, total), pmf.into_iter().map(|(t, n)| (t, q(n, c))).collect()))
        })
        .collect()
}

/// `Σ |p − q|`.
pub fn l1(p: &Pmf, r: &Pmf) -> Rational {
    let mut keys: Vec<&Vec<String>> = p.keys().chain(r.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|t| {
            let a = p.get(t).cloned().unwrap_or_else(rational::zero);
            let b = r.get(t).cloned().unwrap_or_else(rational::zero);
            rational::abs(&(a - b))
        })
        .sum()
}

/// Every permutation of `0..n`, by Heap's algorithm.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, a, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
        heap(k - 1, a, out);
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

/// One latent component of a small system: per class either a finite law
/// over its tuples or an i.i.d. law with the given directing weights and
/// truncation.
#[derive(Clone, Debug)]
pub enum OracleClass {
    Finite(Pmf),
    Infinite { directing: BTreeMap<String, Rational>, m: usize },
}

#[derive(Clone, Debug)]
pub struct OracleComponent {
    pub weight: Rational,
    pub classes: Vec<OracleClass>,
}

fn iid_pmf(directing: &BTreeMap<String, Rational>, m: usize) -> Pmf {
    let atoms: Vec<(&String, &Rational)> = directing.iter().collect();
    let mut pmf = Pmf::new();
    for idx in all_index_tuples(atoms.len(), m) {
        let w: Rational = idx.iter().map(|&i| atoms[i].1.clone()).product();
        add(&mut pmf, idx.iter().map(|&i| atoms[i].0.clone()).collect(), w);
    }
    pmf
}

fn class_pmf(c: &OracleClass) -> Pmf {
    match c {
        OracleClass::Finite(p) => p.clone(),
        OracleClass::Infinite { directing, m } => iid_pmf(directing, *m),
    }
}

fn product(parts: &[Pmf]) -> Pmf {
    let mut out: Pmf = BTreeMap::from([(vec![], rational::one())]);
    for p in parts {
        let mut next = Pmf::new();
        for (t, w) in &out {
            for (u, v) in p {
                let mut tu = t.clone();
                tu.extend(u.iter().cloned());
                add(&mut next, tu, w * v);
            }
        }
        out = next;
    }
    out
}

/// Law of the concatenated class tuples.
pub fn system_law(components: &[OracleComponent]) -> Pmf {
    let mut out = Pmf::new();
    for c in components {
        let parts: Vec<Pmf> = c.classes.iter().map(class_pmf).collect();
        for (t, w) in product(&parts) {
            add(&mut out, t, w * &c.weight);
        }
    }
    out
}

/// Law after resampling: each finite class block is replaced by a uniformly
/// chosen one of its `n!` literal rearrangements, each infinite prefix by
/// fresh draws from the component's directing weights.
pub fn resampled_law(components: &[OracleComponent]) -> Pmf {
    let mut out = Pmf::new();
    for c in components {
        let parts: Vec<Pmf> = c
            .classes
            .iter()
            .map(|class| match class {
                OracleClass::Finite(p) => {
                    let mut shuffled = Pmf::new();
                    for (t, w) in p {
                        let perms = permutations(t.len());
                        let share = q(1, perms.len() as i64);
                        for perm in perms {
                            add(&mut shuffled, perm.iter().map(|&i| t[i].clone()).collect(), w * &share);
                        }
                    }
                    shuffled
                }
                OracleClass::Infinite { directing, m } => iid_pmf(directing, *m),
            })
            .collect();
        for (t, w) in product(&parts) {
            add(&mut out, t, w * &c.weight);
        }
    }
    out
}

// Bridges between oracle data and crate types, and the small-system grid.

use exchkit::measures::{Atom, DiscreteMeasure};
use exchkit::multiclass::{ClassSpec, LatentComponent, SystemSpec};

pub fn to_pmf(mu: &DiscreteMeasure) -> Pmf {
    mu.iter().map(|(t, w)| (t.iter().map(|a| a.as_str().to_owned()).collect(), w.clone())).collect()
}

pub fn to_measure(p: &Pmf) -> DiscreteMeasure {
    DiscreteMeasure::new(p.iter().map(|(t, w)| (t.iter().map(|s| Atom::new(s)).collect(), w.clone()))).unwrap()
}

/// Uniform law over the distinct arrangements of `word`.
pub fn arrangements(word: &[&str]) -> Pmf {
    let mut seen: BTreeMap<Vec<String>, i64> = BTreeMap::new();
    for perm in permutations(word.len()) {
        *seen.entry(perm.iter().map(|&i| word[i].to_owned()).collect()).or_default() += 1;
    }
    let total: i64 = seen.values().sum();
    seen.into_iter().map(|(t, c)| (t, q(c, total))).collect()
}

pub fn mix(parts: &[(Rational, Pmf)]) -> Pmf {
    let mut out = Pmf::new();
    for (w, p) in parts {
        for (t, v) in p {
            add(&mut out, t.clone(), w * v);
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub enum Kind {
    Finite(usize),
    Infinite(usize),
}

impl Kind {
    pub fn all() -> Vec<Kind> {
        (1..=3).map(Kind::Finite).chain((1..=3).map(Kind::Infinite)).collect()
    }

    fn spec(self, name: &str) -> ClassSpec {
        match self {
            Kind::Finite(n) => ClassSpec::finite(name, n, &["a", "b"]),
            Kind::Infinite(m) => ClassSpec::infinite(name, m, &["a", "b"]),
        }
    }

    /// Two different exchangeable laws of the class.
    pub fn law(self, variant: usize) -> OracleClass {
        match (self, variant) {
            (Kind::Finite(n), 0) => {
                let mut word = vec!["a"; n - 1];
                word.push("b");
                OracleClass::Finite(arrangements(&word))
            }
            (Kind::Finite(n), _) => {
                let mut word = vec!["b"; n - 1];
                word.push("a");
                OracleClass::Finite(mix(&[(q(1, 3), arrangements(&vec!["a"; n])), (q(2, 3), arrangements(&word))]))
            }
            (Kind::Infinite(m), 0) => {
                OracleClass::Infinite { directing: BTreeMap::from([("a".into(), q(1, 3)), ("b".into(), q(2, 3))]), m }
            }
            (Kind::Infinite(m), _) => OracleClass::Infinite { directing: BTreeMap::from([("a".into(), q(1, 1))]), m },
        }
    }
}

pub struct GridSystem {
    pub name: String,
    pub kinds: Vec<Kind>,
    pub components: Vec<OracleComponent>,
    pub coupled: bool,
}

impl GridSystem {
    pub fn spec(&self) -> SystemSpec {
        let names = ["A", "B"];
        let classes: Vec<ClassSpec> = self.kinds.iter().zip(names).map(|(k, n)| k.spec(n)).collect();
        let comps = self
            .components
            .iter()
            .map(|c| {
                let finite: Vec<Pmf> = c
                    .classes
                    .iter()
                    .filter_map(|x| match x {
                        OracleClass::Finite(p) => Some(p.clone()),
                        _ => None,
                    })
                    .collect();
                let directing = c
                    .classes
                    .iter()
                    .filter_map(|x| match x {
                        OracleClass::Infinite { directing, .. } => Some(
                            DiscreteMeasure::new(directing.iter().map(|(a, w)| (vec![Atom::new(a)], w.clone())))
                                .unwrap(),
                        ),
                        _ => None,
                    })
                    .collect();
                LatentComponent {
                    weight: c.weight.clone(),
                    finite_law: (!finite.is_empty()).then(|| to_measure(&product(&finite))),
                    directing,
                }
            })
            .collect();
        SystemSpec::exact(classes, comps).unwrap()
    }
}

/// Every one-class system, and every ordered pair of class kinds both
/// independent and latently coupled.
pub fn sufficiency_grid() -> Vec<GridSystem> {
    let mut out = Vec::new();
    for k in Kind::all() {
        out.push(GridSystem {
            name: format!("{k:?}"),
            kinds: vec![k],
            components: (0..2).map(|v| OracleComponent { weight: q(1, 2), classes: vec![k.law(v)] }).collect(),
            coupled: false,
        });
    }
    for a in Kind::all() {
        for b in Kind::all() {
            let (wa, wb) = ([q(1, 3), q(2, 3)], [q(1, 4), q(3, 4)]);
            let independent = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| OracleComponent { weight: &wa[i] * &wb[j], classes: vec![a.law(i), b.law(j)] })
                .collect();
            out.push(GridSystem {
                name: format!("{a:?} x {b:?} independent"),
                kinds: vec![a, b],
                components: independent,
                coupled: false,
            });
            let coupled = vec![
                OracleComponent { weight: q(1, 3), classes: vec![a.law(0), b.law(1)] },
                OracleComponent { weight: q(2, 3), classes: vec![a.law(1), b.law(0)] },
            ];
            out.push(GridSystem {
                name: format!("{a:?} x {b:?} coupled"),
                kinds: vec![a, b],
                components: coupled,
                coupled: true,
            });
        }
    }
    out
}
