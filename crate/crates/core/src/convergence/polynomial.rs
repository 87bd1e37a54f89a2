//! Polynomials in the atom weights `Λ_i({a})` of a measure vector.

use std::collections::BTreeMap;
use std::fmt;

use crate::measures::Atom;
use crate::multiclass::MeasureVector;
use crate::rational::{self, Rational};

/// The variable `Λ_class({atom})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub class: usize,
    pub atom: Atom,
}

/// `Π x^p` over the variables it contains; empty for the constant `1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<Variable, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(class: usize, atom: Atom) -> Self {
        Monomial(BTreeMap::from([(Variable { class, atom }, 1)]))
    }

    pub fn powers(&self) -> impl Iterator<Item = (&Variable, u32)> {
        self.0.iter().map(|(v, p)| (v, *p))
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    /// Total power carried by the variables of `class`.
    pub fn class_degree(&self, class: usize) -> u32 {
        self.0.iter().filter(|(v, _)| v.class == class).map(|(_, p)| *p).sum()
    }

    /// Powers of the variables of `class`, in atom order.
    pub fn class_powers(&self, class: usize) -> Vec<(Atom, u32)> {
        self.0.iter().filter(|(v, _)| v.class == class).map(|(v, p)| (v.atom.clone(), *p)).collect()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (v, p) in &other.0 {
            *out.entry(v.clone()).or_insert(0) += p;
        }
        Monomial(out)
    }

    pub fn eval(&self, mv: &MeasureVector) -> Rational {
        self.0.iter().map(|(v, p)| mv.get(v.class).atom_weight(&v.atom).pow(*p as i32)).product()
    }

    /// Every monomial of degree `1..=max_degree` in `vars`, by degree and then
    /// lexicographically.
    pub fn all_up_to(vars: &[Variable], max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut layer = vec![Monomial::one()];
        for _ in 0..max_degree {
            let mut next = std::collections::BTreeSet::new();
            for m in &layer {
                for v in vars {
                    next.insert(m.mul(&Monomial::var(v.class, v.atom.clone())));
                }
            }
            layer = next.into_iter().collect();
            out.extend(layer.iter().cloned());
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, p)| match p {
                1 => format!("L{}({})", v.class, v.atom),
                _ => format!("L{}({})^{p}", v.class, v.atom),
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Finite sum of rational multiples of monomials.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Polynomial(BTreeMap<Monomial, Rational>);

impl Polynomial {
    pub fn constant(c: Rational) -> Self {
        Polynomial::default().plus_term(Monomial::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(rational::one())
    }

    pub fn monomial(m: Monomial) -> Self {
        Polynomial::default().plus_term(m, rational::one())
    }

    fn plus_term(mut self, m: Monomial, c: Rational) -> Self {
        let slot = self.0.entry(m).or_insert_with(rational::zero);
        *slot += c;
        self.0.retain(|_, c| *c != rational::zero());
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.0.iter()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        other.0.iter().fold(self.clone(), |acc, (m, c)| acc.plus_term(m.clone(), c.clone()))
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        self.0.iter().fold(Polynomial::default(), |acc, (m, c)| acc.plus_term(m.clone(), c * s))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                out = out.plus_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.0.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, mv: &MeasureVector) -> Rational {
        self.0.iter().map(|(m, c)| c * m.eval(mv)).sum()
    }

    /// `Σ |c_m|` over the non-constant terms.
    pub fn l1_norm(&self) -> Rational {
        self.0.iter().filter(|(m, _)| !m.is_constant()).map(|(_, c)| rational::abs(c)).sum()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(m, c)| format!("({})*{m}", rational::to_string(c))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
