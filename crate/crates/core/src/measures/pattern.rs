use thiserror::Error;

use super::Atom;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern must have at least one slot")]
    Empty,
    #[error("slot {position} has label {label}, but the next unused label is {expected}")]
    NotCanonical { position: usize, label: usize, expected: usize },
}

/// Collision shape of an index tuple `(n_1, …, n_k)`: a surjection
/// `{0..k} → {0..j}` written as a restricted growth string, i.e. slot `i`
/// either reuses an earlier label or opens the next fresh one.
///
/// `(0, 1, 0)` is the shape of every index tuple `(n, m, n)` with `n ≠ m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexPattern {
    slots: Vec<usize>,
    image_size: usize,
}

impl IndexPattern {
    pub fn new(slots: Vec<usize>) -> Result<Self, PatternError> {
        if slots.is_empty() {
            return Err(PatternError::Empty);
        }
        let mut next = 0;
        for (position, &label) in slots.iter().enumerate() {
            if label > next {
                return Err(PatternError::NotCanonical { position, label, expected: next });
            }
            if label == next {
                next += 1;
            }
        }
        Ok(IndexPattern { slots, image_size: next })
    }

    pub fn identity(k: usize) -> Self {
        IndexPattern { slots: (0..k).collect(), image_size: k }
    }

    /// Canonical pattern of an arbitrary index tuple (labels by first occurrence).
    pub fn of_indices<T: PartialEq>(indices: &[T]) -> Result<Self, PatternError> {
        let mut firsts: Vec<&T> = Vec::new();
        let slots = indices
            .iter()
            .map(|x| match firsts.iter().position(|f| *f == x) {
                Some(p) => p,
                None => {
                    firsts.push(x);
                    firsts.len() - 1
                }
            })
            .collect();
        Self::new(slots)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn image_size(&self) -> usize {
        self.image_size
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    /// `(y_{p(0)}, …, y_{p(k-1)})`.
    pub fn apply(&self, y: &[Atom]) -> Vec<Atom> {
        self.slots.iter().map(|&s| y[s].clone()).collect()
    }

    /// All patterns of length `k`, in lexicographic order of their slot strings.
    pub fn enumerate(k: usize) -> Vec<IndexPattern> {
        let mut out = Vec::new();
        if k == 0 {
            return out;
        }
        let mut slots = vec![0usize; k];
        loop {
            out.push(IndexPattern::new(slots.clone()).expect("generated strings are canonical"));
            // Increment the rightmost slot still below max(prefix) + 1.
            let mut i = k - 1;
            loop {
                if i == 0 {
                    return out;
                }
                let bound = slots[..i].iter().max().copied().unwrap_or(0) + 1;
                if slots[i] < bound {
                    slots[i] += 1;
                    for s in &mut slots[i + 1..] {
                        *s = 0;
                    }
                    break;
                }
                i -= 1;
            }
        }
    }

    /// Patterns of length `k` with exactly `j` distinct labels.
    pub fn with_image_size(k: usize, j: usize) -> Vec<IndexPattern> {
        Self::enumerate(k).into_iter().filter(|p| p.image_size == j).collect()
    }
}

/// Stirling numbers of the second kind `S(k, j)` by the usual recurrence.
pub fn stirling2(k: usize, j: usize) -> u128 {
    let mut row = vec![0u128; j + 1];
    row[0] = 1;
    for n in 1..=k {
        for m in (1..=j.min(n)).rev() {
            row[m] = m as u128 * row[m] + row[m - 1];
        }
        row[0] = 0;
    }
    row[j]
}
