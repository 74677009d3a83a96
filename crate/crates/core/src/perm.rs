//! Finite-support permutations of ω, the successor conjugate
//! `k = θ⁻¹∘S∘θ`, and recovery of `θ⁻¹` from `k` by recursion.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::EventuallyPeriodic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("position {0} is mapped twice")]
    DuplicateSource(usize),
    #[error("position {0} is hit twice")]
    DuplicateTarget(usize),
    #[error("domain and range of the exceptional set differ, so the map is not a bijection of ω")]
    NotClosed,
    #[error("iterate {value} at step {step} is outside the window [0, {window})")]
    OutOfWindow { step: usize, value: usize, window: usize },
    #[error("conjugate table has {have} entries, need {need}")]
    TableTooShort { have: usize, need: usize },
}

/// A bijection of ω that is the identity outside a finite set.
///
/// Fixed points are never stored, so two permutations are equal exactly when
/// their exception maps are.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FinSupPermutation {
    forward: BTreeMap<usize, usize>,
    inverse: BTreeMap<usize, usize>,
}

/// JSON form: `{"pairs": [[0,5],[5,0]]}`, identity elsewhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PermutationJson {
    pub pairs: Vec<(usize, usize)>,
}

impl FinSupPermutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a permutation from `(n, θ(n))` pairs. Fixed points may be
    /// listed or omitted.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, PermError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut forward = BTreeMap::new();
        let mut inverse = BTreeMap::new();
        for (n, m) in pairs {
            if forward.insert(n, m).is_some() {
                return Err(PermError::DuplicateSource(n));
            }
            if inverse.insert(m, n).is_some() {
                return Err(PermError::DuplicateTarget(m));
            }
        }
        if !forward.keys().eq(inverse.keys()) {
            return Err(PermError::NotClosed);
        }
        forward.retain(|n, m| n != m);
        inverse.retain(|n, m| n != m);
        Ok(Self { forward, inverse })
    }

    /// The permutation with `θ(i) = images[i]` on `0..images.len()`.
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        Self::from_pairs(images.iter().copied().enumerate())
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::from_pairs([(a, b), (b, a)]).expect("a transposition is a bijection")
    }

    /// All `k!` permutations whose support lies in `0..k`, in lexicographic
    /// order of their image tables.
    pub fn all_with_support_below(k: usize) -> Vec<Self> {
        (0..k)
            .permutations(k)
            .map(|images| Self::from_images(&images).expect("permutation of 0..k"))
            .collect()
    }

    #[inline]
    pub fn apply(&self, n: usize) -> usize {
        self.forward.get(&n).copied().unwrap_or(n)
    }

    #[inline]
    pub fn apply_inverse(&self, n: usize) -> usize {
        self.inverse.get(&n).copied().unwrap_or(n)
    }

    pub fn inverse(&self) -> Self {
        Self {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `self ∘ other`, i.e. `n ↦ self(other(n))`.
    pub fn compose(&self, other: &Self) -> Self {
        let points = self.forward.keys().chain(other.forward.keys()).copied();
        Self::from_pairs(points.unique().map(|n| (n, self.apply(other.apply(n)))))
            .expect("composition of bijections")
    }

    /// Points moved by the permutation, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.forward.keys().copied()
    }

    /// One past the largest moved point (0 for the identity).
    pub fn support_bound(&self) -> usize {
        self.forward.keys().next_back().map_or(0, |&m| m + 1)
    }

    pub fn is_identity(&self) -> bool {
        self.forward.is_empty()
    }

    /// Table of `θ` on `0..len`.
    pub fn table(&self, len: usize) -> Vec<usize> {
        (0..len).map(|n| self.apply(n)).collect()
    }

    pub fn inverse_table(&self, len: usize) -> Vec<usize> {
        (0..len).map(|n| self.apply_inverse(n)).collect()
    }

    pub fn to_json(&self) -> PermutationJson {
        PermutationJson {
            pairs: self.forward.iter().map(|(&n, &m)| (n, m)).collect(),
        }
    }
}

impl TryFrom<PermutationJson> for FinSupPermutation {
    type Error = PermError;

    fn try_from(json: PermutationJson) -> Result<Self, Self::Error> {
        Self::from_pairs(json.pairs)
    }
}

/// `k(n) = θ⁻¹(θ(n) + 1)` for `n < upto`.
pub fn conjugate_successor(theta: &FinSupPermutation, upto: usize) -> Vec<usize> {
    (0..upto)
        .map(|n| theta.apply_inverse(theta.apply(n) + 1))
        .collect()
}

/// Recovers `θ⁻¹` on `[0, m)` from the conjugate table `k` and the seed
/// `θ⁻¹(0)`, using `θ⁻¹(j+1) = k(θ⁻¹(j))`.
///
/// `k` is not checked to be a successor conjugate.
pub fn recover_inverse(k: &[usize], seed: usize, m: usize) -> Result<Vec<usize>, PermError> {
    if k.len() < m {
        return Err(PermError::TableTooShort { have: k.len(), need: m });
    }
    let mut out = Vec::with_capacity(m);
    let mut current = seed;
    for step in 0..m {
        if current >= m {
            return Err(PermError::OutOfWindow { step, value: current, window: m });
        }
        out.push(current);
        current = k[current];
    }
    Ok(out)
}

/// `Π_θ(X) = X∘θ`.
pub fn induced_map(theta: &FinSupPermutation, x: &EventuallyPeriodic) -> EventuallyPeriodic {
    let start = theta.support_bound().max(x.preperiod());
    EventuallyPeriodic::tabulate(start, x.period().len(), |n| x.at(theta.apply(n)))
}
