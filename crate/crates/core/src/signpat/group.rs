use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::SignPattern;
use crate::mat::RealMatrix;

/// Element of the equivalence group: permutation similarity, then optional
/// transposition, then optional negation. Cell `(i, j)` of the image is
/// `±S[perm[i]][perm[j]]`, or `±S[perm[j]][perm[i]]` when transposed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquivTransform {
    pub perm: Vec<usize>,
    pub transposed: bool,
    pub negated: bool,
}

impl EquivTransform {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            transposed: false,
            negated: false,
        }
    }

    /// All `2 * 2 * n!` elements, in a fixed order.
    pub fn all(n: usize) -> Vec<Self> {
        (0..n)
            .permutations(n)
            .flat_map(|perm| {
                [(false, false), (false, true), (true, false), (true, true)].map(|(transposed, negated)| Self {
                    perm: perm.clone(),
                    transposed,
                    negated,
                })
            })
            .collect()
    }

    fn source(&self, i: usize, j: usize) -> (usize, usize) {
        let (a, b) = (self.perm[i], self.perm[j]);
        if self.transposed {
            (b, a)
        } else {
            (a, b)
        }
    }

    pub fn apply(&self, s: &SignPattern) -> SignPattern {
        let n = s.n();
        let mut out = s.clone();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = self.source(i, j);
                let v = s.get(a, b);
                out.set(i, j, if self.negated { -v } else { v });
            }
        }
        out
    }

    pub fn apply_matrix(&self, m: &RealMatrix) -> RealMatrix {
        let n = m.n();
        let sign = if self.negated { -1.0 } else { 1.0 };
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = self.source(i, j);
                out.set(i, j, sign * m.get(a, b));
            }
        }
        out
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &Self) -> Self {
        Self {
            perm: other.perm.iter().map(|&k| self.perm[k]).collect(),
            transposed: self.transposed ^ other.transposed,
            negated: self.negated ^ other.negated,
        }
    }

    pub fn inverse(&self) -> Self {
        let mut perm = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
        }
        Self {
            perm,
            transposed: self.transposed,
            negated: self.negated,
        }
    }
}

pub fn orbit(s: &SignPattern) -> BTreeSet<SignPattern> {
    EquivTransform::all(s.n()).iter().map(|t| t.apply(s)).collect()
}

/// Lexicographically least orbit member (row-major, `Minus < Zero < Plus`)
/// and a transform mapping `s` onto it.
pub fn canonical_form(s: &SignPattern) -> (SignPattern, EquivTransform) {
    EquivTransform::all(s.n())
        .into_iter()
        .map(|t| (t.apply(s), t))
        .min_by(|a, b| a.0.cmp(&b.0))
        .expect("group is nonempty")
}

/// A transform `T` with `T(a) = b`, if the patterns are equivalent.
pub fn equivalent(a: &SignPattern, b: &SignPattern) -> Option<EquivTransform> {
    if a.n() != b.n() {
        return None;
    }
    let (ca, ta) = canonical_form(a);
    let (cb, tb) = canonical_form(b);
    (ca == cb).then(|| ta.then(&tb.inverse()))
}
