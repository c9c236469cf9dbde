//! Exact Gaussian elimination helpers.

use std::collections::BTreeMap;

use crate::scalar::{axpy_neg, Field};

fn first_nonzero<S: Field>(v: &[S], from: usize) -> Option<usize> {
    (from..v.len()).find(|&k| !v[k].is_zero())
}

/// Row-echelon basis grown one vector at a time.
///
/// Each stored row starts at its pivot column with entry one.
#[derive(Clone, Debug)]
pub struct EchelonBasis<S> {
    len: usize,
    rows: BTreeMap<usize, Vec<S>>,
}

impl<S: Field> EchelonBasis<S> {
    pub fn new(len: usize) -> Self {
        EchelonBasis {
            len,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot columns in increasing order.
    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduces `v` against the basis. Returns the residual, zero iff `v` is in the span.
    pub fn reduce(&self, mut v: Vec<S>) -> Vec<S> {
        debug_assert_eq!(v.len(), self.len);
        let mut at = 0;
        while let Some(k) = first_nonzero(&v, at) {
            match self.rows.get(&k) {
                Some(row) => {
                    let factor = v[k].clone();
                    axpy_neg(&mut v[k..], &factor, &row[k..]);
                    at = k + 1;
                }
                None => break,
            }
        }
        v
    }

    pub fn contains(&self, v: Vec<S>) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    /// Adds `v` to the span. Returns `false` when `v` was already dependent.
    pub fn insert(&mut self, v: Vec<S>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = first_nonzero(&v, 0) else {
            return false;
        };
        let inv = v[p].inv();
        for c in v[p..].iter_mut() {
            if !c.is_zero() {
                *c = c.mul_ref(&inv);
            }
        }
        self.rows.insert(p, v);
        true
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<S>> + '_ {
        self.rows.values()
    }

    pub fn into_rows(self) -> Vec<Vec<S>> {
        self.rows.into_values().collect()
    }
}

/// Rank of a family of equal-length vectors.
pub fn rank<S: Field>(len: usize, vectors: impl IntoIterator<Item = Vec<S>>) -> usize {
    let mut basis = EchelonBasis::new(len);
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

/// Row-reduces linearly independent `vectors` so that, restricted to the
/// columns `range`, their leading positions are pairwise distinct.
///
/// Returns each output vector with its leading column inside `range`, or
/// `None` when it vanishes there. Only invertible row operations are used,
/// so the output spans the same space and stays independent.
pub fn echelon_on_columns<S: Field>(
    vectors: Vec<Vec<S>>,
    range: std::ops::Range<usize>,
) -> Vec<(Option<usize>, Vec<S>)> {
    let mut pending = vectors;
    let mut done = Vec::with_capacity(pending.len());
    for col in range {
        let Some(pos) = pending.iter().position(|v| !v[col].is_zero()) else {
            continue;
        };
        let pivot = pending.swap_remove(pos);
        let inv = pivot[col].inv();
        for v in pending.iter_mut() {
            if !v[col].is_zero() {
                let factor = v[col].mul_ref(&inv);
                axpy_neg(&mut v[col..], &factor, &pivot[col..]);
            }
        }
        done.push((Some(col), pivot));
        if pending.is_empty() {
            break;
        }
    }
    done.extend(pending.into_iter().map(|v| (None, v)));
    done
}
