//! Vacuum moments `m_k = ⟨e_0̂, H^k e_0̂⟩`, from the full operator or from the
//! Jacobi coefficients alone.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::lattice::{ElementId, FiniteLattice};
use crate::operator::{basis_vector, OperatorMatrix, Rational};
use crate::radial::JacobiData;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentSequence {
    #[serde(with = "crate::operator::as_strings")]
    pub values: Vec<Rational>,
}

impl MomentSequence {
    pub fn new(values: Vec<Rational>) -> Self {
        MomentSequence { values }
    }

    /// Moments of the point mass at 0: `(1, 0, 0, …)`.
    pub fn delta(max_k: usize) -> Self {
        let mut values = vec![Rational::zero(); max_k + 1];
        values[0] = Rational::one();
        MomentSequence { values }
    }

    pub fn max_k(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize) -> Option<&Rational> {
        self.values.get(k)
    }

    pub fn odd_vanish(&self) -> bool {
        self.values.iter().skip(1).step_by(2).all(Zero::is_zero)
    }

    /// Prefix `m_0..=m_k`.
    pub fn truncate(&self, k: usize) -> Self {
        MomentSequence { values: self.values.iter().take(k + 1).cloned().collect() }
    }
}

/// Iterates `v ← H v` from `e_0̂` and records the bottom coordinate.
pub fn vacuum_moments_full(l: &FiniteLattice, h: &OperatorMatrix, max_k: usize) -> MomentSequence {
    assert_eq!(h.dim(), l.len(), "operator does not act on this lattice");
    let mut v = basis_vector(l.len(), ElementId::BOTTOM);
    let mut values = Vec::with_capacity(max_k + 1);
    values.push(Rational::one());
    for _ in 0..max_k {
        v = h.apply(&v).expect("dimension checked");
        values.push(v[ElementId::BOTTOM.index()].clone());
    }
    MomentSequence { values }
}

/// Weighted Dyck paths: each up-step from level `i` carries `β_i²`, so the
/// result is a polynomial in the `β²` and stays exact.
pub fn vacuum_moments_radial(j: &JacobiData, max_k: usize) -> MomentSequence {
    let levels = j.r() + 1;
    let mut paths = vec![Rational::zero(); levels];
    paths[0] = Rational::one();
    let mut values = Vec::with_capacity(max_k + 1);
    values.push(Rational::one());
    for _ in 0..max_k {
        let mut next = vec![Rational::zero(); levels];
        for (i, w) in paths.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            if i + 1 < levels {
                next[i + 1] += w * &j.beta_sq[i];
            }
            if i > 0 {
                next[i - 1] += w;
            }
        }
        values.push(next[0].clone());
        paths = next;
    }
    MomentSequence { values }
}
