//! Rank layers and the radial (rank-averaged) compression of the Hamiltonian.
//!
//! Everything here works with unnormalized layer sums `s_k = Σ_{rk x = k} e_x`
//! so that coefficients come out as exact rationals: `β_k² = W_k² / (4 n_k n_{k+1})`
//! where `W_k` sums `a(y) − a(x)` over covers leaving rank `k`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{ElementId, FiniteLattice};
use crate::operator::{OperatorMatrix, Rational, RationalVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RadialError {
    #[error("radial compression has a nonzero diagonal entry at level {0}")]
    NonzeroDiagonal(usize),
    #[error("operator dimension {found} does not match the lattice ({expected} elements)")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cover weight sum at level {0} is not a non-negative integer")]
    NonIntegralWeight(usize),
}

/// Layer sizes `n_0, …, n_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankLayers {
    pub sizes: Vec<usize>,
}

impl RankLayers {
    pub fn top_rank(&self) -> usize {
        self.sizes.len().saturating_sub(1)
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// Jacobi coefficients of the radial compression.
#[derive(Clone, Debug, Serialize)]
pub struct JacobiData {
    pub layers: RankLayers,
    /// `W_k`, empty for coefficient-only data.
    pub weights: Vec<u64>,
    /// `β_k²`, `k = 0..r`.
    #[serde(with = "crate::operator::as_strings")]
    pub beta_sq: Vec<Rational>,
    pub beta: Vec<f64>,
}

impl PartialEq for JacobiData {
    /// Exact comparison; the float view is derived and ignored.
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers && self.weights == other.weights && self.beta_sq == other.beta_sq
    }
}

impl JacobiData {
    /// Jacobi data given only by its off-diagonal squares (no lattice behind it).
    pub fn from_beta_sq(beta_sq: Vec<Rational>) -> Self {
        let beta = beta_sq.iter().map(sqrt_f64).collect();
        JacobiData { layers: RankLayers { sizes: Vec::new() }, weights: Vec::new(), beta_sq, beta }
    }

    /// Number of off-diagonal coefficients, which is the top rank.
    pub fn r(&self) -> usize {
        self.beta_sq.len()
    }

    fn from_weights(layers: RankLayers, weights: Vec<u64>) -> Self {
        let beta_sq: Vec<Rational> = weights
            .iter()
            .enumerate()
            .map(|(k, &w)| {
                let w = BigInt::from(w);
                let denom = BigInt::from(4u64) * layers.sizes[k] * layers.sizes[k + 1];
                Rational::new(&w * &w, denom)
            })
            .collect();
        let beta = beta_sq.iter().map(sqrt_f64).collect();
        JacobiData { layers, weights, beta_sq, beta }
    }
}

pub(crate) fn sqrt_f64(x: &Rational) -> f64 {
    let num = x.numer().to_f64().unwrap_or(f64::NAN);
    let den = x.denom().to_f64().unwrap_or(f64::NAN);
    (num / den).sqrt()
}

pub fn rank_layers(l: &FiniteLattice) -> RankLayers {
    RankLayers { sizes: l.layers().iter().map(Vec::len).collect() }
}

fn atom_counts(l: &FiniteLattice) -> Vec<u64> {
    l.elements().map(|x| l.count_atoms_below(x) as u64).collect()
}

/// `W_k = Σ (a(y) − a(x))` over covers `x ⋖ y` with `rk x = k`, grouped by layer.
pub fn cover_weight_sums(l: &FiniteLattice) -> Vec<u64> {
    let a = atom_counts(l);
    (0..l.top_rank())
        .map(|k| {
            l.layer(k)
                .iter()
                .flat_map(|&x| l.covers_up(x).iter().map(move |&y| (x, y)))
                .map(|(x, y)| a[y.index()] - a[x.index()])
                .sum()
        })
        .collect()
}

/// Same total as `Σ_k W_k`, accumulated by walking every cover once.
pub fn total_cover_weight(l: &FiniteLattice) -> u64 {
    let a = atom_counts(l);
    l.covers().map(|(x, y)| a[y.index()] - a[x.index()]).sum()
}

/// Coefficients from the combinatorial formula.
pub fn jacobi_from_formula(l: &FiniteLattice) -> JacobiData {
    JacobiData::from_weights(rank_layers(l), cover_weight_sums(l))
}

fn layer_sum(l: &FiniteLattice, k: u32) -> RationalVector {
    let mut v = vec![Rational::zero(); l.len()];
    for &x in l.layer(k) {
        v[x.index()] = Rational::from_integer(1.into());
    }
    v
}

fn sum_over_layer(l: &FiniteLattice, v: &[Rational], k: u32) -> Rational {
    l.layer(k).iter().map(|x| &v[x.index()]).sum()
}

fn layer_images(l: &FiniteLattice, h: &OperatorMatrix) -> Result<Vec<RationalVector>, RadialError> {
    if h.dim() != l.len() {
        return Err(RadialError::DimensionMismatch { expected: l.len(), found: h.dim() });
    }
    Ok((0..=l.top_rank()).map(|k| h.apply(&layer_sum(l, k)).expect("dimension checked")).collect())
}

/// Coefficients read off `H` directly: `β_k² = ⟨s_k, H s_{k+1}⟩² / (n_k n_{k+1})`.
pub fn jacobi_from_compression(l: &FiniteLattice, h: &OperatorMatrix) -> Result<JacobiData, RadialError> {
    let images = layer_images(l, h)?;
    let layers = rank_layers(l);
    for (k, hs) in images.iter().enumerate() {
        if !sum_over_layer(l, hs, k as u32).is_zero() {
            return Err(RadialError::NonzeroDiagonal(k));
        }
    }
    let mut weights = Vec::with_capacity(l.top_rank() as usize);
    for k in 0..l.top_rank() {
        let inner = sum_over_layer(l, &images[k as usize + 1], k);
        let twice = inner * Rational::from_integer(2.into());
        let w = twice
            .is_integer()
            .then(|| twice.to_integer().to_u64())
            .flatten()
            .ok_or(RadialError::NonIntegralWeight(k as usize))?;
        weights.push(w);
    }
    let compressed = JacobiData::from_weights(layers, weights);
    Ok(compressed)
}

/// Outcome of the exact radial invariance test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    pub failing_level: Option<usize>,
    /// Elements where `H s_k` differs from its layer average, at the first failing level.
    pub residual_support: Vec<ElementId>,
}

/// Decides whether `H s_k ∈ span{s_{k−1}, s_{k+1}}` for every `k`, exactly.
pub fn radial_invariance(l: &FiniteLattice, h: &OperatorMatrix) -> Result<InvarianceReport, RadialError> {
    let images = layer_images(l, h)?;
    for (k, hs) in images.iter().enumerate() {
        let mut residual = Vec::new();
        for j in 0..=l.top_rank() {
            let layer = l.layer(j);
            let mean = sum_over_layer(l, hs, j) / Rational::from_integer(layer.len().into());
            residual.extend(layer.iter().copied().filter(|x| hs[x.index()] != mean));
            if (j as i64 - k as i64).abs() != 1 && !mean.is_zero() {
                residual.extend(layer.iter().copied().filter(|x| !hs[x.index()].is_zero()));
            }
        }
        if !residual.is_empty() {
            residual.sort_unstable();
            residual.dedup();
            return Ok(InvarianceReport { invariant: false, failing_level: Some(k), residual_support: residual });
        }
    }
    Ok(InvarianceReport { invariant: true, failing_level: None, residual_support: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diamond::hamiltonian;
    use crate::lattice::parse::{ElementEntry, LatticeDocument};
    use crate::lattice::{build_boolean, build_projective, build_uniform, parse::lattice_from_document};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn layers_of_small_lattices() {
        assert_eq!(rank_layers(&build_uniform(2, 3).unwrap()).sizes, vec![1, 3, 1]);
        assert_eq!(rank_layers(&build_boolean(4).unwrap()).sizes, vec![1, 4, 6, 4, 1]);
        assert_eq!(rank_layers(&build_projective(3, 2).unwrap()).sizes, vec![1, 7, 7, 1]);
    }

    #[test]
    fn cover_weights() {
        let m3 = build_uniform(2, 3).unwrap();
        assert_eq!(cover_weight_sums(&m3), vec![3, 6]);
        assert_eq!(cover_weight_sums(&build_projective(3, 2).unwrap()), vec![7, 42, 28]);
        for n in 0..7u64 {
            let b = build_boolean(n as u32).unwrap();
            let expected: Vec<u64> = (0..n).map(|k| binomial(n, k) * (n - k)).collect();
            assert_eq!(cover_weight_sums(&b), expected);
            assert_eq!(total_cover_weight(&b), expected.iter().sum::<u64>());
        }
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn m3_coefficients() {
        let m3 = build_uniform(2, 3).unwrap();
        let formula = jacobi_from_formula(&m3);
        assert_eq!(formula.beta_sq, vec![q(3, 4), q(3, 1)]);
        assert!((formula.beta[0] - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((formula.beta[1] - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(jacobi_from_compression(&m3, &hamiltonian(&m3)).unwrap(), formula);
    }

    #[test]
    fn b1_single_coefficient() {
        let b1 = build_boolean(1).unwrap();
        let j = jacobi_from_compression(&b1, &hamiltonian(&b1)).unwrap();
        assert_eq!(j.beta_sq, vec![q(1, 4)]);
        assert_eq!(j.beta, vec![0.5]);
    }

    #[test]
    fn rank_zero_is_empty() {
        let b0 = build_boolean(0).unwrap();
        let j = jacobi_from_compression(&b0, &hamiltonian(&b0)).unwrap();
        assert!(j.beta_sq.is_empty() && j.weights.is_empty());
    }

    #[test]
    fn nonzero_diagonal_is_reported() {
        let m3 = build_uniform(2, 3).unwrap();
        let bad = OperatorMatrix::from_triplets(5, vec![(1, 2, q(1, 1))], false);
        assert_eq!(jacobi_from_compression(&m3, &bad).unwrap_err(), RadialError::NonzeroDiagonal(1));
        let wrong = OperatorMatrix::zero(3);
        assert!(matches!(jacobi_from_compression(&m3, &wrong), Err(RadialError::DimensionMismatch { .. })));
    }

    #[test]
    fn symmetric_lattices_are_invariant() {
        for l in [build_uniform(2, 3).unwrap(), build_boolean(4).unwrap(), build_projective(3, 2).unwrap()] {
            let report = radial_invariance(&l, &hamiltonian(&l)).unwrap();
            assert!(report.invariant, "{}", l.family());
        }
    }

    #[test]
    fn asymmetric_lattice_is_not_invariant() {
        // flats of the rank-3 matroid on {1,2,3,4} with one 3-point line {1,2,3}
        let labels = ["0", "1", "2", "3", "4", "123", "14", "24", "34", "top"];
        let covers = [
            [0, 1],
            [0, 2],
            [0, 3],
            [0, 4],
            [1, 5],
            [2, 5],
            [3, 5],
            [1, 6],
            [4, 6],
            [2, 7],
            [4, 7],
            [3, 8],
            [4, 8],
            [5, 9],
            [6, 9],
            [7, 9],
            [8, 9],
        ];
        let doc = LatticeDocument {
            elements: labels
                .iter()
                .enumerate()
                .map(|(i, s)| ElementEntry { id: i as u32, label: Some(s.to_string()) })
                .collect(),
            covers: covers.to_vec(),
            order: None,
        };
        let parsed = lattice_from_document(&doc).unwrap();
        assert!(parsed.report.is_geometric);
        let l = parsed.lattice;
        let h = hamiltonian(&l);
        let report = radial_invariance(&l, &h).unwrap();
        assert!(!report.invariant);
        // H s_1 hits the 3-point line with weight 3 and the 2-point lines with weight 2
        assert_eq!(report.failing_level, Some(1));
        assert_eq!(report.residual_support.len(), 4);
        assert_eq!(jacobi_from_compression(&l, &h).unwrap(), jacobi_from_formula(&l));
    }
}
