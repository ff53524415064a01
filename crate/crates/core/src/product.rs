//! Product lattices: Kronecker-sum structure of the Hamiltonian, the shuffle
//! formula for rank-raising matrix entries, and convolution of vacuum moments
//! and spectral measures.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::diamond::hamiltonian;
use crate::lattice::{build_product, ElementId, FiniteLattice, LatticeError};
use crate::operator::{basis_vector, OperatorMatrix, Rational, RationalVector};
use crate::spectral::{vacuum_moments_full, MomentSequence, SpectralMeasure};

/// Atoms of a convolved measure closer than this are merged.
pub const MERGE_TOLERANCE: f64 = 1e-9;

/// Factor coordinates of an element of the product.
type Pair = (ElementId, ElementId);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("{x:?} is not below {y:?} componentwise")]
    NotBelow { x: (ElementId, ElementId), y: (ElementId, ElementId) },
    #[error("moment sequence has order {available}, {needed} requested")]
    InsufficientLength { needed: usize, available: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `e_{(x', x'')} ↔ e_{x'} ⊗ e_{x''}` for the lexicographic product ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TensorIdentification {
    pub left_len: usize,
    pub right_len: usize,
}

impl TensorIdentification {
    pub fn new(left: &FiniteLattice, right: &FiniteLattice) -> Self {
        TensorIdentification { left_len: left.len(), right_len: right.len() }
    }

    pub fn forward(&self, x: ElementId) -> (ElementId, ElementId) {
        let i = x.index();
        (ElementId((i / self.right_len) as u32), ElementId((i % self.right_len) as u32))
    }

    pub fn backward(&self, left: ElementId, right: ElementId) -> ElementId {
        ElementId((left.index() * self.right_len + right.index()) as u32)
    }

    /// Bijectivity and rank additivity against an actual product lattice.
    pub fn is_consistent(&self, left: &FiniteLattice, right: &FiniteLattice, product: &FiniteLattice) -> bool {
        product.len() == self.left_len * self.right_len
            && product.elements().all(|x| {
                let (a, b) = self.forward(x);
                self.backward(a, b) == x && product.rank(x) == left.rank(a) + right.rank(b)
            })
    }
}

/// `H' ⊗ I + I ⊗ H''` under the identification.
pub fn kronecker_sum(
    h_left: &OperatorMatrix,
    h_right: &OperatorMatrix,
    ident: &TensorIdentification,
) -> OperatorMatrix {
    let mut triplets = Vec::new();
    for (r, c, v) in h_left.entries() {
        for j in 0..ident.right_len as u32 {
            triplets.push((ident.backward(r, ElementId(j)).0, ident.backward(c, ElementId(j)).0, v.clone()));
        }
    }
    for (r, c, v) in h_right.entries() {
        for i in 0..ident.left_len as u32 {
            triplets.push((ident.backward(ElementId(i), r).0, ident.backward(ElementId(i), c).0, v.clone()));
        }
    }
    let symmetric = h_left.is_symmetric() && h_right.is_symmetric();
    OperatorMatrix::from_triplets(ident.left_len * ident.right_len, triplets, symmetric)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KroneckerReport {
    pub equal: bool,
    pub entries_compared: usize,
    /// `(row, col, direct, kronecker)` at the first mismatch.
    pub first_difference: Option<(ElementId, ElementId, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShuffleReport {
    pub pairs_checked: usize,
    pub max_degree: u32,
    /// `(x, y, formula, direct)` at the first mismatch.
    pub first_failure: Option<(ElementId, ElementId, String, String)>,
}

impl ShuffleReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvolutionReport {
    pub max_k: usize,
    pub product: MomentSequence,
    pub convolved: MomentSequence,
    pub equal: bool,
}

/// A product lattice together with the Hamiltonians of it and its factors.
pub struct ProductContext<'a> {
    pub left: &'a FiniteLattice,
    pub right: &'a FiniteLattice,
    pub product: FiniteLattice,
    pub ident: TensorIdentification,
    pub h_left: OperatorMatrix,
    pub h_right: OperatorMatrix,
    pub h_product: OperatorMatrix,
}

impl<'a> ProductContext<'a> {
    pub fn new(left: &'a FiniteLattice, right: &'a FiniteLattice) -> Result<Self, ProductError> {
        let product = build_product(left, right)?;
        let h_product = hamiltonian(&product);
        Ok(ProductContext {
            left,
            right,
            ident: TensorIdentification::new(left, right),
            h_left: hamiltonian(left),
            h_right: hamiltonian(right),
            product,
            h_product,
        })
    }

    /// Compares `H_L`, assembled from the product's own diamond product, with
    /// the Kronecker sum of the factor Hamiltonians, entry for entry.
    pub fn kronecker_sum_check(&self) -> KroneckerReport {
        let kron = kronecker_sum(&self.h_left, &self.h_right, &self.ident);
        let n = self.product.len() as u32;
        let mut compared = 0;
        for c in (0..n).map(ElementId) {
            for r in (0..n).map(ElementId) {
                compared += 1;
                let (a, b) = (self.h_product.entry(r, c), kron.entry(r, c));
                if a != b {
                    return KroneckerReport {
                        equal: false,
                        entries_compared: compared,
                        first_difference: Some((r, c, a.to_string(), b.to_string())),
                    };
                }
            }
        }
        KroneckerReport { equal: true, entries_compared: compared, first_difference: None }
    }

    fn split(&self, x: ElementId, y: ElementId) -> Result<(Pair, Pair), ProductError> {
        let (xs, ys) = (self.ident.forward(x), self.ident.forward(y));
        if self.left.leq(xs.0, ys.0) && self.right.leq(xs.1, ys.1) {
            Ok((xs, ys))
        } else {
            Err(ProductError::NotBelow { x: xs, y: ys })
        }
    }

    /// `C(d, d₁) ⟨e_{x'}, H'^{d₁} e_{y'}⟩ ⟨e_{x''}, H''^{d₂} e_{y''}⟩` with
    /// `d_i` the rank differences, for `x ≤ y`.
    pub fn shuffle_entry(&self, x: ElementId, y: ElementId) -> Result<Rational, ProductError> {
        let ((x1, x2), (y1, y2)) = self.split(x, y)?;
        let d1 = self.left.rank(y1) - self.left.rank(x1);
        let d2 = self.right.rank(y2) - self.right.rank(x2);
        let c = binomial(BigInt::from(d1 + d2), BigInt::from(d1));
        let e1 = self.h_left.power_entry(x1, y1, d1 as usize);
        let e2 = self.h_right.power_entry(x2, y2, d2 as usize);
        Ok(Rational::from_integer(c) * e1 * e2)
    }

    /// `⟨e_x, H_L^d e_y⟩` computed on the product, `d = rk y − rk x`.
    pub fn direct_power_entry(&self, x: ElementId, y: ElementId) -> Result<Rational, ProductError> {
        self.split(x, y)?;
        let d = self.product.rank(y) - self.product.rank(x);
        Ok(self.h_product.power_entry(x, y, d as usize))
    }

    /// Checks the shuffle formula for every comparable pair with rank
    /// difference at most `max_degree`.
    pub fn shuffle_check(&self, max_degree: u32) -> ShuffleReport {
        let mut pairs = 0;
        for y in self.product.elements() {
            let powers = self.powers_from(y, max_degree.min(self.product.rank(y)) as usize);
            for x in self.product.elements() {
                let ry = self.product.rank(y);
                let rx = self.product.rank(x);
                if rx > ry || ry - rx > max_degree {
                    continue;
                }
                let Ok(formula) = self.shuffle_entry(x, y) else { continue };
                pairs += 1;
                let direct = &powers[(ry - rx) as usize][x.index()];
                if &formula != direct {
                    return ShuffleReport {
                        pairs_checked: pairs,
                        max_degree,
                        first_failure: Some((x, y, formula.to_string(), direct.to_string())),
                    };
                }
            }
        }
        ShuffleReport { pairs_checked: pairs, max_degree, first_failure: None }
    }

    fn powers_from(&self, y: ElementId, up_to: usize) -> Vec<RationalVector> {
        let mut out = vec![basis_vector(self.product.len(), y)];
        for _ in 0..up_to {
            let next = self.h_product.apply(out.last().expect("nonempty")).expect("square");
            out.push(next);
        }
        out
    }

    /// Vacuum moments of the product against the binomial convolution of the
    /// factors' moments.
    pub fn moment_check(&self, max_k: usize) -> ConvolutionReport {
        let product = vacuum_moments_full(&self.product, &self.h_product, max_k);
        let m1 = vacuum_moments_full(self.left, &self.h_left, max_k);
        let m2 = vacuum_moments_full(self.right, &self.h_right, max_k);
        let convolved = convolve_moments(&m1, &m2, max_k).expect("both computed to max_k");
        let equal = product == convolved;
        ConvolutionReport { max_k, product, convolved, equal }
    }
}

pub fn kronecker_sum_check(left: &FiniteLattice, right: &FiniteLattice) -> Result<KroneckerReport, ProductError> {
    Ok(ProductContext::new(left, right)?.kronecker_sum_check())
}

/// Shuffle-formula value for the product ids of `x = (x', x'')`, `y = (y', y'')`.
pub fn shuffle_entry(
    left: &FiniteLattice,
    right: &FiniteLattice,
    x: (ElementId, ElementId),
    y: (ElementId, ElementId),
) -> Result<Rational, ProductError> {
    let ctx = ProductContext::new(left, right)?;
    ctx.shuffle_entry(ctx.ident.backward(x.0, x.1), ctx.ident.backward(y.0, y.1))
}

/// `m_k = Σ_j C(k, j) m'_j m''_{k−j}` for `k ≤ max_k`.
pub fn convolve_moments(
    m1: &MomentSequence,
    m2: &MomentSequence,
    max_k: usize,
) -> Result<MomentSequence, ProductError> {
    for m in [m1, m2] {
        if m.values.len() <= max_k {
            return Err(ProductError::InsufficientLength { needed: max_k, available: m.max_k() });
        }
    }
    let values = (0..=max_k)
        .map(|k| {
            (0..=k)
                .filter(|&j| !m1.values[j].is_zero() && !m2.values[k - j].is_zero())
                .map(|j| {
                    Rational::from_integer(binomial(BigInt::from(k), BigInt::from(j)))
                        * &m1.values[j]
                        * &m2.values[k - j]
                })
                .sum()
        })
        .collect();
    Ok(MomentSequence::new(values))
}

/// Classical convolution: atoms at `λ' + λ''` with weight `w' w''`, merging
/// positions within [`MERGE_TOLERANCE`] of the previous atom.
pub fn convolve_measures(mu1: &SpectralMeasure, mu2: &SpectralMeasure) -> SpectralMeasure {
    let raw = SpectralMeasure::new(
        mu1.atoms.iter().flat_map(|&(x, w)| mu2.atoms.iter().map(move |&(y, v)| (x + y, w * v))).collect(),
    );
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.atoms.len());
    for (x, w) in raw.atoms {
        match merged.last_mut() {
            Some(last) if (x - last.0).abs() <= MERGE_TOLERANCE => last.1 += w,
            _ => merged.push((x, w)),
        }
    }
    SpectralMeasure { atoms: merged }
}
