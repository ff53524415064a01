//! Determinant recurrence, resolvent, vacuum moments and spectral measures of
//! the radial Jacobi matrix.

pub mod closed_form;
pub mod eigen;
pub mod moments;
pub mod poly;

pub use closed_form::{boolean_closed_form, closed_form_beta, closed_form_beta_sq, q_integer, ClosedFormBeta};
pub use eigen::{eigendecompose, SpectralMeasure};
pub use moments::{vacuum_moments_full, vacuum_moments_radial, MomentSequence};
pub use poly::{RationalFunction, RationalPolynomial};

use thiserror::Error;

use crate::operator::Rational;
use crate::radial::JacobiData;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("eigenvalue {index} did not converge after {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },
    #[error("no closed form for {0}")]
    NoClosedForm(String),
    #[error("index {k} out of range for rank {r}")]
    IndexOutOfRange { k: u32, r: u32 },
}

/// `D_{−1}, D_0, …, D_r` with `D_{k+1} = D_k − β_k² t² D_{k−1}`; entry `i`
/// holds `D_{i−1}`.
pub fn determinant_polynomials(j: &JacobiData) -> Vec<RationalPolynomial> {
    let mut out = vec![RationalPolynomial::one(), RationalPolynomial::one()];
    for (k, b2) in j.beta_sq.iter().enumerate() {
        let step = out[k].shift(2).scale(b2);
        out.push(&out[k + 1] - &step);
    }
    out
}

/// `D_k` for `k ≥ −1`.
pub fn determinant(j: &JacobiData, k: isize) -> Option<RationalPolynomial> {
    let i = usize::try_from(k + 1).ok()?;
    determinant_polynomials(j).into_iter().nth(i)
}

/// `E_0, …, E_{r+1}` where `E_k = det(I − t J[k..=r])` is the trailing block
/// starting at level `k`: `E_{r+1} = E_r = 1`, `E_k = E_{k+1} − β_k² t² E_{k+2}`.
/// `E_0` coincides with `D_r`.
pub fn tail_determinant_polynomials(j: &JacobiData) -> Vec<RationalPolynomial> {
    let r = j.r();
    let mut out = vec![RationalPolynomial::one(); r + 2];
    for k in (0..r).rev() {
        let step = out[k + 2].shift(2).scale(&j.beta_sq[k]);
        out[k] = &out[k + 1] - &step;
    }
    out
}

/// Vacuum resolvent `G(t) = ⟨e_0, (I − tJ)⁻¹ e_0⟩ = E_1(t) / D_r(t)`, unreduced.
///
/// The numerator is the determinant with the vacuum row and column removed.
/// For coefficient sequences that read the same backwards (Boolean,
/// projective) `E_1 = D_{r−1}`. The constant 1 when `r = 0`.
pub fn resolvent(j: &JacobiData) -> RationalFunction {
    if j.r() == 0 {
        return RationalFunction::constant(Rational::from_integer(1.into()));
    }
    let mut e = tail_determinant_polynomials(j);
    let numerator = e.swap_remove(1);
    let denominator = e.swap_remove(0);
    RationalFunction::new(numerator, denominator).expect("D_r(0) = 1")
}

/// `D_{r−1}(t) / D_r(t)`, the resolvent at the opposite corner,
/// `⟨e_r, (I − tJ)⁻¹ e_r⟩`. The constant 1 when `r = 0`.
pub fn corner_resolvent(j: &JacobiData) -> RationalFunction {
    if j.r() == 0 {
        return RationalFunction::constant(Rational::from_integer(1.into()));
    }
    let mut d = determinant_polynomials(j);
    let top = d.pop().expect("r ≥ 1");
    let below = d.pop().expect("r ≥ 1");
    RationalFunction::new(below, top).expect("D_r(0) = 1")
}
