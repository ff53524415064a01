//! Closed-form Jacobi coefficients and spectra for the classical families.

use num_bigint::BigInt;
use num_traits::Pow;
use serde::Serialize;

use super::eigen::SpectralMeasure;
use super::SpectralError;
use crate::lattice::Family;
use crate::operator::Rational;
use crate::radial::sqrt_f64;

/// `[m]_q = 1 + q + … + q^{m−1}`.
pub fn q_integer(m: u32, q: u32) -> BigInt {
    (0..m).map(|i| Pow::pow(BigInt::from(q), i)).sum()
}

fn q_pow(q: u32, e: u32) -> BigInt {
    Pow::pow(BigInt::from(q), e)
}

/// The binomial measure: atoms at `n/2 − j` with weight `2^{−n} C(n, j)`.
pub fn boolean_closed_form(n: u32) -> SpectralMeasure {
    let scale = 0.5f64.powi(n as i32);
    let mut binom = 1.0f64;
    let mut atoms = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        atoms.push((f64::from(n) / 2.0 - f64::from(j), binom * scale));
        binom = binom * f64::from(n - j) / f64::from(j + 1);
    }
    SpectralMeasure::new(atoms)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormBeta {
    #[serde(serialize_with = "serialize_rational")]
    pub beta_sq: Rational,
    pub beta: f64,
}

fn serialize_rational<S: serde::Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Top rank of the families that have a closed form.
fn closed_form_rank(family: &Family) -> Option<u32> {
    match *family {
        Family::Boolean { n } => Some(n),
        Family::Projective { r, .. } => Some(r),
        Family::Affine { r, .. } => Some(r + 1),
        _ => None,
    }
}

/// `β_k` between ranks `k` and `k+1`.
///
/// For affine geometries ranks are shifted by the adjoined bottom: the
/// coefficient at `k = 0` joins `0̂` to the `q^r` points and equals `q^r/4`;
/// for `k ≥ 1` it is `(q−1)² q^{2k−2} · q [k]_q [r−k+1]_q / 4`.
pub fn closed_form_beta(family: &Family, k: u32) -> Result<ClosedFormBeta, SpectralError> {
    let r = closed_form_rank(family).ok_or_else(|| SpectralError::NoClosedForm(family.to_string()))?;
    if k >= r {
        return Err(SpectralError::IndexOutOfRange { k, r });
    }
    let four = BigInt::from(4);
    let numer = match *family {
        Family::Boolean { n } => BigInt::from(k + 1) * BigInt::from(n - k),
        Family::Projective { r, q } => q_pow(q, 2 * k) * q_integer(k + 1, q) * q_integer(r - k, q),
        Family::Affine { r, q } if k == 0 => q_pow(q, r),
        Family::Affine { r, q } => {
            let qm1 = BigInt::from(q - 1);
            &qm1 * &qm1 * q_pow(q, 2 * k - 1) * q_integer(k, q) * q_integer(r - k + 1, q)
        }
        _ => unreachable!("rank computed above"),
    };
    let beta_sq = Rational::new(numer, four);
    Ok(ClosedFormBeta { beta: sqrt_f64(&beta_sq), beta_sq })
}

/// All closed-form `β_k²`, `k = 0..r`.
pub fn closed_form_beta_sq(family: &Family) -> Result<Vec<Rational>, SpectralError> {
    let r = closed_form_rank(family).ok_or_else(|| SpectralError::NoClosedForm(family.to_string()))?;
    (0..r).map(|k| closed_form_beta(family, k).map(|b| b.beta_sq)).collect()
}
