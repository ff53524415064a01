//! Runs every invariant that applies to a single lattice and collects the
//! outcomes.

use serde::Serialize;

use crate::diamond::{
    annihilation_operator, creation_operator, diamond, hamiltonian, hamiltonian_from_covers, DiamondResult,
};
use crate::lattice::{validate, ElementId, Family, FiniteLattice, TABLE_LIMIT};
use crate::operator::{OperatorMatrix, Rational};
use crate::radial::{
    cover_weight_sums, jacobi_from_compression, jacobi_from_formula, radial_invariance, total_cover_weight, JacobiData,
};
use crate::spectral::{
    boolean_closed_form, closed_form_beta_sq, determinant_polynomials, eigendecompose, resolvent, vacuum_moments_full,
    vacuum_moments_radial, RationalPolynomial,
};

/// Odd moments are checked up to this power.
pub const ODD_MOMENT_ORDER: usize = 11;
/// Full and radial moments are compared up to this power.
pub const MOMENT_AGREEMENT_ORDER: usize = 10;
const MEASURE_TOLERANCE: f64 = 1e-8;
const BOOLEAN_SPECTRUM_TOLERANCE: f64 = 1e-10;
/// Above this rank the matching expansion of the determinant is skipped.
const MATCHING_RANK_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariant {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub family: String,
    pub elements: usize,
    pub invariants: Vec<Invariant>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.invariants.iter().all(|i| i.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Invariant> {
        self.invariants.iter().find(|i| i.name == name)
    }

    pub fn first_failure(&self) -> Option<&Invariant> {
        self.invariants.iter().find(|i| !i.passed)
    }
}

struct Collector(Vec<Invariant>);

impl Collector {
    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.0.push(Invariant { name, passed, detail: detail.into() });
    }

    /// Records a search for a counterexample; the detail names it if found.
    fn witness<T: std::fmt::Debug>(&mut self, name: &'static str, found: Option<T>) {
        let detail = found.as_ref().map(|w| format!("counterexample {w:?}")).unwrap_or_default();
        self.push(name, found.is_none(), detail);
    }
}

/// `det(I − tJ_k)` as a sum over sets of disjoint edges `{i, i+1}` of the
/// path, each contributing `−β_i² t²`.
pub fn determinant_by_matchings(beta_sq: &[Rational]) -> RationalPolynomial {
    // with[i] / without[i]: matchings on edges 0..i, whether edge i−1 is used
    let mut with = RationalPolynomial::zero();
    let mut without = RationalPolynomial::one();
    for b2 in beta_sq {
        let term = RationalPolynomial::monomial(-b2.clone(), 2);
        let new_with = &without * &term;
        without = &with + &without;
        with = new_with;
    }
    &with + &without
}

/// Largest relative deviation between measure moments and exact moments.
fn moment_deviation(measured: &[f64], exact: &[Rational]) -> f64 {
    measured
        .iter()
        .zip(exact)
        .map(|(m, e)| {
            let e = crate::spectral::poly::to_f64(e);
            (m - e).abs() / e.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

fn operator_checks(l: &FiniteLattice, h: &OperatorMatrix, out: &mut Collector) {
    let small = l.len() <= TABLE_LIMIT;
    if small {
        let bad = l
            .elements()
            .flat_map(|x| l.elements().map(move |y| (x, y)))
            .find(|&(x, y)| diamond(l, x, y) != diamond(l, y, x));
        out.witness("diamond_commutative", bad);
    }
    let unit = l.elements().find(|&x| diamond(l, ElementId::BOTTOM, x) != DiamondResult::Element(x));
    out.witness("diamond_unit", unit);

    let raising = l.atoms().iter().find_map(|&a| {
        l.elements().find(|&x| diamond(l, a, x).element().is_some_and(|y| l.rank(y) != l.rank(x) + 1)).map(|x| (a, x))
    });
    out.witness("rank_raising", raising);

    if small {
        let bad = l.atoms().iter().copied().find(|&a| {
            let la = creation_operator(l, a).expect("atom");
            annihilation_operator(l, a).expect("atom") != la.transpose()
        });
        out.witness("transpose_consistency", bad);
    }

    out.push("hamiltonian_two_ways", *h == hamiltonian_from_covers(l), "");
    out.push("hamiltonian_symmetric", h.is_exactly_symmetric(), "");
    let off_band = h.entries().find(|(r, c, _)| l.rank(*r).abs_diff(l.rank(*c)) != 1);
    out.witness("bipartite", off_band.map(|e| (e.0, e.1)));
}

fn radial_checks(l: &FiniteLattice, h: &OperatorMatrix, out: &mut Collector) -> Option<(JacobiData, bool)> {
    let formula = jacobi_from_formula(l);
    let w: u64 = cover_weight_sums(l).iter().sum();
    out.push("layer_sum_consistency", w == total_cover_weight(l), format!("sum of W_k = {w}"));
    let compression = match jacobi_from_compression(l, h) {
        Ok(j) => j,
        Err(e) => {
            out.push("zero_diagonal", false, e.to_string());
            return None;
        }
    };
    out.push("zero_diagonal", true, "");
    out.push("formula_equals_compression", formula == compression, "");
    let invariant = match radial_invariance(l, h) {
        Ok(report) => {
            let detail = match report.failing_level {
                Some(k) => format!("not invariant at level {k}; reported only"),
                None => "invariant".to_string(),
            };
            out.push("radial_invariance_decided", true, detail);
            report.invariant
        }
        Err(e) => {
            out.push("radial_invariance_decided", false, e.to_string());
            false
        }
    };
    Some((compression, invariant))
}

fn spectral_checks(l: &FiniteLattice, h: &OperatorMatrix, j: &JacobiData, invariant: bool, out: &mut Collector) {
    let full = vacuum_moments_full(l, h, ODD_MOMENT_ORDER);
    out.push("odd_moments_vanish", full.odd_vanish(), format!("k <= {ODD_MOMENT_ORDER}"));

    let k = MOMENT_AGREEMENT_ORDER.max(2 * j.r());
    let radial = vacuum_moments_radial(j, k);
    if invariant {
        let agree = full.truncate(MOMENT_AGREEMENT_ORDER) == radial.truncate(MOMENT_AGREEMENT_ORDER);
        out.push("full_radial_moments", agree, format!("k <= {MOMENT_AGREEMENT_ORDER}"));
    }

    let dets = determinant_polynomials(j);
    if j.r() <= MATCHING_RANK_LIMIT {
        let bad = (0..=j.r()).find(|&k| dets[k + 1] != determinant_by_matchings(&j.beta_sq[..k]));
        out.witness("determinant_recurrence", bad.map(|k| format!("D_{k}")));
    }
    let series = resolvent(j).series(k).expect("D_r(0) = 1");
    out.push("resolvent_series", series == radial.values, format!("order {k}"));

    match eigendecompose(j) {
        Ok(mu) => {
            let total = mu.total_weight();
            let mean = mu.moment(1);
            let ok = (total - 1.0).abs() <= 1e-10 && mean.abs() <= 1e-10 && mu.atoms.iter().all(|a| a.1 >= -1e-15);
            out.push("measure_normalized", ok, format!("total {total:.3e}, mean {mean:.3e}"));
            let dev = moment_deviation(&mu.moments(MOMENT_AGREEMENT_ORDER as u32), &radial.values);
            out.push("measure_moments", dev <= MEASURE_TOLERANCE, format!("max relative deviation {dev:.3e}"));
            if let Family::Boolean { n } = *l.family() {
                let (dx, dw) = mu.max_deviation(&boolean_closed_form(n)).unwrap_or((f64::INFINITY, f64::INFINITY));
                let ok = dx <= BOOLEAN_SPECTRUM_TOLERANCE && dw <= BOOLEAN_SPECTRUM_TOLERANCE;
                out.push("boolean_spectrum", ok, format!("eigenvalue error {dx:.3e}, weight error {dw:.3e}"));
            }
        }
        Err(e) => out.push("measure_normalized", false, e.to_string()),
    }

    if let Ok(closed) = closed_form_beta_sq(l.family()) {
        out.push("closed_form_beta", closed == j.beta_sq, "");
    }
}

/// Runs every applicable invariant. Structural validation failures stop the
/// run after the structural entry, since later checks assume a lattice.
pub fn verify(l: &FiniteLattice) -> VerifyReport {
    let mut out = Collector(Vec::new());
    let report = validate(l);
    let failures: Vec<&str> = report.failures().map(|c| c.name).collect();
    out.push("structure", report.all_passed(), if failures.is_empty() { String::new() } else { failures.join(", ") });
    if report.all_passed() {
        let h = hamiltonian(l);
        operator_checks(l, &h, &mut out);
        if let Some((j, invariant)) = radial_checks(l, &h, &mut out) {
            spectral_checks(l, &h, &j, invariant, &mut out);
        }
    }
    VerifyReport { family: l.family().to_string(), elements: l.len(), invariants: out.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_affine, build_boolean, build_projective, build_uniform};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn matchings_reproduce_b3() {
        let d = determinant_by_matchings(&[q(3, 4), q(1, 1), q(3, 4)]);
        assert_eq!(d, RationalPolynomial::new(vec![q(1, 1), q(0, 1), q(-5, 2), q(0, 1), q(9, 16)]));
        assert_eq!(determinant_by_matchings(&[]), RationalPolynomial::one());
    }

    #[test]
    fn builtins_verify() {
        for l in [
            build_boolean(0).unwrap(),
            build_boolean(4).unwrap(),
            build_uniform(2, 3).unwrap(),
            build_uniform(3, 5).unwrap(),
            build_projective(3, 2).unwrap(),
            build_affine(2, 3).unwrap(),
        ] {
            let report = verify(&l);
            assert!(report.passed(), "{}: {:?}", report.family, report.first_failure());
        }
    }

    #[test]
    fn boolean_gets_family_checks() {
        let report = verify(&build_boolean(3).unwrap());
        assert!(report.get("boolean_spectrum").unwrap().passed);
        assert!(report.get("closed_form_beta").unwrap().passed);
        assert!(report.get("full_radial_moments").unwrap().passed);
    }
}
