//! The diamond product and the creation, annihilation and Hamiltonian
//! operators it induces on the free vector space over a lattice.
//!
//! `x ⋄ y = x ∨ y` when `x ∧ y = 0̂`, and the algebra zero otherwise. The
//! bottom `0̂` is the multiplicative unit and is never confused with the
//! algebra zero.

use num_bigint::BigInt;
use num_traits::One;

use crate::lattice::{ElementId, FiniteLattice};
use crate::operator::{OperatorError, OperatorMatrix, Rational};

/// Value of a diamond product: a lattice element or the algebra zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiamondResult {
    Element(ElementId),
    Zero,
}

impl DiamondResult {
    pub fn element(self) -> Option<ElementId> {
        match self {
            DiamondResult::Element(x) => Some(x),
            DiamondResult::Zero => None,
        }
    }
}

pub fn diamond(l: &FiniteLattice, x: ElementId, y: ElementId) -> DiamondResult {
    if l.meet(x, y) == ElementId::BOTTOM {
        DiamondResult::Element(l.join(x, y))
    } else {
        DiamondResult::Zero
    }
}

/// Bilinear extension to the algebra zero.
fn diamond_ext(l: &FiniteLattice, x: DiamondResult, y: DiamondResult) -> DiamondResult {
    match (x, y) {
        (DiamondResult::Element(x), DiamondResult::Element(y)) => diamond(l, x, y),
        _ => DiamondResult::Zero,
    }
}

/// First triple (in id order) with `(x⋄y)⋄z ≠ x⋄(y⋄z)`, by exhaustive search.
pub fn nonassociativity_witness(l: &FiniteLattice) -> Option<(ElementId, ElementId, ElementId)> {
    for x in l.elements() {
        for y in l.elements() {
            let xy = diamond(l, x, y);
            for z in l.elements() {
                let left = diamond_ext(l, xy, DiamondResult::Element(z));
                let right = diamond_ext(l, DiamondResult::Element(x), diamond(l, y, z));
                if left != right {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

fn require_atom(l: &FiniteLattice, a: ElementId) -> Result<(), OperatorError> {
    if l.contains(a) && l.is_atom(a) {
        Ok(())
    } else {
        Err(OperatorError::NotAnAtom(a))
    }
}

/// `L_a`: column `x` holds a 1 at row `a ⋄ x`, or nothing when that is zero.
pub fn creation_operator(l: &FiniteLattice, a: ElementId) -> Result<OperatorMatrix, OperatorError> {
    require_atom(l, a)?;
    let triplets = l.elements().filter_map(|x| diamond(l, a, x).element().map(|y| (y.0, x.0, Rational::one())));
    Ok(OperatorMatrix::from_triplets(l.len(), triplets, false))
}

/// `L_aᵗ(e_y) = Σ e_x` over `x` with `x ∨ a = y` and `a ∧ x = 0̂`.
///
/// Built from that sum directly (scanning the down-set of each `y`) rather
/// than by transposing `L_a`.
pub fn annihilation_operator(l: &FiniteLattice, a: ElementId) -> Result<OperatorMatrix, OperatorError> {
    require_atom(l, a)?;
    let mut triplets = Vec::new();
    let mut seen = vec![u32::MAX; l.len()];
    for y in l.elements() {
        let mut stack = vec![y];
        seen[y.index()] = y.0;
        while let Some(x) = stack.pop() {
            if l.join(x, a) == y && l.meet(a, x) == ElementId::BOTTOM {
                triplets.push((x.0, y.0, Rational::one()));
            }
            for &d in l.covers_down(x) {
                if seen[d.index()] != y.0 {
                    seen[d.index()] = y.0;
                    stack.push(d);
                }
            }
        }
    }
    Ok(OperatorMatrix::from_triplets(l.len(), triplets, false))
}

/// `H = Σ_a (L_a + L_aᵗ)/2`, assembled atom by atom.
pub fn hamiltonian(l: &FiniteLattice) -> OperatorMatrix {
    let h = half();
    let mut triplets = Vec::new();
    for &a in l.atoms() {
        for x in l.elements() {
            if let Some(y) = diamond(l, a, x).element() {
                triplets.push((y.0, x.0, h.clone()));
                triplets.push((x.0, y.0, h.clone()));
            }
        }
    }
    OperatorMatrix::from_triplets(l.len(), triplets, true)
}

/// `H` from cover counting: `H[y][x] = H[x][y] = (a(y) − a(x))/2` for `x ⋖ y`.
///
/// Agrees with [`hamiltonian`] on semimodular lattices.
pub fn hamiltonian_from_covers(l: &FiniteLattice) -> OperatorMatrix {
    let atom_counts: Vec<usize> = l.elements().map(|x| l.count_atoms_below(x)).collect();
    let mut triplets = Vec::new();
    for (x, y) in l.covers() {
        let w = Rational::new(BigInt::from(atom_counts[y.index()] - atom_counts[x.index()]), BigInt::from(2));
        triplets.push((y.0, x.0, w.clone()));
        triplets.push((x.0, y.0, w));
    }
    OperatorMatrix::from_triplets(l.len(), triplets, true)
}

/// Plain-text `⋄` table in the layout of a multiplication table; `0` marks
/// the algebra zero. Intended for lattices with at most 64 elements.
pub fn diamond_table(l: &FiniteLattice) -> String {
    let labels: Vec<&str> = l.elements().map(|x| l.label(x)).collect();
    let width = labels.iter().map(|s| s.chars().count()).max().unwrap_or(1).max(1);
    let pad = |s: &str| format!("{s:>width$}");
    let mut out = String::new();
    out.push_str(&pad("⋄"));
    out.push_str(" |");
    for s in &labels {
        out.push(' ');
        out.push_str(&pad(s));
    }
    out.push('\n');
    out.push_str(&"-".repeat((width + 1) * (labels.len() + 1) + 1));
    out.push('\n');
    for x in l.elements() {
        out.push_str(&pad(labels[x.index()]));
        out.push_str(" |");
        for y in l.elements() {
            out.push(' ');
            match diamond(l, x, y) {
                DiamondResult::Element(z) => out.push_str(&pad(labels[z.index()])),
                DiamondResult::Zero => out.push_str(&pad("0")),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_boolean, build_uniform};
    use crate::operator::basis_vector;
    use num_traits::Zero;

    const BOT: ElementId = ElementId(0);
    const A: ElementId = ElementId(1);
    const B: ElementId = ElementId(2);
    const C: ElementId = ElementId(3);
    const TOP: ElementId = ElementId(4);

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn m3_table_matches() {
        use DiamondResult::{Element as E, Zero as Z};
        let m3 = build_uniform(2, 3).unwrap();
        let expected = [
            [E(BOT), E(A), E(B), E(C), E(TOP)],
            [E(A), Z, E(TOP), E(TOP), Z],
            [E(B), E(TOP), Z, E(TOP), Z],
            [E(C), E(TOP), E(TOP), Z, Z],
            [E(TOP), Z, Z, Z, Z],
        ];
        for x in m3.elements() {
            for y in m3.elements() {
                assert_eq!(diamond(&m3, x, y), expected[x.index()][y.index()], "{x} ⋄ {y}");
            }
        }
    }

    #[test]
    fn algebra_zero_absorbs() {
        let m3 = build_uniform(2, 3).unwrap();
        // a ⋄ a is the algebra zero, so (a ⋄ a) ⋄ b is zero, not b
        assert_eq!(diamond(&m3, A, A), DiamondResult::Zero);
        assert_eq!(diamond_ext(&m3, DiamondResult::Zero, DiamondResult::Element(B)), DiamondResult::Zero);
        assert_eq!(diamond_ext(&m3, DiamondResult::Element(A), diamond(&m3, A, B)), DiamondResult::Zero);
    }

    #[test]
    fn witnesses() {
        // modular lattices are associative; U(3,4) is not modular
        assert_eq!(nonassociativity_witness(&build_uniform(2, 3).unwrap()), None);
        assert_eq!(nonassociativity_witness(&build_boolean(0).unwrap()), None);
        assert_eq!(nonassociativity_witness(&build_boolean(3).unwrap()), None);
        let u34 = build_uniform(3, 4).unwrap();
        let (x, y, z) = nonassociativity_witness(&u34).unwrap();
        let left = diamond_ext(&u34, diamond(&u34, x, y), DiamondResult::Element(z));
        let right = diamond_ext(&u34, DiamondResult::Element(x), diamond(&u34, y, z));
        assert_ne!(left, right);
    }

    #[test]
    fn creation_on_m3() {
        let m3 = build_uniform(2, 3).unwrap();
        let la = creation_operator(&m3, A).unwrap();
        assert_eq!(la.apply(&basis_vector(5, BOT)).unwrap(), basis_vector(5, A));
        assert_eq!(la.apply(&basis_vector(5, B)).unwrap(), basis_vector(5, TOP));
        assert!(la.apply(&basis_vector(5, A)).unwrap().iter().all(Zero::is_zero));
        assert_eq!(creation_operator(&m3, TOP).unwrap_err(), OperatorError::NotAnAtom(TOP));
        assert_eq!(creation_operator(&m3, ElementId(9)).unwrap_err(), OperatorError::NotAnAtom(ElementId(9)));
    }

    #[test]
    fn annihilation_on_m3() {
        let m3 = build_uniform(2, 3).unwrap();
        let lt = annihilation_operator(&m3, A).unwrap();
        assert_eq!(lt.apply(&basis_vector(5, A)).unwrap(), basis_vector(5, BOT));
        let mut bc = basis_vector(5, B);
        bc[C.index()] = q(1, 1);
        assert_eq!(lt.apply(&basis_vector(5, TOP)).unwrap(), bc);
        assert!(lt.apply(&basis_vector(5, BOT)).unwrap().iter().all(Zero::is_zero));
        assert_eq!(lt, creation_operator(&m3, A).unwrap().transpose());
    }

    #[test]
    fn hamiltonian_small_cases() {
        let b1 = build_boolean(1).unwrap();
        let h = hamiltonian(&b1);
        assert_eq!(h.entry(BOT, A), q(1, 2));
        assert_eq!(h.entry(A, BOT), q(1, 2));
        assert_eq!(h.nnz(), 2);

        let m3 = build_uniform(2, 3).unwrap();
        let h = hamiltonian(&m3);
        let expected = vec![q(0, 1), q(1, 2), q(1, 2), q(1, 2), q(0, 1)];
        assert_eq!(h.apply(&basis_vector(5, BOT)).unwrap(), expected);
        assert_eq!(h, hamiltonian_from_covers(&m3));
        assert!(h.is_exactly_symmetric());

        let b2 = build_boolean(2).unwrap();
        let top = b2.top();
        let v = hamiltonian(&b2).apply(&basis_vector(4, top)).unwrap();
        assert_eq!(v, vec![q(0, 1), q(1, 2), q(1, 2), q(0, 1)]);
    }

    #[test]
    fn table_rendering() {
        let table = diamond_table(&build_boolean(1).unwrap());
        assert_eq!(table.lines().count(), 4);
        assert!(table.lines().nth(3).unwrap().ends_with("0"));
    }
}
