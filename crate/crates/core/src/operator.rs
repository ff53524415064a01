//! Exact sparse matrices over the rationals, stored column-major.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::ElementId;

pub type Rational = BigRational;
pub type RationalVector = Vec<Rational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("dimension mismatch: operator is {expected}-dimensional, vector has {found} entries")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0} is not an atom")]
    NotAnAtom(ElementId),
    #[error("malformed operator dump: {0}")]
    Malformed(String),
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    s.trim().parse().ok()
}

/// Serializes rationals as `"p/q"` strings (integers as `"p"`).
pub mod as_strings {
    use super::Rational;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&v.to_string())?;
        }
        seq.end()
    }
}

/// Unit basis vector `e_x` in dimension `dim`.
pub fn basis_vector(dim: usize, x: ElementId) -> RationalVector {
    let mut v = vec![Rational::zero(); dim];
    v[x.index()] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}

/// Square sparse matrix; every stored entry is nonzero and rows within a
/// column are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    dim: usize,
    columns: Vec<Vec<(u32, Rational)>>,
    symmetric: bool,
}

impl OperatorMatrix {
    pub fn zero(dim: usize) -> Self {
        OperatorMatrix { dim, columns: vec![Vec::new(); dim], symmetric: true }
    }

    /// Sums duplicate `(row, col)` triplets and drops zeros.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (u32, u32, Rational)>,
        symmetric: bool,
    ) -> Self {
        let mut columns: Vec<Vec<(u32, Rational)>> = vec![Vec::new(); dim];
        for (row, col, v) in triplets {
            assert!((row as usize) < dim && (col as usize) < dim, "entry outside {dim}x{dim}");
            columns[col as usize].push((row, v));
        }
        for col in columns.iter_mut() {
            col.sort_by_key(|(r, _)| *r);
            let mut merged: Vec<(u32, Rational)> = Vec::with_capacity(col.len());
            for (r, v) in col.drain(..) {
                match merged.last_mut() {
                    Some((lr, lv)) if *lr == r => *lv += v,
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            *col = merged;
        }
        OperatorMatrix { dim, columns, symmetric }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, col: ElementId) -> &[(u32, Rational)] {
        &self.columns[col.index()]
    }

    pub fn entry(&self, row: ElementId, col: ElementId) -> Rational {
        let column = &self.columns[col.index()];
        match column.binary_search_by_key(&row.0, |(r, _)| *r) {
            Ok(i) => column[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Stored entries as `(row, col, value)`, sorted by `(col, row)`.
    pub fn entries(&self) -> impl Iterator<Item = (ElementId, ElementId, &Rational)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (ElementId(*r), ElementId(c as u32), v)))
    }

    pub fn transpose(&self) -> Self {
        OperatorMatrix::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c.0, r.0, v.clone())), self.symmetric)
    }

    /// Exact entrywise symmetry test, independent of the stored flag.
    pub fn is_exactly_symmetric(&self) -> bool {
        self.entries().all(|(r, c, v)| &self.entry(c, r) == v)
    }

    pub fn add(&self, other: &OperatorMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        OperatorMatrix::from_triplets(
            self.dim,
            self.entries().chain(other.entries()).map(|(r, c, v)| (r.0, c.0, v.clone())),
            self.symmetric && other.symmetric,
        )
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        OperatorMatrix::from_triplets(self.dim, self.entries().map(|(r, c, v)| (r.0, c.0, v * factor)), self.symmetric)
    }

    /// Exact matrix–vector product.
    pub fn apply(&self, v: &[Rational]) -> Result<RationalVector, OperatorError> {
        if v.len() != self.dim {
            return Err(OperatorError::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let mut out = vec![Rational::zero(); self.dim];
        for (col, x) in self.columns.iter().zip(v) {
            if x.is_zero() {
                continue;
            }
            for (r, m) in col {
                out[*r as usize] += m * x;
            }
        }
        Ok(out)
    }

    /// `⟨e_row, M^power e_col⟩` by repeated application.
    pub fn power_entry(&self, row: ElementId, col: ElementId, power: usize) -> Rational {
        let mut v = basis_vector(self.dim, col);
        for _ in 0..power {
            v = self.apply(&v).expect("square");
        }
        v[row.index()].clone()
    }

    pub fn to_dump(&self) -> OperatorDump {
        OperatorDump { dim: self.dim, entries: self.entries().map(|(r, c, v)| (r.0, c.0, v.to_string())).collect() }
    }

    pub fn from_dump(dump: &OperatorDump) -> Result<Self, OperatorError> {
        let mut triplets = Vec::with_capacity(dump.entries.len());
        for (r, c, s) in &dump.entries {
            if *r as usize >= dump.dim || *c as usize >= dump.dim {
                return Err(OperatorError::Malformed(format!("entry ({r},{c}) outside dimension")));
            }
            let v = parse_rational(s).ok_or_else(|| OperatorError::Malformed(format!("bad rational {s:?}")))?;
            triplets.push((*r, *c, v));
        }
        let m = OperatorMatrix::from_triplets(dump.dim, triplets, false);
        let symmetric = m.is_exactly_symmetric();
        Ok(OperatorMatrix { symmetric, ..m })
    }
}

/// Serialized operator: `{ "dim": n, "entries": [[row, col, "p/q"], ...] }`
/// sorted by `(col, row)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDump {
    pub dim: usize,
    pub entries: Vec<(u32, u32, String)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = OperatorMatrix::from_triplets(
            3,
            vec![(0, 1, q(1, 2)), (0, 1, q(1, 2)), (2, 0, q(1, 3)), (2, 0, q(-1, 3))],
            false,
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.entry(ElementId(0), ElementId(1)), q(1, 1));
    }

    #[test]
    fn zero_matrix_applies_to_zero() {
        let v = vec![q(1, 2), q(3, 1)];
        assert_eq!(OperatorMatrix::zero(2).apply(&v).unwrap(), vec![q(0, 1), q(0, 1)]);
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let err = OperatorMatrix::zero(3).apply(&[q(1, 1)]).unwrap_err();
        assert_eq!(err, OperatorError::DimensionMismatch { expected: 3, found: 1 });
    }

    #[test]
    fn dump_round_trip_and_ordering() {
        let m = OperatorMatrix::from_triplets(2, vec![(1, 0, q(1, 2)), (0, 1, q(1, 2))], true);
        let dump = m.to_dump();
        assert_eq!(dump.entries, vec![(1, 0, "1/2".to_string()), (0, 1, "1/2".to_string())]);
        let json = serde_json::to_string(&dump).unwrap();
        assert_eq!(json, r#"{"dim":2,"entries":[[1,0,"1/2"],[0,1,"1/2"]]}"#);
        let back = OperatorMatrix::from_dump(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
