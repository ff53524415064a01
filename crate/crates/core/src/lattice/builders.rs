//! Built-in lattice families.
//!
//! Every builder lists elements rank-major. Within a rank: subsets in colex
//! order, subspaces in echelon-form lex order, affine flats by direction
//! subspace then coset representative.

use std::collections::HashMap;

use super::gf::{gaussian_binomial, is_prime, PrimeField};
use super::{bit_set, words_for, Family, FiniteLattice, LatticeError, DEFAULT_SIZE_CAP, SIZE_CAP_ENV};

/// Largest ground set accepted by [`LatticeBuilder::boolean`].
pub const MAX_BOOLEAN_RANK: u32 = 20;

/// Builders with a configurable element cap.
#[derive(Clone, Copy, Debug)]
pub struct LatticeBuilder {
    size_cap: usize,
}

impl Default for LatticeBuilder {
    fn default() -> Self {
        LatticeBuilder { size_cap: DEFAULT_SIZE_CAP }
    }
}

impl LatticeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads the cap from `LATTICE_SIZE_CAP`, falling back to the default.
    pub fn from_env() -> Self {
        let size_cap = std::env::var(SIZE_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_SIZE_CAP);
        LatticeBuilder { size_cap }
    }

    pub fn size_cap(mut self, cap: usize) -> Self {
        self.size_cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.size_cap
    }

    fn check_size(&self, requested: Option<u128>) -> Result<usize, LatticeError> {
        match requested {
            Some(n) if n <= self.size_cap as u128 => Ok(n as usize),
            Some(n) => Err(LatticeError::SizeBound { requested: n, cap: self.size_cap }),
            None => Err(LatticeError::SizeBound { requested: u128::MAX, cap: self.size_cap }),
        }
    }

    /// Subsets of `[n]` ordered by inclusion.
    pub fn boolean(&self, n: u32) -> Result<FiniteLattice, LatticeError> {
        if n > MAX_BOOLEAN_RANK {
            return Err(LatticeError::SizeBound { requested: 1u128 << n.min(127), cap: self.size_cap });
        }
        let size = self.check_size(Some(1u128 << n))?;
        let mut masks: Vec<u64> = (0..size as u64).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        let ranks = masks.iter().map(|m| m.count_ones()).collect();
        let labels = masks.iter().map(|&m| subset_label(&[m], n as usize)).collect();
        Ok(FiniteLattice::from_atomistic(ranks, 1, masks, labels, Family::Boolean { n }, |_| {}))
    }

    /// Flats of the uniform matroid `U_{r,m}`: subsets of size `< r` plus `[m]`.
    pub fn uniform(&self, r: u32, m: u32) -> Result<FiniteLattice, LatticeError> {
        if r < 1 || m < r {
            return Err(LatticeError::InvalidParameters(format!("uniform(r={r}, m={m}) needs 1 <= r <= m")));
        }
        let mut count: u128 = 1;
        let mut binom: u128 = 1;
        for k in 0..r {
            if k > 0 {
                binom = binom * (m - k + 1) as u128 / k as u128;
            }
            count =
                count.checked_add(binom).ok_or(LatticeError::SizeBound { requested: u128::MAX, cap: self.size_cap })?;
        }
        self.check_size(Some(count))?;

        let family = Family::Uniform { r, m };
        if r == 1 {
            // every point is parallel: the only flats are ∅ and [m]
            let top_label = subset_label(&full_set(m as usize), m as usize);
            return Ok(FiniteLattice::from_atomistic(
                vec![0, 1],
                1,
                vec![0, 1],
                vec!["{}".to_string(), top_label],
                family,
                |_| {},
            ));
        }
        let words = words_for(m as usize);
        let mut ranks = Vec::new();
        let mut sets: Vec<u64> = Vec::new();
        let mut labels = Vec::new();
        for k in 0..r {
            let mut subsets = combinations(m as usize, k as usize);
            subsets.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
            for s in subsets {
                let mut bits = vec![0u64; words];
                for &e in &s {
                    bit_set(&mut bits, e);
                }
                labels.push(subset_label(&bits, m as usize));
                sets.extend_from_slice(&bits);
                ranks.push(k);
            }
        }
        let full = full_set(m as usize);
        labels.push(subset_label(&full, m as usize));
        sets.extend_from_slice(&full);
        ranks.push(r);
        let full_for_close = full.clone();
        Ok(FiniteLattice::from_atomistic(ranks, words, sets, labels, family, move |set| {
            let size: u32 = set.iter().map(|w| w.count_ones()).sum();
            if size >= r {
                set.copy_from_slice(&full_for_close);
            }
        }))
    }

    /// Linear subspaces of `F_q^r`.
    pub fn projective(&self, r: u32, q: u32) -> Result<FiniteLattice, LatticeError> {
        check_field(r, q)?;
        let mut total: u128 = 0;
        for k in 0..=r {
            total = total.saturating_add(gaussian_binomial(r, k, q as u64).unwrap_or(u128::MAX));
        }
        self.check_size(Some(total))?;

        let field = PrimeField::new(q);
        let width = r as usize;
        let points = enumerate_rref(&field, width, 1);
        let point_index: HashMap<Vec<u32>, usize> = points.iter().enumerate().map(|(i, p)| (p[0].clone(), i)).collect();
        let words = words_for(points.len());

        let mut ranks = Vec::new();
        let mut sets = Vec::new();
        let mut labels = Vec::new();
        for k in 0..=width {
            for basis in enumerate_rref(&field, width, k) {
                let mut bits = vec![0u64; words];
                mark_span_points(&field, &basis, width, &point_index, &mut bits);
                sets.extend_from_slice(&bits);
                labels.push(matrix_label(&basis));
                ranks.push(k as u32);
            }
        }
        let point_vectors: Vec<Vec<u32>> = points.into_iter().map(|mut p| p.remove(0)).collect();
        Ok(FiniteLattice::from_atomistic(ranks, words, sets, labels, Family::Projective { r, q }, move |set| {
            let rows: Vec<Vec<u32>> = super::bit_positions(set).map(|p| point_vectors[p].clone()).collect();
            let basis = field.rref(rows);
            set.iter_mut().for_each(|w| *w = 0);
            mark_span_points(&field, &basis, width, &point_index, set);
        }))
    }

    /// Affine subspaces of `F_q^r` with an adjoined bottom; a `k`-flat has rank `k+1`.
    pub fn affine(&self, r: u32, q: u32) -> Result<FiniteLattice, LatticeError> {
        check_field(r, q)?;
        let mut total: u128 = 1;
        for k in 0..=r {
            let flats = gaussian_binomial(r, k, q as u64)
                .and_then(|n| (q as u128).checked_pow(r - k).and_then(|c| c.checked_mul(n)))
                .unwrap_or(u128::MAX);
            total = total.saturating_add(flats);
        }
        self.check_size(Some(total))?;

        let field = PrimeField::new(q);
        let width = r as usize;
        let n_points = (q as usize).pow(r);
        let words = words_for(n_points);

        let mut ranks = vec![0u32];
        let mut sets = vec![0u64; words];
        let mut labels = vec!["∅".to_string()];
        for k in 0..=width {
            for basis in enumerate_rref(&field, width, k) {
                let pivots: Vec<usize> = basis.iter().map(|row| row.iter().position(|&v| v != 0).unwrap()).collect();
                let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
                for code in 0..(q as usize).pow(free.len() as u32) {
                    let digits = field.vector_from_index(code, free.len());
                    let mut rep = vec![0u32; width];
                    for (c, d) in free.iter().zip(&digits) {
                        rep[*c] = *d;
                    }
                    let mut bits = vec![0u64; words];
                    field.for_each_in_span(&basis, width, |u| {
                        let p: Vec<u32> = rep.iter().zip(u).map(|(a, b)| field.add(*a, *b)).collect();
                        bit_set(&mut bits, field.vector_index(&p));
                    });
                    sets.extend_from_slice(&bits);
                    labels.push(format!("{}+{}", vector_label(&rep), matrix_label(&basis)));
                    ranks.push(k as u32 + 1);
                }
            }
        }
        Ok(FiniteLattice::from_atomistic(ranks, words, sets, labels, Family::Affine { r, q }, move |set| {
            let members: Vec<usize> = super::bit_positions(set).collect();
            let Some(&first) = members.first() else { return };
            let origin = field.vector_from_index(first, width);
            let rows: Vec<Vec<u32>> = members[1..]
                .iter()
                .map(|&p| {
                    let v = field.vector_from_index(p, width);
                    v.iter().zip(&origin).map(|(a, b)| field.sub(*a, *b)).collect()
                })
                .collect();
            let basis = if rows.is_empty() { rows } else { field.rref(rows) };
            field.for_each_in_span(&basis, width, |u| {
                let p: Vec<u32> = origin.iter().zip(u).map(|(a, b)| field.add(*a, *b)).collect();
                bit_set(set, field.vector_index(&p));
            });
        }))
    }

    /// Cartesian product ordered lexicographically by `(left id, right id)`.
    pub fn product(&self, left: &FiniteLattice, right: &FiniteLattice) -> Result<FiniteLattice, LatticeError> {
        self.check_size((left.len() as u128).checked_mul(right.len() as u128))?;
        Ok(FiniteLattice::product_of(left, right))
    }
}

pub fn build_boolean(n: u32) -> Result<FiniteLattice, LatticeError> {
    LatticeBuilder::default().boolean(n)
}

pub fn build_uniform(r: u32, m: u32) -> Result<FiniteLattice, LatticeError> {
    LatticeBuilder::default().uniform(r, m)
}

pub fn build_projective(r: u32, q: u32) -> Result<FiniteLattice, LatticeError> {
    LatticeBuilder::default().projective(r, q)
}

pub fn build_affine(r: u32, q: u32) -> Result<FiniteLattice, LatticeError> {
    LatticeBuilder::default().affine(r, q)
}

pub fn build_product(left: &FiniteLattice, right: &FiniteLattice) -> Result<FiniteLattice, LatticeError> {
    LatticeBuilder::default().product(left, right)
}

fn check_field(r: u32, q: u32) -> Result<(), LatticeError> {
    if !is_prime(q as u64) {
        return Err(LatticeError::NotPrime(q as u64));
    }
    if r < 1 {
        return Err(LatticeError::InvalidParameters("dimension r must be at least 1".into()));
    }
    Ok(())
}

fn full_set(m: usize) -> Vec<u64> {
    let mut bits = vec![0u64; words_for(m)];
    for e in 0..m {
        bit_set(&mut bits, e);
    }
    bits
}

/// All `k`-subsets of `0..m` in lex order.
pub(crate) fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < m - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Reduced row-echelon bases of all `k`-dimensional subspaces of `F_q^width`,
/// lex by pivot set and then by free entries.
fn enumerate_rref(field: &PrimeField, width: usize, k: usize) -> Vec<Vec<Vec<u32>>> {
    let q = field.order() as usize;
    let mut out = Vec::new();
    for pivots in combinations(width, k) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(row, &p)| {
                let pivots = &pivots;
                (p + 1..width).filter(move |c| !pivots.contains(c)).map(move |c| (row, c))
            })
            .collect();
        for code in 0..q.pow(free.len() as u32) {
            let digits = field.vector_from_index(code, free.len());
            let mut m = vec![vec![0u32; width]; k];
            for (row, &p) in pivots.iter().enumerate() {
                m[row][p] = 1;
            }
            for (&(row, col), &d) in free.iter().zip(&digits) {
                m[row][col] = d;
            }
            out.push(m);
        }
    }
    out
}

fn mark_span_points(
    field: &PrimeField,
    basis: &[Vec<u32>],
    width: usize,
    point_index: &HashMap<Vec<u32>, usize>,
    bits: &mut [u64],
) {
    let mut buf = vec![0u32; width];
    field.for_each_in_span(basis, width, |v| {
        buf.copy_from_slice(v);
        if field.normalize(&mut buf) {
            bit_set(bits, point_index[&buf]);
        }
    });
}

fn subset_label(bits: &[u64], m: usize) -> String {
    let items: Vec<String> = (0..m).filter(|&e| super::bit_test(bits, e)).map(|e| (e + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn vector_label(v: &[u32]) -> String {
    v.iter().map(|x| x.to_string()).collect()
}

fn matrix_label(rows: &[Vec<u32>]) -> String {
    let rows: Vec<String> = rows.iter().map(|r| vector_label(r)).collect();
    format!("<{}>", rows.join(";"))
}
