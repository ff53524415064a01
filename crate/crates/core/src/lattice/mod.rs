//! Finite graded lattices: storage, queries, builders, parsing and validation.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod builders;
pub(crate) mod gf;
pub mod parse;
pub mod validate;

pub use builders::{build_affine, build_boolean, build_product, build_projective, build_uniform, LatticeBuilder};
pub use parse::{parse_lattice, LatticeDocument, ParseError, ParsedLattice};
pub use validate::{validate, Check, ValidationReport};

/// Default maximum number of elements a builder will produce.
pub const DEFAULT_SIZE_CAP: usize = 200_000;
/// Environment variable overriding [`DEFAULT_SIZE_CAP`].
pub const SIZE_CAP_ENV: &str = "LATTICE_SIZE_CAP";
/// Lattices up to this size keep dense join/meet tables.
pub const TABLE_LIMIT: usize = 2048;

/// Dense index of a lattice element. Element 0 is always the bottom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl ElementId {
    pub const BOTTOM: ElementId = ElementId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice would have {requested} elements, above the size cap of {cap}")]
    SizeBound { requested: u128, cap: usize },
    #[error("field order {0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

/// Where a lattice came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Boolean { n: u32 },
    Uniform { r: u32, m: u32 },
    Projective { r: u32, q: u32 },
    Affine { r: u32, q: u32 },
    Product(Box<Family>, Box<Family>),
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Boolean { n } => write!(f, "boolean({n})"),
            Family::Uniform { r, m } => write!(f, "uniform({r},{m})"),
            Family::Projective { r, q } => write!(f, "projective({r},{q})"),
            Family::Affine { r, q } => write!(f, "affine({r},{q})"),
            Family::Product(a, b) => write!(f, "product({a},{b})"),
            Family::Custom => write!(f, "custom"),
        }
    }
}

#[derive(Clone)]
enum JoinMeet {
    Table {
        join: Vec<u32>,
        meet: Vec<u32>,
    },
    /// Atomistic semimodular lattice: meets by atom-set intersection,
    /// joins by climbing covers one atom at a time.
    Atomistic {
        index: HashMap<Box<[u64]>, u32>,
    },
    /// Componentwise over `left × right`, id = i·|right| + j.
    Product {
        left: Arc<FiniteLattice>,
        right: Arc<FiniteLattice>,
    },
}

/// An immutable finite graded lattice with dense element ids.
#[derive(Clone)]
pub struct FiniteLattice {
    ranks: Vec<u32>,
    top_rank: u32,
    top: ElementId,
    covers_up: Vec<Vec<ElementId>>,
    covers_down: Vec<Vec<ElementId>>,
    layers: Vec<Vec<ElementId>>,
    atoms: Vec<ElementId>,
    atom_words: usize,
    atom_sets: Vec<u64>,
    labels: Vec<String>,
    family: Family,
    ops: JoinMeet,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteLattice")
            .field("family", &self.family)
            .field("len", &self.len())
            .field("top_rank", &self.top_rank)
            .field("atoms", &self.atoms.len())
            .finish()
    }
}

pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64).max(1)
}

#[inline]
pub(crate) fn bit_test(set: &[u64], pos: usize) -> bool {
    set[pos / 64] >> (pos % 64) & 1 == 1
}

#[inline]
pub(crate) fn bit_set(set: &mut [u64], pos: usize) {
    set[pos / 64] |= 1 << (pos % 64);
}

pub(crate) fn bit_positions(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut bits = word;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let tz = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(w * 64 + tz)
        })
    })
}

impl FiniteLattice {
    /// Assembles a lattice described by per-element atom sets.
    ///
    /// Elements must be listed rank-major with the bottom first, and the atom
    /// at bit position `i` must be the `i`-th rank-one element. `close` maps
    /// an atom set to the atom set of its join (the closure operator).
    pub(crate) fn from_atomistic(
        ranks: Vec<u32>,
        atom_words: usize,
        atom_sets: Vec<u64>,
        labels: Vec<String>,
        family: Family,
        close: impl Fn(&mut [u64]),
    ) -> FiniteLattice {
        let n = ranks.len();
        let aw = atom_words;
        let mut index: HashMap<Box<[u64]>, u32> = HashMap::with_capacity(n);
        for x in 0..n {
            let prev = index.insert(atom_sets[x * aw..(x + 1) * aw].into(), x as u32);
            debug_assert!(prev.is_none(), "duplicate atom set");
        }
        let atoms: Vec<ElementId> = (0..n).filter(|&x| ranks[x] == 1).map(|x| ElementId(x as u32)).collect();
        let mut covers_up = vec![Vec::new(); n];
        let mut buf = vec![0u64; aw];
        for x in 0..n {
            let set = &atom_sets[x * aw..(x + 1) * aw];
            let mut ups: Vec<ElementId> = Vec::new();
            for pos in 0..atoms.len() {
                if bit_test(set, pos) {
                    continue;
                }
                buf.copy_from_slice(set);
                bit_set(&mut buf, pos);
                close(&mut buf);
                let y = *index.get(buf.as_slice()).expect("closure must be an element");
                ups.push(ElementId(y));
            }
            ups.sort_unstable();
            ups.dedup();
            covers_up[x] = ups;
        }
        let mut lattice = FiniteLattice::assemble(
            ranks,
            covers_up,
            atoms,
            aw,
            atom_sets,
            labels,
            family,
            JoinMeet::Atomistic { index },
        );
        if n <= TABLE_LIMIT {
            lattice.fill_tables_from_atomistic();
        }
        lattice
    }

    /// Assembles a lattice from explicit join/meet tables (row-major, n×n).
    pub(crate) fn from_tables(
        ranks: Vec<u32>,
        covers_up: Vec<Vec<ElementId>>,
        join: Vec<u32>,
        meet: Vec<u32>,
        labels: Vec<String>,
        family: Family,
    ) -> FiniteLattice {
        let n = ranks.len();
        let atoms: Vec<ElementId> = (0..n).filter(|&x| ranks[x] == 1).map(|x| ElementId(x as u32)).collect();
        let aw = words_for(atoms.len());
        let mut atom_sets = vec![0u64; n * aw];
        for x in 0..n {
            for (pos, a) in atoms.iter().enumerate() {
                if meet[a.index() * n + x] == a.0 {
                    bit_set(&mut atom_sets[x * aw..(x + 1) * aw], pos);
                }
            }
        }
        FiniteLattice::assemble(ranks, covers_up, atoms, aw, atom_sets, labels, family, JoinMeet::Table { join, meet })
    }

    pub(crate) fn product_of(left: &FiniteLattice, right: &FiniteLattice) -> FiniteLattice {
        let (n1, n2) = (left.len(), right.len());
        let n = n1 * n2;
        let id = |i: usize, j: usize| ElementId((i * n2 + j) as u32);
        let mut ranks = Vec::with_capacity(n);
        let mut covers_up = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n1 {
            for j in 0..n2 {
                ranks.push(left.ranks[i] + right.ranks[j]);
                let mut ups: Vec<ElementId> = left.covers_up[i]
                    .iter()
                    .map(|c| id(c.index(), j))
                    .chain(right.covers_up[j].iter().map(|c| id(i, c.index())))
                    .collect();
                ups.sort_unstable();
                covers_up.push(ups);
                labels.push(format!("({},{})", left.labels[i], right.labels[j]));
            }
        }
        // atoms in id order: (0,b) first, then (a,0)
        let atoms: Vec<ElementId> =
            right.atoms.iter().map(|b| id(0, b.index())).chain(left.atoms.iter().map(|a| id(a.index(), 0))).collect();
        let (a1, a2) = (left.atoms.len(), right.atoms.len());
        let aw = words_for(a1 + a2);
        let mut atom_sets = vec![0u64; n * aw];
        for i in 0..n1 {
            for j in 0..n2 {
                let x = i * n2 + j;
                let set = &mut atom_sets[x * aw..(x + 1) * aw];
                for pos in bit_positions(right.atom_set(ElementId(j as u32))) {
                    bit_set(set, pos);
                }
                for pos in bit_positions(left.atom_set(ElementId(i as u32))) {
                    bit_set(set, a2 + pos);
                }
            }
        }
        FiniteLattice::assemble(
            ranks,
            covers_up,
            atoms,
            aw,
            atom_sets,
            labels,
            Family::Product(Box::new(left.family.clone()), Box::new(right.family.clone())),
            JoinMeet::Product { left: Arc::new(left.clone()), right: Arc::new(right.clone()) },
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        ranks: Vec<u32>,
        covers_up: Vec<Vec<ElementId>>,
        atoms: Vec<ElementId>,
        atom_words: usize,
        atom_sets: Vec<u64>,
        labels: Vec<String>,
        family: Family,
        ops: JoinMeet,
    ) -> FiniteLattice {
        let n = ranks.len();
        let top_rank = ranks.iter().copied().max().unwrap_or(0);
        let mut covers_down = vec![Vec::new(); n];
        for (x, ups) in covers_up.iter().enumerate() {
            for y in ups {
                covers_down[y.index()].push(ElementId(x as u32));
            }
        }
        let mut layers = vec![Vec::new(); top_rank as usize + 1];
        for (x, &rk) in ranks.iter().enumerate() {
            layers[rk as usize].push(ElementId(x as u32));
        }
        let top = layers[top_rank as usize].first().copied().unwrap_or(ElementId::BOTTOM);
        FiniteLattice {
            ranks,
            top_rank,
            top,
            covers_up,
            covers_down,
            layers,
            atoms,
            atom_words,
            atom_sets,
            labels,
            family,
            ops,
        }
    }

    fn fill_tables_from_atomistic(&mut self) {
        let n = self.len();
        let mut join = vec![0u32; n * n];
        let mut meet = vec![0u32; n * n];
        // y = y' ∨ a with y' a lower cover of y; ids are rank-major so y' < y
        let mut decomposition = vec![(0u32, 0usize); n];
        for (y, slot) in decomposition.iter_mut().enumerate().skip(1) {
            let lower = self.covers_down[y][0];
            let pos = bit_positions(self.atom_set(ElementId(y as u32)))
                .find(|&p| !bit_test(self.atom_set(lower), p))
                .expect("cover adds an atom");
            *slot = (lower.0, pos);
        }
        for x in 0..n {
            let row = &mut join[x * n..(x + 1) * n];
            row[0] = x as u32;
            for y in 1..n {
                let (lower, pos) = decomposition[y];
                row[y] = self.join_atom(ElementId(row[lower as usize]), pos).0;
            }
        }
        for x in 0..n {
            for y in x..n {
                let m = self.atomistic_meet(ElementId(x as u32), ElementId(y as u32)).0;
                meet[x * n + y] = m;
                meet[y * n + x] = m;
            }
        }
        self.ops = JoinMeet::Table { join, meet };
    }

    /// `z ∨ a` for the atom at bit position `pos`, via the covers of `z`.
    fn join_atom(&self, z: ElementId, pos: usize) -> ElementId {
        if bit_test(self.atom_set(z), pos) {
            return z;
        }
        *self.covers_up[z.index()]
            .iter()
            .find(|c| bit_test(self.atom_set(**c), pos))
            .expect("semimodular: z ∨ a covers z")
    }

    fn atomistic_meet(&self, x: ElementId, y: ElementId) -> ElementId {
        let JoinMeet::Atomistic { index } = &self.ops else { unreachable!("atomistic meet on non-atomistic storage") };
        let key: Vec<u64> = self.atom_set(x).iter().zip(self.atom_set(y)).map(|(a, b)| a & b).collect();
        ElementId(*index.get(key.as_slice()).expect("atom-set intersection is a flat"))
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.len() as u32).map(ElementId)
    }

    pub fn contains(&self, x: ElementId) -> bool {
        x.index() < self.len()
    }

    pub fn rank(&self, x: ElementId) -> u32 {
        self.ranks[x.index()]
    }

    pub fn top_rank(&self) -> u32 {
        self.top_rank
    }

    pub fn bottom(&self) -> ElementId {
        ElementId::BOTTOM
    }

    pub fn top(&self) -> ElementId {
        self.top
    }

    pub fn covers_up(&self, x: ElementId) -> &[ElementId] {
        &self.covers_up[x.index()]
    }

    pub fn covers_down(&self, x: ElementId) -> &[ElementId] {
        &self.covers_down[x.index()]
    }

    /// All cover pairs `(x, y)` with `x ⋖ y`, ordered by `x` then `y`.
    pub fn covers(&self) -> impl Iterator<Item = (ElementId, ElementId)> + '_ {
        self.elements().flat_map(move |x| self.covers_up(x).iter().map(move |&y| (x, y)))
    }

    /// Elements of rank `k`, in id order. Empty when `k > top_rank`.
    pub fn layer(&self, k: u32) -> &[ElementId] {
        self.layers.get(k as usize).map_or(&[], |l| l.as_slice())
    }

    pub fn layers(&self) -> &[Vec<ElementId>] {
        &self.layers
    }

    pub fn atoms(&self) -> &[ElementId] {
        &self.atoms
    }

    pub fn is_atom(&self, a: ElementId) -> bool {
        self.atoms.binary_search(&a).is_ok()
    }

    /// Bit set over atom positions of the atoms below `x`.
    pub fn atom_set(&self, x: ElementId) -> &[u64] {
        let aw = self.atom_words;
        &self.atom_sets[x.index() * aw..(x.index() + 1) * aw]
    }

    pub fn label(&self, x: ElementId) -> &str {
        &self.labels[x.index()]
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn uses_tables(&self) -> bool {
        matches!(self.ops, JoinMeet::Table { .. })
    }

    pub fn join(&self, x: ElementId, y: ElementId) -> ElementId {
        match &self.ops {
            JoinMeet::Table { join, .. } => ElementId(join[x.index() * self.len() + y.index()]),
            JoinMeet::Atomistic { .. } => {
                let mut cur = x;
                for pos in bit_positions(self.atom_set(y)) {
                    cur = self.join_atom(cur, pos);
                }
                cur
            }
            JoinMeet::Product { left, right } => {
                let n2 = right.len() as u32;
                let (i, j) = (x.0 / n2, x.0 % n2);
                let (k, l) = (y.0 / n2, y.0 % n2);
                let a = left.join(ElementId(i), ElementId(k));
                let b = right.join(ElementId(j), ElementId(l));
                ElementId(a.0 * n2 + b.0)
            }
        }
    }

    pub fn meet(&self, x: ElementId, y: ElementId) -> ElementId {
        match &self.ops {
            JoinMeet::Table { meet, .. } => ElementId(meet[x.index() * self.len() + y.index()]),
            JoinMeet::Atomistic { .. } => self.atomistic_meet(x, y),
            JoinMeet::Product { left, right } => {
                let n2 = right.len() as u32;
                let (i, j) = (x.0 / n2, x.0 % n2);
                let (k, l) = (y.0 / n2, y.0 % n2);
                let a = left.meet(ElementId(i), ElementId(k));
                let b = right.meet(ElementId(j), ElementId(l));
                ElementId(a.0 * n2 + b.0)
            }
        }
    }

    /// `x ≤ y` in the lattice order.
    pub fn leq(&self, x: ElementId, y: ElementId) -> bool {
        self.meet(x, y) == x
    }

    /// Number of atoms `p` with `p ≤ x`, decided by `meet(p, x) = p`.
    pub fn count_atoms_below(&self, x: ElementId) -> usize {
        self.atoms.iter().filter(|&&p| self.meet(p, x) == p).count()
    }
}
