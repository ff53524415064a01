//! Custom lattice documents.
//!
//! ```json
//! { "elements": [{"id": 0, "label": "0"}, ...], "covers": [[0, 1], ...] }
//! ```
//!
//! A full order relation may be given under `"order"` instead of `"covers"`;
//! it is transitively reduced. Ranks are inferred from cover chains.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::validate::{validate, ValidationReport};
use super::{bit_positions, bit_set, bit_test, words_for, ElementId, Family, FiniteLattice, TABLE_LIMIT};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementEntry {
    pub id: u32,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDocument {
    pub elements: Vec<ElementEntry>,
    #[serde(default)]
    pub covers: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<[u32; 2]>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed document: {0}")]
    Syntax(String),
    #[error("no bottom element: the element list is empty")]
    NoBottom,
    #[error("element ids must be dense from 0")]
    IdsNotDense,
    #[error("relation mentions unknown element {0}")]
    UnknownElement(u32),
    #[error("not a poset: the relation has a cycle through {0}")]
    NotAPoset(ElementId),
    #[error("no unique bottom: minimal elements {0:?}")]
    MultipleBottoms(Vec<ElementId>),
    #[error("the bottom element must have id 0, found {0}")]
    BottomNotZero(ElementId),
    #[error("({0}, {1}) is listed as a cover but {1} is reachable from {0} through a longer chain")]
    NotCoverRelation(ElementId, ElementId),
    #[error("not graded: element {0} lies on maximal chains of different lengths")]
    NotGraded(ElementId),
    #[error("not a lattice: {op} of {x} and {y} is not unique")]
    NotALattice { op: &'static str, x: ElementId, y: ElementId },
    #[error("custom lattices are limited to {limit} elements, got {n}")]
    TooLarge { n: usize, limit: usize },
}

/// A parsed lattice together with its validation report.
#[derive(Clone, Debug)]
pub struct ParsedLattice {
    pub lattice: FiniteLattice,
    pub report: ValidationReport,
}

pub fn parse_lattice(text: &str) -> Result<ParsedLattice, ParseError> {
    let doc: LatticeDocument = serde_json::from_str(text).map_err(|e| ParseError::Syntax(e.to_string()))?;
    lattice_from_document(&doc)
}

pub fn lattice_from_document(doc: &LatticeDocument) -> Result<ParsedLattice, ParseError> {
    let n = doc.elements.len();
    if n == 0 {
        return Err(ParseError::NoBottom);
    }
    if n > TABLE_LIMIT {
        return Err(ParseError::TooLarge { n, limit: TABLE_LIMIT });
    }
    let mut labels = vec![None; n];
    for e in &doc.elements {
        let slot = labels.get_mut(e.id as usize).ok_or(ParseError::IdsNotDense)?;
        if slot.is_some() {
            return Err(ParseError::IdsNotDense);
        }
        *slot = Some(e.label.clone().unwrap_or_else(|| e.id.to_string()));
    }
    let labels: Vec<String> = labels.into_iter().map(|l| l.expect("dense")).collect();

    let relation = doc.order.as_ref().unwrap_or(&doc.covers);
    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &[lo, hi] in relation {
        for v in [lo, hi] {
            if v as usize >= n {
                return Err(ParseError::UnknownElement(v));
            }
        }
        if lo == hi {
            return Err(ParseError::NotAPoset(ElementId(lo)));
        }
        succ[lo as usize].push(hi);
    }
    for s in succ.iter_mut() {
        s.sort_unstable();
        s.dedup();
    }

    let topo = topological_order(&succ)?;

    let minimal: Vec<ElementId> = {
        let mut has_pred = vec![false; n];
        succ.iter().flatten().for_each(|&y| has_pred[y as usize] = true);
        (0..n).filter(|&x| !has_pred[x]).map(|x| ElementId(x as u32)).collect()
    };
    if minimal.len() > 1 {
        return Err(ParseError::MultipleBottoms(minimal));
    }
    if minimal[0] != ElementId::BOTTOM {
        return Err(ParseError::BottomNotZero(minimal[0]));
    }

    // strict up-sets, filled in reverse topological order
    let words = words_for(n);
    let mut up = vec![0u64; n * words];
    for &x in topo.iter().rev() {
        let mut acc = vec![0u64; words];
        for &y in &succ[x] {
            bit_set(&mut acc, y as usize);
            for (a, b) in acc.iter_mut().zip(&up[y as usize * words..(y as usize + 1) * words]) {
                *a |= *b;
            }
        }
        up[x * words..(x + 1) * words].copy_from_slice(&acc);
    }
    let up_of = |x: usize| &up[x * words..(x + 1) * words];

    // covers: y ∈ succ(x) not reachable through another successor
    let mut covers_up: Vec<Vec<ElementId>> = vec![Vec::new(); n];
    for x in 0..n {
        for &y in &succ[x] {
            let redundant = succ[x].iter().any(|&z| z != y && bit_test(up_of(z as usize), y as usize));
            if !redundant {
                covers_up[x].push(ElementId(y));
            } else if doc.order.is_none() {
                return Err(ParseError::NotCoverRelation(ElementId(x as u32), ElementId(y)));
            }
        }
    }

    let mut ranks: Vec<Option<u32>> = vec![None; n];
    ranks[0] = Some(0);
    for &x in &topo {
        let rx = ranks[x].expect("reachable from bottom");
        for y in &covers_up[x] {
            match ranks[y.index()] {
                None => ranks[y.index()] = Some(rx + 1),
                Some(ry) if ry == rx + 1 => {}
                Some(_) => return Err(ParseError::NotGraded(*y)),
            }
        }
    }
    let ranks: Vec<u32> = ranks.into_iter().map(|r| r.expect("ranked")).collect();

    // reflexive up- and down-sets
    let mut up_refl = up.clone();
    for x in 0..n {
        bit_set(&mut up_refl[x * words..(x + 1) * words], x);
    }
    let mut down_refl = vec![0u64; n * words];
    for x in 0..n {
        for y in bit_positions(&up_refl[x * words..(x + 1) * words]) {
            bit_set(&mut down_refl[y * words..(y + 1) * words], x);
        }
    }

    let join = bound_table(n, words, &up_refl, &ranks, "join", |a, b| a < b)?;
    let meet = bound_table(n, words, &down_refl, &ranks, "meet", |a, b| a > b)?;

    let lattice = FiniteLattice::from_tables(ranks, covers_up, join, meet, labels, Family::Custom);
    let report = validate(&lattice);
    Ok(ParsedLattice { lattice, report })
}

fn topological_order(succ: &[Vec<u32>]) -> Result<Vec<usize>, ParseError> {
    let n = succ.len();
    let mut indegree = vec![0usize; n];
    succ.iter().flatten().for_each(|&y| indegree[y as usize] += 1);
    let mut stack: Vec<usize> = (0..n).filter(|&x| indegree[x] == 0).rev().collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &succ[x] {
            indegree[y as usize] -= 1;
            if indegree[y as usize] == 0 {
                stack.push(y as usize);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&x| indegree[x] > 0).expect("cycle member");
        return Err(ParseError::NotAPoset(ElementId(stuck as u32)));
    }
    Ok(order)
}

/// Least common element of two reflexive cones, with `better(a, b)` choosing
/// the rank extreme. The bound exists iff the cone intersection equals the
/// cone of the candidate.
fn bound_table(
    n: usize,
    words: usize,
    cones: &[u64],
    ranks: &[u32],
    op: &'static str,
    better: impl Fn(u32, u32) -> bool,
) -> Result<Vec<u32>, ParseError> {
    let cone = |x: usize| &cones[x * words..(x + 1) * words];
    let mut table = vec![0u32; n * n];
    let mut common = vec![0u64; words];
    for x in 0..n {
        for y in x..n {
            for ((c, a), b) in common.iter_mut().zip(cone(x)).zip(cone(y)) {
                *c = a & b;
            }
            let candidate = bit_positions(&common).fold(None, |best: Option<usize>, z| match best {
                Some(b) if !better(ranks[z], ranks[b]) => Some(b),
                _ => Some(z),
            });
            let bad = || ParseError::NotALattice { op, x: ElementId(x as u32), y: ElementId(y as u32) };
            let c = candidate.ok_or_else(bad)?;
            if cone(c) != common.as_slice() {
                return Err(bad());
            }
            table[x * n + y] = c as u32;
            table[y * n + x] = c as u32;
        }
    }
    Ok(table)
}

/// Serializes any lattice into the custom document format.
pub fn to_document(lattice: &FiniteLattice) -> LatticeDocument {
    LatticeDocument {
        elements: lattice
            .elements()
            .map(|x| ElementEntry { id: x.0, label: Some(lattice.label(x).to_string()) })
            .collect(),
        covers: lattice.covers().map(|(x, y)| [x.0, y.0]).collect(),
        order: None,
    }
}
