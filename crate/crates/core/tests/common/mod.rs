//! Random geometric lattices for integration tests: the flats of a random
//! set of projective points over a small prime field, serialized to the
//! custom document format so that they go through the parser.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

/// Vectors of `F_p^d` encoded as base-`p` integers.
struct Space {
    p: u32,
    d: u32,
}

impl Space {
    fn digits(&self, v: u32) -> Vec<u32> {
        let mut out = vec![0; self.d as usize];
        let mut v = v;
        for slot in out.iter_mut().rev() {
            *slot = v % self.p;
            v /= self.p;
        }
        out
    }

    fn encode(&self, digits: &[u32]) -> u32 {
        digits.iter().fold(0, |acc, &x| acc * self.p + x)
    }

    fn add_scaled(&self, a: u32, b: u32, c: u32) -> u32 {
        let (a, b) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = a.iter().zip(&b).map(|(x, y)| (x + c * y) % self.p).collect();
        self.encode(&sum)
    }

    /// Linear span by breadth-first closure under `v + c·g`.
    fn span(&self, gens: &[u32]) -> BTreeSet<u32> {
        let mut seen = BTreeSet::from([0u32]);
        let mut queue = VecDeque::from([0u32]);
        while let Some(v) = queue.pop_front() {
            for &g in gens {
                for c in 1..self.p {
                    let w = self.add_scaled(v, g, c);
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
        seen
    }

    /// First nonzero coordinate equal to 1.
    fn is_normalized(&self, v: u32) -> bool {
        self.digits(v).into_iter().find(|&x| x != 0) == Some(1)
    }
}

/// A custom lattice document (JSON text) for the flats of `points`.
pub fn flats_document(p: u32, d: u32, points: &[u32]) -> (String, usize) {
    let space = Space { p, d };
    let closure = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
        let gens: Vec<u32> = set.iter().map(|&i| points[i]).collect();
        let span = space.span(&gens);
        (0..points.len()).filter(|&i| span.contains(&points[i])).collect()
    };
    let rank = |set: &BTreeSet<usize>| -> u32 {
        let gens: Vec<u32> = set.iter().map(|&i| points[i]).collect();
        let size = space.span(&gens).len() as f64;
        (size.ln() / f64::from(p).ln()).round() as u32
    };

    let bottom = closure(&BTreeSet::new());
    let mut flats = vec![bottom.clone()];
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::from([(bottom, 0)]);
    let mut covers = Vec::new();
    let mut i = 0;
    while i < flats.len() {
        let f = flats[i].clone();
        let mut ups = BTreeSet::new();
        for x in 0..points.len() {
            if f.contains(&x) {
                continue;
            }
            let mut g = f.clone();
            g.insert(x);
            let g = closure(&g);
            let id = *index.entry(g.clone()).or_insert_with(|| {
                flats.push(g);
                flats.len() - 1
            });
            ups.insert(id);
        }
        covers.extend(ups.into_iter().map(|u| [i as u32, u as u32]));
        i += 1;
    }
    // cl(F ∪ x) covers F in a geometric lattice; the filter guards the generator
    let ranks: Vec<u32> = flats.iter().map(rank).collect();
    covers.retain(|[a, b]| ranks[*b as usize] == ranks[*a as usize] + 1);

    let elements: Vec<_> = flats
        .iter()
        .enumerate()
        .map(|(id, f)| {
            let label: Vec<String> = f.iter().map(|x| x.to_string()).collect();
            json!({ "id": id, "label": format!("{{{}}}", label.join(",")) })
        })
        .collect();
    let doc = json!({ "elements": elements, "covers": covers });
    (doc.to_string(), flats.len())
}

/// A random simple point configuration over `F_2` or `F_3` and its flats.
pub fn random_geometric_document<R: Rng>(rng: &mut R) -> String {
    let (p, d) = *[(2u32, 3u32), (2, 4), (3, 3)].choose(rng).expect("nonempty");
    let space = Space { p, d };
    let mut candidates: Vec<u32> = (1..p.pow(d)).filter(|&v| space.is_normalized(v)).collect();
    candidates.shuffle(rng);
    let take = rng.gen_range(d as usize..=candidates.len().min(9));
    candidates.truncate(take);
    flats_document(p, d, &candidates).0
}
