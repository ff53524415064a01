//! Structural checks on a [`FiniteLattice`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ElementId, Family, FiniteLattice, TABLE_LIMIT};

/// Above this many elements, triple checks are sampled.
const EXHAUSTIVE_TRIPLES: usize = 128;
const SAMPLED_TRIPLES: usize = 100_000;
const SAMPLED_PAIRS: usize = 200_000;
const SAMPLE_SEED: u64 = 0x5eed_1a77;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// First offending elements, when the check failed.
    pub counterexample: Option<Vec<ElementId>>,
    /// False when the check ran on a deterministic random sample.
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub family: String,
    pub elements: usize,
    pub checks: Vec<Check>,
    pub is_geometric: bool,
    pub is_semimodular_atomic: bool,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

enum Pairs {
    All,
    Sample,
}

fn pair_mode(l: &FiniteLattice) -> Pairs {
    if l.len() <= TABLE_LIMIT {
        Pairs::All
    } else {
        Pairs::Sample
    }
}

/// Finds the first pair `(x, y)` with `x <= y` (by id) failing `ok`.
fn pair_check(l: &FiniteLattice, name: &'static str, ok: impl Fn(ElementId, ElementId) -> bool) -> Check {
    let n = l.len() as u32;
    let (failure, exhaustive) = match pair_mode(l) {
        Pairs::All => {
            let found =
                (0..n).flat_map(|x| (x..n).map(move |y| (ElementId(x), ElementId(y)))).find(|&(x, y)| !ok(x, y));
            (found, true)
        }
        Pairs::Sample => {
            let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
            let found = (0..SAMPLED_PAIRS)
                .map(|_| (ElementId(rng.gen_range(0..n)), ElementId(rng.gen_range(0..n))))
                .find(|&(x, y)| !ok(x, y));
            (found, false)
        }
    };
    Check { name, passed: failure.is_none(), counterexample: failure.map(|(x, y)| vec![x, y]), exhaustive }
}

fn element_check(l: &FiniteLattice, name: &'static str, ok: impl Fn(ElementId) -> bool) -> Check {
    let failure = l.elements().find(|&x| !ok(x));
    Check { name, passed: failure.is_none(), counterexample: failure.map(|x| vec![x]), exhaustive: true }
}

fn associativity(l: &FiniteLattice) -> Check {
    let n = l.len() as u32;
    let bad = |x, y, z| {
        l.join(l.join(x, y), z) != l.join(x, l.join(y, z)) || l.meet(l.meet(x, y), z) != l.meet(x, l.meet(y, z))
    };
    let (failure, exhaustive) = if l.len() <= EXHAUSTIVE_TRIPLES {
        let found = (0..n)
            .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
            .map(|(x, y, z)| (ElementId(x), ElementId(y), ElementId(z)))
            .find(|&(x, y, z)| bad(x, y, z));
        (found, true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 1);
        let found = (0..SAMPLED_TRIPLES)
            .map(|_| (ElementId(rng.gen_range(0..n)), ElementId(rng.gen_range(0..n)), ElementId(rng.gen_range(0..n))))
            .find(|&(x, y, z)| bad(x, y, z));
        (found, false)
    };
    Check {
        name: "associative",
        passed: failure.is_none(),
        counterexample: failure.map(|(x, y, z)| vec![x, y, z]),
        exhaustive,
    }
}

/// Runs every structural check; failures are recorded, never raised.
pub fn validate(l: &FiniteLattice) -> ValidationReport {
    let r = l.top_rank();
    let mut checks = Vec::new();

    let bottoms: Vec<ElementId> = l.layer(0).to_vec();
    checks.push(Check {
        name: "unique_bottom",
        passed: bottoms == [ElementId::BOTTOM],
        counterexample: (bottoms != [ElementId::BOTTOM]).then_some(bottoms),
        exhaustive: true,
    });
    let tops = l.layer(r).to_vec();
    checks.push(Check {
        name: "unique_top",
        passed: tops.len() == 1,
        counterexample: (tops.len() != 1).then_some(tops),
        exhaustive: true,
    });

    let bad_cover = l.covers().find(|&(x, y)| l.rank(y) != l.rank(x) + 1);
    checks.push(Check {
        name: "graded",
        passed: bad_cover.is_none(),
        counterexample: bad_cover.map(|(x, y)| vec![x, y]),
        exhaustive: true,
    });

    let inconsistent = l.covers().find(|&(x, y)| l.meet(x, y) != x || l.join(x, y) != y);
    checks.push(Check {
        name: "covers_in_order",
        passed: inconsistent.is_none(),
        counterexample: inconsistent.map(|(x, y)| vec![x, y]),
        exhaustive: true,
    });
    checks.push(pair_check(l, "covers_complete", |x, y| {
        let (lo, hi) = if l.rank(x) <= l.rank(y) { (x, y) } else { (y, x) };
        if l.rank(hi) != l.rank(lo) + 1 || !l.leq(lo, hi) {
            return true;
        }
        l.covers_up(lo).contains(&hi)
    }));

    checks.push(pair_check(l, "commutative", |x, y| l.join(x, y) == l.join(y, x) && l.meet(x, y) == l.meet(y, x)));
    checks.push(element_check(l, "idempotent", |x| l.join(x, x) == x && l.meet(x, x) == x));
    checks.push(pair_check(l, "absorptive", |x, y| {
        l.join(x, l.meet(x, y)) == x
            && l.meet(x, l.join(x, y)) == x
            && l.join(y, l.meet(y, x)) == y
            && l.meet(y, l.join(y, x)) == y
    }));
    checks.push(associativity(l));

    let atomic = element_check(l, "atomic", |x| {
        let below = l.atoms().iter().filter(|&&p| l.meet(p, x) == p);
        below.fold(ElementId::BOTTOM, |acc, &p| l.join(acc, p)) == x
    });
    let semimodular =
        pair_check(l, "semimodular", |x, y| l.rank(x) + l.rank(y) >= l.rank(l.join(x, y)) + l.rank(l.meet(x, y)));
    let is_semimodular_atomic = atomic.passed && semimodular.passed;
    checks.push(atomic);
    checks.push(semimodular);

    let is_geometric = checks.iter().all(|c| c.passed);
    let mut notes = Vec::new();
    if let Family::Affine { .. } = l.family() {
        notes.push(
            "affine flats with an adjoined bottom: the flats of the affine-geometry matroid; \
             flag computed from the checks above"
                .to_string(),
        );
    }
    if checks.iter().any(|c| !c.exhaustive) {
        notes.push(format!("pair checks sampled {SAMPLED_PAIRS} pairs and associativity {SAMPLED_TRIPLES} triples"));
    } else if l.len() > EXHAUSTIVE_TRIPLES {
        notes.push(format!("associativity sampled {SAMPLED_TRIPLES} triples"));
    }
    ValidationReport {
        family: l.family().to_string(),
        elements: l.len(),
        checks,
        is_geometric,
        is_semimodular_atomic,
        notes,
    }
}
