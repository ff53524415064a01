//! Acceptance suite: one line per criterion.
//!
//! Expected values are written out here from their definitions (hand-computed
//! rationals, q-integers, binomial weights) rather than taken from the
//! library's own closed-form helpers. Two criteria are known to be red; the
//! run fails only when some criterion's status differs from the recorded one.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use geolattice::diamond::{hamiltonian, nonassociativity_witness};
use geolattice::lattice::{
    build_affine, build_boolean, build_product, build_projective, build_uniform, parse_lattice, FiniteLattice,
};
use geolattice::operator::Rational;
use geolattice::product::{convolve_measures, ProductContext};
use geolattice::radial::{jacobi_from_compression, jacobi_from_formula, radial_invariance, JacobiData};
use geolattice::spectral::{
    boolean_closed_form, corner_resolvent, determinant_polynomials, eigendecompose, resolvent, vacuum_moments_full,
    vacuum_moments_radial, RationalFunction, RationalPolynomial, SpectralMeasure,
};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn poly(coeffs: &[(i64, i64)]) -> RationalPolynomial {
    RationalPolynomial::new(coeffs.iter().map(|&(n, d)| q(n, d)).collect())
}

fn same_function(a: &RationalFunction, b: &RationalFunction) -> bool {
    a.numerator() * b.denominator() == b.numerator() * a.denominator()
}

fn compress(l: &FiniteLattice) -> Result<JacobiData, String> {
    jacobi_from_compression(l, &hamiltonian(l)).map_err(|e| e.to_string())
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn built_lattices() -> Vec<(String, FiniteLattice)> {
    let mut out = Vec::new();
    let mut push = |l: FiniteLattice| out.push((l.family().to_string(), l));
    for n in 0..=10 {
        push(build_boolean(n).unwrap());
    }
    for m in 2..=6 {
        push(build_uniform(2, m).unwrap());
    }
    for (r, m) in [(1, 1), (3, 4), (3, 5)] {
        push(build_uniform(r, m).unwrap());
    }
    for (r, qq) in [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (4, 3)] {
        push(build_projective(r, qq).unwrap());
    }
    for (r, qq) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
        push(build_affine(r, qq).unwrap());
    }
    let (b1, b2, m3) = (build_boolean(1).unwrap(), build_boolean(2).unwrap(), build_uniform(2, 3).unwrap());
    for (a, b) in [(&b1, &b1), (&m3, &b1), (&b2, &b2)] {
        push(build_product(a, b).unwrap());
    }
    out
}

fn custom_lattices() -> Vec<(String, FiniteLattice)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a77);
    (0..20)
        .map(|i| {
            let parsed = parse_lattice(&common::random_geometric_document(&mut rng)).expect("well-formed document");
            assert!(parsed.report.all_passed(), "generated lattice {i} failed validation");
            (format!("custom#{i}"), parsed.lattice)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let m3 = build_uniform(2, 3).unwrap();
    let j = match compress(&m3) {
        Ok(j) => j,
        Err(e) => return outcome(false, e),
    };
    let beta_ok = j.beta_sq == vec![q(3, 4), q(3, 1)];
    let target = RationalFunction::new(poly(&[(1, 1), (0, 1), (-3, 4)]), poly(&[(1, 1), (0, 1), (-15, 4)])).unwrap();
    let g = resolvent(&j);
    let g_ok = same_function(&g, &target);
    let corner_ok = same_function(&corner_resolvent(&j), &target);
    let detail = format!(
        "beta^2 {}; G(t) = {} {} target; target equals corner resolvent D_1/D_2: {}",
        if beta_ok { "= (3/4, 3)" } else { "mismatch" },
        g.reduce(),
        if g_ok { "equals" } else { "differs from" },
        corner_ok
    );
    outcome(beta_ok && g_ok, detail)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for n in 1..=10u32 {
        let j = match compress(&build_boolean(n).unwrap()) {
            Ok(j) => j,
            Err(e) => return outcome(false, format!("n = {n}: {e}")),
        };
        let expected: Vec<Rational> = (0..i64::from(n)).map(|k| q((k + 1) * (i64::from(n) - k), 4)).collect();
        if j.beta_sq != expected {
            return outcome(false, format!("n = {n}: got {:?}", j.beta_sq));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(secs < 10.0, format!("n = 1..10 exact, {secs:.2} s"))
}

fn criterion_3() -> Outcome {
    let expected = [
        poly(&[(1, 1), (0, 1), (-1, 4)]),
        poly(&[(1, 1), (0, 1), (-1, 1)]),
        poly(&[(1, 1), (0, 1), (-5, 2), (0, 1), (9, 16)]),
    ];
    for (n, want) in (1..=3u32).zip(&expected) {
        let j = match compress(&build_boolean(n).unwrap()) {
            Ok(j) => j,
            Err(e) => return outcome(false, e),
        };
        let got = determinant_polynomials(&j).pop().expect("D_r");
        if &got != want {
            return outcome(false, format!("B{n}: got {got}"));
        }
    }
    outcome(true, "B1, B2, B3 exact")
}

fn q_int(m: u32, qq: u32) -> BigInt {
    (0..m).map(|i| BigInt::from(qq).pow(i)).sum()
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let pairs = [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (4, 3)];
    for (r, qq) in pairs {
        let l = build_projective(r, qq).unwrap();
        let j = match compress(&l) {
            Ok(j) => j,
            Err(e) => return outcome(false, e),
        };
        let expected: Vec<Rational> = (0..r)
            .map(|k| {
                let num = BigInt::from(qq).pow(2 * k) * q_int(k + 1, qq) * q_int(r - k, qq);
                Rational::new(num, BigInt::from(4))
            })
            .collect();
        if j.beta_sq != expected {
            return outcome(false, format!("PG({r},{qq}): got {:?}", j.beta_sq));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(secs < 30.0, format!("{} cases exact, {secs:.2} s", pairs.len()))
}

fn criterion_5(all: &[(String, FiniteLattice)]) -> Outcome {
    for (name, l) in all {
        match compress(l) {
            Ok(j) if j == jacobi_from_formula(l) => {}
            Ok(_) => return outcome(false, format!("{name}: formula differs from compression")),
            Err(e) => return outcome(false, format!("{name}: {e}")),
        }
    }
    outcome(true, format!("{} lattices (20 random custom)", all.len()))
}

fn criterion_6(all: &[(String, FiniteLattice)]) -> Outcome {
    for (name, l) in all {
        let h = hamiltonian(l);
        if let Some((r, _, _)) = h.entries().find(|(r, c, _)| r == c) {
            return outcome(false, format!("{name}: H has a diagonal entry at {r:?}"));
        }
        if let Err(e) = jacobi_from_compression(l, &h) {
            return outcome(false, format!("{name}: {e}"));
        }
        if !vacuum_moments_full(l, &h, 11).odd_vanish() {
            return outcome(false, format!("{name}: odd moment nonzero"));
        }
    }
    outcome(true, format!("{} lattices, k <= 11", all.len()))
}

fn criterion_7() -> Outcome {
    let mut cases: Vec<FiniteLattice> = (0..=10).map(|n| build_boolean(n).unwrap()).collect();
    for (r, qq) in [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (4, 3)] {
        cases.push(build_projective(r, qq).unwrap());
    }
    cases.push(build_uniform(2, 3).unwrap());
    for l in &cases {
        let h = hamiltonian(l);
        let name = l.family().to_string();
        match radial_invariance(l, &h) {
            Ok(report) if report.invariant => {}
            Ok(report) => return outcome(false, format!("{name}: fails at level {:?}", report.failing_level)),
            Err(e) => return outcome(false, format!("{name}: {e}")),
        }
        let j = jacobi_from_compression(l, &h).expect("zero diagonal");
        if vacuum_moments_full(l, &h, 10) != vacuum_moments_radial(&j, 10) {
            return outcome(false, format!("{name}: full and radial moments differ"));
        }
    }
    outcome(true, format!("{} lattices invariant, moments agree to K = 10", cases.len()))
}

fn criterion_8(all: &[(String, FiniteLattice)]) -> Outcome {
    for (name, l) in all {
        let j = match compress(l) {
            Ok(j) => j,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        let order = 2 * j.r();
        let series = resolvent(&j).series(order);
        if series.as_ref() != Some(&vacuum_moments_radial(&j, order).values) {
            return outcome(false, format!("{name}: series differs from moments"));
        }
    }
    outcome(true, format!("{} lattices, order 2r", all.len()))
}

fn binomial_measure(n: u32) -> Vec<(f64, f64)> {
    let mut c = 1.0f64;
    let mut atoms = Vec::new();
    for j in 0..=n {
        atoms.push((f64::from(n) / 2.0 - f64::from(j), c / 2f64.powi(n as i32)));
        c = c * f64::from(n - j) / f64::from(j + 1);
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    atoms
}

fn max_error(mu: &SpectralMeasure, expected: &[(f64, f64)]) -> Option<f64> {
    (mu.atoms.len() == expected.len()).then(|| {
        mu.atoms.iter().zip(expected).map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs())).fold(0.0, f64::max)
    })
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for n in 0..=12u32 {
        let mu = match compress(&build_boolean(n).unwrap()).map(|j| eigendecompose(&j)) {
            Ok(Ok(mu)) => mu,
            Ok(Err(e)) => return outcome(false, format!("n = {n}: {e}")),
            Err(e) => return outcome(false, format!("n = {n}: {e}")),
        };
        match max_error(&mu, &binomial_measure(n)) {
            Some(err) if err <= 1e-10 => worst = worst.max(err),
            Some(err) => return outcome(false, format!("n = {n}: error {err:.3e}")),
            None => return outcome(false, format!("n = {n}: {} atoms", mu.atoms.len())),
        }
    }
    outcome(true, format!("n <= 12, max error {worst:.3e}"))
}

fn criterion_10() -> Outcome {
    let (b1, b2, m3) = (build_boolean(1).unwrap(), build_boolean(2).unwrap(), build_uniform(2, 3).unwrap());
    for (a, b) in [(&b1, &b1), (&m3, &b1), (&b2, &b2)] {
        let name = format!("{} x {}", a.family(), b.family());
        let ctx = match ProductContext::new(a, b) {
            Ok(ctx) => ctx,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        if !ctx.kronecker_sum_check().equal {
            return outcome(false, format!("{name}: Kronecker sum differs"));
        }
        let shuffle = ctx.shuffle_check(4);
        if !shuffle.passed() {
            return outcome(false, format!("{name}: shuffle fails at {:?}", shuffle.first_failure));
        }
        if !ctx.moment_check(8).equal {
            return outcome(false, format!("{name}: moment convolution differs"));
        }
    }
    let mu1 = eigendecompose(&compress(&b1).unwrap()).unwrap();
    let mut mu = mu1.clone();
    for n in 1..=8u32 {
        if n > 1 {
            mu = convolve_measures(&mu, &mu1);
        }
        match mu.max_deviation(&boolean_closed_form(n)) {
            Some((dx, dw)) if dx <= 1e-9 && dw <= 1e-9 => {}
            other => return outcome(false, format!("{n}-fold convolution: deviation {other:?}")),
        }
    }
    outcome(true, "3 products exact; n-fold convolution of mu(B1) within 1e-9 for n <= 8")
}

fn criterion_11() -> Outcome {
    let m3 = build_uniform(2, 3).unwrap();
    let pg = build_projective(3, 2).unwrap();
    let m3_w = nonassociativity_witness(&m3);
    let pg_w = nonassociativity_witness(&pg);
    let boolean_clean = (0..=5).all(|n| nonassociativity_witness(&build_boolean(n).unwrap()).is_none());
    let detail = format!(
        "M3 witness {m3_w:?}; PG(2,2) witness {pg_w:?}; Boolean n <= 5 witness-free: {boolean_clean}; \
         with the algebra zero kept apart from the bottom, modular lattices are associative"
    );
    outcome(m3_w.is_some() && pg_w.is_some() && boolean_clean, detail)
}

fn main() -> ExitCode {
    let mut all = built_lattices();
    all.extend(custom_lattices());

    // (number, title, outcome, expected status)
    let results = [
        (1, "M3 exact reproduction", criterion_1(), false),
        (2, "Boolean beta law", criterion_2(), true),
        (3, "Boolean determinants", criterion_3(), true),
        (4, "projective beta law", criterion_4(), true),
        (5, "formula equals compression", criterion_5(&all), true),
        (6, "odd moments and zero diagonal", criterion_6(&all), true),
        (7, "radial invariance", criterion_7(), true),
        (8, "resolvent/moment duality", criterion_8(&all), true),
        (9, "Boolean spectrum", criterion_9(), true),
        (10, "product laws", criterion_10(), true),
        (11, "nonassociativity witnesses", criterion_11(), false),
    ];

    let mut unexpected = 0;
    for (number, title, result, expected) in &results {
        let status = if result.passed { "PASS" } else { "FAIL" };
        let note = if result.passed != *expected {
            unexpected += 1;
            " (UNEXPECTED)"
        } else if !result.passed {
            " (known)"
        } else {
            ""
        };
        println!("{status} {number:>2} {title}{note}: {}", result.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("{unexpected} criterion status(es) differ from the recorded expectation");
        ExitCode::FAILURE
    }
}
