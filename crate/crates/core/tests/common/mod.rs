//! Shared helpers for the integration tests: random admissible coordinate
//! changes and small exact rationals.
#![allow(dead_code)]

use germforge::germ::MapGerm;
use germforge::series::{rat, Coefficient, Mono, Series2, Truncation};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational with numerator in `-3..=3` and denominator in `1..=2`.
pub fn small(rng: &mut TestRng) -> Coefficient {
    rat(rng.gen_range(-3..=3), rng.gen_range(1..=2))
}

/// Nonzero rational from `{+-1, +-2, +-1/2}`.
pub fn unit(rng: &mut TestRng) -> Coefficient {
    const V: [(i64, i64); 6] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)];
    let (n, d) = V[rng.gen_range(0..V.len())];
    rat(n, d)
}

/// Positive rational from `{1, 2, 1/2, 3/2}`.
pub fn positive(rng: &mut TestRng) -> Coefficient {
    const V: [(i64, i64); 4] = [(1, 1), (2, 1), (1, 2), (3, 2)];
    let (n, d) = V[rng.gen_range(0..V.len())];
    rat(n, d)
}

pub fn series(terms: &[(u32, u32, Coefficient)], tr: Truncation) -> Series2 {
    Series2::from_terms(terms.iter().map(|(i, j, c)| (Mono::new(*i, *j), c.clone())), tr)
}

/// Source change `(xi, t) -> (X(xi), T(xi, t))` with `T(xi, 0) = 0`.
pub fn random_right(rng: &mut TestRng, tr: Truncation) -> (Series2, Series2) {
    let u = series(&[(1, 0, unit(rng)), (2, 0, small(rng)), (3, 0, small(rng))], tr);
    let v = series(
        &[(0, 1, unit(rng)), (1, 1, small(rng)), (0, 2, small(rng)), (2, 1, small(rng))],
        tr,
    );
    (u, v)
}

/// Target diffeomorphism with invertible linear part and random
/// quadratic terms.
pub fn random_left(rng: &mut TestRng, tr: Truncation) -> (Series2, Series2) {
    loop {
        let (a, b, c, d) = (unit(rng), small(rng), small(rng), unit(rng));
        if &a * &d == &b * &c {
            continue;
        }
        let x = series(
            &[(1, 0, a), (0, 1, b), (2, 0, small(rng)), (1, 1, small(rng)), (0, 2, small(rng))],
            tr,
        );
        let y = series(
            &[(1, 0, c), (0, 1, d), (2, 0, small(rng)), (1, 1, small(rng)), (0, 2, small(rng))],
            tr,
        );
        return (x, y);
    }
}

/// `Psi o f o Phi` for random admissible `Phi`, `Psi`.
pub fn random_conjugate(f: &MapGerm, rng: &mut TestRng) -> MapGerm {
    let tr = f.truncation();
    let (u, v) = random_right(rng, tr);
    let (x, y) = random_left(rng, tr);
    f.compose_right(&u, &v).compose_left(&x, &y)
}

/// Positive diagonal rescaling of source and target.
pub fn random_positive_scaling(f: &MapGerm, rng: &mut TestRng) -> MapGerm {
    let tr = f.truncation();
    let s = |c: Coefficient, i, j| series(&[(i, j, c)], tr);
    f.compose_right(&s(positive(rng), 1, 0), &s(positive(rng), 0, 1))
        .compose_left(&s(positive(rng), 1, 0), &s(positive(rng), 0, 1))
}
