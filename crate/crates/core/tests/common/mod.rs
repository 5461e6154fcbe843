#![allow(dead_code, clippy::excessive_precision)]

use ergodic_core::matrix::Matrix;
use ergodic_core::thermo::PotentialMatrix;
use ergodic_core::zero_temp::Chapter7Params;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1)`.
pub fn random_potential(rng: &mut impl Rng, d: usize) -> PotentialMatrix {
    PotentialMatrix::new(Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0))).unwrap()
}

pub fn random_positive(rng: &mut impl Rng, d: usize) -> Matrix {
    Matrix::from_fn(d, d, |_, _| rng.random_range(0.01..10.0))
}

pub fn random_stochastic_rows(rng: &mut impl Rng, d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|_| {
            let row: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = row.iter().sum();
            row.iter().map(|x| x / s).collect()
        })
        .collect()
}

/// Letters a..j; the maximizing cycles are abc, cde, fgh, gi and fj, with
/// weight 0 on their edges and -1 everywhere else.
pub fn brick_aubry_potential() -> PotentialMatrix {
    let edges =
        [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (5, 6), (6, 7), (7, 5), (6, 8), (8, 6), (5, 9), (9, 5)];
    let mut a = Matrix::filled(10, 10, -1.0);
    for (i, j) in edges {
        a[(i, j)] = 0.0;
    }
    PotentialMatrix::new(a).unwrap()
}

/// Expected Aubry transition matrix of the brick example.
pub const BRICK_T: [[u8; 10]; 10] = [
    [0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 1, 1, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
];

/// Root of `x^4 - 2x^2 - x + 1` in `[1.3, 1.7]` by bisection.
pub fn quartic_root() -> f64 {
    let f = |x: f64| x.powi(4) - 2.0 * x * x - x + 1.0;
    let (mut lo, mut hi) = (1.3, 1.7);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn ch7(e12: f64, e13: f64, e21: f64, e23: f64, e31: f64, e32: f64, e33: f64) -> Chapter7Params {
    Chapter7Params::from_entries(e12, e13, e21, e23, e31, e32, e33).unwrap()
}

/// Invariant under exchanging symbols 1 and 2.
pub fn ch7_symmetric() -> Chapter7Params {
    ch7(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
}

/// ε12 = ε21 = 1, ε13 = ε31 = 2, ε23 = ε32 = 3.
pub fn ch7_sample() -> Chapter7Params {
    ch7(1.0, 2.0, 1.0, 3.0, 2.0, 3.0, 1.0)
}

/// The exponents force `μ[1]/μ[2] ~ exp(-1.5 beta)`.
pub fn ch7_asymmetric() -> Chapter7Params {
    ch7(4.0, 1.0, 2.5, 0.5, 1.5, 0.5, 1.0)
}

/// Both summands of one factor have the same exponent and `g` tends to the
/// golden ratio, so the limit ratio is `G + 1`.
pub fn ch7_tie() -> Chapter7Params {
    ch7(3.0, 1.5, 2.0, 2.0, 0.5, 0.5, 1.0)
}

/// `(beta, ln(μ[1]/μ[2]), ln(e^P - 1))` from a 700-digit eigen-solve of `exp(-beta ε)`.
pub const CH7_ORACLE_SAMPLE: [(f64, f64, f64); 5] = [
    (10.0, 9.3576229495526760656e-14, -9.9999999999999532076),
    (50.0, 7.1750959731644104198e-66, -50.0),
    (100.0, 5.1482002224120137812e-131, -100.0),
    (200.0, 2.6503965530043108163e-261, -200.0),
    (300.0, 1.3644772123656827617e-391, -300.0),
];

pub const CH7_ORACLE_ASYMMETRIC: [(f64, f64, f64); 5] = [
    (10.0, -14.993284655619206395, -9.9999996920505548123),
    (50.0, -74.999999999986112056, -50.0),
    (100.0, -150.0, -100.0),
    (200.0, -300.0, -200.0),
    (300.0, -450.0, -300.0),
];

pub const CH7_ORACLE_TIE: [(f64, f64, f64); 5] = [
    (10.0, 0.95340990220502326277, -19.515731424019288044),
    (50.0, 0.96242365010057426307, -99.518788174934185675),
    (100.0, 0.962423650119206895, -199.51878817494039655),
    (200.0, 0.962423650119206895, -399.51878817494039655),
    (300.0, 0.962423650119206895, -599.51878817494039655),
];

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
