//! Markov, Bernoulli and periodic-orbit measures on the shift.
//!
//! Entropies are in nats.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{domain_err, input_err, numeric_err, Result};
use crate::matrix::Matrix;
use crate::shift_space::{PeriodicOrbit, Word};
use crate::thermo::PotentialMatrix;

const ROW_SUM_TOL: f64 = 1e-12;
const INVARIANCE_TOL: f64 = 1e-10;

/// Square matrix with nonnegative entries and unit row sums.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix(Matrix);

impl StochasticMatrix {
    pub fn new(p: Matrix) -> Result<StochasticMatrix> {
        if !p.is_square() || p.rows() == 0 {
            return Err(input_err!("stochastic matrix must be square and non-empty"));
        }
        for i in 0..p.rows() {
            let row = p.row(i);
            if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(input_err!("row {} has a negative or non-finite entry", i));
            }
            let s: f64 = row.iter().sum();
            if libm::fabs(s - 1.0) > ROW_SUM_TOL {
                return Err(input_err!("row {} sums to {}, not 1", i, s));
            }
        }
        Ok(StochasticMatrix(p))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<StochasticMatrix> {
        StochasticMatrix::new(Matrix::from_rows(rows)?)
    }

    /// Every row equal to `p`.
    pub fn bernoulli(p: &ProbabilityVector) -> StochasticMatrix {
        let d = p.len();
        StochasticMatrix(Matrix::from_fn(d, d, |_, j| p[j]))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

/// Nonnegative vector summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<ProbabilityVector> {
        if p.is_empty() {
            return Err(input_err!("probability vector is empty"));
        }
        if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(input_err!("probability vector has a negative or non-finite entry"));
        }
        let s: f64 = p.iter().sum();
        if libm::fabs(s - 1.0) > ROW_SUM_TOL {
            return Err(input_err!("probability vector sums to {}, not 1", s));
        }
        Ok(ProbabilityVector(p))
    }

    pub fn uniform(d: usize) -> ProbabilityVector {
        ProbabilityVector(vec![1.0 / d as f64; d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl core::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Shift-invariant Markov measure `μ[x0..x(n-1)] = π(x0) P(x0,x1) ... `.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovMeasure {
    p: StochasticMatrix,
    pi: ProbabilityVector,
}

impl MarkovMeasure {
    /// Checks `π P = π`.
    pub fn new(p: StochasticMatrix, pi: ProbabilityVector) -> Result<MarkovMeasure> {
        if p.dim() != pi.len() {
            return Err(input_err!("matrix is {}x{} but vector has length {}", p.dim(), p.dim(), pi.len()));
        }
        let pip = p.matrix().vec_mul(pi.as_slice());
        let err = pip.iter().zip(pi.as_slice()).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max);
        if err > INVARIANCE_TOL {
            return Err(domain_err!("vector is not stationary for the matrix (error {})", err));
        }
        Ok(MarkovMeasure { p, pi })
    }

    /// Uses [`stationary_vector`], so `p` must be strictly positive.
    pub fn from_matrix(p: StochasticMatrix) -> Result<MarkovMeasure> {
        let pi = stationary_vector(&p)?;
        MarkovMeasure::new(p, pi)
    }

    /// Independent symbols with law `p`.
    pub fn bernoulli(p: ProbabilityVector) -> MarkovMeasure {
        MarkovMeasure { p: StochasticMatrix::bernoulli(&p), pi: p }
    }

    pub fn dim(&self) -> usize {
        self.pi.len()
    }

    pub fn transition(&self) -> &StochasticMatrix {
        &self.p
    }

    pub fn stationary(&self) -> &ProbabilityVector {
        &self.pi
    }
}

/// Uniform measure on the `n` points of a periodic orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbitMeasure {
    orbit: PeriodicOrbit,
}

impl PeriodicOrbitMeasure {
    pub fn new(orbit: PeriodicOrbit) -> PeriodicOrbitMeasure {
        PeriodicOrbitMeasure { orbit }
    }

    pub fn orbit(&self) -> &PeriodicOrbit {
        &self.orbit
    }
}

/// Exact rational `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    /// Reduced to lowest terms.
    pub fn new(num: u64, den: u64) -> Fraction {
        let g = gcd(num, den).max(1);
        Fraction { num: num / g, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Measures whose two-symbol marginal `μ[ij]` is available exactly.
pub trait PairMarginal {
    fn alphabet_size(&self) -> usize;
    fn pair_mass(&self, i: usize, j: usize) -> f64;
}

impl PairMarginal for MarkovMeasure {
    fn alphabet_size(&self) -> usize {
        self.dim()
    }

    fn pair_mass(&self, i: usize, j: usize) -> f64 {
        self.pi[i] * self.p.get(i, j)
    }
}

impl PairMarginal for PeriodicOrbitMeasure {
    fn alphabet_size(&self) -> usize {
        self.orbit.generator().symbols().iter().map(|s| s.index()).max().unwrap_or(0)
    }

    fn pair_mass(&self, i: usize, j: usize) -> f64 {
        let n = self.orbit.period();
        let hits = (0..n)
            .filter(|&k| self.orbit.symbol_at(k, 0).zero_based() == i && self.orbit.symbol_at(k, 1).zero_based() == j)
            .count();
        hits as f64 / n as f64
    }
}

/// Stationary vector of a strictly positive stochastic matrix, by power
/// iteration `π <- π P` until the largest relative change is below `1e-14`.
pub fn stationary_vector(p: &StochasticMatrix) -> Result<ProbabilityVector> {
    let m = p.matrix();
    if m.iter().any(|&x| x <= 0.0) {
        return Err(domain_err!("stationary vector requires strictly positive entries"));
    }
    let d = p.dim();
    let mut pi = vec![1.0 / d as f64; d];
    for _ in 0..100_000 {
        let mut next = m.vec_mul(&pi);
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        let change = next.iter().zip(&pi).map(|(a, b)| libm::fabs(a - b) / a).fold(0.0, f64::max);
        pi = next;
        if change < 1e-14 {
            return ProbabilityVector::new(pi);
        }
    }
    Err(numeric_err!("stationary vector iteration did not converge"))
}

/// `π(w0) Π P(w_k, w_(k+1))`; the empty word has mass one.
pub fn markov_cylinder_mass(m: &MarkovMeasure, w: &Word) -> Result<f64> {
    w.check(m.dim())?;
    let Some(first) = w.first() else { return Ok(1.0) };
    Ok(w.transitions().fold(m.pi[first.zero_based()], |acc, (i, j)| acc * m.p.get(i, j)))
}

/// `-Σ π_i P(i,j) log P(i,j)` with `0 log 0 = 0`.
pub fn markov_entropy(m: &MarkovMeasure) -> f64 {
    let d = m.dim();
    let mut h = 0.0;
    for i in 0..d {
        for j in 0..d {
            let pij = m.p.get(i, j);
            if pij > 0.0 {
                h -= m.pi[i] * pij * libm::log(pij);
            }
        }
    }
    h
}

/// Relative entropy `Σ q_i log(q_i / p_i)`, which is nonnegative.
pub fn kl_nonneg(q: &ProbabilityVector, p: &ProbabilityVector) -> Result<f64> {
    if q.len() != p.len() {
        return Err(input_err!("vectors have lengths {} and {}", q.len(), p.len()));
    }
    let mut s = 0.0;
    for (&qi, &pi) in q.as_slice().iter().zip(p.as_slice()) {
        if qi == 0.0 {
            continue;
        }
        if pi == 0.0 {
            return Err(domain_err!("q charges a symbol that p does not"));
        }
        s += qi * libm::log(qi / pi);
    }
    Ok(s)
}

/// Fraction of orbit points whose expansion starts with `w`.
pub fn periodic_cylinder_mass(m: &PeriodicOrbitMeasure, w: &Word) -> Fraction {
    let n = m.orbit.period();
    let hits =
        (0..n).filter(|&start| w.symbols().iter().enumerate().all(|(k, &s)| m.orbit.symbol_at(start, k) == s)).count();
    Fraction::new(hits as u64, n as u64)
}

/// `∫ A dμ = Σ μ[ij] A(i, j)`.
pub fn integrate_two_coord(a: &PotentialMatrix, m: &impl PairMarginal) -> Result<f64> {
    let d = a.dim();
    if m.alphabet_size() > d {
        return Err(input_err!("measure uses {} symbols but the potential has {}", m.alphabet_size(), d));
    }
    let k = m.alphabet_size();
    let mut s = 0.0;
    for i in 0..k {
        for j in 0..k {
            let w = m.pair_mass(i, j);
            if w != 0.0 {
                s += w * a[(i, j)];
            }
        }
    }
    Ok(s)
}

/// Time average of `A(x_k, x_(k+1))` over `n` transitions of one trajectory
/// started from `π`.
pub fn birkhoff_average<R: Rng + ?Sized>(a: &PotentialMatrix, m: &MarkovMeasure, n: usize, rng: &mut R) -> Result<f64> {
    if n == 0 {
        return Err(input_err!("Birkhoff average needs at least one step"));
    }
    if a.dim() != m.dim() {
        return Err(input_err!("potential has {} symbols but the measure has {}", a.dim(), m.dim()));
    }
    let mut x = sample(m.pi.as_slice(), rng);
    let mut total = 0.0;
    for _ in 0..n {
        let y = sample(m.p.matrix().row(x), rng);
        total += a[(x, y)];
        x = y;
    }
    Ok(total / n as f64)
}

fn sample<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
