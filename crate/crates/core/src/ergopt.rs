//! Ergodic optimization for two-coordinate potentials.
//!
//! Everything is a statement about the weighted graph with weights
//! `A(i, j) - m(A)`: every cycle has weight `<= 0`, the maximizing cycles are
//! those of weight zero, the Peierls barrier is a longest-path length and
//! calibrated subactions are max-plus eigenvectors of the transpose.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{domain_err, input_err, numeric_err, Result};
use crate::matrix::Matrix;
use crate::maxplus::{critical_eigenpair, max_cycle_mean, MaxPlusMatrix};
use crate::measures::{MarkovMeasure, ProbabilityVector, StochasticMatrix};
use crate::shift_space::{
    enumerate_simple_cycles, irreducible_components, SimpleCycle, Symbol, TransitionMatrix, Word,
};
use crate::thermo::PotentialMatrix;

/// Relative tolerance for "this cycle mean equals `m(A)`".
pub const CYCLE_TOL: f64 = 1e-9;

fn tie_tol(m: f64) -> f64 {
    CYCLE_TOL * m.abs().max(1.0)
}

/// `m(A)`: the largest mean of `A` over a cycle.
pub fn max_ergodic_value(a: &PotentialMatrix) -> Result<f64> {
    max_cycle_mean(a.matrix())
}

/// A function of the first symbol, `V[i] = V(i)` (0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct Subaction {
    pub v: Vec<f64>,
}

impl Subaction {
    /// `max_j |max_i (A(i,j) + V(i)) - m - V(j)|`.
    pub fn calibration_residual(&self, a: &PotentialMatrix, m: f64) -> f64 {
        let d = a.dim();
        (0..d)
            .map(|j| {
                let best = (0..d).map(|i| a[(i, j)] + self.v[i]).fold(f64::NEG_INFINITY, f64::max);
                libm::fabs(best - m - self.v[j])
            })
            .fold(0.0, f64::max)
    }

    /// Shifted so that the largest value is zero.
    pub fn normalized(mut self) -> Subaction {
        let top = self.v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.v.iter_mut().for_each(|x| *x -= top);
        self
    }
}

/// A calibrated subaction, `V(j) + m = max_i (A(i,j) + V(i))`, normalized by
/// `max V = 0`. It is the Kleene-star column at the lowest-index critical
/// symbol, i.e. `V(j) = h(c, j)`.
pub fn calibrated_subaction(a: &PotentialMatrix) -> Result<Subaction> {
    let pair = critical_eigenpair(&MaxPlusMatrix::from_real(a.transpose().matrix()))?;
    let v = pair
        .v
        .iter()
        .map(|x| x.finite().ok_or_else(|| numeric_err!("subaction has an infinite entry")))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Subaction { v }.normalized())
}

/// `g(i,j) = A(i,j) - m + V(i) - V(j)`, which is `<= 0` with a zero in every
/// column when `V` is calibrated.
pub fn normalized_deficiency(a: &PotentialMatrix, v: &Subaction, m: f64) -> Matrix {
    Matrix::from_fn(a.dim(), a.dim(), |i, j| a[(i, j)] - m + v.v[i] - v.v[j])
}

/// All-pairs Peierls barrier: `h[i][j]` is the largest total of `A - m(A)`
/// along a path from `i` to `j` with at least one edge, by Bellman-Ford
/// relaxation over `d (d + 1)` rounds.
pub fn peierls_matrix(a: &PotentialMatrix) -> Result<Matrix> {
    let m = max_ergodic_value(a)?;
    let d = a.dim();
    let w = a.matrix().map(|x| x - m);
    let mut h = Matrix::filled(d, d, f64::NEG_INFINITY);
    for src in 0..d {
        let mut best: Vec<f64> = (0..d).map(|j| w[(src, j)]).collect();
        for _ in 0..d * (d + 1) {
            let mut changed = false;
            for k in 0..d {
                for j in 0..d {
                    let cand = best[k] + w[(k, j)];
                    if cand > best[j] {
                        best[j] = cand;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for j in 0..d {
            h[(src, j)] = best[j];
        }
    }
    Ok(h)
}

/// Peierls barrier `h(i, j)` between two symbols.
pub fn peierls_barrier(a: &PotentialMatrix, i: Symbol, j: Symbol) -> Result<f64> {
    i.check(a.dim())?;
    j.check(a.dim())?;
    Ok(peierls_matrix(a)?[(i.zero_based(), j.zero_based())])
}

/// An irreducible component of the Aubry graph.
#[derive(Clone, Debug, PartialEq)]
pub struct AubryComponent {
    pub symbols: Vec<Symbol>,
    pub entropy: f64,
}

/// Maximizing cycles and the subshift they generate.
#[derive(Clone, Debug, PartialEq)]
pub struct AubryData {
    pub m_a: f64,
    pub maximizing_cycles: Vec<SimpleCycle>,
    /// All rotations of the maximizing cycles.
    pub bricks: Vec<Word>,
    /// Allows `ij` iff the edge lies on a maximizing cycle.
    pub t_aubry: TransitionMatrix,
    pub components: Vec<AubryComponent>,
}

impl AubryData {
    /// Symbols lying on some maximizing cycle, in increasing order.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut s: Vec<Symbol> = self.components.iter().flat_map(|c| c.symbols.iter().copied()).collect();
        s.sort();
        s
    }

    pub fn component_of(&self, s: Symbol) -> Option<usize> {
        self.components.iter().position(|c| c.symbols.contains(&s))
    }

    /// A single maximizing cycle means a single maximizing measure.
    pub fn unique_maximizing_measure(&self) -> bool {
        self.maximizing_cycles.len() == 1
    }
}

/// Builds the Aubry set from the maximizing simple cycles.
///
/// Only edges with `A(i,j) - m + h(j,i) ~ 0` can lie on a maximizing cycle,
/// so cycles are enumerated in that subgraph and then filtered by their mean.
pub fn aubry_set(a: &PotentialMatrix) -> Result<AubryData> {
    let d = a.dim();
    let m = max_ergodic_value(a)?;
    let h = peierls_matrix(a)?;
    let edge_tol = tie_tol(m) * d as f64;
    let mut critical = TransitionMatrix::empty(d);
    for i in 0..d {
        for j in 0..d {
            critical.set(i, j, a[(i, j)] - m + h[(j, i)] >= -edge_tol);
        }
    }
    let maximizing_cycles: Vec<SimpleCycle> = enumerate_simple_cycles(d, Some(&critical))
        .into_iter()
        .filter(|c| c.mean(|i, j| a[(i, j)]) >= m - tie_tol(m))
        .collect();
    let mut t_aubry = TransitionMatrix::empty(d);
    for c in &maximizing_cycles {
        for (i, j) in c.edges() {
            t_aubry.set(i, j, true);
        }
    }
    let bricks = maximizing_cycles.iter().flat_map(|c| c.rotations()).collect();
    let components = irreducible_components(&t_aubry)
        .classes
        .into_iter()
        .map(|symbols| {
            let idx: Vec<usize> = symbols.iter().map(|s| s.zero_based()).collect();
            let entropy = component_entropy(&t_aubry.restricted(&idx))?;
            Ok(AubryComponent { symbols, entropy })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AubryData { m_a: m, maximizing_cycles, bricks, t_aubry, components })
}

/// Perron root and eigenvectors of an irreducible 0/1 matrix, by power
/// iteration on `I + T`, which is primitive even when `T` is periodic.
fn zero_one_perron(t: &TransitionMatrix) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    if !t.is_irreducible() {
        return Err(domain_err!("matrix is not irreducible"));
    }
    let n = t.dim();
    let step = |v: &[f64], transpose: bool| -> Vec<f64> {
        (0..n)
            .map(|i| {
                v[i] + (0..n)
                    .filter(|&j| if transpose { t.allows(j, i) } else { t.allows(i, j) })
                    .map(|j| v[j])
                    .sum::<f64>()
            })
            .collect()
    };
    let iterate = |transpose: bool| -> Result<(f64, Vec<f64>)> {
        let mut v = vec![1.0 / n as f64; n];
        for _ in 0..1_000_000 {
            let w = step(&v, transpose);
            let s: f64 = w.iter().sum();
            let next: Vec<f64> = w.iter().map(|x| x / s).collect();
            let change = next.iter().zip(&v).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max);
            v = next;
            if change < 1e-14 {
                return Ok((s - 1.0, v));
            }
        }
        Err(numeric_err!("power iteration on a 0/1 matrix did not converge"))
    };
    let (rho, r) = iterate(false)?;
    let (_, l) = iterate(true)?;
    Ok((rho, r, l))
}

/// Topological entropy `log ρ(T)` of an irreducible 0/1 matrix.
pub fn component_entropy(t: &TransitionMatrix) -> Result<f64> {
    let (rho, _, _) = zero_one_perron(t)?;
    Ok(libm::log(rho))
}

/// Outcome of [`ground_state`].
#[derive(Clone, Debug, PartialEq)]
pub enum GroundState {
    /// One Aubry component has the largest entropy; `measure` is its measure
    /// of maximal entropy, embedded in the full alphabet (symbols outside the
    /// component get mass zero and identity rows).
    Unique { component: usize, entropy: f64, measure: MarkovMeasure },
    /// Several components share the largest entropy; no selection is made.
    Tie { components: Vec<usize>, entropy: f64 },
}

/// The zero-temperature limit candidate of largest entropy among the Aubry
/// components.
pub fn ground_state(a: &PotentialMatrix) -> Result<GroundState> {
    let aubry = aubry_set(a)?;
    let best = aubry.components.iter().map(|c| c.entropy).fold(f64::NEG_INFINITY, f64::max);
    let winners: Vec<usize> =
        (0..aubry.components.len()).filter(|&k| aubry.components[k].entropy >= best - 1e-9).collect();
    if winners.len() != 1 {
        return Ok(GroundState::Tie { components: winners, entropy: best });
    }
    let k = winners[0];
    let idx: Vec<usize> = aubry.components[k].symbols.iter().map(|s| s.zero_based()).collect();
    let sub = aubry.t_aubry.restricted(&idx);
    let (rho, r, l) = zero_one_perron(&sub)?;
    let d = a.dim();
    let mut p = Matrix::identity(d);
    let mut pi = vec![0.0; d];
    let norm: f64 = l.iter().zip(&r).map(|(x, y)| x * y).sum();
    for (ai, &i) in idx.iter().enumerate() {
        p[(i, i)] = 0.0;
        for (bj, &j) in idx.iter().enumerate() {
            if sub.allows(ai, bj) {
                p[(i, j)] = r[bj] / (rho * r[ai]);
            }
        }
        let row: f64 = p.row(i).iter().sum();
        for j in 0..d {
            p[(i, j)] /= row;
        }
        pi[i] = l[ai] * r[ai] / norm;
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    let measure = MarkovMeasure::new(StochasticMatrix::new(p)?, ProbabilityVector::new(pi)?)?;
    Ok(GroundState::Unique { component: k, entropy: aubry.components[k].entropy, measure })
}

/// `inf` of the rate function over a cylinder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateValue {
    /// `+inf` when no Aubry symbol is reachable.
    pub value: f64,
    /// `false` when there are several maximizing measures; the formula is
    /// still evaluated but the large-deviation statement does not cover it.
    pub unique_maximizer: bool,
}

#[derive(PartialEq)]
struct Dist(f64, usize);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Dist) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Dist) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// `inf_{x in [w]} Σ_k c(x_k, x_(k+1))` with the nonnegative cost
/// `c(i,j) = V(j) - V(i) - A(i,j) + m`: the cost inside `w` plus the cheapest
/// path from the last letter into the Aubry set, where the cost vanishes.
pub fn rate_function_cylinder(a: &PotentialMatrix, v: &Subaction, w: &Word) -> Result<RateValue> {
    let d = a.dim();
    w.check(d)?;
    if v.v.len() != d {
        return Err(input_err!("subaction has {} values for {} symbols", v.v.len(), d));
    }
    let aubry = aubry_set(a)?;
    let m = aubry.m_a;
    let scale = a.matrix().iter().fold(1.0f64, |s, x| s.max(libm::fabs(*x)));
    if v.calibration_residual(a, m) > 1e-6 * scale {
        return Err(domain_err!("subaction is not calibrated"));
    }
    let cost = |i: usize, j: usize| (v.v[j] - v.v[i] - a[(i, j)] + m).max(0.0);
    let unique_maximizer = aubry.unique_maximizing_measure();
    let Some(last) = w.last() else {
        return Ok(RateValue { value: 0.0, unique_maximizer });
    };
    let interior: f64 = w.transitions().map(|(i, j)| cost(i, j)).sum();

    let mut dist = vec![f64::INFINITY; d];
    let mut heap = BinaryHeap::new();
    dist[last.zero_based()] = 0.0;
    heap.push(Dist(0.0, last.zero_based()));
    while let Some(Dist(du, u)) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for x in 0..d {
            let nd = du + cost(u, x);
            if nd < dist[x] {
                dist[x] = nd;
                heap.push(Dist(nd, x));
            }
        }
    }
    let tail = aubry.symbols().iter().map(|s| dist[s.zero_based()]).fold(f64::INFINITY, f64::min);
    Ok(RateValue { value: interior + tail, unique_maximizer })
}

/// `u(j) = max_x [h(x, j) + boundary(component(x))]` over Aubry symbols `x`,
/// one boundary value per Aubry component.
pub fn subaction_from_aubry(a: &PotentialMatrix, boundary: &[f64]) -> Result<Subaction> {
    let aubry = aubry_set(a)?;
    if boundary.len() != aubry.components.len() {
        return Err(input_err!("{} boundary values for {} Aubry components", boundary.len(), aubry.components.len()));
    }
    let h = peierls_matrix(a)?;
    let d = a.dim();
    let mut v = vec![f64::NEG_INFINITY; d];
    for (k, comp) in aubry.components.iter().enumerate() {
        for x in &comp.symbols {
            for (j, vj) in v.iter_mut().enumerate() {
                *vj = vj.max(h[(x.zero_based(), j)] + boundary[k]);
            }
        }
    }
    Ok(Subaction { v })
}

/// Aubry symbols grouped by `h(x, y) + h(y, x) = 0`.
pub fn barrier_components(a: &PotentialMatrix) -> Result<Vec<Vec<Symbol>>> {
    let d = a.dim();
    let m = max_ergodic_value(a)?;
    let h = peierls_matrix(a)?;
    let tol = tie_tol(m) * d as f64;
    let aubry: Vec<usize> = (0..d).filter(|&i| h[(i, i)] >= -tol).collect();
    let mut seen = vec![false; d];
    let mut out = Vec::new();
    for &x in &aubry {
        if seen[x] {
            continue;
        }
        let class: Vec<Symbol> = aubry
            .iter()
            .copied()
            .filter(|&y| h[(x, y)] + h[(y, x)] >= -tol)
            .inspect(|&y| seen[y] = true)
            .map(Symbol::from_zero_based)
            .collect();
        out.push(class);
    }
    Ok(out)
}
