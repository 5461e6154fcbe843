//! The max-plus semiring `(R ∪ {-inf}, max, +)` and its linear algebra.
//!
//! For a real matrix the max-plus eigenvalue is unique and equals the maximal
//! mean weight of a cycle; eigenvectors are in general not unique.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::error::{domain_err, input_err, numeric_err, Result};
use crate::matrix::Matrix;

/// A max-plus scalar. `NegInf` is the additive zero and absorbs products.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaxPlusScalar {
    NegInf,
    Finite(f64),
}

use MaxPlusScalar::{Finite, NegInf};

impl MaxPlusScalar {
    /// Multiplicative unit.
    pub const ONE: MaxPlusScalar = Finite(0.0);

    /// `-inf` maps to `NegInf`; other non-finite values are rejected.
    pub fn from_f64(x: f64) -> Result<MaxPlusScalar> {
        if x == f64::NEG_INFINITY {
            Ok(NegInf)
        } else if x.is_finite() {
            Ok(Finite(x))
        } else {
            Err(input_err!("max-plus scalar must be finite or -inf, got {}", x))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            Finite(x) => x,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            NegInf => None,
            Finite(x) => Some(x),
        }
    }

    pub fn is_neg_inf(self) -> bool {
        self == NegInf
    }

    pub fn oplus(self, rhs: MaxPlusScalar) -> MaxPlusScalar {
        match (self, rhs) {
            (NegInf, b) => b,
            (a, NegInf) => a,
            (Finite(a), Finite(b)) => Finite(if b > a { b } else { a }),
        }
    }

    pub fn otimes(self, rhs: MaxPlusScalar) -> MaxPlusScalar {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => NegInf,
        }
    }
}

impl PartialOrd for MaxPlusScalar {
    fn partial_cmp(&self, other: &MaxPlusScalar) -> Option<Ordering> {
        match (self, other) {
            (NegInf, NegInf) => Some(Ordering::Equal),
            (NegInf, _) => Some(Ordering::Less),
            (_, NegInf) => Some(Ordering::Greater),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for MaxPlusScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            Finite(x) => write!(f, "{x}"),
        }
    }
}

/// `a ⊕ b = max(a, b)`.
pub fn mp_add(a: MaxPlusScalar, b: MaxPlusScalar) -> MaxPlusScalar {
    a.oplus(b)
}

/// `a ⊗ b = a + b`.
pub fn mp_mul(a: MaxPlusScalar, b: MaxPlusScalar) -> MaxPlusScalar {
    a.otimes(b)
}

/// Rectangular matrix over the max-plus semiring, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxPlusMatrix {
    rows: usize,
    cols: usize,
    data: Vec<MaxPlusScalar>,
}

impl MaxPlusMatrix {
    pub fn filled(rows: usize, cols: usize, value: MaxPlusScalar) -> MaxPlusMatrix {
        MaxPlusMatrix { rows, cols, data: vec![value; rows * cols] }
    }

    /// Max-plus identity: `0` on the diagonal, `-inf` elsewhere.
    pub fn identity(n: usize) -> MaxPlusMatrix {
        let mut m = MaxPlusMatrix::filled(n, n, NegInf);
        for i in 0..n {
            m[(i, i)] = MaxPlusScalar::ONE;
        }
        m
    }

    pub fn from_real(a: &Matrix) -> MaxPlusMatrix {
        MaxPlusMatrix { rows: a.rows(), cols: a.cols(), data: a.iter().map(|&x| Finite(x)).collect() }
    }

    /// Rows of `f64`, where `-inf` is allowed.
    pub fn from_f64_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<MaxPlusMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(input_err!("row {} has length {}, expected {}", i, row.len(), c));
            }
            for &x in row {
                data.push(MaxPlusScalar::from_f64(x)?);
            }
        }
        Ok(MaxPlusMatrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].to_f64()).collect()).collect()
    }

    /// `Some` real matrix when every entry is finite.
    pub fn to_real(&self) -> Option<Matrix> {
        if self.data.iter().any(|x| x.is_neg_inf()) {
            return None;
        }
        Some(Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64()))
    }

    pub fn transpose(&self) -> MaxPlusMatrix {
        let mut t = MaxPlusMatrix::filled(self.cols, self.rows, NegInf);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `c ⊗ M`.
    pub fn scaled(&self, c: f64) -> MaxPlusMatrix {
        MaxPlusMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x.otimes(Finite(c))).collect(),
        }
    }

    /// `M ⊗ v`.
    pub fn apply(&self, v: &[MaxPlusScalar]) -> Result<Vec<MaxPlusScalar>> {
        if v.len() != self.cols {
            return Err(input_err!("vector of length {} for a matrix with {} columns", v.len(), self.cols));
        }
        Ok((0..self.rows).map(|i| (0..self.cols).fold(NegInf, |acc, j| acc.oplus(self[(i, j)].otimes(v[j])))).collect())
    }
}

impl Index<(usize, usize)> for MaxPlusMatrix {
    type Output = MaxPlusScalar;
    fn index(&self, (i, j): (usize, usize)) -> &MaxPlusScalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MaxPlusMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut MaxPlusScalar {
        &mut self.data[i * self.cols + j]
    }
}

/// `(AB)_ij = max_k (A_ik + B_kj)`.
pub fn mp_mat_mul(a: &MaxPlusMatrix, b: &MaxPlusMatrix) -> Result<MaxPlusMatrix> {
    if a.cols != b.rows {
        return Err(input_err!("cannot multiply {}x{} by {}x{}", a.rows, a.cols, b.rows, b.cols));
    }
    let mut out = MaxPlusMatrix::filled(a.rows, b.cols, NegInf);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik.is_neg_inf() {
                continue;
            }
            for j in 0..b.cols {
                out[(i, j)] = out[(i, j)].oplus(aik.otimes(b[(k, j)]));
            }
        }
    }
    Ok(out)
}

/// Eigenvalue and one eigenvector: `M ⊗ v = λ ⊗ v`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxPlusEigenpair {
    pub lambda: f64,
    pub v: Vec<MaxPlusScalar>,
}

/// Outcome of [`mp_eigen_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenCheck {
    pub holds: bool,
    /// `max_i |(M ⊗ v)_i - (λ + v_i)|`; infinite when exactly one side is `-inf`.
    pub residual: f64,
}

/// Verifies `max_j (M_ij + v_j) = λ + v_i` row by row.
pub fn mp_eigen_check(m: &MaxPlusMatrix, lambda: f64, v: &[MaxPlusScalar], tol: f64) -> Result<EigenCheck> {
    if m.rows != m.cols {
        return Err(input_err!("eigen check needs a square matrix"));
    }
    let mv = m.apply(v)?;
    let mut residual: f64 = 0.0;
    for (lhs, &vi) in mv.iter().zip(v) {
        let rhs = vi.otimes(Finite(lambda));
        let r = match (*lhs, rhs) {
            (NegInf, NegInf) => 0.0,
            (Finite(a), Finite(b)) => libm::fabs(a - b),
            _ => f64::INFINITY,
        };
        residual = residual.max(r);
    }
    Ok(EigenCheck { holds: residual <= tol, residual })
}

/// Maximal mean weight of a cycle, by Karp's dynamic program with a virtual
/// source joined to every node. `None` when the graph has no cycle.
pub fn karp_max_cycle_mean(m: &MaxPlusMatrix) -> Option<f64> {
    let n = m.rows;
    // d[k][v]: heaviest walk with exactly k edges ending at v, from any start.
    let mut d = vec![vec![NegInf; n]; n + 1];
    d[0] = vec![MaxPlusScalar::ONE; n];
    for k in 1..=n {
        for u in 0..n {
            let du = d[k - 1][u];
            if du.is_neg_inf() {
                continue;
            }
            for v in 0..n {
                let cand = du.otimes(m[(u, v)]);
                if cand > d[k][v] {
                    d[k][v] = cand;
                }
            }
        }
    }
    let mut best: Option<f64> = None;
    for v in 0..n {
        let Finite(dn) = d[n][v] else { continue };
        let mut worst = f64::INFINITY;
        for (k, row) in d.iter().enumerate().take(n) {
            if let Finite(dk) = row[v] {
                worst = worst.min((dn - dk) / (n - k) as f64);
            }
        }
        if best.is_none_or(|b| worst > b) {
            best = Some(worst);
        }
    }
    best
}

/// Maximal cycle mean of a real square matrix.
pub fn max_cycle_mean(m: &Matrix) -> Result<f64> {
    if !m.is_square() || m.rows() == 0 {
        return Err(input_err!("max cycle mean needs a non-empty square matrix"));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(input_err!("max cycle mean needs finite entries"));
    }
    karp_max_cycle_mean(&MaxPlusMatrix::from_real(m)).ok_or_else(|| numeric_err!("no cycle found"))
}

/// Heaviest path weights using at least one edge, `A⁺ = A ⊕ A² ⊕ ... ⊕ Aⁿ`,
/// by Floyd-Warshall. Requires every cycle to have weight `<= 0`.
pub fn mp_plus_closure(m: &MaxPlusMatrix) -> MaxPlusMatrix {
    let n = m.rows;
    let mut c = m.clone();
    for k in 0..n {
        for i in 0..n {
            let cik = c[(i, k)];
            if cik.is_neg_inf() {
                continue;
            }
            for j in 0..n {
                let cand = cik.otimes(c[(k, j)]);
                if cand > c[(i, j)] {
                    c[(i, j)] = cand;
                }
            }
        }
    }
    c
}

/// Kleene star `I ⊕ A⁺`.
pub fn mp_kleene_star(m: &MaxPlusMatrix) -> MaxPlusMatrix {
    let mut s = mp_plus_closure(m);
    for i in 0..m.rows {
        s[(i, i)] = s[(i, i)].oplus(MaxPlusScalar::ONE);
    }
    s
}

const EIGEN_TOL: f64 = 1e-9;

/// Max-plus eigenpair of a real square matrix.
///
/// Iterates the normalized map `x -> Mx - min_k (Mx)_k` for at most `50 d`
/// steps. If that does not settle (it can oscillate on ties), the eigenvalue
/// comes from [`karp_max_cycle_mean`] and the eigenvector is the Kleene-star
/// column of `M - λ` at the lowest-index critical node.
pub fn mp_eigen(m: &MaxPlusMatrix) -> Result<MaxPlusEigenpair> {
    let n = m.rows;
    if n == 0 || m.cols != n {
        return Err(input_err!("max-plus eigenproblem needs a non-empty square matrix"));
    }
    let real = m.to_real().ok_or_else(|| domain_err!("max-plus eigenproblem needs finite entries"))?;
    let scale = real.iter().fold(1.0f64, |s, &x| s.max(libm::fabs(x)));

    let mut x = vec![0.0; n];
    for _ in 0..50 * n {
        let mx: Vec<f64> =
            (0..n).map(|i| (0..n).map(|j| real[(i, j)] + x[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let shift = mx.iter().copied().fold(f64::INFINITY, f64::min);
        let next: Vec<f64> = mx.iter().map(|v| v - shift).collect();
        let step = x.iter().zip(&next).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max);
        x = next;
        if step <= 1e-14 * scale {
            let pair = MaxPlusEigenpair { lambda: shift, v: x.iter().map(|&t| Finite(t)).collect() };
            if mp_eigen_check(m, pair.lambda, &pair.v, EIGEN_TOL * scale)?.holds {
                return Ok(pair);
            }
            break;
        }
    }

    let MaxPlusEigenpair { lambda, v } = critical_eigenpair(m)?;
    let check = mp_eigen_check(m, lambda, &v, EIGEN_TOL * scale)?;
    if !check.holds {
        return Err(numeric_err!("max-plus eigenvector residual {} exceeds tolerance", check.residual));
    }
    Ok(MaxPlusEigenpair { lambda, v })
}

/// Eigenvalue by [`karp_max_cycle_mean`] and the Kleene-star column of
/// `M - λ` at the lowest-index critical node, without verification.
pub fn critical_eigenpair(m: &MaxPlusMatrix) -> Result<MaxPlusEigenpair> {
    let scale = m.data.iter().filter_map(|x| x.finite()).fold(1.0f64, |s, x| s.max(libm::fabs(x)));
    let lambda = karp_max_cycle_mean(m).ok_or_else(|| numeric_err!("no cycle found"))?;
    let v = critical_column(&m.scaled(-lambda), scale)?;
    Ok(MaxPlusEigenpair { lambda, v })
}

/// Kleene-star column of a normalized matrix (max cycle mean zero) at the
/// lowest-index node lying on a zero-weight cycle.
fn critical_column(normalized: &MaxPlusMatrix, scale: f64) -> Result<Vec<MaxPlusScalar>> {
    let n = normalized.rows;
    let plus = mp_plus_closure(normalized);
    let tol = 1e-12 * scale * n as f64;
    let c = (0..n)
        .find(|&i| plus[(i, i)].finite().is_some_and(|w| w >= -tol))
        .ok_or_else(|| numeric_err!("no critical node found"))?;
    let star = mp_kleene_star(normalized);
    Ok((0..n).map(|i| star[(i, c)]).collect())
}
