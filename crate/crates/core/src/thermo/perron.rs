//! Perron eigendata of `K_ij = exp(L_ij)` in log coordinates.
//!
//! Plain power iteration is useless here: at large `beta` the matrix is close
//! to block diagonal and its spectral gap can be of order `exp(-300)`. Instead:
//!
//! 1. `L` is shifted by its max-plus eigenvalue `m` and conjugated by a max-plus
//!    eigenvector `V`, so every scaled weight is `<= 0` and the maximizing
//!    cycles have weight exactly zero.
//! 2. Newton's method is applied to `log S_i(y) = log λ`, where
//!    `S_i = Σ_j K_ij y_j / y_i`. The Jacobian in `log y` is `P - I` for the
//!    current stochastic matrix `P`, so each step is a Poisson equation.
//!    The iterate is carried along `exp(s L)` for `s` growing up to one.
//!    Where Newton makes little progress, typically near an avoided crossing
//!    between weakly coupled blocks, inverse iteration shifted by `max S`
//!    takes over; it converges from any positive start.
//! 3. Stationary vectors and Poisson equations are solved by GTH-style state
//!    reduction, which never subtracts, in arbitrary precision. The precision
//!    grows until `λ - 1` and the smallest reduction pivot are both resolved.
//!
//! The result resolves `exp(P) - 1` to full relative precision even when it is
//! far below `f64::MIN_POSITIVE`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{numeric_err, Result};
use crate::matrix::Matrix;
use crate::maxplus::{karp_max_cycle_mean, MaxPlusMatrix};
use crate::xfloat::Xf;

use super::hp::{Hp, Scalar};

const MAX_ITER: usize = 80;
const MAX_BACKTRACK: usize = 400;
const START_BITS: usize = 192;
/// Bits kept beyond the magnitude of `λ - 1`.
const GUARD_BITS: i64 = 128;
const MAX_BITS: usize = 1 << 16;
/// Newton gives up when the spread has not halved over this many steps.
const STAGNATION: usize = 8;

pub(crate) struct Solution {
    pub log_lambda: f64,
    /// `exp(log_lambda - m) - 1`; tiny when the maximizing set dominates.
    pub excess: Xf,
    /// The shift `m`, so that `log_lambda = m + ln(1 + excess)`.
    pub shift: f64,
    /// Normalized so that `Σ r = 1`.
    pub log_r: Vec<f64>,
    /// Normalized so that `Σ l_i r_i = 1`.
    pub log_l: Vec<f64>,
    pub log_pi: Vec<f64>,
    /// Stochasticized matrix, rows renormalized.
    pub stochastic: Matrix,
    pub pi: Vec<f64>,
}

pub(crate) fn solve(log_k: &Matrix) -> Result<Solution> {
    let n = log_k.rows();
    let scale = log_k.iter().fold(1.0f64, |s, &x| s.max(libm::fabs(x)));
    let tol = 1e-12 * scale * n as f64;

    let mut m = karp_max_cycle_mean(&MaxPlusMatrix::from_real(log_k)).ok_or_else(|| numeric_err!("empty matrix"))?;
    if let Some(i) = (0..n).find(|&i| libm::fabs(log_k[(i, i)] - m) <= 1e-12 * m.abs().max(1.0)) {
        m = log_k[(i, i)];
    }

    let b = log_k.map(|x| x - m);
    let closure = plus_closure(&b);
    let c = (0..n).find(|&i| closure[(i, i)] >= -tol).unwrap_or(0);
    let mut v: Vec<f64> = (0..n).map(|j| closure[(c, j)]).collect();
    v[c] = 0.0;
    let scaled = Matrix::from_fn(n, n, |i, j| if i == j { b[(i, i)] } else { (b[(i, j)] + v[i] - v[j]).min(0.0) });

    let st = continuation(&scaled)?;

    // slightly negative when rounding of `m` leaves the critical cycle just below zero
    let excess = st.lam.sub(&st.lam.one_like()).to_xf();
    let log_growth = excess.ln_1p().to_f64();

    let mut log_r: Vec<f64> = (0..n).map(|i| st.y[i].to_xf().ln() - v[i]).collect();
    let pi: Vec<Xf> = st.pi.iter().map(Hp::to_xf).collect();
    let log_pi: Vec<f64> = pi.iter().map(|p| p.ln()).collect();
    let mut log_l: Vec<f64> = (0..n).map(|i| log_pi[i] - log_r[i]).collect();
    let norm = log_sum_exp(&log_r);
    log_r.iter_mut().for_each(|t| *t -= norm);
    log_l.iter_mut().for_each(|t| *t += norm);

    let stochastic = Matrix::from_fn(n, n, |i, j| st.p[i][j].to_xf().to_f64());
    let stochastic = Matrix::from_fn(n, n, |i, j| stochastic[(i, j)] / stochastic.row(i).iter().sum::<f64>());
    let pi_f: Vec<f64> = pi.iter().map(|p| p.to_f64()).collect();
    let total: f64 = pi_f.iter().sum();

    Ok(Solution {
        log_lambda: m + log_growth,
        excess,
        shift: m,
        log_r,
        log_l,
        log_pi,
        stochastic,
        pi: pi_f.iter().map(|p| p / total).collect(),
    })
}

/// Converged eigendata of `K y = λ y` at some precision.
struct Refined {
    y: Vec<Hp>,
    lam: Hp,
    p: Vec<Vec<Hp>>,
    pi: Vec<Hp>,
    /// Binary exponent of the smallest Poisson pivot.
    pivot: i64,
}

/// Follows the eigenvector of `exp(s L)` from `s ~ 1 / max|L|`, where the
/// problem is benign, up to `s = 1`, extrapolating `log y` linearly in `s`.
/// The step in `s` doubles after each success and halves when Newton fails
/// from the extrapolated start. Near-degenerate tropical eigenspaces make a
/// cold start at `s = 1` hopeless: the weights between critical classes are
/// decided by terms many orders of magnitude below the leading ones.
fn continuation(scaled: &Matrix) -> Result<Refined> {
    let n = scaled.rows();
    let range = scaled.iter().filter(|x| x.is_finite()).fold(0.0f64, |a, &x| a.max(libm::fabs(x)));
    let mut s = if range > 1.0 { 1.0 / range } else { 1.0 };
    let mut ds = s;
    let mut bits = START_BITS;
    // exponent of the smallest of `λ - 1` and the pivots at the last solved `s`
    let mut smallest = 0i64;
    let mut history: Vec<(f64, Vec<f64>)> = Vec::new();
    loop {
        let x0: Vec<f64> = match history.as_slice() {
            [] => vec![0.0; n],
            [(_, x)] => x.clone(),
            [.., (s0, x0), (s1, x1)] => (0..n).map(|i| x1[i] + (s - s1) * (x1[i] - x0[i]) / (s1 - s0)).collect(),
        };
        // `λ - 1` and the pivots scale like `exp(-c s)`, so their exponents
        // grow in proportion to `s`
        if let Some((last, _)) = history.last() {
            let predicted = GUARD_BITS - (smallest as f64 * s / last) as i64;
            bits = bits.max((predicted.min(MAX_BITS as i64) as usize).div_ceil(64) * 64);
        }
        let kt: Vec<Vec<Xf>> = (0..n).map(|i| (0..n).map(|j| Xf::exp(s * scaled[(i, j)])).collect()).collect();
        match refine(&kt, &x0, bits)? {
            Some(st) => {
                if s >= 1.0 {
                    return Ok(st);
                }
                smallest = resolution(&st).min(0);
                bits = st.y[0].precision();
                history.push((s, st.y.iter().map(|t| t.to_xf().ln()).collect()));
                ds = (2.0 * ds).min(s);
                s = (s + ds).min(1.0);
            }
            None => {
                let Some((last, _)) = history.last() else {
                    return Err(numeric_err!("Perron refinement did not converge at the first stage"));
                };
                ds = 0.5 * (s - last);
                if ds < 1e-6 * last {
                    return Err(numeric_err!("Perron continuation stalled at scale {}", last));
                }
                s = last + ds;
            }
        }
    }
}

/// Binary exponent of the smaller of `|λ - 1|` and the smallest pivot.
fn resolution(st: &Refined) -> i64 {
    let gap = st.lam.sub(&st.lam.one_like()).to_xf();
    if gap.is_zero() {
        st.pivot
    } else {
        gap.exponent().min(st.pivot)
    }
}

/// Runs [`newton`] at increasing precision until both `λ - 1` and the
/// smallest Poisson pivot are resolved with room to spare. `None` when Newton
/// does not converge from `x0`, even with doubled precision.
fn refine(kt: &[Vec<Xf>], x0: &[f64], mut bits: usize) -> Result<Option<Refined>> {
    let start = |bits: usize| -> Vec<Hp> { x0.iter().map(|&x| Hp::from_xf(Xf::exp(x), bits)).collect() };
    let at = |bits: usize| -> Vec<Vec<Hp>> {
        kt.iter().map(|row| row.iter().map(|&t| Hp::from_xf(t, bits)).collect()).collect()
    };
    let (mut st, mut converged) = newton(&at(bits), start(bits))?;
    if !converged && bits < MAX_BITS {
        bits = (2 * bits).min(MAX_BITS);
        (st, converged) = newton(&at(bits), start(bits))?;
    }
    loop {
        if !converged {
            return Ok(None);
        }
        let needed = GUARD_BITS - resolution(&st);
        if needed <= bits as i64 || bits >= MAX_BITS {
            return Ok(Some(st));
        }
        bits = (needed.clamp(bits as i64 + 64, MAX_BITS as i64) as usize).div_ceil(64) * 64;
        let y = st.y.iter().map(|t| t.with_precision(bits)).collect();
        (st, converged) = newton(&at(bits), y)?;
    }
}

/// Newton's method for `log S_i(y) = log λ` with `S_i = Σ_j K_ij y_j / y_i`.
/// The Jacobian in `log y` is `P - I`, so each step solves a Poisson
/// equation. Updates are multiplicative and exact apart from the step itself.
fn newton(k: &[Vec<Hp>], mut y: Vec<Hp>) -> Result<(Refined, bool)> {
    let floor = libm::ldexp(1.0, -(y[0].precision() as i32 - 24));
    let mut prev = f64::INFINITY;
    let mut stalls = 0;
    let mut spreads: Vec<f64> = Vec::new();
    for _ in 0..MAX_ITER {
        let (p, s) = linearize(k, &y);
        let pi = gth_stationary(&p);
        let lam = eigenvalue(&pi, &s);
        let g: Vec<Hp> = s.iter().map(|si| si.one_like().sub(&lam.over(si))).collect();
        let (delta, pivot) = gth_poisson(&p, &g);
        let d: Vec<f64> = delta.iter().map(|t| t.to_xf().to_f64()).collect();
        let step = d.iter().fold(0.0f64, |a, t| a.max(libm::fabs(*t)));
        if !step.is_finite() {
            return Err(numeric_err!("Perron refinement produced a non-finite step"));
        }
        stalls = if step < 1e-20 && step >= 0.5 * prev { stalls + 1 } else { 0 };
        if step <= floor || stalls >= 2 {
            return Ok((Refined { y, lam, p, pi, pivot }, true));
        }
        // Far from the solution the Newton step can be astronomically long;
        // backtrack on the Collatz-Wielandt spread, which vanishes only at
        // the eigenvector.
        let current = spread(&s);
        spreads.push(current.to_f64());
        if spreads.len() > STAGNATION && spreads[spreads.len() - 1 - STAGNATION] < 2.0 * current.to_f64() {
            return Ok((Refined { y, lam, p, pi, pivot }, false));
        }
        let mut scale = (y[0].precision() as f64 / step).min(1.0);
        let mut next = None;
        for _ in 0..MAX_BACKTRACK {
            let trial = moved(&y, &delta, &d, scale);
            if step * scale <= 1e-3 || spread(&row_growth(k, &trial)) < current {
                next = Some(trial);
                break;
            }
            scale *= 0.5;
        }
        // Along a nearly decoupled direction the residual decays like
        // `exp(-t)` and each full step gains only one unit; keep doubling.
        if let Some(t) = next.as_ref().filter(|_| scale == 1.0 && step >= 0.5) {
            let mut best = (spread(&row_growth(k, t)), scale);
            while step * best.1 * 2.0 <= y[0].precision() as f64 {
                let trial = moved(&y, &delta, &d, best.1 * 2.0);
                let m = spread(&row_growth(k, &trial));
                if !(m < best.0) {
                    break;
                }
                best = (m, best.1 * 2.0);
                next = Some(trial);
            }
        }
        // Close to an avoided crossing Newton's basin is tiny; a shifted
        // inverse step makes progress from anywhere.
        let weak = next.as_ref().is_none_or(|t| !(spread(&row_growth(k, t)).to_f64() < 0.5 * current.to_f64()));
        if weak {
            if let Some(t) = noda_step(&p, &s, &y) {
                let m = spread(&row_growth(k, &t));
                if next.as_ref().is_none_or(|n| m.to_f64() < spread(&row_growth(k, n)).to_f64()) {
                    next = Some(t);
                }
            }
        }
        match next {
            Some(t) => y = t,
            // no descent left at this precision
            None => return Ok((Refined { y, lam, p, pi, pivot }, false)),
        }
        prev = step;
    }
    let (p, s) = linearize(k, &y);
    let pi = gth_stationary(&p);
    let lam = eigenvalue(&pi, &s);
    Ok((Refined { y, lam, p, pi, pivot: 0 }, false))
}

/// One step of inverse iteration shifted by `λ = max S`, which bounds the
/// Perron root from above. With `y' = diag(y) z` the shifted system is
/// `(I + E - P) z = 1/S` with killing rates `E_i = (λ - S_i) / S_i >= 0`,
/// solved by state reduction without subtraction. `None` at an exact
/// eigenvector, where the system is singular.
fn noda_step(p: &[Vec<Hp>], s: &[Hp], y: &[Hp]) -> Option<Vec<Hp>> {
    let n = y.len();
    let mut lam = &s[0];
    for t in &s[1..] {
        if t.sub(lam).is_positive() {
            lam = t;
        }
    }
    let mut kill: Vec<Hp> = s.iter().map(|si| lam.sub(si).over(si)).collect();
    let mut b: Vec<Hp> = s.iter().map(|si| si.one_like().over(si)).collect();
    let mut a: Vec<Vec<Hp>> = p.to_vec();
    let zero = y[0].zero_like();
    let mut history = Vec::with_capacity(n);
    for k in (1..n).rev() {
        let pivot = a[k][..k].iter().fold(kill[k].clone(), |acc, t| acc.plus(t));
        for i in 0..k {
            let f = a[i][k].over(&pivot);
            if f.vanishes() {
                continue;
            }
            for j in 0..k {
                let t = f.times(&a[k][j]);
                a[i][j] = a[i][j].plus(&t);
            }
            kill[i] = kill[i].plus(&f.times(&kill[k]));
            b[i] = b[i].plus(&f.times(&b[k]));
        }
        history.push((k, pivot, a[k][..k].to_vec(), b[k].clone()));
    }
    if !kill[0].is_positive() {
        return None;
    }
    let mut z = vec![zero; n];
    z[0] = b[0].over(&kill[0]);
    for (k, pivot, row, bk) in history.into_iter().rev() {
        let acc = row.iter().zip(&z).fold(bk, |acc, (r, x)| acc.plus(&r.times(x)));
        z[k] = acc.over(&pivot);
    }
    let scale = z[0].clone();
    Some(y.iter().zip(&z).map(|(yi, zi)| yi.times(&zi.over(&scale))).collect())
}

/// `λ = 1 / Σ π_i / S_i`, exact at the eigenvector.
fn eigenvalue(pi: &[Hp], s: &[Hp]) -> Hp {
    let inv: Hp = pi.iter().zip(s).fold(pi[0].zero_like(), |acc, (a, b)| acc.plus(&a.over(b)));
    inv.one_like().over(&inv)
}

fn moved(y: &[Hp], delta: &[Hp], d: &[f64], scale: f64) -> Vec<Hp> {
    (0..y.len())
        .map(|i| {
            let mult = if libm::fabs(d[i] * scale) > 1e-3 {
                Hp::from_xf(Xf::exp(d[i] * scale), y[i].precision())
            } else if scale < 1.0 {
                exp_taylor(&delta[i].times(&Hp::from_f64(scale, y[i].precision())))
            } else {
                exp_taylor(&delta[i])
            };
            y[i].times(&mult)
        })
        .collect()
}

/// `max S / min S - 1`.
fn spread(s: &[Hp]) -> Xf {
    let mut lo = &s[0];
    let mut hi = &s[0];
    for t in &s[1..] {
        if lo.sub(t).is_positive() {
            lo = t;
        }
        if t.sub(hi).is_positive() {
            hi = t;
        }
    }
    hi.sub(lo).over(lo).to_xf()
}

/// `exp(t)` for `|t| <= 1e-3`, with error below `t^5 / 100`.
fn exp_taylor(t: &Hp) -> Hp {
    let one = t.one_like();
    let mut term = one.clone();
    let mut acc = one.clone();
    for k in 1..=4 {
        term = term.times(t).over(&Hp::from_f64(k as f64, t.precision()));
        acc = acc.plus(&term);
    }
    acc
}

fn row_growth(k: &[Vec<Hp>], y: &[Hp]) -> Vec<Hp> {
    (0..y.len())
        .map(|i| (0..y.len()).fold(y[i].zero_like(), |a, j| a.plus(&k[i][j].times(&y[j]))).over(&y[i]))
        .collect()
}

/// Row-normalized `P_ij = K_ij y_j / Σ_j K_ij y_j` and `S_i = Σ_j K_ij y_j / y_i`.
fn linearize(k: &[Vec<Hp>], y: &[Hp]) -> (Vec<Vec<Hp>>, Vec<Hp>) {
    let n = y.len();
    let mut p = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        let terms: Vec<Hp> = (0..n).map(|j| k[i][j].times(&y[j])).collect();
        let total = terms.iter().fold(y[i].zero_like(), |a, t| a.plus(t));
        p.push(terms.iter().map(|t| t.over(&total)).collect());
        s.push(total.over(&y[i]));
    }
    (p, s)
}

/// `log Σ exp(v_i)` without overflow.
pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + libm::log(v.iter().map(|&t| libm::exp(t - mx)).sum::<f64>())
}

/// Heaviest-path closure with at least one edge (Floyd-Warshall); every cycle
/// of `b` must have weight `<= 0`.
fn plus_closure(b: &Matrix) -> Matrix {
    let n = b.rows();
    let mut c = b.clone();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let cand = c[(i, k)] + c[(k, j)];
                if cand > c[(i, j)] {
                    c[(i, j)] = cand;
                }
            }
        }
    }
    c
}

/// Stationary vector by Grassmann-Taksar-Heyman state reduction.
pub(crate) fn gth_stationary<T: Scalar>(p: &[Vec<T>]) -> Vec<T> {
    let n = p.len();
    let mut a: Vec<Vec<T>> = p.to_vec();
    let zero = p[0][0].zero_like();
    for k in (1..n).rev() {
        let s = a[k][..k].iter().fold(zero.clone(), |acc, t| acc.plus(t));
        for i in 0..k {
            a[i][k] = a[i][k].over(&s);
        }
        for i in 0..k {
            let aik = a[i][k].clone();
            if aik.vanishes() {
                continue;
            }
            for j in 0..k {
                let t = aik.times(&a[k][j]);
                a[i][j] = a[i][j].plus(&t);
            }
        }
    }
    let mut x = vec![zero.clone(); n];
    x[0] = zero.one_like();
    for k in 1..n {
        x[k] = (0..k).fold(zero.clone(), |acc, i| acc.plus(&x[i].times(&a[i][k])));
    }
    let total = x.iter().fold(zero.clone(), |acc, t| acc.plus(t));
    x.iter().map(|v| v.over(&total)).collect()
}

/// Solves `(I - P) Δ = g` with `Δ_0 = 0`, assuming `π g = 0`, by the same
/// state reduction as [`gth_stationary`]. Also returns the binary exponent of
/// the smallest reduction pivot, which bounds how much rounding in `g` is
/// amplified.
pub(crate) fn gth_poisson<T: Scalar>(p: &[Vec<T>], g: &[T]) -> (Vec<T>, i64) {
    let n = p.len();
    let mut a: Vec<Vec<T>> = p.to_vec();
    let mut g = g.to_vec();
    let zero = p[0][0].zero_like();
    let mut history = Vec::with_capacity(n);
    for k in (1..n).rev() {
        let s = a[k][..k].iter().fold(zero.clone(), |acc, t| acc.plus(t));
        let gk = g[k].clone();
        for i in 0..k {
            let factor = a[i][k].over(&s);
            if factor.vanishes() {
                continue;
            }
            g[i] = g[i].plus(&factor.times(&gk));
            for j in 0..k {
                let t = factor.times(&a[k][j]);
                a[i][j] = a[i][j].plus(&t);
            }
        }
        history.push((k, s, a[k][..k].to_vec(), gk));
    }
    let smallest = history.iter().map(|h| h.1.log2_size()).min().unwrap_or(0);
    let mut delta = vec![zero.clone(); n];
    for (k, s, row, gk) in history.into_iter().rev() {
        let acc = row.iter().zip(&delta).fold(gk, |acc, (r, d)| acc.plus(&r.times(d)));
        delta[k] = acc.over(&s);
    }
    (delta, smallest)
}
