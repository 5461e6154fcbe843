//! Three symbols, two fixed points: `A = -ε` with `ε11 = ε22 = 0` and every
//! other entry positive, `ε33` included. The maximizing measures are the convex hull of
//! `δ1` and `δ2`; which one survives as `beta -> infinity` is decided by the
//! ratio `μ[1] / μ[2]`.

use alloc::vec::Vec;

use crate::error::{domain_err, numeric_err, Result};
use crate::matrix::Matrix;
use crate::maxplus::MaxPlusMatrix;
use crate::thermo::{log_sum_exp, thermo_state, PotentialMatrix};

/// Inverse temperatures of the numeric limit classification.
pub const LIMIT_BETAS: [f64; 3] = [150.0, 200.0, 300.0];

const EXPONENT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chapter7Params {
    eps: [[f64; 3]; 3],
}

impl Chapter7Params {
    pub fn new(eps: [[f64; 3]; 3]) -> Result<Chapter7Params> {
        for (i, row) in eps.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                let ok = match (i, j) {
                    (0, 0) | (1, 1) => e == 0.0,
                    _ => e > 0.0 && e.is_finite(),
                };
                if !ok {
                    return Err(domain_err!("invalid ε({},{}) = {}", i + 1, j + 1, e));
                }
            }
        }
        Ok(Chapter7Params { eps })
    }

    /// Off-diagonal ε, plus `ε33`, in the order ε12 ε13 ε21 ε23 ε31 ε32 ε33.
    pub fn from_entries(e12: f64, e13: f64, e21: f64, e23: f64, e31: f64, e32: f64, e33: f64) -> Result<Self> {
        Chapter7Params::new([[0.0, e12, e13], [e21, 0.0, e23], [e31, e32, e33]])
    }

    /// `ε_ij`, 1-based.
    pub fn eps(&self, i: usize, j: usize) -> f64 {
        self.eps[i - 1][j - 1]
    }

    pub fn eps_rows(&self) -> [[f64; 3]; 3] {
        self.eps
    }

    pub fn potential(&self) -> PotentialMatrix {
        PotentialMatrix::new(Matrix::from_fn(3, 3, |i, j| -self.eps[i][j])).expect("finite 3x3")
    }

    /// The same system with the roles of symbols 1 and 2 exchanged.
    pub fn swapped(&self) -> Chapter7Params {
        let p = [1, 0, 2];
        let mut eps = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                eps[i][j] = self.eps[p[i]][p[j]];
            }
        }
        Chapter7Params { eps }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rho {
    pub rho: f64,
    /// `-(ε13+ε31)`, `-(ε23+ε32)`, `-(ε12+ε21)/2`, `-(ε21+ε13+ε32)/2`,
    /// `-(ε12+ε23+ε31)/2`, `-(ε13+ε31+ε23+ε32)/2`.
    pub candidates: [f64; 6],
    /// Indices into `candidates` attaining the maximum.
    pub argmax: Vec<usize>,
}

pub fn rho_chapter7(p: &Chapter7Params) -> Rho {
    let e = |i, j| p.eps(i, j);
    let candidates = [
        -(e(1, 3) + e(3, 1)),
        -(e(2, 3) + e(3, 2)),
        -(e(1, 2) + e(2, 1)) / 2.0,
        -(e(2, 1) + e(1, 3) + e(3, 2)) / 2.0,
        -(e(1, 2) + e(2, 3) + e(3, 1)) / 2.0,
        -(e(1, 3) + e(3, 1) + e(2, 3) + e(3, 2)) / 2.0,
    ];
    let top = candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = (0..6).filter(|&k| candidates[k] >= top - tol(top)).collect();
    Rho { rho: -top, candidates, argmax }
}

/// The 2x2 max-plus matrix acting on `(V(1), V(2))` after `V(3)` is
/// eliminated; its eigenvalue is `-ρ`.
pub fn reduced_exponent_matrix(p: &Chapter7Params) -> MaxPlusMatrix {
    let e = |i, j| p.eps(i, j);
    let rows = [
        [-(e(1, 3) + e(3, 1)), f64::max(-e(2, 1), -(e(3, 1) + e(2, 3)))],
        [f64::max(-e(1, 2), -(e(3, 2) + e(1, 3))), -(e(2, 3) + e(3, 2))],
    ];
    MaxPlusMatrix::from_f64_rows(&rows).expect("finite 2x2")
}

fn tol(x: f64) -> f64 {
    EXPONENT_TOL * f64::max(1.0, libm::fabs(x))
}

fn log_add(a: f64, b: f64) -> f64 {
    log_sum_exp(&[a, b])
}

/// `ln(ν[1]/ν[2])` from `ln(e^P - 1)`.
fn log_nu_ratio(p: &Chapter7Params, beta: f64, log_y: f64) -> f64 {
    let e = |i, j| beta * p.eps(i, j);
    log_add(log_y - e(1, 3), -(e(1, 2) + e(2, 3))) - log_add(log_y - e(2, 3), -(e(2, 1) + e(1, 3)))
}

/// `ln(H(1)/H(2))` from `ln(e^P - 1)`.
fn log_h_ratio(p: &Chapter7Params, beta: f64, log_y: f64) -> f64 {
    let e = |i, j| beta * p.eps(i, j);
    log_add(log_y - e(3, 1), -(e(2, 1) + e(3, 2))) - log_add(log_y - e(3, 2), -(e(1, 2) + e(3, 1)))
}

fn log_expm1(pressure: f64) -> Result<f64> {
    let y = libm::expm1(pressure);
    if y > 0.0 {
        Ok(libm::log(y))
    } else {
        Err(domain_err!("pressure must be positive, got {}", pressure))
    }
}

fn log_expm1_pressure(p: &Chapter7Params, beta: f64) -> Result<f64> {
    thermo_state(&p.potential(), beta)?
        .log_expm1_pressure
        .ok_or_else(|| numeric_err!("pressure at beta = {} is not resolved above zero", beta))
}

/// `ν[1]/ν[2]` of the eigenmeasure, given the pressure of `beta A`.
pub fn nu_ratio_chapter7(p: &Chapter7Params, beta: f64, pressure: f64) -> Result<f64> {
    Ok(libm::exp(log_nu_ratio(p, beta, log_expm1(pressure)?)))
}

/// `ln(μ[1]/μ[2])`.
pub fn log_mu_ratio_chapter7(p: &Chapter7Params, beta: f64) -> Result<f64> {
    let log_y = log_expm1_pressure(p, beta)?;
    Ok(log_nu_ratio(p, beta, log_y) + log_h_ratio(p, beta, log_y))
}

/// `μ[1]/μ[2]` of the equilibrium state.
pub fn mu_ratio_chapter7(p: &Chapter7Params, beta: f64) -> Result<f64> {
    log_mu_ratio_chapter7(p, beta).map(libm::exp)
}

/// `g(beta) = (e^P - 1) e^{ρ beta}`.
pub fn g_function_chapter7(p: &Chapter7Params, beta: f64) -> Result<f64> {
    let rho = rho_chapter7(p).rho;
    Ok(libm::exp(log_expm1_pressure(p, beta)? + rho * beta))
}

/// Limit of `μ[1]/μ[2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitClass {
    /// `μ_beta -> δ2`.
    Zero,
    Finite(f64),
    /// `μ_beta -> δ1`.
    Infinite,
}

impl LimitClass {
    fn same_kind(self, other: LimitClass) -> bool {
        matches!(
            (self, other),
            (LimitClass::Zero, LimitClass::Zero)
                | (LimitClass::Infinite, LimitClass::Infinite)
                | (LimitClass::Finite(_), LimitClass::Finite(_))
        )
    }

    pub fn alpha(self) -> f64 {
        match self {
            LimitClass::Zero => 0.0,
            LimitClass::Finite(a) => a,
            LimitClass::Infinite => f64::INFINITY,
        }
    }
}

/// Ratio bounds of the numeric classification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassThresholds {
    pub low: f64,
    pub high: f64,
}

impl Default for ClassThresholds {
    fn default() -> Self {
        ClassThresholds { low: 1e-4, high: 1e4 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chapter7Analysis {
    pub rho: f64,
    pub candidates: [f64; 6],
    pub argmax: Vec<usize>,
    /// Number of `ρ`-order terms in the linear coefficient of the cubic for `e^P - 1`.
    pub b_tilde: usize,
    /// Number of `2ρ`-order terms in its constant coefficient.
    pub c_tilde: usize,
    /// Positive root of `G² - b̃G - c̃ = 0`, the limit of `g`.
    pub g_limit: f64,
    /// Growth rate of `ln(μ[1]/μ[2]) / beta` read off the exponents.
    pub exponent: f64,
    pub asymptotic: LimitClass,
    pub numeric: LimitClass,
    /// `(beta, ln(μ[1]/μ[2]))` at [`LIMIT_BETAS`].
    pub numeric_trace: Vec<(f64, f64)>,
    pub agree: bool,
}

impl Chapter7Analysis {
    /// `α = lim μ[1]/μ[2]` when both classifications agree; the numeric value
    /// is used in the finite case.
    pub fn alpha(&self) -> Option<f64> {
        self.agree.then(|| self.numeric.alpha())
    }

    /// `(α/(α+1), 1/(α+1))`, the weights of `δ1` and `δ2` in the limit.
    pub fn selected(&self) -> Option<[f64; 2]> {
        self.alpha().map(|a| if a.is_infinite() { [1.0, 0.0] } else { [a / (a + 1.0), 1.0 / (a + 1.0)] })
    }
}

/// Dominant exponent and prefactor of `G e^{-β(ρ+u)} + e^{-βv}`.
fn factor(g: f64, rho: f64, u: f64, v: f64) -> (f64, f64) {
    let (x, y) = (-(rho + u), -v);
    if libm::fabs(x - y) <= tol(x) {
        (x, g + 1.0)
    } else if x > y {
        (x, g)
    } else {
        (y, 1.0)
    }
}

fn asymptotic_class(p: &Chapter7Params, r: &Rho) -> (usize, usize, f64, f64, LimitClass) {
    let e = |i, j| p.eps(i, j);
    let rho = r.rho;
    let b_terms = [e(1, 2) + e(2, 1), e(1, 3) + e(3, 1), e(2, 3) + e(3, 2)];
    let c_terms = [e(1, 2) + e(2, 1), e(1, 2) + e(2, 3) + e(3, 1), e(2, 1) + e(1, 3) + e(3, 2)];
    let b = b_terms.iter().filter(|&&s| libm::fabs(s - rho) <= tol(rho)).count();
    let c = c_terms.iter().filter(|&&s| libm::fabs(s - 2.0 * rho) <= tol(rho)).count();
    let (bf, cf) = (b as f64, c as f64);
    let g = (bf + libm::sqrt(bf * bf + 4.0 * cf)) / 2.0;

    let n1 = factor(g, rho, e(1, 3), e(1, 2) + e(2, 3));
    let d1 = factor(g, rho, e(2, 3), e(2, 1) + e(1, 3));
    let n2 = factor(g, rho, e(3, 1), e(2, 1) + e(3, 2));
    let d2 = factor(g, rho, e(3, 2), e(1, 2) + e(3, 1));
    let exponent = n1.0 - d1.0 + n2.0 - d2.0;
    let class = if libm::fabs(exponent) <= tol(rho) {
        LimitClass::Finite(n1.1 * n2.1 / (d1.1 * d2.1))
    } else if exponent > 0.0 {
        LimitClass::Infinite
    } else {
        LimitClass::Zero
    };
    (b, c, g, exponent, class)
}

pub fn limit_selection_chapter7(p: &Chapter7Params) -> Result<Chapter7Analysis> {
    limit_selection_chapter7_with(p, ClassThresholds::default())
}

/// Classifies `lim μ[1]/μ[2]` from the exponents and from numeric values at
/// [`LIMIT_BETAS`]. Disagreement leaves `agree` false.
pub fn limit_selection_chapter7_with(p: &Chapter7Params, th: ClassThresholds) -> Result<Chapter7Analysis> {
    let r = rho_chapter7(p);
    let (b_tilde, c_tilde, g_limit, exponent, asymptotic) = asymptotic_class(p, &r);
    let numeric_trace =
        LIMIT_BETAS.iter().map(|&beta| Ok((beta, log_mu_ratio_chapter7(p, beta)?))).collect::<Result<Vec<_>>>()?;
    let last = numeric_trace[numeric_trace.len() - 1].1;
    let numeric = if last < libm::log(th.low) {
        LimitClass::Zero
    } else if last > libm::log(th.high) {
        LimitClass::Infinite
    } else {
        LimitClass::Finite(libm::exp(last))
    };
    Ok(Chapter7Analysis {
        rho: r.rho,
        candidates: r.candidates,
        argmax: r.argmax,
        b_tilde,
        c_tilde,
        g_limit,
        exponent,
        asymptotic,
        numeric,
        numeric_trace,
        agree: asymptotic.same_kind(numeric),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxplus::{karp_max_cycle_mean, MaxPlusScalar};

    fn sample() -> Chapter7Params {
        Chapter7Params::from_entries(1.0, 2.0, 1.0, 3.0, 2.0, 3.0, 1.0).unwrap()
    }

    #[test]
    fn sample_rho() {
        let r = rho_chapter7(&sample());
        assert_eq!(r.candidates, [-4.0, -6.0, -1.0, -3.0, -3.0, -5.0]);
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.argmax, alloc::vec![2]);
        let all_one = Chapter7Params::from_entries(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let r = rho_chapter7(&all_one);
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.argmax, alloc::vec![2]);
    }

    #[test]
    fn rho_is_reduced_eigenvalue() {
        let p = Chapter7Params::from_entries(0.7, 1.3, 2.2, 0.4, 0.9, 1.7, 0.3).unwrap();
        let lam = karp_max_cycle_mean(&reduced_exponent_matrix(&p)).unwrap();
        assert!(libm::fabs(lam + rho_chapter7(&p).rho) < 1e-15);
        assert!(!reduced_exponent_matrix(&p)
            .to_f64_rows()
            .iter()
            .flatten()
            .any(|&x| x == MaxPlusScalar::NegInf.to_f64()));
    }

    #[test]
    fn invalid_params() {
        assert!(Chapter7Params::new([[0.1, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]).is_err());
        assert!(Chapter7Params::new([[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]).is_err());
        assert!(Chapter7Params::new([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]).is_err());
    }

    #[test]
    fn beta_zero_ratios_are_one() {
        let p = sample();
        assert!(libm::fabs(nu_ratio_chapter7(&p, 0.0, libm::log(3.0)).unwrap() - 1.0) < 1e-15);
        assert!(nu_ratio_chapter7(&p, 1.0, 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_eigendata() {
        let p = Chapter7Params::from_entries(0.7, 1.3, 2.2, 0.4, 0.9, 1.7, 0.3).unwrap();
        for beta in [0.5, 5.0, 40.0, 120.0] {
            let s = thermo_state(&p.potential(), beta).unwrap();
            let direct = s.log_pi[0] - s.log_pi[1];
            let closed = log_mu_ratio_chapter7(&p, beta).unwrap();
            assert!(libm::fabs(libm::expm1(closed - direct)) < 1e-10, "beta {beta}");
            let nu = nu_ratio_chapter7(&p, beta, s.pressure()).unwrap();
            let direct_nu = libm::exp(s.perron.log_r[0] - s.perron.log_r[1]);
            assert!(libm::fabs(nu / direct_nu - 1.0) < 1e-10, "beta {beta}");
        }
    }

    #[test]
    fn sample_limit_is_balanced() {
        let a = limit_selection_chapter7(&sample()).unwrap();
        assert_eq!((a.b_tilde, a.c_tilde), (0, 1));
        assert_eq!(a.g_limit, 1.0);
        assert_eq!(a.asymptotic, LimitClass::Finite(1.0));
        assert!(a.agree);
        assert!(libm::fabs(a.alpha().unwrap() - 1.0) < 1e-9);
        let [w1, w2] = a.selected().unwrap();
        assert!(libm::fabs(w1 + w2 - 1.0) < 1e-15);
    }

    #[test]
    fn swapping_symbols_inverts_the_ratio() {
        let p = Chapter7Params::from_entries(0.7, 1.3, 2.2, 0.4, 0.9, 1.7, 0.3).unwrap();
        let q = p.swapped();
        for beta in [3.0, 30.0] {
            let x = log_mu_ratio_chapter7(&p, beta).unwrap();
            let y = log_mu_ratio_chapter7(&q, beta).unwrap();
            assert!(libm::fabs(x + y) < 1e-9 * f64::max(1.0, libm::fabs(x)));
        }
    }
}
