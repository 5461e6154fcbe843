//! Transfer matrix `M_ij = exp(beta A(i, j))` of a two-coordinate potential:
//! Perron data, pressure and the equilibrium Markov measure.
//!
//! Conventions: the right eigenvector `r` (`M r = λ r`) is the eigenmeasure,
//! `r_j = ν[j]`, normalized by `Σ r = 1`. The left eigenvector `l`
//! (`lᵀ M = λ lᵀ`) is the eigenfunction, normalized by `Σ l_i r_i = 1`. The
//! equilibrium state is the Markov measure with
//! `P(i, j) = M_ij r_j / (λ r_i)` and `π_i = l_i r_i`.

mod hp;
mod perron;

use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{domain_err, input_err, numeric_err, Result};
use crate::matrix::Matrix;
use crate::measures::{integrate_two_coord, markov_entropy, MarkovMeasure, ProbabilityVector, StochasticMatrix};
use crate::shift_space::Word;
use crate::xfloat::Xf;

pub(crate) use perron::log_sum_exp;

/// A real `d x d` matrix; `A(i, j)` is the potential on the cylinder `[ij]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialMatrix(Matrix);

impl PotentialMatrix {
    pub fn new(a: Matrix) -> Result<PotentialMatrix> {
        if !a.is_square() || a.rows() == 0 {
            return Err(input_err!("potential must be a non-empty square matrix, got {}x{}", a.rows(), a.cols()));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(input_err!("potential entries must be finite"));
        }
        Ok(PotentialMatrix(a))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<PotentialMatrix> {
        PotentialMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn constant(d: usize, c: f64) -> PotentialMatrix {
        PotentialMatrix(Matrix::filled(d, d, c))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn transpose(&self) -> PotentialMatrix {
        PotentialMatrix(self.0.transpose())
    }

    pub fn scaled(&self, beta: f64) -> Matrix {
        self.0.map(|x| beta * x)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.to_rows()
    }

    /// Birkhoff sum `Σ A(w_k, w_(k+1))` along the word.
    pub fn word_sum(&self, w: &Word) -> f64 {
        w.transitions().map(|(i, j)| self.0[(i, j)]).sum()
    }
}

impl Index<(usize, usize)> for PotentialMatrix {
    type Output = f64;
    fn index(&self, ij: (usize, usize)) -> &f64 {
        &self.0[ij]
    }
}

/// Perron eigenvalue and eigenvectors, stored as logarithms.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronData {
    pub log_lambda: f64,
    pub log_r: Vec<f64>,
    pub log_l: Vec<f64>,
}

impl PerronData {
    pub fn lambda(&self) -> f64 {
        libm::exp(self.log_lambda)
    }

    pub fn r(&self) -> Vec<f64> {
        self.log_r.iter().map(|&t| libm::exp(t)).collect()
    }

    pub fn l(&self) -> Vec<f64> {
        self.log_l.iter().map(|&t| libm::exp(t)).collect()
    }
}

/// Perron data of a strictly positive square matrix.
pub fn perron_eigendata(m: &Matrix) -> Result<PerronData> {
    if !m.is_square() || m.rows() == 0 {
        return Err(input_err!("Perron eigendata needs a non-empty square matrix"));
    }
    if m.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(domain_err!("Perron eigendata needs strictly positive finite entries"));
    }
    let s = perron::solve(&m.map(libm::log))?;
    Ok(PerronData { log_lambda: s.log_lambda, log_r: s.log_r, log_l: s.log_l })
}

/// Everything known about `beta A` at one inverse temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermoState {
    pub beta: f64,
    pub perron: PerronData,
    /// `ln π_i`, finite even when `π_i` underflows.
    pub log_pi: Vec<f64>,
    /// `ln(exp(P) - 1)`; `None` when the pressure is not positive.
    pub log_expm1_pressure: Option<f64>,
    equilibrium: MarkovMeasure,
}

impl ThermoState {
    /// `P(beta) = log λ`.
    pub fn pressure(&self) -> f64 {
        self.perron.log_lambda
    }

    pub fn lambda(&self) -> f64 {
        self.perron.lambda()
    }

    pub fn dim(&self) -> usize {
        self.log_pi.len()
    }

    pub fn equilibrium(&self) -> &MarkovMeasure {
        &self.equilibrium
    }

    pub fn p_a(&self) -> &StochasticMatrix {
        self.equilibrium.transition()
    }

    pub fn pi(&self) -> &ProbabilityVector {
        self.equilibrium.stationary()
    }
}

/// Perron data and equilibrium state of `beta A`.
pub fn thermo_state(a: &PotentialMatrix, beta: f64) -> Result<ThermoState> {
    if !beta.is_finite() {
        return Err(input_err!("beta must be finite"));
    }
    let s = perron::solve(&a.scaled(beta))?;
    let excess = if s.shift == 0.0 { s.excess } else { Xf::from_f64(s.log_lambda).exp_m1() };
    let log_expm1_pressure = (!excess.is_sign_negative() && !excess.is_zero()).then(|| excess.ln());
    let p = StochasticMatrix::new(s.stochastic).map_err(|e| numeric_err!("stochasticized matrix: {}", e))?;
    let pi = ProbabilityVector::new(s.pi).map_err(|e| numeric_err!("stationary vector: {}", e))?;
    let equilibrium = MarkovMeasure::new(p, pi).map_err(|e| numeric_err!("equilibrium state: {}", e))?;
    Ok(ThermoState {
        beta,
        perron: PerronData { log_lambda: s.log_lambda, log_r: s.log_r, log_l: s.log_l },
        log_pi: s.log_pi,
        log_expm1_pressure,
        equilibrium,
    })
}

/// `P(beta) = log λ(beta A)`.
pub fn pressure(a: &PotentialMatrix, beta: f64) -> Result<f64> {
    Ok(thermo_state(a, beta)?.pressure())
}

/// `ln μ[w] = ln l(w0) + beta S(w) - (n-1) ln λ + ln r(w_(n-1))`, where the
/// Birkhoff sum runs over the `n - 1` transitions of `w`.
pub fn gibbs_log_cylinder_mass(s: &ThermoState, a: &PotentialMatrix, w: &Word) -> Result<f64> {
    w.check(s.dim())?;
    let (Some(first), Some(last)) = (w.first(), w.last()) else {
        return Err(input_err!("Gibbs mass needs a non-empty word"));
    };
    let n = w.len() as f64;
    Ok(s.perron.log_l[first.zero_based()] + s.beta * a.word_sum(w) - (n - 1.0) * s.perron.log_lambda
        + s.perron.log_r[last.zero_based()])
}

/// Mass of a cylinder under the equilibrium state, from the Gibbs formula.
pub fn gibbs_cylinder_mass(s: &ThermoState, a: &PotentialMatrix, w: &Word) -> Result<f64> {
    gibbs_log_cylinder_mass(s, a, w).map(libm::exp)
}

/// `h(μ) + beta ∫ A dμ`, bounded above by the pressure of `beta A`.
pub fn free_energy(m: &MarkovMeasure, a: &PotentialMatrix, beta: f64) -> Result<f64> {
    Ok(markov_entropy(m) + beta * integrate_two_coord(a, m)?)
}

/// Central difference of the pressure at `beta`, next to `∫ A dμ_beta`.
pub fn pressure_derivative_check(a: &PotentialMatrix, beta: f64, h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return Err(input_err!("finite-difference step must be positive"));
    }
    let fd = (pressure(a, beta + h)? - pressure(a, beta - h)?) / (2.0 * h);
    let s = thermo_state(a, beta)?;
    Ok((fd, integrate_two_coord(a, s.equilibrium())?))
}

/// `C = max_ij |ln(l_i r_j)|`, so that
/// `exp(-C) <= μ[w] / exp(beta S(w) - (n-1) ln λ) <= exp(C)`.
pub fn gibbs_bounds_constant(s: &ThermoState) -> f64 {
    let mut c: f64 = 0.0;
    for &li in &s.perron.log_l {
        for &rj in &s.perron.log_r {
            c = c.max(libm::fabs(li + rj));
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::markov_cylinder_mass;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        libm::fabs(a - b) <= tol * b.abs().max(1.0)
    }

    #[test]
    fn all_ones_matrix() {
        let p = perron_eigendata(&Matrix::filled(2, 2, 1.0)).unwrap();
        assert!(close(p.lambda(), 2.0, 1e-15));
        for (r, l) in p.r().iter().zip(p.l()) {
            assert!(close(*r, 0.5, 1e-15));
            assert!(close(l, 1.0, 1e-15));
        }
    }

    #[test]
    fn stochastic_matrix_has_unit_eigenvalue() {
        let m = Matrix::from_rows(&[[0.2, 0.8], [0.55, 0.45]]).unwrap();
        assert!(libm::fabs(perron_eigendata(&m).unwrap().log_lambda) < 1e-15);
    }

    #[test]
    fn non_positive_entries_are_a_domain_error() {
        let m = Matrix::from_rows(&[[0.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(perron_eigendata(&m), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn two_state_eigenvalue_formula() {
        let a = PotentialMatrix::from_rows(&[[0.0, -0.3], [-1.1, 0.0]]).unwrap();
        for beta in [0.5, 3.0, 40.0, 400.0] {
            let s = thermo_state(&a, beta).unwrap();
            let expected = libm::log1p(libm::exp(-beta * 0.7));
            assert!(close(s.pressure(), expected, 1e-13), "{beta}");
            assert!(close(s.log_expm1_pressure.unwrap(), -beta * 0.7, 1e-13));
        }
    }

    #[test]
    fn zero_potential_is_uniform() {
        let a = PotentialMatrix::constant(3, 0.0);
        for beta in [0.0, 7.0] {
            let s = thermo_state(&a, beta).unwrap();
            assert!(close(s.pressure(), libm::log(3.0), 1e-15));
            assert!(s.pi().as_slice().iter().all(|&p| close(p, 1.0 / 3.0, 1e-15)));
            assert!(close(gibbs_bounds_constant(&s), libm::log(3.0), 1e-14));
            let w = Word::new(&[1, 3, 2, 2]).unwrap();
            assert!(close(gibbs_cylinder_mass(&s, &a, &w).unwrap(), 1.0 / 81.0, 1e-14));
        }
    }

    #[test]
    fn gibbs_one_letter_mass_is_pi() {
        let a = PotentialMatrix::from_rows(&[[0.3, -1.0, 0.2], [0.8, 0.0, -0.5], [0.1, 0.4, -0.2]]).unwrap();
        let s = thermo_state(&a, 2.0).unwrap();
        for i in 1..=3 {
            let w = Word::new(&[i]).unwrap();
            let g = gibbs_cylinder_mass(&s, &a, &w).unwrap();
            let m = markov_cylinder_mass(s.equilibrium(), &w).unwrap();
            assert!(libm::fabs(g - m) <= 1e-14 * m);
        }
    }

    #[test]
    fn constant_potential_derivative() {
        let a = PotentialMatrix::constant(3, -0.7);
        let (fd, exact) = pressure_derivative_check(&a, 1.5, 1e-3).unwrap();
        assert!(libm::fabs(fd + 0.7) < 1e-10);
        assert!(libm::fabs(exact + 0.7) < 1e-14);
    }
}
