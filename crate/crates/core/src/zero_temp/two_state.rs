use crate::error::{domain_err, Result};
use crate::thermo::PotentialMatrix;

/// Exact data for `A = [[0, a], [b, 0]]` with `a, b < 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoStateClosedForms {
    /// `ln λ = ln(1 + exp(beta (a + b) / 2))`.
    pub pressure: f64,
    /// `ln(H_1 / H_2) = beta (b - a) / 2`.
    pub log_h_ratio: f64,
    /// `(μ[1], μ[2]) = (1/2, 1/2)` at every `beta`.
    pub mu: [f64; 2],
    /// Zero-temperature subaction gap `V(1) - V(2) = (b - a) / 2`.
    pub v_diff: f64,
}

impl TwoStateClosedForms {
    pub fn lambda(&self) -> f64 {
        libm::exp(self.pressure)
    }
}

pub fn two_state_closed_forms(a: &PotentialMatrix, beta: f64) -> Result<TwoStateClosedForms> {
    if a.dim() != 2 || a[(0, 0)] != 0.0 || a[(1, 1)] != 0.0 || !(a[(0, 1)] < 0.0) || !(a[(1, 0)] < 0.0) {
        return Err(domain_err!("closed forms need a 2x2 potential with zero diagonal and negative off-diagonal"));
    }
    let (a12, a21) = (a[(0, 1)], a[(1, 0)]);
    Ok(TwoStateClosedForms {
        pressure: libm::log1p(libm::exp(beta * (a12 + a21) / 2.0)),
        log_h_ratio: beta * (a21 - a12) / 2.0,
        mu: [0.5, 0.5],
        v_diff: (a21 - a12) / 2.0,
    })
}
