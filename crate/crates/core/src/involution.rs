//! Dual potentials and involution kernels for two-coordinate potentials.
//!
//! For `A(x) = A(x0, x1)` the dual potential is the transpose and the
//! involution kernel is constant on two-sided cylinders `[i | j]`, where `i`
//! is the past symbol `w0` and `j` the future symbol `x0`.

use crate::error::{input_err, Result};
use crate::matrix::Matrix;
use crate::shift_space::Symbol;
use crate::thermo::{thermo_state, PotentialMatrix};

/// `W(i, j)`: the kernel on `[i | j]` (past `i`, future `j`), 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix(pub Matrix);

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

/// `A*(i, j) = A(j, i)`.
pub fn dual_potential(a: &PotentialMatrix) -> PotentialMatrix {
    a.transpose()
}

/// `W(i, j) = A(i, j)`.
pub fn kernel_matrix(a: &PotentialMatrix) -> KernelMatrix {
    KernelMatrix(a.matrix().clone())
}

/// The first quadruple `i < i2, j < j2` (lexicographic) that breaks a strict
/// rectangle inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistViolation {
    pub i: Symbol,
    pub i2: Symbol,
    pub j: Symbol,
    pub j2: Symbol,
    /// Both sides are equal, as opposed to the reverse inequality holding.
    pub tie: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistReport {
    pub holds: bool,
    pub violation: Option<TwistViolation>,
}

fn rectangle_check(w: &KernelMatrix, reversed: bool) -> Result<TwistReport> {
    let d = w.dim();
    if d < 2 {
        return Err(input_err!("twist needs at least two symbols"));
    }
    let k = &w.0;
    for i in 0..d {
        for i2 in i + 1..d {
            for j in 0..d {
                for j2 in j + 1..d {
                    let diag = k[(i, j)] + k[(i2, j2)];
                    let anti = k[(i, j2)] + k[(i2, j)];
                    let ok = if reversed { diag > anti } else { diag < anti };
                    if !ok {
                        let violation = TwistViolation {
                            i: Symbol::from_zero_based(i),
                            i2: Symbol::from_zero_based(i2),
                            j: Symbol::from_zero_based(j),
                            j2: Symbol::from_zero_based(j2),
                            tie: diag == anti,
                        };
                        return Ok(TwistReport { holds: false, violation: Some(violation) });
                    }
                }
            }
        }
    }
    Ok(TwistReport { holds: true, violation: None })
}

/// `W(i,j) + W(i2,j2) < W(i,j2) + W(i2,j)` for all `i < i2`, `j < j2`, with
/// no tolerance.
pub fn twist_check(w: &KernelMatrix) -> Result<TwistReport> {
    rectangle_check(w, false)
}

/// The opposite orientation, `W(i,j) + W(i2,j2) > W(i,j2) + W(i2,j)`.
pub fn reversed_twist_check(w: &KernelMatrix) -> Result<TwistReport> {
    rectangle_check(w, true)
}

/// `(log λ(beta A), log λ(beta A*))` from two independent Perron solves.
pub fn dual_eigenvalue_identity(a: &PotentialMatrix, beta: f64) -> Result<(f64, f64)> {
    let primal = thermo_state(a, beta)?.pressure();
    let dual = thermo_state(&dual_potential(a), beta)?.pressure();
    Ok((primal, dual))
}
