//! Thermodynamic formalism and ergodic optimization for potentials that depend
//! on two coordinates of a one-sided shift over a finite alphabet.
//!
//! A two-coordinate potential is a real `d x d` matrix `A`, where `A(i, j)` is
//! the value of the potential on the cylinder `[ij]`. Everything in this crate
//! reduces to finite linear algebra over that matrix:
//!
//! * [`thermo`]: Perron data of `exp(beta * A)`, pressure, the equilibrium
//!   Markov measure and its Gibbs property.
//! * [`maxplus`]: the max-plus semiring, whose eigenvalue of `A` is the maximal
//!   ergodic average `m(A)` and whose eigenvectors are calibrated subactions.
//! * [`ergopt`]: maximizing cycles, Peierls barrier, Aubry set, ground states
//!   and the zero-temperature rate function.
//! * [`zero_temp`]: sweeps in `beta` and the closed-form three-symbol analysis.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

extern crate alloc;

pub mod ergopt;
pub mod error;
pub mod involution;
pub mod matrix;
pub mod maxplus;
pub mod measures;
pub mod shift_space;
pub mod thermo;
pub mod xfloat;
pub mod zero_temp;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use shift_space::{Symbol, Word};
pub use thermo::PotentialMatrix;
