//! Extended-exponent floating point.
//!
//! At large `beta` the entries of `exp(beta * A)` and the components of the
//! Perron vectors span thousands of orders of magnitude. [`Xf`] keeps an `f64`
//! mantissa together with an unbounded binary exponent, so products and sums
//! never overflow or underflow while keeping double-precision relative
//! accuracy.

use core::cmp::Ordering;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};

const LN2: f64 = core::f64::consts::LN_2;
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

/// `m * 2^e` with `m == 0` or `0.5 <= |m| < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Xf {
    m: f64,
    e: i64,
}

impl Xf {
    pub const ZERO: Xf = Xf { m: 0.0, e: 0 };
    pub const ONE: Xf = Xf { m: 0.5, e: 1 };

    fn normalized(m: f64, e: i64) -> Xf {
        if m == 0.0 {
            return Xf::ZERO;
        }
        let (mm, ee) = libm::frexp(m);
        Xf { m: mm, e: e + ee as i64 }
    }

    pub fn from_f64(x: f64) -> Xf {
        debug_assert!(x.is_finite());
        Xf::normalized(x, 0)
    }

    /// `exp(x)` without overflow or underflow; `exp(-inf) = 0`.
    pub fn exp(x: f64) -> Xf {
        if x == f64::NEG_INFINITY {
            return Xf::ZERO;
        }
        debug_assert!(x.is_finite());
        let k = libm::floor(x * core::f64::consts::LOG2_E);
        let r = (x - k * LN2_HI) - k * LN2_LO;
        Xf::normalized(libm::exp(r), k as i64)
    }

    /// Natural log of a positive value; `-inf` for zero.
    pub fn ln(self) -> f64 {
        debug_assert!(self.m >= 0.0);
        if self.m == 0.0 {
            return f64::NEG_INFINITY;
        }
        libm::log(self.m) + self.e as f64 * LN2
    }

    /// `ln(1 + x)`, accurate relative to `x` when `x` is tiny.
    pub fn ln_1p(self) -> Xf {
        if self.e < -20 {
            let x = self;
            let x2 = x * x;
            return x - x2 * Xf::from_f64(0.5) + x2 * x * Xf::from_f64(1.0 / 3.0);
        }
        if self.e > 1000 {
            return Xf::from_f64(self.ln());
        }
        Xf::from_f64(libm::log1p(self.to_f64()))
    }

    /// `exp(x) - 1`, accurate relative to `x` when `x` is tiny.
    pub fn exp_m1(self) -> Xf {
        if self.e < -20 {
            let x = self;
            let x2 = x * x;
            return x + x2 * Xf::from_f64(0.5) + x2 * x * Xf::from_f64(1.0 / 6.0);
        }
        let v = self.to_f64();
        if v > 700.0 {
            return Xf::exp(v) - Xf::ONE;
        }
        Xf::from_f64(libm::expm1(v))
    }

    /// Nearest `f64`; saturates to `+-inf` or flushes to zero.
    pub fn to_f64(self) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        if self.e > 1100 {
            return if self.m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if self.e < -1100 {
            return 0.0;
        }
        libm::ldexp(self.m, self.e as i32)
    }

    pub fn is_zero(self) -> bool {
        self.m == 0.0
    }

    pub fn is_sign_negative(self) -> bool {
        self.m < 0.0
    }

    pub fn abs(self) -> Xf {
        Xf { m: libm::fabs(self.m), e: self.e }
    }

    /// Binary exponent; meaningless for zero.
    pub fn exponent(self) -> i64 {
        self.e
    }

    /// Mantissa in `[0.5, 1)` up to sign, or zero.
    pub(crate) fn mantissa(self) -> f64 {
        self.m
    }

    pub(crate) fn from_parts(m: f64, e: i64) -> Xf {
        Xf::normalized(m, e)
    }
}

impl From<f64> for Xf {
    fn from(x: f64) -> Xf {
        Xf::from_f64(x)
    }
}

impl Add for Xf {
    type Output = Xf;
    fn add(self, rhs: Xf) -> Xf {
        if self.m == 0.0 {
            return rhs;
        }
        if rhs.m == 0.0 {
            return self;
        }
        let (big, small) = if self.e >= rhs.e { (self, rhs) } else { (rhs, self) };
        let shift = big.e - small.e;
        if shift > 1100 {
            return big;
        }
        Xf::normalized(big.m + libm::ldexp(small.m, -(shift as i32)), big.e)
    }
}

impl AddAssign for Xf {
    fn add_assign(&mut self, rhs: Xf) {
        *self = *self + rhs;
    }
}

impl Neg for Xf {
    type Output = Xf;
    fn neg(self) -> Xf {
        Xf { m: -self.m, e: self.e }
    }
}

impl Sub for Xf {
    type Output = Xf;
    fn sub(self, rhs: Xf) -> Xf {
        self + (-rhs)
    }
}

impl Mul for Xf {
    type Output = Xf;
    fn mul(self, rhs: Xf) -> Xf {
        if self.m == 0.0 || rhs.m == 0.0 {
            return Xf::ZERO;
        }
        Xf::normalized(self.m * rhs.m, self.e + rhs.e)
    }
}

impl MulAssign for Xf {
    fn mul_assign(&mut self, rhs: Xf) {
        *self = *self * rhs;
    }
}

impl Div for Xf {
    type Output = Xf;
    fn div(self, rhs: Xf) -> Xf {
        assert!(rhs.m != 0.0, "Xf division by zero");
        if self.m == 0.0 {
            return Xf::ZERO;
        }
        Xf::normalized(self.m / rhs.m, self.e - rhs.e)
    }
}

impl Sum for Xf {
    fn sum<I: Iterator<Item = Xf>>(iter: I) -> Xf {
        iter.fold(Xf::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Xf {
    fn partial_cmp(&self, other: &Xf) -> Option<Ordering> {
        let d = *self - *other;
        if d.m == 0.0 {
            Some(Ordering::Equal)
        } else if d.m > 0.0 {
            Some(Ordering::Greater)
        } else {
            Some(Ordering::Less)
        }
    }
}
