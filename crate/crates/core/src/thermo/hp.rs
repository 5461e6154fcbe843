//! Arbitrary-precision scalar for the final Perron refinement.

use astro_float::{BigFloat, RoundingMode, Sign};

use crate::xfloat::Xf;

const RM: RoundingMode = RoundingMode::ToEven;

/// Field operations shared by the state-reduction solvers.
pub(crate) trait Scalar: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn over(&self, o: &Self) -> Self;
    fn vanishes(&self) -> bool;
    /// Binary exponent, `i64::MAX` for zero.
    fn log2_size(&self) -> i64;
}

impl Scalar for Xf {
    fn zero_like(&self) -> Xf {
        Xf::ZERO
    }
    fn one_like(&self) -> Xf {
        Xf::ONE
    }
    fn plus(&self, o: &Xf) -> Xf {
        *self + *o
    }
    fn times(&self, o: &Xf) -> Xf {
        *self * *o
    }
    fn over(&self, o: &Xf) -> Xf {
        *self / *o
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn log2_size(&self) -> i64 {
        if self.is_zero() {
            i64::MAX
        } else {
            self.exponent()
        }
    }
}

/// A `BigFloat` that remembers its working precision.
#[derive(Clone, Debug)]
pub(crate) struct Hp {
    v: BigFloat,
    p: usize,
}

impl Hp {
    pub fn from_f64(x: f64, p: usize) -> Hp {
        Hp { v: BigFloat::from_f64(x, p), p }
    }

    /// Exact conversion.
    pub fn from_xf(x: Xf, p: usize) -> Hp {
        if x.is_zero() {
            return Hp::from_f64(0.0, p);
        }
        let mut v = BigFloat::from_f64(x.mantissa(), p);
        v.set_exponent(x.exponent() as i32);
        Hp { v, p }
    }

    /// Rounds to an `f64` mantissa, keeping the full exponent range.
    pub fn to_xf(&self) -> Xf {
        match self.v.as_raw_parts() {
            Some((words, _, sign, e, _)) if !self.v.is_zero() && !words.is_empty() => {
                let top = words[words.len() - 1];
                let next = if words.len() > 1 { words[words.len() - 2] } else { 0 };
                let m = (top as f64 + next as f64 / 18446744073709551616.0) / 18446744073709551616.0;
                let m = if sign == Sign::Neg { -m } else { m };
                Xf::from_parts(m, e as i64)
            }
            _ => Xf::ZERO,
        }
    }

    pub fn with_precision(&self, p: usize) -> Hp {
        let mut v = self.v.clone();
        if p > self.p {
            v.set_precision(p, RM).ok();
        }
        Hp { v, p }
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn sub(&self, o: &Hp) -> Hp {
        let p = self.p.max(o.p);
        Hp { v: self.v.sub(&o.v, p, RM), p }
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }
}

impl Scalar for Hp {
    fn zero_like(&self) -> Hp {
        Hp::from_f64(0.0, self.p)
    }
    fn one_like(&self) -> Hp {
        Hp::from_f64(1.0, self.p)
    }
    fn plus(&self, o: &Hp) -> Hp {
        let p = self.p.max(o.p);
        Hp { v: self.v.add(&o.v, p, RM), p }
    }
    fn times(&self, o: &Hp) -> Hp {
        let p = self.p.max(o.p);
        Hp { v: self.v.mul(&o.v, p, RM), p }
    }
    fn over(&self, o: &Hp) -> Hp {
        let p = self.p.max(o.p);
        Hp { v: self.v.div(&o.v, p, RM), p }
    }
    fn vanishes(&self) -> bool {
        self.v.is_zero()
    }
    fn log2_size(&self) -> i64 {
        match self.v.exponent() {
            Some(e) if !self.v.is_zero() => e as i64,
            _ => i64::MAX,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xf_round_trip() {
        for x in [Xf::exp(-5000.0), Xf::from_f64(-3.25), Xf::exp(1234.5), Xf::ZERO] {
            let h = Hp::from_xf(x, 256);
            assert_eq!(h.to_xf(), x);
        }
    }

    #[test]
    fn resolves_tiny_offsets() {
        let one = Hp::from_f64(1.0, 4096);
        let tiny = Hp::from_xf(Xf::exp(-2000.0), 4096);
        let back = one.plus(&tiny).sub(&one);
        assert!(libm::fabs(back.to_xf().ln() + 2000.0) < 1e-12);
    }
}
