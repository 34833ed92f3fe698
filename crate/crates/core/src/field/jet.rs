//! Two-parameter first-order jets `v + e1*d1 + e2*d2 + e1*e2*d12` with `e1^2 = e2^2 = 0`.
//!
//! These are the dual numbers that make tangent vectors ("infinitesimal
//! curves") exact: evaluating an expression on jets yields its value, both
//! first derivatives and the mixed second derivative at once.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{GaussRat, Ring};
use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Jet2<R> {
    pub v: R,
    pub d1: R,
    pub d2: R,
    pub d12: R,
}

impl<R: Ring> Jet2<R> {
    pub fn new(v: R, d1: R, d2: R, d12: R) -> Self {
        Jet2 { v, d1, d2, d12 }
    }

    pub fn constant(v: R) -> Self {
        Jet2 { v, d1: R::zero(), d2: R::zero(), d12: R::zero() }
    }

    /// `v + e1*d1 + e2*d2`.
    pub fn tangent(v: R, d1: R, d2: R) -> Self {
        Jet2 { v, d1, d2, d12: R::zero() }
    }

    /// The nilpotent `e1`.
    pub fn eps1() -> Self {
        Jet2 { v: R::zero(), d1: R::one(), d2: R::zero(), d12: R::zero() }
    }

    pub fn eps2() -> Self {
        Jet2 { v: R::zero(), d1: R::zero(), d2: R::one(), d12: R::zero() }
    }

    /// Inverse, defined iff the value component is invertible.
    pub fn inv(&self) -> Result<Self, Error> {
        let w = self.v.try_inv().ok_or(Error::NotInvertible)?;
        let w2 = w.clone() * w.clone();
        let w3 = w2.clone() * w.clone();
        let two = R::from_gauss(&GaussRat::from_int(2));
        Ok(Jet2 {
            d1: -(w2.clone() * self.d1.clone()),
            d2: -(w2.clone() * self.d2.clone()),
            d12: -(w2 * self.d12.clone()) + two * w3 * self.d1.clone() * self.d2.clone(),
            v: w,
        })
    }

    pub fn map<S>(&self, f: impl Fn(&R) -> S) -> Jet2<S> {
        Jet2 { v: f(&self.v), d1: f(&self.d1), d2: f(&self.d2), d12: f(&self.d12) }
    }
}

impl<R: Ring> Add for Jet2<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet2 { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2, d12: self.d12 + o.d12 }
    }
}

impl<R: Ring> Sub for Jet2<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet2 { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2, d12: self.d12 - o.d12 }
    }
}

impl<R: Ring> Neg for Jet2<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet2 { v: -self.v, d1: -self.d1, d2: -self.d2, d12: -self.d12 }
    }
}

impl<R: Ring> Mul for Jet2<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let d12 = self.v.clone() * o.d12.clone()
            + self.d1.clone() * o.d2.clone()
            + self.d2.clone() * o.d1.clone()
            + self.d12 * o.v.clone();
        Jet2 {
            d1: self.v.clone() * o.d1 + self.d1 * o.v.clone(),
            d2: self.v.clone() * o.d2 + self.d2 * o.v.clone(),
            v: self.v * o.v,
            d12,
        }
    }
}

impl<R: Ring> Zero for Jet2<R> {
    fn zero() -> Self {
        Jet2::constant(R::zero())
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero() && self.d1.is_zero() && self.d2.is_zero() && self.d12.is_zero()
    }
}

impl<R: Ring> One for Jet2<R> {
    fn one() -> Self {
        Jet2::constant(R::one())
    }
}

impl<R: Ring> Ring for Jet2<R> {
    fn from_gauss(c: &GaussRat) -> Self {
        Jet2::constant(R::from_gauss(c))
    }

    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type J = Jet2<GaussRat>;

    fn c(n: i64) -> GaussRat {
        GaussRat::from_int(n)
    }

    #[test]
    fn leibniz_product() {
        // (a + e1)(b + e2) = ab + b e1 + a e2 + e1 e2
        let a = J::tangent(c(3), c(1), c(0));
        let b = J::tangent(c(5), c(0), c(1));
        assert_eq!(a * b, J::new(c(15), c(5), c(3), c(1)));
    }

    #[test]
    fn geometric_inverse() {
        let x = J::constant(c(1)) + J::eps1();
        assert_eq!(x.inv().unwrap(), J::constant(c(1)) - J::eps1());
        let y = J::new(c(2), c(3), c(-1), c(4));
        assert_eq!(y.clone() * y.inv().unwrap(), J::one());
    }

    #[test]
    fn nilpotent() {
        assert!((J::eps1() * J::eps1()).is_zero());
        assert!(matches!(J::eps2().inv(), Err(Error::NotInvertible)));
    }
}
