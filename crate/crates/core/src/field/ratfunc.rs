use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{GaussRat, Poly};
use crate::error::Error;

/// A reduced rational function `num/den` over `Q(i)`.
///
/// Canonical form: `gcd(num, den) = 1`, `den` monic, and zero is `0/1`. Two
/// rational functions are equal iff their representations are identical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Build the canonical representative of `num/den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let (num, den) = if den.is_constant() || num.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else if g.is_monomial() {
                let k = g.degree().unwrap();
                (num.shift_down(k), den.shift_down(k))
            } else {
                (num.div_exact(&g)?, den.div_exact(&g)?)
            }
        };
        let lc = den.leading().expect("nonzero").clone();
        if lc.is_one() {
            Ok(RatFunc { num, den })
        } else {
            let inv = lc.inv()?;
            Ok(RatFunc { num: num.scale(&inv), den: den.scale(&inv) })
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: GaussRat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc::constant(GaussRat::from_int(n))
    }

    /// The variable of the ambient chart (`z` globally, `u` locally).
    pub fn var() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    /// `c * x^k` for any integer `k`.
    pub fn monomial(c: GaussRat, k: i64) -> Self {
        if c.is_zero() {
            return RatFunc::zero();
        }
        if k >= 0 {
            RatFunc::from_poly(Poly::monomial(c, k as usize))
        } else {
            RatFunc { num: Poly::constant(c), den: Poly::monomial(GaussRat::one(), (-k) as usize) }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Order of vanishing at 0 (negative for a pole); `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().expect("nonzero den") as i64;
        Some(vn - vd)
    }

    /// Order of vanishing at infinity: `deg den - deg num`.
    pub fn valuation_at_infinity(&self) -> Option<i64> {
        let dn = self.num.degree()? as i64;
        Some(self.den.degree().expect("nonzero den") as i64 - dn)
    }

    /// Regular at 0 (zero counts as regular).
    pub fn is_regular_at_zero(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn powi(&self, e: i64) -> Result<Self, Error> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        Ok(RatFunc { num: base.num.pow(e), den: base.den.pow(e) })
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    /// `f(x + a)`.
    pub fn taylor_shift(&self, a: &GaussRat) -> Self {
        RatFunc::new(self.num.taylor_shift(a), self.den.taylor_shift(a)).expect("shift keeps den nonzero")
    }

    /// `f(1/x)`.
    pub fn invert_var(&self) -> Self {
        if self.is_zero() {
            return RatFunc::zero();
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        let mut n = self.num.reversed(dn);
        let mut d = self.den.reversed(dd);
        if dd >= dn {
            n = n.shift_up(dd - dn);
        } else {
            d = d.shift_up(dn - dd);
        }
        RatFunc::new(n, d).expect("nonzero den")
    }

    pub fn eval(&self, x: &GaussRat) -> Result<GaussRat, Error> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(&self.num.eval(x) / &d)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den).expect("nonzero den")
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.display_in(var);
        }
        let wrap = |p: &Poly| {
            let s = p.display_in(var);
            let atomic = p.coeffs().iter().filter(|c| !c.is_zero()).count() == 1
                && !s.starts_with('-')
                && !s.contains('(')
                && !s.contains('/');
            if atomic { s } else { format!("({s})") }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::from_int(1)
    }
}

impl From<GaussRat> for RatFunc {
    fn from(c: GaussRat) -> Self {
        RatFunc::constant(c)
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone()).expect("nonzero den");
        }
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFunc::new(n, &self.den * &o.den).expect("nonzero den")
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = self.as_constant() {
            return o.scale(&c);
        }
        if let Some(c) = o.as_constant() {
            return self.scale(&c);
        }
        RatFunc::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero den")
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    /// Panics when dividing by zero; see [`RatFunc::inv`].
    fn div(self, o: &RatFunc) -> RatFunc {
        self * &o.inv().expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc { (&self).$m(o) }
        }
        impl<'a> $tr<RatFunc> for &'a RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc { self.$m(&o) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl std::iter::Sum for RatFunc {
    fn sum<I: Iterator<Item = RatFunc>>(iter: I) -> Self {
        iter.fold(RatFunc::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("z"))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| GaussRat::from_int(c)).collect())
    }

    #[test]
    fn normalize_cancels_common_factor() {
        let f = RatFunc::new(p(&[-1, 0, 1]), p(&[-1, 1])).unwrap();
        assert_eq!(f.num(), &p(&[1, 1]));
        assert_eq!(f.den(), &p(&[1]));
    }

    #[test]
    fn normalize_zero() {
        let f = RatFunc::new(Poly::zero(), p(&[0, 0, 0, 1])).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.den(), &Poly::one());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(RatFunc::new(p(&[1]), Poly::zero()), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn monic_denominator_convention() {
        // (2z + 2) / 4 -> z/2 + 1/2
        let f = RatFunc::new(p(&[2, 2]), p(&[4])).unwrap();
        let half = GaussRat::ratio(1, 2);
        assert_eq!(f.num(), &Poly::new(vec![half.clone(), half]));
        assert_eq!(f.den(), &Poly::one());
        // (2z)/(2z^2+2) -> z/(z^2+1)
        let g = RatFunc::new(p(&[0, 2]), p(&[2, 0, 2])).unwrap();
        assert_eq!(g.num(), &p(&[0, 1]));
        assert_eq!(g.den(), &p(&[1, 0, 1]));
    }

    #[test]
    fn invert_var_roundtrip() {
        let f = RatFunc::new(p(&[1, 2, 0, 3]), p(&[0, -1, 1])).unwrap();
        assert_eq!(f.invert_var().invert_var(), f);
        // 1/z at z -> 1/u is u
        assert_eq!(RatFunc::monomial(GaussRat::one(), -1).invert_var(), RatFunc::var());
    }

    #[test]
    fn valuations() {
        let f = RatFunc::new(p(&[0, 0, 1]), p(&[0, 0, 0, 1, 1])).unwrap();
        assert_eq!(f.valuation(), Some(-1));
        assert_eq!(f.valuation_at_infinity(), Some(2));
        assert!(RatFunc::zero().is_regular_at_zero());
    }
}
