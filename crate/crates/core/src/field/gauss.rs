//! Gaussian rationals `Q(i)`: the coefficient field for every exact computation.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// An element `re + im*i` of `Q(i)`.
///
/// Both components are kept as reduced `BigRational`s, so structural equality
/// is field equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    re: BigRational,
    im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// `p/q`, panics on `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        GaussRat::new(BigRational::new(p.into(), q.into()), BigRational::zero())
    }

    pub fn complex(re: BigRational, im: BigRational) -> Self {
        GaussRat::new(re, im)
    }

    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// `re^2 + im^2`.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        let n = self.norm();
        Ok(GaussRat::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = GaussRat::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Least common multiple of the denominators of both components.
    pub fn denominator_lcm(&self) -> BigInt {
        num_integer::lcm(self.re.denom().clone(), self.im.denom().clone())
    }

    /// Height used to keep random samples small: max of |numerators| and denominators.
    pub fn height(&self) -> BigInt {
        [self.re.numer().abs(), self.re.denom().clone(), self.im.numer().abs(), self.im.denom().clone()]
            .into_iter()
            .max()
            .unwrap_or_default()
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::default()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::new(BigRational::one(), BigRational::zero())
    }
}

impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        GaussRat::from_int(n)
    }
}

impl From<BigRational> for GaussRat {
    fn from(r: BigRational) -> Self {
        GaussRat::new(r, BigRational::zero())
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::new(&self.re * &o.re, BigRational::zero());
        }
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    /// Panics on division by zero; use [`GaussRat::inv`] for a checked inverse.
    fn div(self, o: &GaussRat) -> GaussRat {
        self * &o.inv().expect("division by zero in Q(i)")
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &GaussRat) -> GaussRat { (&self).$m(o) }
        }
        impl<'a> $tr<GaussRat> for &'a GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat { self.$m(&o) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, o: &GaussRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussRat> for GaussRat {
    fn mul_assign(&mut self, o: &GaussRat) {
        *self = &*self * o;
    }
}

impl std::iter::Sum for GaussRat {
    fn sum<I: Iterator<Item = GaussRat>>(iter: I) -> Self {
        iter.fold(GaussRat::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    /// `p/q`, `r/s*i` or `p/q+r/s*i`; parsed back by [`FromStr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |r: &BigRational| -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rational(r))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let im = im_part(&self.im);
                if im.starts_with('-') {
                    write!(f, "{}{}", fmt_rational(&self.re), im)
                } else {
                    write!(f, "{}+{}", fmt_rational(&self.re), im)
                }
            }
        }
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for GaussRat {
    type Err = Error;

    /// Strict form `p/q`, `p/q+r/s*i`, `r/s*i`, `i`, `-i`. Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Error> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        parse_gauss(&text).map_err(|(pos, msg)| Error::Parse {
            location: format!("column {}", pos + 1),
            message: format!("{msg} in {s:?}"),
        })
    }
}

fn parse_gauss(s: &str) -> Result<GaussRat, (usize, String)> {
    if s.is_empty() {
        return Err((0, "empty number".into()));
    }
    // split into at most two signed terms at a sign that is not the first char
    let bytes = s.as_bytes();
    let split = (1..bytes.len()).find(|&k| bytes[k] == b'+' || bytes[k] == b'-');
    let (first, second) = match split {
        Some(k) => ((&s[..k], 0), Some((&s[k..], k))),
        None => ((s, 0), None),
    };
    let mut out = GaussRat::zero();
    let mut seen_re = false;
    let mut seen_im = false;
    for (term, offset) in std::iter::once(first).chain(second) {
        let (value, imaginary) = parse_term(term).map_err(|(p, m)| (p + offset, m))?;
        if imaginary {
            if seen_im {
                return Err((offset, "two imaginary parts".into()));
            }
            seen_im = true;
            out.im = value;
        } else {
            if seen_re || seen_im {
                return Err((offset, "real part must come first and only once".into()));
            }
            seen_re = true;
            out.re = value;
        }
    }
    Ok(out)
}

fn parse_term(t: &str) -> Result<(BigRational, bool), (usize, String)> {
    let (neg, body, shift) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..], 1),
        Some(b'+') => (false, &t[1..], 1),
        _ => (false, t, 0),
    };
    let (body, imaginary) = if let Some(stripped) = body.strip_suffix("*i") {
        (stripped, true)
    } else if body == "i" {
        ("1", true)
    } else {
        (body, false)
    };
    let mut parts = body.split('/');
    let num = parts.next().unwrap_or("");
    let den = parts.next();
    if parts.next().is_some() {
        let pos = body.find("//").or_else(|| body.rfind('/')).unwrap_or(0);
        return Err((shift + pos, "malformed rational".into()));
    }
    let int = |x: &str, at: usize| -> Result<BigInt, (usize, String)> {
        if x.is_empty() || !x.bytes().all(|b| b.is_ascii_digit()) {
            return Err((at, format!("expected digits, found {x:?}")));
        }
        Ok(x.parse::<BigInt>().expect("digits"))
    };
    let n = int(num, shift)?;
    let d = match den {
        Some(d) => int(d, shift + num.len() + 1)?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err((shift + num.len() + 1, "zero denominator".into()));
    }
    let mut r = BigRational::new(n, d);
    if neg {
        r = -r;
    }
    Ok((r, imaginary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_prints() {
        for s in ["3/4", "-1/2", "0", "i", "-i", "3/4+1/2*i", "3/4-1/2*i", "2*i", "-7/3*i"] {
            assert_eq!(g(s).to_string(), s);
        }
        assert_eq!(g("6/8"), g("3/4"));
    }

    #[test]
    fn rejects_double_slash() {
        let err = "3//4".parse::<GaussRat>().unwrap_err();
        match err {
            Error::Parse { location, .. } => assert_eq!(location, "column 2"),
            e => panic!("unexpected {e:?}"),
        }
        assert!("1/0".parse::<GaussRat>().is_err());
        assert!("".parse::<GaussRat>().is_err());
        assert!("1+2+3*i".parse::<GaussRat>().is_err());
    }

    #[test]
    fn inverse_and_i_squared() {
        let i = GaussRat::i();
        assert_eq!(&i * &i, GaussRat::from_int(-1));
        let x = g("3/4-1/2*i");
        assert_eq!(&x * &x.inv().unwrap(), GaussRat::one());
        assert!(GaussRat::zero().inv().is_err());
    }
}
