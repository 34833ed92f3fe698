//! Rational 1-forms on P^1, their local expansions at points (including infinity)
//! and exact residues.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::Error;
use crate::field::{GaussRat, LaurentSeries, RatFunc};

mod roots;

pub use roots::split_roots;

/// A point of P^1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum P1Point {
    Finite(GaussRat),
    Infinity,
}

impl P1Point {
    pub fn finite(a: i64) -> Self {
        P1Point::Finite(GaussRat::from_int(a))
    }

    /// Pull a global function of `z` back to the local coordinate `u`
    /// (`u = z - a` at a finite point, `u = 1/z` at infinity).
    pub fn localize_function(&self, f: &RatFunc) -> RatFunc {
        match self {
            P1Point::Finite(a) => f.taylor_shift(a),
            P1Point::Infinity => f.invert_var(),
        }
    }

    /// `dz / du` in the local coordinate.
    pub fn jacobian(&self) -> RatFunc {
        match self {
            P1Point::Finite(_) => RatFunc::from_int(1),
            P1Point::Infinity => RatFunc::monomial(GaussRat::from_int(-1), -2),
        }
    }
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1Point::Finite(a) => write!(f, "{a}"),
            P1Point::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for P1Point {
    type Err = Error;

    /// `"inf"` or a Gaussian rational; `"a+bi"` is accepted as shorthand for `"a+b*i"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" || t.eq_ignore_ascii_case("infinity") {
            return Ok(P1Point::Infinity);
        }
        let fixed = match t.strip_suffix('i') {
            Some(head) if head.ends_with(|c: char| c.is_ascii_digit()) => format!("{head}*i"),
            _ => t.to_string(),
        };
        fixed.parse::<GaussRat>().map(P1Point::Finite)
    }
}

/// The global rational 1-form `coeff(z) dz`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OneForm {
    pub coeff: RatFunc,
}

impl OneForm {
    pub fn new(coeff: RatFunc) -> Self {
        OneForm { coeff }
    }

    /// Finite poles: the roots of the reduced denominator, which must lie in `Q(i)`.
    pub fn finite_poles(&self) -> Result<Vec<GaussRat>, Error> {
        split_roots(self.coeff.den())
    }
}

/// `h(u)` with `form = h(u) du` in the local coordinate at `p`.
pub fn localize(form: &OneForm, p: &P1Point) -> RatFunc {
    let f = p.localize_function(&form.coeff);
    match p {
        P1Point::Finite(_) => f,
        P1Point::Infinity => &f * &p.jacobian(),
    }
}

/// Coefficient of `u^-1 du` of a local expression.
pub fn local_residue(h: &RatFunc) -> GaussRat {
    match h.valuation() {
        Some(v) if v <= -1 => LaurentSeries::expand_through(h, -1).residue().expect("expanded through -1"),
        _ => GaussRat::zero(),
    }
}

/// Exact residue of `form` at `p`.
pub fn residue(form: &OneForm, p: &P1Point) -> GaussRat {
    local_residue(&localize(form, p))
}

/// Residues at every pole, infinity included.
pub fn residues(form: &OneForm) -> Result<Vec<(P1Point, GaussRat)>, Error> {
    let mut out: Vec<(P1Point, GaussRat)> = form
        .finite_poles()?
        .into_iter()
        .map(|a| {
            let p = P1Point::Finite(a);
            let r = residue(form, &p);
            (p, r)
        })
        .collect();
    out.push((P1Point::Infinity, residue(form, &P1Point::Infinity)));
    Ok(out)
}

/// Sum of all residues of a rational 1-form on P^1; always zero.
pub fn residue_sum(form: &OneForm) -> Result<GaussRat, Error> {
    Ok(residues(form)?.into_iter().map(|(_, r)| r).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_ratfunc;
    use num_traits::One;

    fn form(s: &str) -> OneForm {
        OneForm::new(parse_ratfunc(s, "z").unwrap())
    }

    fn u(s: &str) -> RatFunc {
        parse_ratfunc(s, "u").unwrap()
    }

    #[test]
    fn chart_rules() {
        assert_eq!(localize(&form("1"), &P1Point::Infinity), u("-u^-2"));
        assert_eq!(localize(&form("1/z"), &P1Point::finite(0)), u("1/u"));
        assert_eq!(localize(&form("1/(z-1)"), &P1Point::finite(1)), u("1/u"));
    }

    #[test]
    fn simple_residues() {
        assert_eq!(residue(&form("1/z"), &P1Point::finite(0)), GaussRat::one());
        assert_eq!(residue(&form("1/z"), &P1Point::Infinity), GaussRat::from_int(-1));
        assert_eq!(residue(&form("z"), &P1Point::Infinity), GaussRat::zero());
    }

    #[test]
    fn residue_sums() {
        let f = form("1/(z*(z-1))");
        let rs = residues(&f).unwrap();
        let at = |p: &P1Point| rs.iter().find(|(q, _)| q == p).unwrap().1.clone();
        assert_eq!(at(&P1Point::finite(0)), GaussRat::from_int(-1));
        assert_eq!(at(&P1Point::finite(1)), GaussRat::one());
        assert_eq!(at(&P1Point::Infinity), GaussRat::zero());
        assert!(residue_sum(&f).unwrap().is_zero());
        assert!(residue_sum(&form("1/z^2")).unwrap().is_zero());
    }

    #[test]
    fn unsupported_denominator() {
        assert!(matches!(residue_sum(&form("1/(z^2-2)")), Err(Error::UnsupportedDenominator(_))));
    }

    #[test]
    fn point_parsing() {
        assert_eq!("inf".parse::<P1Point>().unwrap(), P1Point::Infinity);
        assert_eq!("1+2i".parse::<P1Point>().unwrap(), P1Point::Finite("1+2*i".parse().unwrap()));
        assert_eq!("-3/2".parse::<P1Point>().unwrap(), P1Point::Finite(GaussRat::ratio(-3, 2)));
    }
}
