//! The marked curve P^1, the trivializing form alpha on the complement of the
//! marked points, and the transition functions of the chosen square root of K.

use std::fmt;

use num_traits::Zero;

use crate::field::{Poly, RatFunc};
use crate::residue::{localize, split_roots, OneForm, P1Point};

/// Local coordinate at a point of P^1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalCoordinate {
    /// `u = z - a`.
    Shift(crate::field::GaussRat),
    /// `u = 1/z`.
    Inversion,
}

impl LocalCoordinate {
    /// Rewrite a global function of `z` in terms of `u`.
    pub fn pull(&self, f: &RatFunc) -> RatFunc {
        match self {
            LocalCoordinate::Shift(a) => f.taylor_shift(a),
            LocalCoordinate::Inversion => f.invert_var(),
        }
    }
}

impl fmt::Display for LocalCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalCoordinate::Shift(a) if a.is_zero() => write!(f, "u = z"),
            LocalCoordinate::Shift(a) => {
                let s = a.to_string();
                if s.starts_with('-') {
                    write!(f, "u = z + {}", &s[1..])
                } else if s.contains(['+', '-']) {
                    write!(f, "u = z - ({s})")
                } else {
                    write!(f, "u = z - {s}")
                }
            }
            LocalCoordinate::Inversion => write!(f, "u = 1/z"),
        }
    }
}

pub fn local_coordinate(p: &P1Point) -> LocalCoordinate {
    match p {
        P1Point::Finite(a) => LocalCoordinate::Shift(a.clone()),
        P1Point::Infinity => LocalCoordinate::Inversion,
    }
}

/// P^1 with marked points, `alpha = coeff(z) dz` and one transition `T_i(u)` per point.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedCurve {
    points: Vec<P1Point>,
    alpha: OneForm,
    transitions: Vec<RatFunc>,
}

/// Violations found by [`curve_validate`]; empty means valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CurveReport {
    pub violations: Vec<String>,
}

impl CurveReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl MarkedCurve {
    /// Unchecked construction; see [`curve_validate`].
    pub fn new(points: Vec<P1Point>, alpha: OneForm, transitions: Vec<RatFunc>) -> Self {
        MarkedCurve { points, alpha, transitions }
    }

    /// One marked point at infinity, `alpha = -dz`, `T = u`.
    pub fn default_fixture() -> Self {
        MarkedCurve::new(vec![P1Point::Infinity], OneForm::new(RatFunc::from_int(-1)), vec![RatFunc::var()])
    }

    pub fn points(&self) -> &[P1Point] {
        &self.points
    }

    pub fn alpha(&self) -> &OneForm {
        &self.alpha
    }

    pub fn transitions(&self) -> &[RatFunc] {
        &self.transitions
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same curve with every `T_i` replaced by `sign_i * T_i`.
    pub fn with_branches(&self, flips: &[bool]) -> Self {
        let transitions =
            self.transitions.iter().zip(flips.iter().chain(std::iter::repeat(&false))).map(|(t, &f)| if f { -t } else { t.clone() }).collect();
        MarkedCurve { transitions, ..self.clone() }
    }

    pub fn chart(&self, i: usize) -> LocalCoordinate {
        local_coordinate(&self.points[i])
    }

    /// `h_i(u)` with `alpha = h_i du` near the i-th point.
    pub fn alpha_local(&self, i: usize) -> RatFunc {
        localize(&self.alpha, &self.points[i])
    }

    pub fn is_marked(&self, p: &P1Point) -> bool {
        self.points.contains(p)
    }

    fn finite_marked(&self) -> impl Iterator<Item = &crate::field::GaussRat> {
        self.points.iter().filter_map(|p| match p {
            P1Point::Finite(a) => Some(a),
            P1Point::Infinity => None,
        })
    }

    /// Strip every factor `(z - a)` for finite marked `a`; what is left must be constant
    /// for the polynomial to have no roots off the marked set.
    pub fn unmarked_part(&self, p: &Poly) -> Poly {
        self.finite_marked().fold(p.clone(), |acc, a| acc.strip_root(a).1)
    }

    /// A global function with no poles away from the marked points.
    pub fn is_regular_off_marked(&self, f: &RatFunc) -> bool {
        if f.is_zero() {
            return true;
        }
        if !self.unmarked_part(f.den()).is_constant() {
            return false;
        }
        self.is_marked(&P1Point::Infinity) || f.valuation_at_infinity().is_none_or(|v| v >= 0)
    }
}

/// Checks that `alpha` has neither zeros nor poles off the marked points and
/// that `alpha = T_i^-2 du` near every marked point.
pub fn curve_validate(c: &MarkedCurve) -> CurveReport {
    let mut report = CurveReport::default();
    if c.points.is_empty() {
        report.violations.push("no marked points".into());
    }
    for (i, p) in c.points.iter().enumerate() {
        if c.points[..i].contains(p) {
            report.violations.push(format!("marked point {p} is repeated"));
        }
    }
    if c.transitions.len() != c.points.len() {
        report.violations.push(format!("{} transitions for {} marked points", c.transitions.len(), c.points.len()));
    }
    let coeff = &c.alpha.coeff;
    if coeff.is_zero() {
        report.violations.push("alpha is identically zero".into());
        return report;
    }
    for (what, poly) in [("vanishes", coeff.num()), ("has a pole", coeff.den())] {
        let rest = c.unmarked_part(poly);
        if !rest.is_constant() {
            let at = match split_roots(&rest) {
                Ok(rs) => rs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
                Err(_) => format!("the roots of {}", rest.display_in("z")),
            };
            report.violations.push(format!("alpha {what} at {at}, off the marked points"));
        }
    }
    if !c.is_marked(&P1Point::Infinity) {
        match localize(&c.alpha, &P1Point::Infinity).valuation() {
            Some(v) if v > 0 => report.violations.push("alpha vanishes at inf, off the marked points".into()),
            Some(v) if v < 0 => report.violations.push("alpha has a pole at inf, off the marked points".into()),
            _ => {}
        }
    }
    for (i, (p, t)) in c.points.iter().zip(&c.transitions).enumerate() {
        let expected = match t.powi(-2) {
            Ok(x) => x,
            Err(_) => {
                report.violations.push(format!("transition T_{i} at {p} is zero"));
                continue;
            }
        };
        let local = c.alpha_local(i);
        if local != expected {
            report.violations.push(format!(
                "at {p}: alpha localizes to {} du but T^-2 = {}",
                local.display_in("u"),
                expected.display_in("u")
            ));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_ratfunc, GaussRat};

    fn z(s: &str) -> RatFunc {
        parse_ratfunc(s, "z").unwrap()
    }

    fn u(s: &str) -> RatFunc {
        parse_ratfunc(s, "u").unwrap()
    }

    #[test]
    fn default_fixture_is_valid() {
        let c = MarkedCurve::default_fixture();
        assert_eq!(c.alpha_local(0), u("u^-2"));
        assert!(curve_validate(&c).is_valid());
        assert!(curve_validate(&c.with_branches(&[true])).is_valid());
    }

    #[test]
    fn imaginary_branch() {
        let c = MarkedCurve::new(vec![P1Point::Infinity], OneForm::new(z("1")), vec![u("i*u")]);
        assert!(curve_validate(&c).is_valid());
    }

    #[test]
    fn alpha_with_zero_off_marked_set() {
        let c = MarkedCurve::new(vec![P1Point::Infinity], OneForm::new(z("z")), vec![u("u")]);
        let r = curve_validate(&c);
        assert!(r.violations.iter().any(|v| v.contains("vanishes at 0")), "{r:?}");
    }

    #[test]
    fn two_point_curve() {
        // alpha = dz/z^2: near 0 it is u^-2 du, near inf it is -du
        let c = MarkedCurve::new(
            vec![P1Point::finite(0), P1Point::Infinity],
            OneForm::new(z("z^-2")),
            vec![u("u"), RatFunc::constant(GaussRat::i())],
        );
        assert!(curve_validate(&c).is_valid(), "{:?}", curve_validate(&c));
        let wrong = MarkedCurve::new(c.points().to_vec(), c.alpha().clone(), vec![u("u"), u("1")]);
        assert!(!curve_validate(&wrong).is_valid());
    }

    #[test]
    fn unmarked_infinity() {
        // dz/(z(z-1)) is regular and nonvanishing at inf
        let c = MarkedCurve::new(
            vec![P1Point::finite(0), P1Point::finite(1)],
            OneForm::new(z("1/(z*(z-1))")),
            vec![u("1"), u("1")],
        );
        let r = curve_validate(&c);
        assert!(r.violations.iter().all(|v| !v.contains("inf")), "{r:?}");
        assert!(!c.is_regular_off_marked(&z("z")));
        assert!(c.is_regular_off_marked(&z("1/(z-1)^3")));
    }

    #[test]
    fn coordinates() {
        assert_eq!(local_coordinate(&P1Point::finite(3)).to_string(), "u = z - 3");
        assert_eq!(local_coordinate(&P1Point::Infinity).to_string(), "u = 1/z");
        assert_eq!(local_coordinate(&P1Point::finite(0)).to_string(), "u = z");
        assert_eq!(local_coordinate(&P1Point::finite(3)).pull(&z("z^2")), u("(u+3)^2"));
    }
}
