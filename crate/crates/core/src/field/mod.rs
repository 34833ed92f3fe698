//! Exact arithmetic: Gaussian rationals, polynomials, reduced rational
//! functions, truncated Laurent expansions and two-parameter jets.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

mod gauss;
mod jet;
mod laurent;
mod parse;
mod poly;
mod ratfunc;

pub use gauss::GaussRat;
pub use jet::Jet2;
pub use laurent::LaurentSeries;
pub use parse::parse_ratfunc;
pub use poly::Poly;
pub use ratfunc::RatFunc;

/// Commutative ring with an embedding of `Q(i)`; enough structure for the
/// generic matrix and moment-map code to run over constants, rational
/// functions and jets alike.
pub trait Ring:
    Clone + PartialEq + Debug + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_gauss(c: &GaussRat) -> Self;

    /// Multiplicative inverse when it exists.
    fn try_inv(&self) -> Option<Self>;
}

impl Ring for GaussRat {
    fn from_gauss(c: &GaussRat) -> Self {
        c.clone()
    }

    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl Ring for RatFunc {
    fn from_gauss(c: &GaussRat) -> Self {
        RatFunc::constant(c.clone())
    }

    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

/// `rat_normalize`: canonical reduced form of `num/den`.
pub fn rat_normalize(num: Poly, den: Poly) -> Result<RatFunc, crate::Error> {
    RatFunc::new(num, den)
}

/// `laurent_expand`: exact expansion at 0 with `n_terms` coefficients.
pub fn laurent_expand(f: &RatFunc, n_terms: usize) -> LaurentSeries {
    LaurentSeries::expand(f, n_terms)
}
