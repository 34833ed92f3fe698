use std::fmt;

use num_traits::Zero;

use super::{GaussRat, RatFunc};

/// A truncated Laurent expansion `sum_{k=start}^{truncation_order} c_k u^k` at `u = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    start: i64,
    coeffs: Vec<GaussRat>,
    truncation_order: i64,
}

impl LaurentSeries {
    /// Exact expansion of `f` at 0 with `n_terms` coefficients, starting at `ord_0(f)`.
    ///
    /// The zero function expands to an empty coefficient list.
    pub fn expand(f: &RatFunc, n_terms: usize) -> Self {
        assert!(n_terms >= 1, "laurent_expand needs at least one term");
        let Some(start) = f.valuation() else {
            return LaurentSeries { start: 0, coeffs: Vec::new(), truncation_order: n_terms as i64 - 1 };
        };
        let vn = f.num().valuation().unwrap();
        let vd = f.den().valuation().unwrap();
        let num = f.num().shift_down(vn);
        let den = f.den().shift_down(vd);
        let d0_inv = den.coeff(0).inv().expect("den(0) != 0 after stripping");
        let mut out: Vec<GaussRat> = Vec::with_capacity(n_terms);
        for k in 0..n_terms {
            let mut acc = num.coeff(k);
            for j in 1..=k.min(den.coeffs().len().saturating_sub(1)) {
                let t = den.coeff(j) * &out[k - j];
                acc -= &t;
            }
            out.push(&acc * &d0_inv);
        }
        LaurentSeries { start, coeffs: out, truncation_order: start + n_terms as i64 - 1 }
    }

    /// Expansion that is exact through the exponent `last` (inclusive).
    pub fn expand_through(f: &RatFunc, last: i64) -> Self {
        match f.valuation() {
            None => LaurentSeries { start: 0, coeffs: Vec::new(), truncation_order: last },
            Some(v) if v > last => LaurentSeries { start: v, coeffs: Vec::new(), truncation_order: last },
            Some(v) => LaurentSeries::expand(f, (last - v + 1) as usize),
        }
    }

    pub fn start_exponent(&self) -> i64 {
        self.start
    }

    pub fn truncation_order(&self) -> i64 {
        self.truncation_order
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficient of `u^k`, or `None` past the truncation order.
    pub fn coeff(&self, k: i64) -> Option<GaussRat> {
        if k > self.truncation_order {
            return None;
        }
        if k < self.start {
            return Some(GaussRat::zero());
        }
        Some(self.coeffs.get((k - self.start) as usize).cloned().unwrap_or_default())
    }

    /// Coefficient of `u^-1`.
    pub fn residue(&self) -> Option<GaussRat> {
        self.coeff(-1)
    }

    /// Product, valid up to the smaller relative precision of the factors.
    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let start = self.start + other.start;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            let rel = (self.truncation_order - self.start).min(other.truncation_order - other.start);
            return LaurentSeries { start, coeffs: Vec::new(), truncation_order: start + rel };
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|j| &self.coeffs[j] * &other.coeffs[k - j]).sum())
            .collect();
        LaurentSeries { start, coeffs, truncation_order: start + n as i64 - 1 }
    }

    /// Truncate (or keep) to exponents `<= order`.
    pub fn truncate(&self, order: i64) -> LaurentSeries {
        let keep = (order - self.start + 1).clamp(0, self.coeffs.len() as i64) as usize;
        LaurentSeries {
            start: self.start,
            coeffs: self.coeffs[..keep].to_vec(),
            truncation_order: order.min(self.truncation_order),
        }
    }

    /// Equality of the coefficients both series determine.
    pub fn agrees_with(&self, other: &LaurentSeries) -> bool {
        let hi = self.truncation_order.min(other.truncation_order);
        let lo = self.start.min(other.start);
        (lo..=hi).all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})*u^{}", self.start + k as i64))
            .collect();
        write!(f, "{} + O(u^{})", terms.join(" + "), self.truncation_order + 1)
    }
}
