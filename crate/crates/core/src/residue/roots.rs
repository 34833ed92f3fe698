//! Roots of polynomials that split over `Q(i)`.
//!
//! Candidates come from a floating-point Aberth iteration; every reported root
//! is then confirmed by exact evaluation, so floating point never reaches a
//! result. A factor whose roots cannot be confirmed is reported as unsupported.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::field::{GaussRat, Poly};

/// Distinct roots of `p` in `Q(i)`, failing unless `p` splits into linear factors.
pub fn split_roots(p: &Poly) -> Result<Vec<GaussRat>, Error> {
    let mut q = p.squarefree_part();
    let mut roots = Vec::new();
    if q.degree().unwrap_or(0) == 0 {
        return Ok(roots);
    }
    if q.coeff(0).is_zero() {
        roots.push(GaussRat::zero());
        q = q.div_exact(&Poly::x())?;
    }
    if q.degree() == Some(1) {
        roots.push(-q.coeff(0));
        return Ok(roots);
    }
    if q.degree().unwrap_or(0) == 0 {
        return Ok(roots);
    }
    // every root r of q has L*r in Z[i] when L clears all coefficient denominators of monic q
    let scale = q.coeffs().iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denominator_lcm()));
    let scale = GaussRat::from(BigRational::from_integer(scale));
    for approx in aberth(&q) {
        if q.degree().unwrap_or(0) == 0 {
            break;
        }
        let target = Complex64::new(approx.re * scale.re().to_f64().unwrap_or(f64::NAN), approx.im * scale.re().to_f64().unwrap_or(f64::NAN));
        if let Some(r) = confirm(&q, &target, &scale) {
            q = q.div_exact(&Poly::linear_root(&r))?;
            roots.push(r);
        }
    }
    if q.degree().unwrap_or(0) > 0 {
        return Err(Error::UnsupportedDenominator(p.display_in("z")));
    }
    Ok(roots)
}

fn confirm(q: &Poly, target: &Complex64, scale: &GaussRat) -> Option<GaussRat> {
    if !target.re.is_finite() || !target.im.is_finite() || target.norm() > 1e15 {
        return None;
    }
    let (re0, im0) = (target.re.round() as i64, target.im.round() as i64);
    for dr in [0, -1, 1] {
        for di in [0, -1, 1] {
            let w = GaussRat::complex(
                BigRational::from_integer((re0 + dr).into()),
                BigRational::from_integer((im0 + di).into()),
            );
            let r = &w / scale;
            if q.eval(&r).is_zero() {
                return Some(r);
            }
        }
    }
    None
}

fn to_c64(c: &GaussRat) -> Complex64 {
    Complex64::new(c.re().to_f64().unwrap_or(f64::NAN), c.im().to_f64().unwrap_or(f64::NAN))
}

/// Simultaneous approximation of all roots of a squarefree polynomial.
fn aberth(q: &Poly) -> Vec<Complex64> {
    let coeffs: Vec<Complex64> = q.coeffs().iter().map(to_c64).collect();
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let bound = 1.0 + coeffs[..n].iter().map(|c| (c / lead).norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * bound, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for c in coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| Complex64::one() / (z[k] - z[j])).sum();
            let w = ratio / (Complex64::one() - ratio * repulsion);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(rs: &[GaussRat]) -> Poly {
        rs.iter().fold(Poly::one(), |acc, r| &acc * &Poly::linear_root(r))
    }

    #[test]
    fn finds_gaussian_rational_roots() {
        let rs: Vec<GaussRat> =
            ["1/2", "-3+i", "2/3*i", "0", "5/7-1/3*i"].iter().map(|s| s.parse().unwrap()).collect();
        // repeated root must not confuse the search
        let p = &from_roots(&rs) * &Poly::linear_root(&rs[1]);
        let mut found = split_roots(&p.scale(&GaussRat::from_int(6))).unwrap();
        assert_eq!(found.len(), rs.len());
        for r in &rs {
            let k = found.iter().position(|f| f == r).expect("root found");
            found.remove(k);
        }
    }

    #[test]
    fn rejects_irreducible_quadratic() {
        // z^2 - 2 has no roots in Q(i)
        let p = Poly::new(vec![GaussRat::from_int(-2), GaussRat::zero(), GaussRat::one()]);
        assert!(matches!(split_roots(&p), Err(Error::UnsupportedDenominator(_))));
    }

    #[test]
    fn z_squared_plus_one_splits() {
        let p = Poly::new(vec![GaussRat::one(), GaussRat::zero(), GaussRat::one()]);
        let r = split_roots(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.contains(&GaussRat::i()) && r.contains(&-GaussRat::i()));
    }
}
