//! Seeded random cocycles, points and tangents. Every trial draws from its
//! own ChaCha stream `(seed, trial)`, so trials are independent of each other
//! and of evaluation order.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    build_higgs_space, build_higgs_tangent_space, build_section_space, build_tangent_space, sample_affine_with,
    sample_coefficients, sample_higgs_affine_with, sample_with, small_gauss, Bounds,
};
use crate::curve::MarkedCurve;
use crate::error::Error;
use crate::field::{GaussRat, RatFunc};
use crate::hamiltonian::{HamiltonianRep, XVector};
use crate::lie::{CoadjointElement, LoopAlgebraElement, LoopGroupElement, MatrixLieAlgebra};
use crate::linalg::Matrix;
use crate::moduli::{
    make_higgs_point, make_higgs_tangent, make_y_point, make_y_tangent, Bundle, HiggsPoint, HiggsTangent, YPoint,
    YTangent,
};

/// Knobs of the random generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorParams {
    /// Number of elementary factors `e_jk(c u^m)` per cocycle.
    pub word_length: usize,
    /// Bound on `|m|` in the elementary factors.
    pub max_exponent: i64,
    /// Bound on the torus exponents.
    pub max_twist: i64,
    /// Highest pole order of the polar part added to `g_dot`.
    pub polar_order: i64,
    /// Randomly replace `T_i` by `-T_i`.
    pub flip_branches: bool,
    /// Cocycle redraws allowed before giving up on a nonzero section space.
    pub max_attempts: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            word_length: 2,
            max_exponent: 1,
            max_twist: 2,
            polar_order: 2,
            flip_branches: true,
            max_attempts: 20,
        }
    }
}

/// How a trial obtains its cocycles.
#[derive(Clone, Debug)]
pub enum BundleRecipe {
    Explicit(Vec<LoopGroupElement>),
    Random,
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `diag(u^a) * e_{j1 k1}(c1 u^m1) * ...` with `sum a = 0`.
pub fn random_cocycle<R: Rng>(n: usize, params: &GeneratorParams, rng: &mut R) -> Result<LoopGroupElement, Error> {
    let mut exps: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(-params.max_twist..=params.max_twist)).collect();
    exps.push(-exps.iter().sum::<i64>());
    let mut g = LoopGroupElement::torus(&exps)?;
    for _ in 0..params.word_length {
        let j = rng.gen_range(0..n);
        let k = (j + rng.gen_range(1..n)) % n;
        let m = rng.gen_range(-params.max_exponent..=params.max_exponent);
        let c = small_gauss(rng, 2);
        g = g.mul(&LoopGroupElement::elementary(n, j, k, RatFunc::monomial(c, m))?)?;
    }
    Ok(g)
}

/// Constant element of `SL_n(Q(i))` as a short product of elementary matrices.
pub fn random_constant_group<R: Rng>(n: usize, rng: &mut R) -> Result<LoopGroupElement, Error> {
    let mut g = LoopGroupElement::identity(n);
    for _ in 0..3 {
        let j = rng.gen_range(0..n);
        let k = (j + rng.gen_range(1..n)) % n;
        g = g.mul(&LoopGroupElement::elementary(n, j, k, RatFunc::constant(small_gauss(rng, 2)))?)?;
    }
    Ok(g)
}

/// Constant element of the Lie algebra.
pub fn random_lie_constant<R: Rng>(alg: &MatrixLieAlgebra, rng: &mut R) -> Matrix<GaussRat> {
    let coords: Vec<GaussRat> = (0..alg.dim()).map(|_| small_gauss(rng, 2)).collect();
    alg.combine(&coords)
}

/// `sum_{e=lo}^{hi} u^e X_e` with sparse random constant `X_e`.
pub fn random_loop_element<R: Rng>(alg: &MatrixLieAlgebra, lo: i64, hi: i64, rng: &mut R) -> LoopAlgebraElement {
    let n = alg.n();
    let mut acc = Matrix::<RatFunc>::zeros(n, n);
    for e in lo..=hi {
        if rng.gen_bool(0.4) {
            continue;
        }
        let x = random_lie_constant(alg, rng).map(|c| RatFunc::constant(c.clone()));
        acc = acc.try_add(&x.scale(&RatFunc::monomial(GaussRat::one(), e))).expect("same shape");
    }
    LoopAlgebraElement(acc)
}

fn polar_part<R: Rng>(alg: &MatrixLieAlgebra, params: &GeneratorParams, rng: &mut R) -> LoopAlgebraElement {
    if params.polar_order > 0 && rng.gen_bool(0.5) {
        random_loop_element(alg, -params.polar_order, -1, rng)
    } else {
        LoopAlgebraElement::zero(alg.n())
    }
}

/// Tangent with `g_dot_i = Ad(g_i^-1) xi + eta_i + pi_i` (`xi` constant, `eta_i`
/// regular, `pi_i` polar) and `s°_dot` solved for; the polar part is dropped
/// when no `s°_dot` within the bounds can absorb it.
pub fn random_y_tangent<R: Rng>(
    p: &YPoint,
    params: &GeneratorParams,
    bounds: Bounds,
    rng: &mut R,
) -> Result<YTangent, Error> {
    let bundle = p.bundle();
    let alg = bundle.rep().algebra();
    let xi = random_lie_constant(alg, rng).map(|c| RatFunc::constant(c.clone()));
    let mut regular = Vec::with_capacity(bundle.len());
    let mut polar = Vec::with_capacity(bundle.len());
    for g in bundle.cocycles() {
        let ad = LoopAlgebraElement(g.conjugate_inv(&xi)?);
        regular.push(ad.add(&random_loop_element(alg, 0, 2, rng))?);
        polar.push(polar_part(alg, params, rng));
    }
    let full: Vec<LoopAlgebraElement> =
        regular.iter().zip(&polar).map(|(a, b)| a.add(b)).collect::<Result<_, _>>()?;
    let (g_dot, space) = match build_tangent_space(p, &full, bounds) {
        Ok(space) => (full, space),
        Err(Error::Infeasible(_)) => {
            let space = build_tangent_space(p, &regular, bounds)?;
            (regular, space)
        }
        Err(e) => return Err(e),
    };
    let s_dot = sample_affine_with(&space, rng);
    make_y_tangent(p, g_dot, s_dot)
}

/// A random valid `(point, t1, t2)` with everything re-validated.
#[derive(Clone, Debug)]
pub struct Instance {
    pub point: YPoint,
    pub t1: YTangent,
    pub t2: YTangent,
    /// Cocycle draws used (1 when the first draw had sections).
    pub attempts: usize,
    pub section_dim: usize,
}

pub fn random_instance(
    curve: &MarkedCurve,
    rep: &HamiltonianRep,
    recipe: &BundleRecipe,
    params: &GeneratorParams,
    bounds: Bounds,
    seed: u64,
    trial: u64,
) -> Result<Instance, Error> {
    let mut rng = trial_rng(seed, trial);
    let n = rep.algebra().n();
    for attempt in 1..=params.max_attempts.max(1) {
        let cocycles = match recipe {
            BundleRecipe::Explicit(g) => g.clone(),
            BundleRecipe::Random => {
                (0..curve.len()).map(|_| random_cocycle(n, params, &mut rng)).collect::<Result<_, _>>()?
            }
        };
        let flips: Vec<bool> = (0..curve.len()).map(|_| params.flip_branches && rng.gen_bool(0.5)).collect();
        let bundle = Bundle::new(curve.with_branches(&flips), rep.clone(), cocycles)?;
        let space = build_section_space(&bundle, bounds)?;
        if space.basis.is_empty() {
            if matches!(recipe, BundleRecipe::Explicit(_)) {
                return Err(Error::EmptySpace);
            }
            continue;
        }
        let point = make_y_point(&bundle, sample_with(&space.basis, &mut rng)?)?;
        let t1 = random_y_tangent(&point, params, bounds, &mut rng)?;
        let t2 = random_y_tangent(&point, params, bounds, &mut rng)?;
        return Ok(Instance { point, t1, t2, attempts: attempt, section_dim: space.basis.len() });
    }
    Err(Error::EmptySpace)
}

fn random_higgs_tangent<R: Rng>(
    p: &HiggsPoint,
    params: &GeneratorParams,
    bounds: Bounds,
    rng: &mut R,
) -> Result<HiggsTangent, Error> {
    let bundle = p.bundle();
    let alg = bundle.rep().algebra();
    let regular: Vec<LoopAlgebraElement> = (0..bundle.len()).map(|_| random_loop_element(alg, 0, 2, rng)).collect();
    let full: Vec<LoopAlgebraElement> = regular
        .iter()
        .map(|r| r.add(&polar_part(alg, params, rng)))
        .collect::<Result<_, _>>()?;
    let (g_dot, space) = match build_higgs_tangent_space(p, &full, bounds) {
        Ok(space) => (full, space),
        Err(Error::Infeasible(_)) => {
            let space = build_higgs_tangent_space(p, &regular, bounds)?;
            (regular, space)
        }
        Err(e) => return Err(e),
    };
    let phi_dot = sample_higgs_affine_with(&space, rng)?;
    make_higgs_tangent(p, g_dot, phi_dot)
}

/// A random Higgs point on `bundle` with two random tangents.
pub fn random_higgs_instance(
    bundle: &Arc<Bundle>,
    params: &GeneratorParams,
    bounds: Bounds,
    seed: u64,
    trial: u64,
) -> Result<(HiggsPoint, HiggsTangent, HiggsTangent), Error> {
    let mut rng = trial_rng(seed, trial);
    let n = bundle.rep().algebra().n();
    let space = build_higgs_space(bundle, bounds)?;
    let phi = if space.is_empty() {
        CoadjointElement::zero(n)
    } else {
        let c = sample_coefficients(&mut rng, space.len())?;
        space.iter().zip(&c).try_fold(CoadjointElement::zero(n), |acc, (b, c)| {
            acc.add(&b.scale(&RatFunc::constant(c.clone())))
        })?
    };
    let p = make_higgs_point(bundle, phi)?;
    let t1 = random_higgs_tangent(&p, params, bounds, &mut rng)?;
    let t2 = random_higgs_tangent(&p, params, bounds, &mut rng)?;
    Ok((p, t1, t2))
}

/// Copy of `t` whose `s'_dot` at one marked point is pushed off the transition
/// relation by a nonzero regular vector. The result is built without validation.
pub fn corrupt_tangent<R: Rng>(t: &YTangent, rng: &mut R) -> (YTangent, usize) {
    let mut bad = t.clone();
    let i = rng.gen_range(0..bad.s_prime_dot.len());
    let dim = bad.s_prime_dot[i].dim();
    let mut delta: Vec<RatFunc> = (0..dim)
        .map(|_| {
            let c0 = small_gauss(rng, 2);
            let c1 = small_gauss(rng, 2);
            &RatFunc::constant(c0) + &RatFunc::monomial(c1, 1)
        })
        .collect();
    if delta.iter().all(Zero::is_zero) {
        delta[rng.gen_range(0..dim)] = RatFunc::one();
    }
    bad.s_prime_dot[i] = bad.s_prime_dot[i].add(&XVector(delta));
    (bad, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::pullback_omega;

    #[test]
    fn f1_instances_are_valid_and_reproducible() {
        let curve = MarkedCurve::default_fixture();
        let rep = HamiltonianRep::sl2_standard();
        let params = GeneratorParams::default();
        for trial in 0..5 {
            let a = random_instance(&curve, &rep, &BundleRecipe::Random, &params, Bounds::default(), 3, trial).unwrap();
            let b = random_instance(&curve, &rep, &BundleRecipe::Random, &params, Bounds::default(), 3, trial).unwrap();
            assert_eq!(a.point.s_circ(), b.point.s_circ());
            assert_eq!(a.t1, b.t1);
            a.t1.validate(&a.point).unwrap();
            a.t2.validate(&a.point).unwrap();
            assert!(pullback_omega(&a.point, &a.t1, &a.t2).unwrap().is_zero());
        }
    }

    #[test]
    fn corruption_breaks_validation() {
        let curve = MarkedCurve::default_fixture();
        let rep = HamiltonianRep::sl2_standard();
        let inst =
            random_instance(&curve, &rep, &BundleRecipe::Random, &GeneratorParams::default(), Bounds::default(), 9, 0)
                .unwrap();
        let (bad, _) = corrupt_tangent(&inst.t1, &mut trial_rng(9, 0));
        assert!(bad.validate(&inst.point).is_err());
    }
}
