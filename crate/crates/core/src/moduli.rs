//! Points and tangent vectors of the section stack `Y` and of `T*Bun_G` in
//! transition coordinates, the map between them, the residue formulas for the
//! Liouville form and the symplectic form, and the checkers built on them.
//!
//! Conventions (fixed once for the whole crate):
//!
//! * section transition `s'_i = T_i^-1 rho(g_i)^-1 s°`
//! * coadjoint transition `phi'_i = T_i^-2 g_i^-1 phi° g_i`
//! * tangents `s'_dot = T^-1 rho(g)^-1 s°_dot - rho(g_dot) s'` and
//!   `phi'_dot = T^-2 g^-1 phi°_dot g + [phi', g_dot]`
//!
//! Objects with a `°` live on the complement of the marked points and are
//! rational functions of `z`; primed objects live on the disk at the i-th
//! marked point and are rational functions of the local coordinate `u`.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::curve::{curve_validate, MarkedCurve};
use crate::error::Error;
use crate::field::{GaussRat, Jet2, RatFunc, Ring};
use crate::hamiltonian::{dmoment, moment, rep_validate, HamiltonianRep, XVector};
use crate::lie::{bracket, pairing, trace_product, CoadjointElement, LoopAlgebraElement, LoopGroupElement};
use crate::linalg::Matrix;
use crate::residue::{local_residue, residue_sum, OneForm};

/// A principal bundle given by its transition functions `g_i` at the marked
/// points, together with the curve and the representation it twists.
#[derive(Clone, Debug)]
pub struct Bundle {
    curve: MarkedCurve,
    rep: HamiltonianRep,
    g: Vec<LoopGroupElement>,
    /// `T_i^-1 rho(g_i)^-1`.
    section_transitions: Vec<Matrix<RatFunc>>,
    /// `T_i^-2`.
    canonical_transitions: Vec<RatFunc>,
}

impl Bundle {
    /// Validates the curve, the representation and the shapes of the cocycles.
    pub fn new(curve: MarkedCurve, rep: HamiltonianRep, g: Vec<LoopGroupElement>) -> Result<Arc<Self>, Error> {
        let report = curve_validate(&curve);
        if !report.is_valid() {
            return Err(Error::validation("curve", report.violations.join("; ")));
        }
        let rr = rep_validate(&rep);
        if !rr.is_valid() {
            return Err(Error::validation("representation", rr.violations.join("; ")));
        }
        if g.len() != curve.len() {
            return Err(Error::validation("bundle", format!("{} cocycles for {} marked points", g.len(), curve.len())));
        }
        let n = rep.algebra().n();
        if let Some(k) = g.iter().position(|gi| gi.n() != n) {
            return Err(Error::Shape(format!("cocycle {k} is not {n} x {n}")));
        }
        let mut section_transitions = Vec::with_capacity(g.len());
        let mut canonical_transitions = Vec::with_capacity(g.len());
        for (gi, t) in g.iter().zip(curve.transitions()) {
            let t_inv = t.inv()?;
            section_transitions.push(rep.group_action_inv(gi)?.scale(&t_inv));
            canonical_transitions.push(&t_inv * &t_inv);
        }
        Ok(Arc::new(Bundle { curve, rep, g, section_transitions, canonical_transitions }))
    }

    pub fn curve(&self) -> &MarkedCurve {
        &self.curve
    }

    pub fn rep(&self) -> &HamiltonianRep {
        &self.rep
    }

    pub fn cocycles(&self) -> &[LoopGroupElement] {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn section_transition(&self, i: usize) -> &Matrix<RatFunc> {
        &self.section_transitions[i]
    }

    /// `T_i^-2`.
    pub fn canonical_transition(&self, i: usize) -> &RatFunc {
        &self.canonical_transitions[i]
    }

    pub fn localize_vec(&self, i: usize, v: &XVector) -> XVector {
        let chart = self.curve.chart(i);
        XVector(v.0.iter().map(|x| chart.pull(x)).collect())
    }

    pub fn localize_mat(&self, i: usize, m: &Matrix<RatFunc>) -> Matrix<RatFunc> {
        let chart = self.curve.chart(i);
        m.map(|x| chart.pull(x))
    }

    /// `T_i^-1 rho(g_i)^-1 v°` in the local coordinate.
    pub fn transport_section(&self, i: usize, v: &XVector) -> Result<XVector, Error> {
        self.localize_vec(i, v).apply(&self.section_transitions[i])
    }

    /// `T_i^-2 g_i^-1 phi° g_i` in the local coordinate.
    pub fn transport_coadjoint(&self, i: usize, phi: &Matrix<RatFunc>) -> Result<Matrix<RatFunc>, Error> {
        Ok(self.g[i].conjugate_inv(&self.localize_mat(i, phi))?.scale(&self.canonical_transitions[i]))
    }

    /// The same bundle described in the trivializations changed by the constant `h`:
    /// `g_i -> h g_i h^-1`.
    pub fn gauge(&self, h: &LoopGroupElement) -> Result<Arc<Self>, Error> {
        let g = self.g.iter().map(|gi| h.mul(gi)?.mul(&h.inverse())).collect::<Result<_, _>>()?;
        Bundle::new(self.curve.clone(), self.rep.clone(), g)
    }

    /// Same cocycles over a curve with some square-root branches `T_i -> -T_i` flipped.
    pub fn with_branches(&self, flips: &[bool]) -> Result<Arc<Self>, Error> {
        Bundle::new(self.curve.with_branches(flips), self.rep.clone(), self.g.clone())
    }

    fn check_regular_off_marked(&self, what: &str, entries: &[RatFunc]) -> Result<(), Error> {
        for (k, f) in entries.iter().enumerate() {
            if !self.curve.is_regular_off_marked(f) {
                return Err(Error::RegularityViolation(format!(
                    "{what}[{k}] = {} has a pole off the marked points",
                    f.display_in("z")
                )));
            }
        }
        Ok(())
    }
}

fn pole_order_of(entries: &[RatFunc]) -> i64 {
    entries.iter().filter_map(RatFunc::valuation).map(|v| (-v).max(0)).max().unwrap_or(0)
}

fn check_regular_at(i: usize, entries: &[RatFunc]) -> Result<(), Error> {
    match pole_order_of(entries) {
        0 => Ok(()),
        order => Err(Error::IrregularSection { point: i, order }),
    }
}

/// A point `(g_i, s°, s'_i)` of `Y`.
#[derive(Clone, Debug)]
pub struct YPoint {
    bundle: Arc<Bundle>,
    s_circ: XVector,
    s_prime: Vec<XVector>,
}

/// Builds `s'_i` from `s°` and checks regularity on both sides.
pub fn make_y_point(bundle: &Arc<Bundle>, s_circ: XVector) -> Result<YPoint, Error> {
    if s_circ.dim() != bundle.rep.dim() {
        return Err(Error::Shape(format!("section of length {} in dimension {}", s_circ.dim(), bundle.rep.dim())));
    }
    bundle.check_regular_off_marked("s_circ", &s_circ.0)?;
    let s_prime = (0..bundle.len())
        .map(|i| {
            let sp = bundle.transport_section(i, &s_circ)?;
            check_regular_at(i, &sp.0)?;
            Ok(sp)
        })
        .collect::<Result<_, Error>>()?;
    Ok(YPoint { bundle: bundle.clone(), s_circ, s_prime })
}

impl YPoint {
    pub fn bundle(&self) -> &Arc<Bundle> {
        &self.bundle
    }

    pub fn s_circ(&self) -> &XVector {
        &self.s_circ
    }

    pub fn s_prime(&self) -> &[XVector] {
        &self.s_prime
    }

    pub fn rep(&self) -> &HamiltonianRep {
        &self.bundle.rep
    }

    /// Conjugate all data by a constant `h`.
    pub fn gauge(&self, h: &LoopGroupElement) -> Result<YPoint, Error> {
        let bundle = self.bundle.gauge(h)?;
        let s = self.s_circ.apply(&self.bundle.rep.group_action(h)?)?;
        make_y_point(&bundle, s)
    }
}

/// A tangent vector `(g_dot_i, s°_dot, s'_dot_i)` to `Y` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct YTangent {
    pub g_dot: Vec<LoopAlgebraElement>,
    pub s_circ_dot: XVector,
    pub s_prime_dot: Vec<XVector>,
}

fn derive_s_prime_dot(p: &YPoint, i: usize, g_dot: &LoopAlgebraElement, s_circ_dot: &XVector) -> Result<XVector, Error> {
    let transported = p.bundle.transport_section(i, s_circ_dot)?;
    let action = p.bundle.rep.rho(g_dot.mat())?;
    Ok(transported.sub(&p.s_prime[i].apply(&action)?))
}

/// Builds `s'_dot_i = T_i^-1 rho(g_i)^-1 s°_dot - rho(g_dot_i) s'_i` and checks regularity.
pub fn make_y_tangent(p: &YPoint, g_dot: Vec<LoopAlgebraElement>, s_circ_dot: XVector) -> Result<YTangent, Error> {
    let b = &p.bundle;
    if g_dot.len() != b.len() {
        return Err(Error::Shape(format!("{} g_dot entries for {} marked points", g_dot.len(), b.len())));
    }
    if s_circ_dot.dim() != b.rep.dim() {
        return Err(Error::Shape(format!("tangent of length {} in dimension {}", s_circ_dot.dim(), b.rep.dim())));
    }
    for gd in &g_dot {
        b.rep.algebra().coordinates(gd.mat())?;
    }
    b.check_regular_off_marked("s_circ_dot", &s_circ_dot.0)?;
    let s_prime_dot = (0..b.len())
        .map(|i| {
            let v = derive_s_prime_dot(p, i, &g_dot[i], &s_circ_dot)?;
            check_regular_at(i, &v.0)?;
            Ok(v)
        })
        .collect::<Result<_, Error>>()?;
    Ok(YTangent { g_dot, s_circ_dot, s_prime_dot })
}

impl YTangent {
    pub fn zero(p: &YPoint) -> YTangent {
        let n = p.bundle.rep.algebra().n();
        let d = p.bundle.rep.dim();
        YTangent {
            g_dot: vec![LoopAlgebraElement::zero(n); p.bundle.len()],
            s_circ_dot: XVector::zero(d),
            s_prime_dot: vec![XVector::zero(d); p.bundle.len()],
        }
    }

    /// Re-derive the primed data and compare; rejects tangents whose stored
    /// `s'_dot` is off the transition relation.
    pub fn validate(&self, p: &YPoint) -> Result<(), Error> {
        let fresh = make_y_tangent(p, self.g_dot.clone(), self.s_circ_dot.clone())?;
        for (i, (a, b)) in fresh.s_prime_dot.iter().zip(&self.s_prime_dot).enumerate() {
            if a != b {
                return Err(Error::validation(
                    format!("tangent.s_prime_dot[{i}]"),
                    format!("stored {b} but the transition relation gives {a}"),
                ));
            }
        }
        Ok(())
    }

    /// Linear combination `a*self + b*other` (re-derived at `p`).
    pub fn combine(&self, p: &YPoint, a: &GaussRat, other: &YTangent, b: &GaussRat) -> Result<YTangent, Error> {
        let (fa, fb) = (RatFunc::constant(a.clone()), RatFunc::constant(b.clone()));
        let g_dot = self
            .g_dot
            .iter()
            .zip(&other.g_dot)
            .map(|(x, y)| x.scale(&fa).add(&y.scale(&fb)))
            .collect::<Result<_, _>>()?;
        make_y_tangent(p, g_dot, self.s_circ_dot.scale(&fa).add(&other.s_circ_dot.scale(&fb)))
    }

    /// The tangent transported by a constant gauge transformation `h`.
    pub fn gauge(&self, p: &YPoint, h: &LoopGroupElement, gauged: &YPoint) -> Result<YTangent, Error> {
        let g_dot = self.g_dot.iter().map(|x| Ok(LoopAlgebraElement(h.conjugate(x.mat())?))).collect::<Result<_, Error>>()?;
        let s = self.s_circ_dot.apply(&p.bundle.rep.group_action(h)?)?;
        make_y_tangent(gauged, g_dot, s)
    }
}

/// A point `(g_i, phi°, phi'_i)` of `T*Bun_G`.
#[derive(Clone, Debug)]
pub struct HiggsPoint {
    bundle: Arc<Bundle>,
    phi_circ: CoadjointElement,
    phi_prime: Vec<CoadjointElement>,
}

/// Builds `phi'_i = T_i^-2 g_i^-1 phi° g_i` and checks regularity.
pub fn make_higgs_point(bundle: &Arc<Bundle>, phi_circ: CoadjointElement) -> Result<HiggsPoint, Error> {
    bundle.rep.algebra().coordinates(phi_circ.mat())?;
    bundle.check_regular_off_marked("phi_circ", phi_circ.mat().entries())?;
    let phi_prime = (0..bundle.len())
        .map(|i| {
            let m = bundle.transport_coadjoint(i, phi_circ.mat())?;
            check_regular_at(i, m.entries())?;
            Ok(CoadjointElement(m))
        })
        .collect::<Result<_, Error>>()?;
    Ok(HiggsPoint { bundle: bundle.clone(), phi_circ, phi_prime })
}

impl HiggsPoint {
    pub fn bundle(&self) -> &Arc<Bundle> {
        &self.bundle
    }

    pub fn phi_circ(&self) -> &CoadjointElement {
        &self.phi_circ
    }

    pub fn phi_prime(&self) -> &[CoadjointElement] {
        &self.phi_prime
    }

    /// Conjugate all data by a constant `h`.
    pub fn gauge(&self, h: &LoopGroupElement) -> Result<HiggsPoint, Error> {
        let bundle = self.bundle.gauge(h)?;
        make_higgs_point(&bundle, CoadjointElement(h.conjugate(self.phi_circ.mat())?))
    }
}

/// A tangent vector `(g_dot_i, phi°_dot, phi'_dot_i)` to `T*Bun_G`.
#[derive(Clone, Debug, PartialEq)]
pub struct HiggsTangent {
    pub g_dot: Vec<LoopAlgebraElement>,
    pub phi_circ_dot: CoadjointElement,
    pub phi_prime_dot: Vec<CoadjointElement>,
}

fn derive_phi_prime_dot(
    p: &HiggsPoint,
    i: usize,
    g_dot: &LoopAlgebraElement,
    phi_circ_dot: &CoadjointElement,
) -> Result<Matrix<RatFunc>, Error> {
    let transported = p.bundle.transport_coadjoint(i, phi_circ_dot.mat())?;
    transported.try_add(&p.phi_prime[i].mat().commutator(g_dot.mat())?)
}

/// Builds `phi'_dot_i = T_i^-2 g_i^-1 phi°_dot g_i + [phi'_i, g_dot_i]` and checks regularity.
pub fn make_higgs_tangent(
    p: &HiggsPoint,
    g_dot: Vec<LoopAlgebraElement>,
    phi_circ_dot: CoadjointElement,
) -> Result<HiggsTangent, Error> {
    let b = &p.bundle;
    if g_dot.len() != b.len() {
        return Err(Error::Shape(format!("{} g_dot entries for {} marked points", g_dot.len(), b.len())));
    }
    let alg = b.rep.algebra();
    for gd in &g_dot {
        alg.coordinates(gd.mat())?;
    }
    alg.coordinates(phi_circ_dot.mat())?;
    b.check_regular_off_marked("phi_circ_dot", phi_circ_dot.mat().entries())?;
    let phi_prime_dot = (0..b.len())
        .map(|i| {
            let m = derive_phi_prime_dot(p, i, &g_dot[i], &phi_circ_dot)?;
            check_regular_at(i, m.entries())?;
            Ok(CoadjointElement(m))
        })
        .collect::<Result<_, Error>>()?;
    Ok(HiggsTangent { g_dot, phi_circ_dot, phi_prime_dot })
}

impl HiggsTangent {
    pub fn zero(p: &HiggsPoint) -> HiggsTangent {
        let n = p.bundle.rep.algebra().n();
        HiggsTangent {
            g_dot: vec![LoopAlgebraElement::zero(n); p.bundle.len()],
            phi_circ_dot: CoadjointElement::zero(n),
            phi_prime_dot: vec![CoadjointElement::zero(n); p.bundle.len()],
        }
    }

    pub fn combine(&self, p: &HiggsPoint, a: &GaussRat, other: &HiggsTangent, b: &GaussRat) -> Result<HiggsTangent, Error> {
        let (fa, fb) = (RatFunc::constant(a.clone()), RatFunc::constant(b.clone()));
        let g_dot = self
            .g_dot
            .iter()
            .zip(&other.g_dot)
            .map(|(x, y)| x.scale(&fa).add(&y.scale(&fb)))
            .collect::<Result<_, _>>()?;
        make_higgs_tangent(p, g_dot, self.phi_circ_dot.scale(&fa).add(&other.phi_circ_dot.scale(&fb))?)
    }

    /// The tangent transported by a constant gauge transformation `h`.
    pub fn gauge(&self, h: &LoopGroupElement, gauged: &HiggsPoint) -> Result<HiggsTangent, Error> {
        let g_dot = self.g_dot.iter().map(|x| Ok(LoopAlgebraElement(h.conjugate(x.mat())?))).collect::<Result<_, Error>>()?;
        make_higgs_tangent(gauged, g_dot, CoadjointElement(h.conjugate(self.phi_circ_dot.mat())?))
    }
}

/// The moment-map image `(g_i, mu(s°), mu(s'_i))`, re-verified against the
/// coadjoint transition.
pub fn higgs_from_y(p: &YPoint) -> Result<HiggsPoint, Error> {
    let rep = &p.bundle.rep;
    let phi_circ = moment(rep, &p.s_circ)?;
    let phi_prime: Vec<CoadjointElement> = p.s_prime.iter().map(|s| moment(rep, s)).collect::<Result<_, _>>()?;
    let expected = make_higgs_point(&p.bundle, phi_circ)?;
    for (i, (a, b)) in phi_prime.iter().zip(&expected.phi_prime).enumerate() {
        if a != b {
            return Err(Error::EquivarianceBroken(format!("mu(s'_{i}) differs from the coadjoint transport of mu(s°)")));
        }
    }
    Ok(expected)
}

/// `(g_dot_i, dmu(s°, s°_dot), dmu(s'_i, s'_dot_i))` taken verbatim from the
/// stored components, without checking the Higgs tangent relation.
pub fn raw_pushforward(p: &YPoint, t: &YTangent) -> Result<HiggsTangent, Error> {
    let rep = &p.bundle.rep;
    Ok(HiggsTangent {
        g_dot: t.g_dot.clone(),
        phi_circ_dot: dmoment(rep, &p.s_circ, &t.s_circ_dot)?,
        phi_prime_dot: p
            .s_prime
            .iter()
            .zip(&t.s_prime_dot)
            .map(|(s, v)| dmoment(rep, s, v))
            .collect::<Result<_, _>>()?,
    })
}

/// Pushforward `(g_dot_i, dmu(s°_dot), dmu(s'_dot_i))`, re-verified against the
/// Higgs tangent relation.
pub fn pushforward_tangent(p: &YPoint, t: &YTangent) -> Result<HiggsTangent, Error> {
    let raw = raw_pushforward(p, t)?;
    let hp = higgs_from_y(p)?;
    let expected = make_higgs_tangent(&hp, raw.g_dot.clone(), raw.phi_circ_dot.clone())?;
    for (i, (a, b)) in raw.phi_prime_dot.iter().zip(&expected.phi_prime_dot).enumerate() {
        if a != b {
            return Err(Error::EquivarianceBroken(format!("dmu(s'_dot_{i}) differs from the Higgs tangent relation")));
        }
    }
    Ok(expected)
}

/// `Lambda(t) = sum_i Res_{u_i=0} <phi'_i, g_dot_i> du_i`.
pub fn liouville_lambda(p: &HiggsPoint, t: &HiggsTangent) -> Result<GaussRat, Error> {
    p.phi_prime
        .iter()
        .zip(&t.g_dot)
        .map(|(phi, gd)| Ok(local_residue(&pairing(phi, gd)?)))
        .sum()
}

/// Local integrand of `Omega` at the i-th point (coefficient of `du_i`).
pub fn omega_integrand(p: &HiggsPoint, t1: &HiggsTangent, t2: &HiggsTangent, i: usize) -> Result<RatFunc, Error> {
    let a = pairing(&t1.phi_prime_dot[i], &t2.g_dot[i])?;
    let b = pairing(&t2.phi_prime_dot[i], &t1.g_dot[i])?;
    let c = pairing(&p.phi_prime[i], &bracket(&t1.g_dot[i], &t2.g_dot[i])?)?;
    Ok(&(&a - &b) - &c)
}

/// `Omega(t1, t2) = sum_i Res (<phi'_dot_1, g_dot_2> - <phi'_dot_2, g_dot_1> - <phi', [g_dot_1, g_dot_2]>)`.
pub fn symplectic_omega(p: &HiggsPoint, t1: &HiggsTangent, t2: &HiggsTangent) -> Result<GaussRat, Error> {
    (0..p.bundle.len()).map(|i| Ok(local_residue(&omega_integrand(p, t1, t2, i)?))).sum()
}

/// The pulled-back form `Omega(mu_*(t1), mu_*(t2))` on `Y`.
pub fn pullback_omega(p: &YPoint, t1: &YTangent, t2: &YTangent) -> Result<GaussRat, Error> {
    let hp = higgs_from_y(p)?;
    symplectic_omega(&hp, &pushforward_tangent(p, t1)?, &pushforward_tangent(p, t2)?)
}

/// Residuals at one marked point; every field is zero on valid input.
#[derive(Clone, Debug, Serialize)]
pub struct PointIdentity {
    pub point: String,
    /// `omega(s'_dot_1, s'_dot_2) - omega(s°_dot_1, s°_dot_2) h_i - RHS`, with `alpha = h_i du`.
    pub residual: String,
    /// `omega(rho(g)^-1 a, rho(g)^-1 b) - omega(a, b)` on the localized `s°_dot`.
    pub invariance_residual: String,
    /// `h_i - T_i^-2`.
    pub alpha_residual: String,
    /// `T^-2 omega(rho(g)^-1 s°_dot_1, rho(g)^-1 s°_dot_2) - omega(s'_dot_1 + rho(g_dot_1) s', s'_dot_2 + rho(g_dot_2) s')`.
    pub transition_residual: String,
    /// `omega(rho(g_dot_1) s', rho(g_dot_2) s') - <mu(s'), [g_dot_1, g_dot_2]>`.
    pub moment_residual: String,
    /// The Omega integrand from the pushforward minus RHS.
    pub integrand_residual: String,
    /// `Res omega(s'_dot_1, s'_dot_2) du`, zero because the form is regular on the disk.
    pub regular_residue: String,
    pub regular_on_disk: bool,
    /// `Res omega(s°_dot_1, s°_dot_2) alpha` at this point.
    pub alpha_residue: String,
    pub holds: bool,
}

/// Step-by-step residuals of the isotropy argument.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub points: Vec<PointIdentity>,
    /// Sum over marked points of the `alpha` residues.
    pub alpha_residue_sum: String,
    /// Residue theorem applied to the global form `omega(s°_dot_1, s°_dot_2) alpha`.
    pub global_residue_sum: String,
    /// `sum_i Res(LHS_i)`, which must agree with the pullback of Omega.
    pub lhs_residue_total: String,
    pub pullback_omega: String,
    pub holds: bool,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.holds
    }
}

/// Checks, at each marked point, the identity
/// `omega(s'_dot_1, s'_dot_2) du - omega(s°_dot_1, s°_dot_2) alpha
///   = -omega(s'_dot_1, rho(g_dot_2) s') + omega(s'_dot_2, rho(g_dot_1) s') - <mu(s'), [g_dot_1, g_dot_2]>`
/// together with the intermediate steps and the two residue facts that turn it
/// into the vanishing of the pullback. The stored `s'_dot` are used as given,
/// so a tangent that violates its transition relation shows up as a nonzero
/// residual rather than an error.
pub fn identity_check(p: &YPoint, t1: &YTangent, t2: &YTangent) -> Result<IdentityReport, Error> {
    let b = &p.bundle;
    let rep = &b.rep;
    let space = rep.space();
    let w = |x: &XVector, y: &XVector| space.form(&x.0, &y.0);
    let hp = higgs_from_y(p)?;
    let h1 = raw_pushforward(p, t1)?;
    let h2 = raw_pushforward(p, t2)?;
    let mut points = Vec::new();
    let mut holds = true;
    let mut alpha_sum = GaussRat::zero();
    let mut lhs_total = GaussRat::zero();
    for i in 0..b.len() {
        let sp = &p.s_prime[i];
        let (d1, d2) = (&t1.s_prime_dot[i], &t2.s_prime_dot[i]);
        let (c1, c2) = (b.localize_vec(i, &t1.s_circ_dot), b.localize_vec(i, &t2.s_circ_dot));
        let h_alpha = b.curve.alpha_local(i);
        let rg1 = sp.apply(&rep.rho(t1.g_dot[i].mat())?)?;
        let rg2 = sp.apply(&rep.rho(t2.g_dot[i].mat())?)?;
        let mu = moment(rep, sp)?;
        let br = bracket(&t1.g_dot[i], &t2.g_dot[i])?;
        let mu_br = pairing(&mu, &br)?;

        let circ_form = w(&c1, &c2);
        let lhs = &w(d1, d2) - &(&circ_form * &h_alpha);
        let rhs = &(&(-w(d1, &rg2)) + &w(d2, &rg1)) - &mu_br;
        let residual = &lhs - &rhs;

        let ginv = rep.group_action_inv(&b.g[i])?;
        let (gc1, gc2) = (c1.apply(&ginv)?, c2.apply(&ginv)?);
        let invariance = &w(&gc1, &gc2) - &circ_form;
        let alpha_res = &h_alpha - b.canonical_transition(i);
        let transition = &(&w(&gc1, &gc2) * b.canonical_transition(i)) - &w(&d1.add(&rg1), &d2.add(&rg2));
        let moment_res = &w(&rg1, &rg2) - &mu_br;
        let integrand = &omega_integrand(&hp, &h1, &h2, i)? - &rhs;

        let regular = w(d1, d2);
        let regular_residue = local_residue(&regular);
        let alpha_residue = local_residue(&(&circ_form * &h_alpha));
        alpha_sum += &alpha_residue;
        lhs_total += &local_residue(&lhs);

        let zero = [&residual, &invariance, &alpha_res, &transition, &moment_res, &integrand].iter().all(|r| r.is_zero())
            && regular.is_regular_at_zero()
            && regular_residue.is_zero();
        holds &= zero;
        points.push(PointIdentity {
            point: b.curve.points()[i].to_string(),
            residual: residual.display_in("u"),
            invariance_residual: invariance.display_in("u"),
            alpha_residual: alpha_res.display_in("u"),
            transition_residual: transition.display_in("u"),
            moment_residual: moment_res.display_in("u"),
            integrand_residual: integrand.display_in("u"),
            regular_residue: regular_residue.to_string(),
            regular_on_disk: regular.is_regular_at_zero(),
            alpha_residue: alpha_residue.to_string(),
            holds: zero,
        });
    }
    let global_form = OneForm::new(&w(&t1.s_circ_dot, &t2.s_circ_dot) * &b.curve.alpha().coeff);
    let global = residue_sum(&global_form)?;
    let pb = symplectic_omega(&hp, &h1, &h2)?;
    holds &= alpha_sum.is_zero() && global.is_zero() && pb.is_zero() && lhs_total == pb;
    Ok(IdentityReport {
        points,
        alpha_residue_sum: alpha_sum.to_string(),
        global_residue_sum: global.to_string(),
        lhs_residue_total: lhs_total.to_string(),
        pullback_omega: pb.to_string(),
        holds,
    })
}

/// The three terms of `dLambda(X, Y) = X(Lambda(Y)) - Y(Lambda(X)) - Lambda([X, Y])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanReport {
    /// `X(Lambda(Y))`: derivative of `Lambda(g_dot_2)` along the first deformation.
    pub term1: String,
    /// `Y(Lambda(X))`.
    pub term2: String,
    /// `Lambda([X, Y])`.
    pub term3: String,
    /// `term1 - term2 - term3`.
    pub alternating_sum: String,
    pub omega: String,
    pub holds: bool,
}

/// Recomputes Omega from Lambda with jets: the point is deformed to
/// `g(1 + e1 g_dot_1)(1 + e2 g_dot_2)`, `phi° + e1 phi°_dot_1 + e2 phi°_dot_2`,
/// the primed Higgs field is transported in jet arithmetic, and the bracket of
/// the two flows is read off the mixed term of their commutator.
pub fn cartan_check(p: &HiggsPoint, t1: &HiggsTangent, t2: &HiggsTangent) -> Result<CartanReport, Error> {
    type J = Jet2<RatFunc>;
    let b = &p.bundle;
    let n = b.rep.algebra().n();
    let mut term1 = GaussRat::zero();
    let mut term2 = GaussRat::zero();
    let mut term3 = GaussRat::zero();
    for i in 0..b.len() {
        let lift = |m: &Matrix<RatFunc>, slot: u8| -> Matrix<J> {
            m.map(|x| match slot {
                0 => J::constant(x.clone()),
                1 => J::new(RatFunc::zero(), x.clone(), RatFunc::zero(), RatFunc::zero()),
                _ => J::new(RatFunc::zero(), RatFunc::zero(), x.clone(), RatFunc::zero()),
            })
        };
        let one = Matrix::<J>::identity(n);
        let flow1 = one.try_add(&lift(t1.g_dot[i].mat(), 1))?;
        let flow2 = one.try_add(&lift(t2.g_dot[i].mat(), 2))?;
        let g = lift(b.g[i].mat(), 0).try_mul(&flow1)?.try_mul(&flow2)?;
        let g_inv = g.inverse_via_adjugate()?;
        let phi_circ = lift(&b.localize_mat(i, p.phi_circ.mat()), 0)
            .try_add(&lift(&b.localize_mat(i, t1.phi_circ_dot.mat()), 1))?
            .try_add(&lift(&b.localize_mat(i, t2.phi_circ_dot.mat()), 2))?;
        let t2inv = J::constant(b.canonical_transition(i).clone());
        let phi_prime = g_inv.try_mul(&phi_circ)?.try_mul(&g)?.scale(&t2inv);

        let value = phi_prime.map(|x| x.v.clone());
        if value != *p.phi_prime[i].mat() {
            return Err(Error::EquivarianceBroken(format!("jet transport disagrees with phi'_{i}")));
        }
        let d1 = phi_prime.map(|x| x.d1.clone());
        let d2 = phi_prime.map(|x| x.d2.clone());
        let flows_commutator = flow1.commutator(&flow2)?.map(|x| x.d12.clone());

        term1 += &local_residue(&trace_product(&d1, t2.g_dot[i].mat())?);
        term2 += &local_residue(&trace_product(&d2, t1.g_dot[i].mat())?);
        term3 += &local_residue(&trace_product(&value, &flows_commutator)?);
    }
    let alt = &(&term1 - &term2) - &term3;
    let omega = symplectic_omega(p, t1, t2)?;
    Ok(CartanReport {
        term1: term1.to_string(),
        term2: term2.to_string(),
        term3: term3.to_string(),
        alternating_sum: alt.to_string(),
        omega: omega.to_string(),
        holds: alt == omega,
    })
}

/// Constant element helper for `h` in gauge checks.
pub fn constant_group_element(rows: Vec<Vec<GaussRat>>) -> Result<LoopGroupElement, Error> {
    let m = Matrix::from_rows(rows)?.map(RatFunc::from_gauss);
    LoopGroupElement::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_ratfunc;
    use crate::lie::MatrixLieAlgebra;

    fn u(s: &str) -> RatFunc {
        parse_ratfunc(s, "u").unwrap()
    }

    fn gen(l: &str) -> LoopAlgebraElement {
        MatrixLieAlgebra::sl(2).generator(l).unwrap()
    }

    fn half() -> RatFunc {
        RatFunc::constant(GaussRat::ratio(1, 2))
    }

    fn f1_bundle(g: LoopGroupElement) -> Arc<Bundle> {
        Bundle::new(MarkedCurve::default_fixture(), HamiltonianRep::sl2_standard(), vec![g]).unwrap()
    }

    fn twisted() -> Arc<Bundle> {
        f1_bundle(LoopGroupElement::torus(&[-1, 1]).unwrap())
    }

    fn f1_point() -> YPoint {
        make_y_point(&twisted(), XVector::constant(&[1, 0])).unwrap()
    }

    #[test]
    fn y_point_transition() {
        // s'(u) = u^-1 diag(u, u^-1) (1, 0) = (1, 0)
        let p = f1_point();
        assert_eq!(p.s_prime()[0], XVector::constant(&[1, 0]));
        let err = make_y_point(&f1_bundle(LoopGroupElement::identity(2)), XVector::constant(&[1, 0])).unwrap_err();
        assert_eq!(err, Error::IrregularSection { point: 0, order: 1 });
        let zero = make_y_point(&twisted(), XVector::zero(2)).unwrap();
        assert!(zero.s_prime()[0].is_zero());
    }

    #[test]
    fn y_point_rejects_poles_off_marked() {
        let s = XVector(vec![parse_ratfunc("1/(z-1)", "z").unwrap(), RatFunc::zero()]);
        assert!(matches!(make_y_point(&twisted(), s), Err(Error::RegularityViolation(_))));
    }

    #[test]
    fn y_tangents() {
        let p = f1_point();
        let t = make_y_tangent(&p, vec![gen("F")], XVector::zero(2)).unwrap();
        assert_eq!(t.s_prime_dot[0], XVector::constant(&[0, -1]));
        let t = make_y_tangent(&p, vec![LoopAlgebraElement::zero(2)], XVector::constant(&[1, 0])).unwrap();
        assert_eq!(t.s_prime_dot[0], XVector::constant(&[1, 0]));
        let t = make_y_tangent(&p, vec![LoopAlgebraElement::zero(2)], XVector::zero(2)).unwrap();
        assert_eq!(t, YTangent::zero(&p));
    }

    #[test]
    fn higgs_image_of_f1() {
        let hp = higgs_from_y(&f1_point()).unwrap();
        let e_half = gen("E").0.scale(&-half());
        assert_eq!(hp.phi_circ().mat(), &e_half);
        assert_eq!(hp.phi_prime()[0].mat(), &e_half);
        let c = RatFunc::from_int(3);
        let scaled = make_y_point(&twisted(), XVector(vec![c.clone(), RatFunc::zero()])).unwrap();
        assert_eq!(higgs_from_y(&scaled).unwrap().phi_circ().mat(), &gen("E").0.scale(&RatFunc::constant(GaussRat::ratio(-9, 2))));
        let zero = make_y_point(&twisted(), XVector::zero(2)).unwrap();
        assert!(higgs_from_y(&zero).unwrap().phi_circ().is_zero());
    }

    #[test]
    fn pushforward_examples() {
        let p = f1_point();
        let t = make_y_tangent(&p, vec![gen("F")], XVector::zero(2)).unwrap();
        let h = pushforward_tangent(&p, &t).unwrap();
        assert!(h.phi_circ_dot.is_zero());
        // dmu((1,0), (0,-1)) pairs to (0, -1, 0) with (E, H, F): -1/2 H
        assert_eq!(h.phi_prime_dot[0].mat(), &gen("H").0.scale(&-half()));
        let z = pushforward_tangent(&p, &YTangent::zero(&p)).unwrap();
        assert!(z.phi_prime_dot[0].is_zero() && z.phi_circ_dot.is_zero());
    }

    #[test]
    fn lambda_fixture() {
        let hp = higgs_from_y(&f1_point()).unwrap();
        // Res(-1/2 tr(E F) u^-1) = -1/2
        let t = make_higgs_tangent(&hp, vec![gen("F").scale(&u("1/u"))], CoadjointElement::zero(2));
        // u^-1 F creates a pole in [phi', g_dot]; Lambda does not need a valid tangent
        let t = t.unwrap_or(HiggsTangent {
            g_dot: vec![gen("F").scale(&u("1/u"))],
            phi_circ_dot: CoadjointElement::zero(2),
            phi_prime_dot: vec![CoadjointElement::zero(2)],
        });
        assert_eq!(liouville_lambda(&hp, &t).unwrap(), GaussRat::ratio(-1, 2));
        assert!(liouville_lambda(&hp, &HiggsTangent::zero(&hp)).unwrap().is_zero());
    }

    #[test]
    fn omega_fixture_and_cartan_terms() {
        let hp = make_higgs_point(&twisted(), CoadjointElement::zero(2)).unwrap();
        let t1 = make_higgs_tangent(&hp, vec![gen("F").scale(&u("1/u"))], CoadjointElement::zero(2)).unwrap();
        let t2 = make_higgs_tangent(&hp, vec![LoopAlgebraElement::zero(2)], CoadjointElement(gen("E").0)).unwrap();
        // phi'_dot_2 = u^-2 diag(u, u^-1) E diag(u^-1, u) = E
        assert_eq!(t2.phi_prime_dot[0].mat(), &gen("E").0);
        assert_eq!(symplectic_omega(&hp, &t1, &t2).unwrap(), GaussRat::from_int(-1));
        assert!(symplectic_omega(&hp, &t1, &t1).unwrap().is_zero());
        let c = cartan_check(&hp, &t1, &t2).unwrap();
        assert_eq!((c.term1.as_str(), c.term2.as_str(), c.term3.as_str()), ("0", "1", "0"));
        assert_eq!(c.alternating_sum, "-1");
        assert!(c.holds);
    }

    #[test]
    fn pullback_vanishes_on_f1() {
        let p = f1_point();
        let t1 = make_y_tangent(&p, vec![gen("F")], XVector::zero(2)).unwrap();
        let t2 = make_y_tangent(&p, vec![LoopAlgebraElement::zero(2)], XVector::constant(&[1, 0])).unwrap();
        assert!(pullback_omega(&p, &t1, &t2).unwrap().is_zero());
        assert!(pullback_omega(&p, &t1, &t1).unwrap().is_zero());
        let report = identity_check(&p, &t1, &t2).unwrap();
        assert!(report.holds(), "{report:#?}");
        let zero = identity_check(&p, &YTangent::zero(&p), &YTangent::zero(&p)).unwrap();
        assert!(zero.holds());
    }

    #[test]
    fn corrupted_tangent_is_caught() {
        let p = f1_point();
        let t1 = make_y_tangent(&p, vec![gen("F")], XVector::zero(2)).unwrap();
        let t2 = make_y_tangent(&p, vec![LoopAlgebraElement::zero(2)], XVector::constant(&[1, 0])).unwrap();
        let mut bad = t1.clone();
        bad.s_prime_dot[0] = bad.s_prime_dot[0].add(&XVector::constant(&[0, 1]));
        assert!(bad.validate(&p).is_err());
        assert!(t1.validate(&p).is_ok());
        let report = identity_check(&p, &bad, &t2).unwrap();
        assert!(!report.holds());
        assert_ne!(report.points[0].residual, "0");
    }
}
