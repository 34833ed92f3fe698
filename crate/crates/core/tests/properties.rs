use num_traits::{One, Zero};
use proptest::prelude::*;

use isotropy::curve::MarkedCurve;
use isotropy::field::{GaussRat, Jet2, LaurentSeries, Poly, RatFunc};
use isotropy::hamiltonian::{dmoment, moment, moment_generic, HamiltonianRep, XVector};
use isotropy::lie::{bracket, pairing, CoadjointElement, LoopAlgebraElement, MatrixLieAlgebra};
use isotropy::moduli::{
    higgs_from_y, liouville_lambda, pullback_omega, pushforward_tangent, symplectic_omega, Bundle,
};
use isotropy::residue::{local_residue, residue, residue_sum, residues, OneForm, P1Point};
use isotropy::scenario::Scenario;
use isotropy::solver::random::{random_constant_group, random_higgs_instance, random_instance, trial_rng};
use isotropy::solver::Bounds;

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-6i64..=6, -6i64..=6, 1i64..=4).prop_map(|(a, b, q)| GaussRat::ratio(a, q) + GaussRat::ratio(b, q) * GaussRat::i())
}

fn nonzero_gauss() -> impl Strategy<Value = GaussRat> {
    gauss().prop_filter("nonzero", |c| !c.is_zero())
}

fn poly(max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(gauss(), 0..=max_len).prop_map(Poly::new)
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(4), poly(3).prop_filter("nonzero", |p| !p.is_zero()), 0usize..3)
        .prop_map(|(n, d, k)| RatFunc::new(n, d.shift_up(k)).unwrap())
}

fn small_root() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -3i64..=3, 1i64..=2).prop_map(|(a, b, q)| GaussRat::ratio(a, q) + GaussRat::ratio(b, q) * GaussRat::i())
}

/// A form with denominator split over `Q(i)`: `num / prod (z - a_k)^m_k`.
fn split_form() -> impl Strategy<Value = OneForm> {
    (poly(5), prop::collection::vec((small_root(), 1u32..=3), 1..=3)).prop_map(|(num, roots)| {
        let den = roots.iter().fold(Poly::constant(GaussRat::one()), |acc, (a, m)| acc * Poly::linear_root(a).pow(*m));
        OneForm::new(RatFunc::new(num, den).unwrap())
    })
}

fn sl(n: usize) -> impl Strategy<Value = LoopAlgebraElement> {
    let alg = MatrixLieAlgebra::sl(n);
    prop::collection::vec(gauss(), alg.dim()).prop_map(move |c| {
        LoopAlgebraElement(alg.combine(&c).map(|x| RatFunc::constant(x.clone())))
    })
}

fn horner_jet(p: &Poly, x: &Jet2<GaussRat>) -> Jet2<GaussRat> {
    p.coeffs().iter().rev().fold(Jet2::zero(), |acc, c| acc * x.clone() + Jet2::constant(c.clone()))
}

proptest! {
    #[test]
    fn gauss_field_axioms(a in gauss(), b in gauss(), c in gauss()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), GaussRat::one());
        }
    }

    #[test]
    fn ratfunc_field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), RatFunc::one());
        }
    }

    #[test]
    fn normalization_is_idempotent(a in ratfunc()) {
        let again = RatFunc::new(a.num().clone(), a.den().clone()).unwrap();
        prop_assert_eq!(&again, &a);
        prop_assert!(a.den().leading().is_none_or(|l| l.is_one()));
    }

    #[test]
    fn laurent_expansion_is_multiplicative(f in ratfunc(), g in ratfunc()) {
        let n = 6;
        let prod = LaurentSeries::expand(&(&f * &g), n);
        let split = LaurentSeries::expand(&f, n).mul(&LaurentSeries::expand(&g, n));
        prop_assert!(prod.agrees_with(&split));
    }

    #[test]
    fn jets_differentiate_exactly(num in poly(4), den in poly(3), x in gauss()) {
        prop_assume!(!den.eval(&x).is_zero());
        let f = RatFunc::new(num.clone(), den.clone()).unwrap();
        let t = Jet2::tangent(x.clone(), GaussRat::one(), GaussRat::zero());
        let value = horner_jet(&num, &t) * horner_jet(&den, &t).inv().unwrap();
        prop_assert_eq!(&value.v, &f.eval(&x).unwrap());
        prop_assert_eq!(&value.d1, &f.derivative().eval(&x).unwrap());
        prop_assert!(value.d2.is_zero() && value.d12.is_zero());
    }

    #[test]
    fn residue_theorem(form in split_form()) {
        prop_assert_eq!(residue_sum(&form).unwrap(), GaussRat::zero());
    }

    #[test]
    fn residues_are_additive(f in split_form(), g in split_form(), a in small_root()) {
        let sum = OneForm::new(&f.coeff + &g.coeff);
        for p in [P1Point::Finite(a), P1Point::Infinity] {
            prop_assert_eq!(residue(&sum, &p), &residue(&f, &p) + &residue(&g, &p));
        }
    }

    #[test]
    fn exact_forms_have_no_residues(f in split_form()) {
        let exact = OneForm::new(f.coeff.derivative());
        for (_, r) in residues(&exact).unwrap() {
            prop_assert!(r.is_zero());
        }
    }

    #[test]
    fn jacobi_identity(x in sl(3), y in sl(3), z in sl(3)) {
        let a = bracket(&x, &bracket(&y, &z).unwrap()).unwrap();
        let b = bracket(&y, &bracket(&z, &x).unwrap()).unwrap();
        let c = bracket(&z, &bracket(&x, &y).unwrap()).unwrap();
        prop_assert!(a.add(&b).unwrap().add(&c).unwrap().is_zero());
    }

    #[test]
    fn pairing_is_invariant(x in sl(3), y in sl(3), z in sl(3)) {
        let lhs = pairing(&CoadjointElement(bracket(&x, &y).unwrap().0), &z).unwrap();
        let rhs = pairing(&CoadjointElement(x.0.clone()), &bracket(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn moment_identities(seed in any::<u64>(), which in 0usize..4, t in nonzero_gauss()) {
        let rep = match which {
            0 => HamiltonianRep::sl2_standard(),
            1 => HamiltonianRep::sl2_standard_pair(),
            2 => HamiltonianRep::sln_cotangent(2),
            _ => HamiltonianRep::sln_cotangent(3),
        };
        let alg = rep.algebra().clone();
        let mut rng = trial_rng(seed, 0);
        let vec = |rng: &mut _| XVector((0..rep.dim()).map(|_| RatFunc::constant(isotropy::solver::small_gauss(rng, 3))).collect());
        let (x, v) = (vec(&mut rng), vec(&mut rng));
        let lie = |rng: &mut _| LoopAlgebraElement(isotropy::solver::random::random_lie_constant(&alg, rng).map(|c| RatFunc::constant(c.clone())));
        let (xi, eta) = (lie(&mut rng), lie(&mut rng));
        let g = random_constant_group(alg.n(), &mut rng).unwrap();
        let w = |a: &XVector, b: &XVector| rep.space().form(&a.0, &b.0);
        let act = |m: &LoopAlgebraElement, y: &XVector| y.apply(&rep.rho(m.mat()).unwrap()).unwrap();

        let mu = moment(&rep, &x).unwrap();
        let gx = x.apply(&rep.group_action(&g).unwrap()).unwrap();
        prop_assert_eq!(moment(&rep, &gx).unwrap().0, g.conjugate(mu.mat()).unwrap());
        prop_assert_eq!(pairing(&mu, &bracket(&xi, &eta).unwrap()).unwrap(), w(&act(&xi, &x), &act(&eta, &x)));
        prop_assert_eq!(w(&gx, &v.apply(&rep.group_action(&g).unwrap()).unwrap()), w(&x, &v));
        prop_assert!((&w(&act(&xi, &x), &v) + &w(&x, &act(&xi, &v))).is_zero());
        let tf = RatFunc::constant(t.clone());
        prop_assert_eq!(moment(&rep, &x.scale(&tf)).unwrap().0, mu.mat().scale(&(&tf * &tf)));

        let jet: Vec<Jet2<RatFunc>> = x.0.iter().zip(&v.0).map(|(a, b)| Jet2::tangent(a.clone(), b.clone(), RatFunc::zero())).collect();
        let d = moment_generic(&rep, &jet).unwrap().map(|e| e.d1.clone());
        prop_assert_eq!(d, dmoment(&rep, &x, &v).unwrap().0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn omega_is_bilinear_and_antisymmetric(seed in any::<u64>(), a in gauss(), b in gauss()) {
        let f1 = Scenario::fixture("f1").unwrap();
        let bundle = f1.bundle.clone().unwrap();
        let (p, t1, t2) = random_higgs_instance(&bundle, &f1.generator, Bounds::default(), seed, 0).unwrap();
        let o12 = symplectic_omega(&p, &t1, &t2).unwrap();
        prop_assert_eq!(&symplectic_omega(&p, &t2, &t1).unwrap(), &-&o12);
        prop_assert!(symplectic_omega(&p, &t1, &t1).unwrap().is_zero());
        let mix = t1.combine(&p, &a, &t2, &b).unwrap();
        prop_assert_eq!(symplectic_omega(&p, &mix, &t2).unwrap(), &a * &o12);
        let lam = liouville_lambda(&p, &mix).unwrap();
        let expect = &(&a * &liouville_lambda(&p, &t1).unwrap()) + &(&b * &liouville_lambda(&p, &t2).unwrap());
        prop_assert_eq!(lam, expect);
    }

    #[test]
    fn constant_gauge_invariance(seed in any::<u64>(), which in 0usize..3) {
        let s = Scenario::fixture(["f1", "f2", "f3"][which]).unwrap();
        let inst = random_instance(&s.curve, &s.rep, &s.recipe(), &s.generator, s.bounds, seed, 0).unwrap();
        let mut rng = trial_rng(seed, 1);
        let h = random_constant_group(s.rep.algebra().n(), &mut rng).unwrap();
        let p = &inst.point;
        let gp = p.gauge(&h).unwrap();
        let gt1 = inst.t1.gauge(p, &h, &gp).unwrap();
        let gt2 = inst.t2.gauge(p, &h, &gp).unwrap();
        prop_assert!(pullback_omega(&gp, &gt1, &gt2).unwrap().is_zero());
        let lam = liouville_lambda(&higgs_from_y(p).unwrap(), &pushforward_tangent(p, &inst.t1).unwrap()).unwrap();
        let glam = liouville_lambda(&higgs_from_y(&gp).unwrap(), &pushforward_tangent(&gp, &gt1).unwrap()).unwrap();
        prop_assert_eq!(lam, glam);

        let bundle = Bundle::new(s.curve.clone(), s.rep.clone(), inst.point.bundle().cocycles().to_vec()).unwrap();
        let (hp, h1, h2) = random_higgs_instance(&bundle, &s.generator, s.bounds, seed, 2).unwrap();
        let ghp = hp.gauge(&h).unwrap();
        let (g1, g2) = (h1.gauge(&h, &ghp).unwrap(), h2.gauge(&h, &ghp).unwrap());
        prop_assert_eq!(symplectic_omega(&hp, &h1, &h2).unwrap(), symplectic_omega(&ghp, &g1, &g2).unwrap());
        prop_assert_eq!(liouville_lambda(&hp, &h1).unwrap(), liouville_lambda(&ghp, &g1).unwrap());
    }

    #[test]
    fn pullback_vanishes_for_any_branch_choice(seed in any::<u64>()) {
        let curve = MarkedCurve::default_fixture().with_branches(&[true]);
        let rep = HamiltonianRep::sl2_standard();
        let s = Scenario::fixture("f1").unwrap();
        let inst = random_instance(&curve, &rep, &s.recipe(), &s.generator, s.bounds, seed, 0).unwrap();
        prop_assert!(pullback_omega(&inst.point, &inst.t1, &inst.t2).unwrap().is_zero());
    }
}

#[test]
fn local_residue_reads_the_minus_one_coefficient() {
    let f = RatFunc::new(Poly::new(vec![GaussRat::from_int(3), GaussRat::from_int(1)]), Poly::monomial(GaussRat::one(), 2))
        .unwrap();
    assert_eq!(local_residue(&f), GaussRat::one());
}
