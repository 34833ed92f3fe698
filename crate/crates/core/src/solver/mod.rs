//! Finite-dimensional spaces of sections, Higgs fields and their tangents,
//! cut out of a space of candidate rational functions by exact linear
//! regularity conditions, plus seeded sampling.

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::{GaussRat, LaurentSeries, RatFunc};
use crate::hamiltonian::XVector;
use crate::lie::{CoadjointElement, LoopAlgebraElement};
use crate::linalg::Matrix;
use crate::moduli::{Bundle, HiggsPoint, YPoint};
use crate::residue::P1Point;

pub mod random;

/// Size of the candidate space: polynomial degree in `z` when infinity is
/// marked, and pole order at each finite marked point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    #[serde(default = "default_degree")]
    pub degree: u32,
    #[serde(default = "default_pole_order")]
    pub pole_order: u32,
}

fn default_degree() -> u32 {
    8
}

fn default_pole_order() -> u32 {
    6
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { degree: default_degree(), pole_order: default_pole_order() }
    }
}

/// Scalar functions regular off the marked points, within the bounds:
/// `z^0..z^degree` (only constants when infinity is unmarked) and
/// `(z - a)^-k` for `k <= pole_order` at each finite marked `a`.
pub fn scalar_candidates(points: &[P1Point], bounds: Bounds) -> (Vec<RatFunc>, Vec<String>) {
    let top = if points.contains(&P1Point::Infinity) { bounds.degree as i64 } else { 0 };
    let mut fs = Vec::new();
    let mut labels = Vec::new();
    for k in 0..=top {
        fs.push(RatFunc::monomial(GaussRat::one(), k));
        labels.push(match k {
            0 => "1".to_string(),
            1 => "z".to_string(),
            _ => format!("z^{k}"),
        });
    }
    for p in points {
        if let P1Point::Finite(a) = p {
            let shift = RatFunc::var() - RatFunc::constant(a.clone());
            let base = RatFunc::from_poly(shift.num().clone()).display_in("z");
            for k in 1..=bounds.pole_order as i64 {
                fs.push(shift.powi(-k).expect("z - a is nonzero"));
                labels.push(if base == "z" { format!("z^-{k}") } else { format!("({base})^-{k}") });
            }
        }
    }
    (fs, labels)
}

/// Candidate `XVector`s: each scalar candidate placed in each coordinate.
#[derive(Clone, Debug)]
pub struct CandidateSpace {
    pub bounds: Bounds,
    pub basis: Vec<XVector>,
    pub labels: Vec<String>,
}

impl CandidateSpace {
    pub fn new(points: &[P1Point], dim: usize, bounds: Bounds) -> Self {
        let (fs, fl) = scalar_candidates(points, bounds);
        let mut basis = Vec::with_capacity(dim * fs.len());
        let mut labels = Vec::with_capacity(dim * fs.len());
        for k in 0..dim {
            for (f, l) in fs.iter().zip(&fl) {
                basis.push(XVector::unit(dim, k).scale(f));
                labels.push(format!("x{}*{l}", k + 1));
            }
        }
        CandidateSpace { bounds, basis, labels }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn combine(&self, coeffs: &[GaussRat]) -> XVector {
        combine_vectors(&self.basis, coeffs)
    }
}

fn combine_vectors(basis: &[XVector], coeffs: &[GaussRat]) -> XVector {
    let dim = basis.first().map_or(0, XVector::dim);
    basis.iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).fold(XVector::zero(dim), |acc, (b, c)| {
        acc.add(&b.scale(&RatFunc::constant(c.clone())))
    })
}

/// `A x = b` over `Q(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub matrix: Matrix<GaussRat>,
    pub rhs: Vec<GaussRat>,
    pub labels: Vec<String>,
}

impl LinearSystem {
    pub fn homogeneous(matrix: Matrix<GaussRat>) -> Self {
        let rhs = vec![GaussRat::zero(); matrix.rows()];
        let labels = (0..matrix.cols()).map(|j| format!("c{j}")).collect();
        LinearSystem { matrix, rhs, labels }
    }
}

struct Echelon {
    rows: Vec<Vec<GaussRat>>,
    pivots: Vec<usize>,
}

/// Reduced row echelon form of `[A | b]`; pivots are taken column by column,
/// first nonzero row first.
fn rref(sys: &LinearSystem) -> Echelon {
    let n = sys.matrix.cols();
    let mut rows: Vec<Vec<GaussRat>> = (0..sys.matrix.rows())
        .map(|i| {
            let mut r = sys.matrix.row(i).to_vec();
            r.push(sys.rhs[i].clone());
            r
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..=n {
        let Some(p) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("pivot is nonzero");
        for x in rows[r].iter_mut().skip(col) {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Echelon { rows, pivots }
}

/// Basis of `{x : A x = 0}`; one vector per free column, in column order.
pub fn nullspace(sys: &LinearSystem) -> Vec<Vec<GaussRat>> {
    let n = sys.matrix.cols();
    let e = rref(&LinearSystem::homogeneous(sys.matrix.clone()));
    kernel_from(&e, n)
}

fn kernel_from(e: &Echelon, n: usize) -> Vec<Vec<GaussRat>> {
    let pivot_cols: Vec<usize> = e.pivots.iter().copied().filter(|&c| c < n).collect();
    (0..n)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = vec![GaussRat::zero(); n];
            v[free] = GaussRat::one();
            for (row, &pc) in e.rows.iter().zip(&pivot_cols) {
                v[pc] = -&row[free];
            }
            v
        })
        .collect()
}

/// Rank of `A`.
pub fn rank(m: &Matrix<GaussRat>) -> usize {
    rref(&LinearSystem::homogeneous(m.clone())).pivots.len()
}

/// Solution set `particular + span(kernel)`, or `None` for the particular part
/// when the system is inconsistent.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSolution {
    pub particular: Option<Vec<GaussRat>>,
    pub kernel: Vec<Vec<GaussRat>>,
}

pub fn solve(sys: &LinearSystem) -> AffineSolution {
    let n = sys.matrix.cols();
    let e = rref(sys);
    let kernel = kernel_from(&e, n);
    if e.pivots.contains(&n) {
        return AffineSolution { particular: None, kernel };
    }
    let mut x = vec![GaussRat::zero(); n];
    for (row, &pc) in e.rows.iter().zip(&e.pivots) {
        x[pc] = row[n].clone();
    }
    AffineSolution { particular: Some(x), kernel }
}

/// Conditions "no negative powers of `u_i`" on `sum_j c_j image_ij + offset_i`,
/// where `image_ij` are the local transports of the candidates.
fn regularity_system(
    images: &[Vec<Vec<RatFunc>>],
    offsets: Option<&[Vec<RatFunc>]>,
    labels: &[String],
) -> LinearSystem {
    let ncols = images.len();
    let npoints = images.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<GaussRat>> = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..npoints {
        let width = images[0][i].len();
        for k in 0..width {
            let offset = offsets.map(|o| &o[i][k]);
            let entries: Vec<&RatFunc> = images.iter().map(|im| &im[i][k]).collect();
            let lowest = entries
                .iter()
                .copied()
                .chain(offset)
                .filter_map(RatFunc::valuation)
                .min()
                .unwrap_or(0);
            if lowest >= 0 {
                continue;
            }
            let exp: Vec<LaurentSeries> = entries.iter().map(|f| LaurentSeries::expand_through(f, -1)).collect();
            let off = offset.map(|f| LaurentSeries::expand_through(f, -1));
            for e in lowest..0 {
                let row: Vec<GaussRat> = exp.iter().map(|s| s.coeff(e).unwrap_or_default()).collect();
                let b = off.as_ref().map_or(GaussRat::zero(), |s| -s.coeff(e).unwrap_or_default());
                if row.iter().all(Zero::is_zero) && b.is_zero() {
                    continue;
                }
                rows.push(row);
                rhs.push(b);
            }
        }
    }
    let matrix = if rows.is_empty() {
        Matrix::zeros(0, ncols)
    } else {
        Matrix::from_rows(rows).expect("rows have equal length")
    };
    LinearSystem { matrix, rhs, labels: labels.to_vec() }
}

/// Basis of the valid `s°` inside the candidate space.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    pub candidates: CandidateSpace,
    pub system: LinearSystem,
    pub basis: Vec<XVector>,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn section_images(bundle: &Bundle, cands: &CandidateSpace) -> Result<Vec<Vec<Vec<RatFunc>>>, Error> {
    cands
        .basis
        .iter()
        .map(|c| (0..bundle.len()).map(|i| Ok(bundle.transport_section(i, c)?.0)).collect())
        .collect()
}

/// Global `s°` with every `T_i^-1 rho(g_i)^-1 s°` regular at `u_i = 0`.
pub fn build_section_space(bundle: &Bundle, bounds: Bounds) -> Result<SectionSpace, Error> {
    let candidates = CandidateSpace::new(bundle.curve().points(), bundle.rep().dim(), bounds);
    let images = section_images(bundle, &candidates)?;
    let system = regularity_system(&images, None, &candidates.labels);
    let basis = nullspace(&system).iter().map(|c| candidates.combine(c)).collect();
    Ok(SectionSpace { candidates, system, basis })
}

/// `particular + span(basis)`.
#[derive(Clone, Debug)]
pub struct AffineSpace<T> {
    pub particular: T,
    pub basis: Vec<T>,
}

/// Valid `s°_dot` for fixed `g_dot`: `T^-1 rho(g)^-1 s°_dot - rho(g_dot) s'` regular at each point.
pub fn build_tangent_space(
    p: &YPoint,
    g_dot: &[LoopAlgebraElement],
    bounds: Bounds,
) -> Result<AffineSpace<XVector>, Error> {
    let bundle = p.bundle();
    let rep = bundle.rep();
    if g_dot.len() != bundle.len() {
        return Err(Error::Shape(format!("{} g_dot entries for {} marked points", g_dot.len(), bundle.len())));
    }
    let candidates = CandidateSpace::new(bundle.curve().points(), rep.dim(), bounds);
    let images = section_images(bundle, &candidates)?;
    let offsets: Vec<Vec<RatFunc>> = g_dot
        .iter()
        .zip(p.s_prime())
        .map(|(gd, sp)| Ok(sp.apply(&rep.rho(gd.mat())?)?.scale(&-RatFunc::one()).0))
        .collect::<Result<_, Error>>()?;
    let sol = solve(&regularity_system(&images, Some(&offsets), &candidates.labels));
    let Some(part) = sol.particular else {
        let worst = offsets
            .iter()
            .enumerate()
            .map(|(i, o)| (i, crate::hamiltonian::XVector(o.clone()).pole_order()))
            .max_by_key(|&(_, k)| k)
            .unwrap_or((0, 0));
        return Err(Error::Infeasible(format!(
            "rho(g_dot) s' has a pole of order {} at marked point {} that no s°_dot with degree <= {} and pole order <= {} cancels",
            worst.1,
            bundle.curve().points()[worst.0],
            bounds.degree,
            bounds.pole_order
        )));
    };
    Ok(AffineSpace {
        particular: candidates.combine(&part),
        basis: sol.kernel.iter().map(|c| candidates.combine(c)).collect(),
    })
}

/// Candidate Higgs fields `f(z) X_a`.
fn higgs_candidates(bundle: &Bundle, bounds: Bounds) -> (Vec<Matrix<RatFunc>>, Vec<String>) {
    let alg = bundle.rep().algebra();
    let (fs, fl) = scalar_candidates(bundle.curve().points(), bounds);
    let mut mats = Vec::new();
    let mut labels = Vec::new();
    for (x, xl) in alg.basis().iter().zip(alg.labels()) {
        let xr = x.map(|c| RatFunc::constant(c.clone()));
        for (f, l) in fs.iter().zip(&fl) {
            mats.push(xr.scale(f));
            labels.push(format!("{xl}*{l}"));
        }
    }
    (mats, labels)
}

fn combine_mats(n: usize, mats: &[Matrix<RatFunc>], coeffs: &[GaussRat]) -> Matrix<RatFunc> {
    mats.iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).fold(Matrix::zeros(n, n), |acc, (m, c)| {
        acc.try_add(&m.scale(&RatFunc::constant(c.clone()))).expect("same shape")
    })
}

fn higgs_images(bundle: &Bundle, mats: &[Matrix<RatFunc>]) -> Result<Vec<Vec<Vec<RatFunc>>>, Error> {
    mats.iter()
        .map(|m| (0..bundle.len()).map(|i| Ok(bundle.transport_coadjoint(i, m)?.entries().to_vec())).collect())
        .collect()
}

/// Global Higgs fields `phi°` with every `T_i^-2 g_i^-1 phi° g_i` regular.
pub fn build_higgs_space(bundle: &Bundle, bounds: Bounds) -> Result<Vec<CoadjointElement>, Error> {
    let (mats, labels) = higgs_candidates(bundle, bounds);
    let images = higgs_images(bundle, &mats)?;
    let n = bundle.rep().algebra().n();
    Ok(nullspace(&regularity_system(&images, None, &labels))
        .iter()
        .map(|c| CoadjointElement(combine_mats(n, &mats, c)))
        .collect())
}

/// Valid `phi°_dot` for fixed `g_dot`: `T^-2 g^-1 phi°_dot g + [phi', g_dot]` regular.
pub fn build_higgs_tangent_space(
    p: &HiggsPoint,
    g_dot: &[LoopAlgebraElement],
    bounds: Bounds,
) -> Result<AffineSpace<CoadjointElement>, Error> {
    let bundle = p.bundle();
    let n = bundle.rep().algebra().n();
    let (mats, labels) = higgs_candidates(bundle, bounds);
    let images = higgs_images(bundle, &mats)?;
    let offsets: Vec<Vec<RatFunc>> = g_dot
        .iter()
        .zip(p.phi_prime())
        .map(|(gd, phi)| Ok(phi.mat().commutator(gd.mat())?.entries().to_vec()))
        .collect::<Result<_, Error>>()?;
    let sol = solve(&regularity_system(&images, Some(&offsets), &labels));
    let Some(part) = sol.particular else {
        return Err(Error::Infeasible(format!(
            "[phi', g_dot] has poles that no phi°_dot with degree <= {} and pole order <= {} cancels",
            bounds.degree, bounds.pole_order
        )));
    };
    Ok(AffineSpace {
        particular: CoadjointElement(combine_mats(n, &mats, &part)),
        basis: sol.kernel.iter().map(|c| CoadjointElement(combine_mats(n, &mats, c))).collect(),
    })
}

/// A small-height element of `Q(i)`: real and imaginary parts in `[-h, h]`,
/// occasionally halved.
pub fn small_gauss<R: Rng>(rng: &mut R, h: i64) -> GaussRat {
    let re = rng.gen_range(-h..=h);
    let im = if rng.gen_bool(0.5) { rng.gen_range(-h..=h) } else { 0 };
    let c = GaussRat::from(re) + GaussRat::from(im) * GaussRat::i();
    if rng.gen_bool(0.25) {
        c * GaussRat::ratio(1, 2)
    } else {
        c
    }
}

/// Random combination of a basis with small-height coefficients, never all zero.
pub fn sample_coefficients<R: Rng>(rng: &mut R, len: usize) -> Result<Vec<GaussRat>, Error> {
    if len == 0 {
        return Err(Error::EmptySpace);
    }
    let mut c: Vec<GaussRat> = (0..len).map(|_| small_gauss(rng, 3)).collect();
    if c.iter().all(Zero::is_zero) {
        c[rng.gen_range(0..len)] = GaussRat::one();
    }
    Ok(c)
}

/// Deterministic nonzero element of the span of `basis`.
pub fn sample(basis: &[XVector], seed: u64) -> Result<XVector, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(basis, &mut rng)
}

pub fn sample_with<R: Rng>(basis: &[XVector], rng: &mut R) -> Result<XVector, Error> {
    Ok(combine_vectors(basis, &sample_coefficients(rng, basis.len())?))
}

pub fn sample_affine_with<R: Rng>(space: &AffineSpace<XVector>, rng: &mut R) -> XVector {
    match sample_with(&space.basis, rng) {
        Ok(v) => space.particular.add(&v),
        Err(_) => space.particular.clone(),
    }
}

pub fn sample_higgs_affine_with<R: Rng>(space: &AffineSpace<CoadjointElement>, rng: &mut R) -> Result<CoadjointElement, Error> {
    if space.basis.is_empty() {
        return Ok(space.particular.clone());
    }
    let n = space.particular.mat().rows();
    let mats: Vec<Matrix<RatFunc>> = space.basis.iter().map(|b| b.mat().clone()).collect();
    let extra = combine_mats(n, &mats, &sample_coefficients(rng, mats.len())?);
    Ok(CoadjointElement(space.particular.mat().try_add(&extra)?))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::curve::MarkedCurve;
    use crate::hamiltonian::HamiltonianRep;
    use crate::lie::{LoopGroupElement, MatrixLieAlgebra};
    use crate::moduli::{make_y_point, make_y_tangent};

    fn g(rows: &[&[i64]]) -> Matrix<GaussRat> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| GaussRat::from_int(x)).collect()).collect()).unwrap()
    }

    fn f1(cocycle: LoopGroupElement) -> Arc<Bundle> {
        Bundle::new(MarkedCurve::default_fixture(), HamiltonianRep::sl2_standard(), vec![cocycle]).unwrap()
    }

    #[test]
    fn nullspace_basics() {
        assert!(nullspace(&LinearSystem::homogeneous(Matrix::identity(4))).is_empty());
        let k = nullspace(&LinearSystem::homogeneous(Matrix::zeros(2, 3)));
        assert_eq!(k, vec![vec![1.into(), 0.into(), 0.into()], vec![0.into(), 1.into(), 0.into()], vec![
            0.into(),
            0.into(),
            1.into()
        ]]);
    }

    #[test]
    fn nullspace_rank_three() {
        // rows 4..6 are combinations of rows 1..3
        let a = g(&[&[1, 2, 0, 1], &[0, 1, 1, 0], &[2, 0, 1, 3], &[1, 3, 1, 1], &[3, 2, 1, 4], &[0, 0, 0, 0]]);
        let k = nullspace(&LinearSystem::homogeneous(a.clone()));
        assert_eq!(k.len(), 1);
        assert_eq!(rank(&a) + k.len(), 4);
        assert!(a.mul_vec(&k[0]).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn inconsistent_system() {
        let sys = LinearSystem { matrix: g(&[&[1, 1], &[2, 2]]), rhs: vec![1.into(), 3.into()], labels: vec![] };
        assert!(solve(&sys).particular.is_none());
    }

    #[test]
    fn f1_section_spaces() {
        // (p(1/u), u^-2 q(1/u)) regular forces p constant and q = 0
        let s = build_section_space(&f1(LoopGroupElement::torus(&[-1, 1]).unwrap()), Bounds { degree: 4, pole_order: 6 }).unwrap();
        assert_eq!(s.basis, vec![XVector::constant(&[1, 0])]);
        for bounds in [Bounds { degree: 4, pole_order: 6 }, Bounds { degree: 0, pole_order: 6 }] {
            let s = build_section_space(&f1(LoopGroupElement::identity(2)), bounds).unwrap();
            assert_eq!(s.dim(), 0);
        }
        let s = build_section_space(&f1(LoopGroupElement::torus(&[-3, 3]).unwrap()), Bounds::default()).unwrap();
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn f1_tangent_spaces() {
        let b = f1(LoopGroupElement::torus(&[-1, 1]).unwrap());
        let p = make_y_point(&b, XVector::constant(&[1, 0])).unwrap();
        let f = MatrixLieAlgebra::sl(2).generator("F").unwrap();
        let t = build_tangent_space(&p, std::slice::from_ref(&f), Bounds::default()).unwrap();
        assert!(t.particular.is_zero());
        assert_eq!(t.basis, vec![XVector::constant(&[1, 0])]);
        let t0 = build_tangent_space(&p, &[LoopAlgebraElement::zero(2)], Bounds::default()).unwrap();
        assert_eq!(t0.basis.len(), 1);
        // rho(u^-3 F) s' = (0, u^-3) needs u^-1 * (second coordinate) to carry a u^-3 pole
        let polar = f.scale(&RatFunc::monomial(GaussRat::one(), -3));
        let tight = build_tangent_space(&p, std::slice::from_ref(&polar), Bounds { degree: 0, pole_order: 0 });
        assert!(matches!(tight, Err(Error::Infeasible(_))));
        let wide = build_tangent_space(&p, std::slice::from_ref(&polar), Bounds::default()).unwrap();
        assert!(make_y_tangent(&p, vec![polar], wide.particular).is_ok());
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        let b = f1(LoopGroupElement::torus(&[-2, 2]).unwrap());
        let s = build_section_space(&b, Bounds::default()).unwrap();
        assert_eq!(sample(&s.basis, 42).unwrap(), sample(&s.basis, 42).unwrap());
        for seed in 0..10 {
            let v = sample(&s.basis, seed).unwrap();
            assert!(!v.is_zero());
            assert!(make_y_point(&b, v).is_ok());
        }
        assert_eq!(sample(&[], 1), Err(Error::EmptySpace));
    }

    #[test]
    fn higgs_space_of_f1() {
        let b = f1(LoopGroupElement::torus(&[-1, 1]).unwrap());
        let h = build_higgs_space(&b, Bounds::default()).unwrap();
        // g^-1 E g = u^2 E, g^-1 H g = H, g^-1 F g = u^-2 F, all times T^-2 = u^-2
        let e = MatrixLieAlgebra::sl(2).generator("E").unwrap();
        assert_eq!(h, vec![CoadjointElement(e.0)]);
        assert!(crate::moduli::make_higgs_point(&b, h[0].clone()).is_ok());
    }
}
