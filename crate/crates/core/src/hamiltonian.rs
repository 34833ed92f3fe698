//! Linear symplectic representations: the action `rho`, the form `omega`,
//! the quadratic moment map and its differential.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::field::{GaussRat, RatFunc, Ring};
use crate::lie::{CoadjointElement, LoopAlgebraElement, LoopGroupElement, MatrixLieAlgebra};
use crate::linalg::Matrix;

/// `(C^{2m}, omega)` with `omega` an invertible antisymmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpace {
    omega: Matrix<GaussRat>,
}

impl SymplecticSpace {
    pub fn new(omega: Matrix<GaussRat>) -> Result<Self, Error> {
        if !omega.is_square() || !omega.rows().is_multiple_of(2) {
            return Err(Error::Shape("symplectic form must be 2m x 2m".into()));
        }
        if omega.transpose() != omega.neg() {
            return Err(Error::validation("omega", "form is not antisymmetric"));
        }
        omega.inverse().map_err(|_| Error::validation("omega", "form is degenerate"))?;
        Ok(SymplecticSpace { omega })
    }

    /// `[[0, I_m], [-I_m, 0]]`.
    pub fn standard(m: usize) -> Self {
        let mut omega = Matrix::zeros(2 * m, 2 * m);
        for k in 0..m {
            omega[(k, m + k)] = GaussRat::one();
            omega[(m + k, k)] = GaussRat::from_int(-1);
        }
        SymplecticSpace { omega }
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn omega(&self) -> &Matrix<GaussRat> {
        &self.omega
    }

    /// `omega(x, y) = x^T * Omega * y`.
    pub fn form<R: Ring>(&self, x: &[R], y: &[R]) -> R {
        let n = self.dim();
        let mut acc = R::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let w = &self.omega[(i, j)];
                if !w.is_zero() && !y[j].is_zero() {
                    acc = acc + x[i].clone() * R::from_gauss(w) * y[j].clone();
                }
            }
        }
        acc
    }
}

/// How a block of coordinates transforms: as the defining representation or its dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepBlock {
    Standard,
    Dual,
}

/// A linear symplectic representation of a matrix Lie algebra.
///
/// When the representation is assembled from [`RepBlock`]s the group acts by
/// `diag(g or g^-T, ...)`; explicitly given infinitesimal data carries no
/// group action.
#[derive(Clone, Debug)]
pub struct HamiltonianRep {
    name: String,
    algebra: MatrixLieAlgebra,
    space: SymplecticSpace,
    rho: Vec<Matrix<GaussRat>>,
    blocks: Option<Vec<RepBlock>>,
}

impl HamiltonianRep {
    pub fn from_blocks(
        name: impl Into<String>,
        algebra: MatrixLieAlgebra,
        blocks: Vec<RepBlock>,
        space: SymplecticSpace,
    ) -> Result<Self, Error> {
        if blocks.len() * algebra.n() != space.dim() {
            return Err(Error::Shape(format!(
                "{} blocks of size {} do not fill a {}-dimensional space",
                blocks.len(),
                algebra.n(),
                space.dim()
            )));
        }
        let rho = algebra.basis().iter().map(|b| block_lift(b, &blocks, |m| m.transpose().neg())).collect();
        Ok(HamiltonianRep { name: name.into(), algebra, space, rho, blocks: Some(blocks) })
    }

    pub fn explicit(
        name: impl Into<String>,
        algebra: MatrixLieAlgebra,
        space: SymplecticSpace,
        rho: Vec<Matrix<GaussRat>>,
    ) -> Result<Self, Error> {
        if rho.len() != algebra.dim() || rho.iter().any(|r| r.rows() != space.dim() || r.cols() != space.dim()) {
            return Err(Error::Shape("one rho matrix of size dim X per basis element is required".into()));
        }
        Ok(HamiltonianRep { name: name.into(), algebra, space, rho, blocks: None })
    }

    /// `sl2` on `C^2` with `omega(u, v) = u1 v2 - u2 v1`.
    pub fn sl2_standard() -> Self {
        HamiltonianRep::from_blocks("sl2-standard", MatrixLieAlgebra::sl(2), vec![RepBlock::Standard], SymplecticSpace::standard(1))
            .expect("valid")
    }

    /// `sl2` on `C^2 + C^2`, each summand with its own area form.
    pub fn sl2_standard_pair() -> Self {
        let j = SymplecticSpace::standard(1).omega.clone();
        let space = SymplecticSpace::new(Matrix::block_diag(&[j.clone(), j])).expect("valid");
        HamiltonianRep::from_blocks(
            "sl2-standard-pair",
            MatrixLieAlgebra::sl(2),
            vec![RepBlock::Standard, RepBlock::Standard],
            space,
        )
        .expect("valid")
    }

    /// `sl_n` on `C^n + (C^n)*` with `rho(xi) = diag(xi, -xi^T)` and the canonical pairing form.
    pub fn sln_cotangent(n: usize) -> Self {
        HamiltonianRep::from_blocks(
            "sln-cotangent",
            MatrixLieAlgebra::sl(n),
            vec![RepBlock::Standard, RepBlock::Dual],
            SymplecticSpace::standard(n),
        )
        .expect("valid")
    }

    /// Built-in representations by name.
    pub fn by_name(name: &str, algebra: &MatrixLieAlgebra) -> Option<Self> {
        match name {
            "sl2-standard" if algebra.name() == "sl2" => Some(HamiltonianRep::sl2_standard()),
            "sl2-standard-pair" if algebra.name() == "sl2" => Some(HamiltonianRep::sl2_standard_pair()),
            "sln-cotangent" => Some(HamiltonianRep::sln_cotangent(algebra.n())),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> &MatrixLieAlgebra {
        &self.algebra
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rho_basis(&self) -> &[Matrix<GaussRat>] {
        &self.rho
    }

    pub fn blocks(&self) -> Option<&[RepBlock]> {
        self.blocks.as_deref()
    }

    /// `rho` extended linearly over the basis coordinates of `m`.
    pub fn rho<R: Ring>(&self, m: &Matrix<R>) -> Result<Matrix<R>, Error> {
        let coords = self.algebra.coordinates(m)?;
        let d = self.dim();
        let mut out = Matrix::<R>::zeros(d, d);
        for (c, r) in coords.iter().zip(&self.rho) {
            if c.is_zero() {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    let e = &r[(i, j)];
                    if !e.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + c.clone() * R::from_gauss(e);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `rho(g)` on X.
    pub fn group_action(&self, g: &LoopGroupElement) -> Result<Matrix<RatFunc>, Error> {
        let blocks = self.blocks.as_ref().ok_or(Error::UnsupportedGroupAction)?;
        Ok(block_lift(g.mat(), blocks, |_| g.inv_mat().transpose()))
    }

    /// `rho(g)^-1 = rho(g^-1)` on X.
    pub fn group_action_inv(&self, g: &LoopGroupElement) -> Result<Matrix<RatFunc>, Error> {
        self.group_action(&g.inverse())
    }

    /// `rho(g)` for a group element given as a bare matrix over any ring (e.g. jets).
    pub fn group_action_generic<R: Ring>(&self, g: &Matrix<R>, g_inv: &Matrix<R>) -> Result<Matrix<R>, Error> {
        let blocks = self.blocks.as_ref().ok_or(Error::UnsupportedGroupAction)?;
        Ok(block_lift(g, blocks, |_| g_inv.transpose()))
    }
}

fn block_lift<R: Ring>(m: &Matrix<R>, blocks: &[RepBlock], dual: impl Fn(&Matrix<R>) -> Matrix<R>) -> Matrix<R> {
    let parts: Vec<Matrix<R>> = blocks
        .iter()
        .map(|b| match b {
            RepBlock::Standard => m.clone(),
            RepBlock::Dual => dual(m),
        })
        .collect();
    Matrix::block_diag(&parts)
}

/// A point or tangent vector of X with rational-function coordinates.
#[derive(Clone, PartialEq, Debug)]
pub struct XVector(pub Vec<RatFunc>);

impl XVector {
    pub fn zero(dim: usize) -> Self {
        XVector(vec![RatFunc::zero(); dim])
    }

    pub fn constant(v: &[i64]) -> Self {
        XVector(v.iter().map(|&c| RatFunc::from_int(c)).collect())
    }

    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = XVector::zero(dim);
        v.0[k] = RatFunc::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, f: &RatFunc) -> Self {
        XVector(self.0.iter().map(|x| x * f).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        XVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        XVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn apply(&self, m: &Matrix<RatFunc>) -> Result<Self, Error> {
        Ok(XVector(m.mul_vec(&self.0)?))
    }

    /// Worst pole order at 0 (0 when regular).
    pub fn pole_order(&self) -> i64 {
        self.0.iter().filter_map(RatFunc::valuation).map(|v| (-v).max(0)).max().unwrap_or(0)
    }
}

impl fmt::Display for XVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.display_in("u")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn check_dim(rep: &HamiltonianRep, x: &XVector) -> Result<(), Error> {
    if x.dim() != rep.dim() {
        return Err(Error::Shape(format!("vector of length {} in a {}-dimensional space", x.dim(), rep.dim())));
    }
    Ok(())
}

/// Infinitesimal action `rho(xi) x`.
pub fn inf_action(rep: &HamiltonianRep, xi: &LoopAlgebraElement, x: &XVector) -> Result<XVector, Error> {
    check_dim(rep, x)?;
    x.apply(&rep.rho(xi.mat())?)
}

/// The moment map `<mu(x), xi> = 1/2 omega(rho(xi) x, x)` over any ring.
pub fn moment_generic<R: Ring>(rep: &HamiltonianRep, x: &[R]) -> Result<Matrix<R>, Error> {
    let half = R::from_gauss(&GaussRat::ratio(1, 2));
    let values: Vec<R> = rep
        .rho
        .iter()
        .map(|r| {
            let rx = r.map(R::from_gauss).mul_vec(x)?;
            Ok(half.clone() * rep.space.form(&rx, x))
        })
        .collect::<Result<_, Error>>()?;
    rep.algebra.dualize(&values)
}

pub fn moment(rep: &HamiltonianRep, x: &XVector) -> Result<CoadjointElement, Error> {
    check_dim(rep, x)?;
    Ok(CoadjointElement(moment_generic(rep, &x.0)?))
}

/// The differential `<dmu_x(v), xi> = omega(rho(xi) x, v)`.
pub fn dmoment(rep: &HamiltonianRep, x: &XVector, v: &XVector) -> Result<CoadjointElement, Error> {
    check_dim(rep, x)?;
    check_dim(rep, v)?;
    let values: Vec<RatFunc> = rep
        .rho
        .iter()
        .map(|r| {
            let rx = r.map(RatFunc::from_gauss).mul_vec(&x.0)?;
            Ok(rep.space.form(&rx, &v.0))
        })
        .collect::<Result<_, Error>>()?;
    Ok(CoadjointElement(rep.algebra.dualize(&values)?))
}

/// Outcome of [`rep_validate`]: violated identities, plus notes on identities
/// that hold by construction.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RepReport {
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl RepReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the bracket homomorphism, `rho(xi)` in `sp(omega)`, and agreement
/// with the block group action when there is one.
pub fn rep_validate(rep: &HamiltonianRep) -> RepReport {
    let mut report = RepReport::default();
    let alg = &rep.algebra;
    let omega = rep.space.omega();
    for (a, r) in rep.rho.iter().enumerate() {
        let sp = r.transpose().try_mul(omega).and_then(|m| m.try_add(&omega.try_mul(r)?));
        match sp {
            Ok(m) if m.is_zero() => {}
            Ok(_) => report.violations.push(format!("rho({}) is not in sp(omega)", alg.labels()[a])),
            Err(e) => report.violations.push(format!("rho({}): {e}", alg.labels()[a])),
        }
    }
    for a in 0..alg.dim() {
        for b in a + 1..alg.dim() {
            let lhs = alg.basis()[a].commutator(&alg.basis()[b]).and_then(|c| rep.rho(&c));
            let rhs = rep.rho[a].commutator(&rep.rho[b]);
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => {}
                _ => report.violations.push(format!(
                    "rho([{0}, {1}]) != [rho({0}), rho({1})]",
                    alg.labels()[a],
                    alg.labels()[b]
                )),
            }
        }
    }
    if let Some(blocks) = &rep.blocks {
        for (a, r) in rep.rho.iter().enumerate() {
            let expected = block_lift(&alg.basis()[a], blocks, |m| m.transpose().neg());
            if &expected != r {
                report.violations.push(format!("rho({}) disagrees with the block group action", alg.labels()[a]));
            }
        }
    }
    report
        .notes
        .push("scaling t.x = t x commutes with the linear G-action and gives omega weight 2".into());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_ratfunc;

    fn gen(label: &str) -> LoopAlgebraElement {
        MatrixLieAlgebra::sl(2).generator(label).unwrap()
    }

    #[test]
    fn standard_action() {
        let rep = HamiltonianRep::sl2_standard();
        let e1 = XVector::constant(&[1, 0]);
        assert_eq!(inf_action(&rep, &gen("F"), &e1).unwrap(), XVector::constant(&[0, 1]));
        assert!(inf_action(&rep, &gen("E"), &e1).unwrap().is_zero());
        let z = parse_ratfunc("z", "z").unwrap();
        assert_eq!(inf_action(&rep, &gen("H").scale(&z), &e1).unwrap(), e1.scale(&z));
    }

    #[test]
    fn moment_of_e1() {
        // By hand: omega(rho(xi) e1, e1) is 0, 0, -1 on E, H, F, so the pairings
        // are (0, 0, -1/2) and the Gram solve gives -1/2 E.
        let rep = HamiltonianRep::sl2_standard();
        let oracle_values: Vec<RatFunc> = rep
            .rho_basis()
            .iter()
            .map(|r| {
                let rx = r.map(RatFunc::from_gauss).mul_vec(&XVector::constant(&[1, 0]).0).unwrap();
                RatFunc::constant(GaussRat::ratio(1, 2)) * rep.space().form(&rx, &XVector::constant(&[1, 0]).0)
            })
            .collect();
        assert_eq!(oracle_values, vec![RatFunc::zero(), RatFunc::zero(), RatFunc::constant(GaussRat::ratio(-1, 2))]);
        let mu = moment(&rep, &XVector::constant(&[1, 0])).unwrap();
        assert_eq!(mu.0, gen("E").0.scale(&RatFunc::constant(GaussRat::ratio(-1, 2))));
        assert!(moment(&rep, &XVector::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn dmoment_of_basis_vectors() {
        // omega(rho(xi) e1, e2) on (E, H, F) = (0, 1, 0), so dmu = 1/2 H
        let rep = HamiltonianRep::sl2_standard();
        let d = dmoment(&rep, &XVector::constant(&[1, 0]), &XVector::constant(&[0, 1])).unwrap();
        assert_eq!(d.0, gen("H").0.scale(&RatFunc::constant(GaussRat::ratio(1, 2))));
        let x = XVector::constant(&[2, -3]);
        let euler = dmoment(&rep, &x, &x).unwrap();
        assert_eq!(euler.0, moment(&rep, &x).unwrap().0.scale(&RatFunc::from_int(2)));
    }

    #[test]
    fn builtin_reps_are_valid() {
        for rep in [HamiltonianRep::sl2_standard(), HamiltonianRep::sl2_standard_pair(), HamiltonianRep::sln_cotangent(3)] {
            let r = rep_validate(&rep);
            assert!(r.is_valid(), "{}: {:?}", rep.name(), r.violations);
        }
    }

    #[test]
    fn non_symplectic_rho_is_reported() {
        let good = HamiltonianRep::sl2_standard();
        let mut rho = good.rho_basis().to_vec();
        rho[0] = Matrix::identity(2);
        let bad = HamiltonianRep::explicit("bad", MatrixLieAlgebra::sl(2), good.space().clone(), rho).unwrap();
        let r = rep_validate(&bad);
        assert!(r.violations.iter().any(|v| v.contains("rho(E) is not in sp(omega)")));
        assert!(matches!(bad.group_action(&LoopGroupElement::identity(2)), Err(Error::UnsupportedGroupAction)));
    }
}
