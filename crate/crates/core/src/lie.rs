//! Matrix Lie algebras over `Q(i)`, their loop versions over rational functions,
//! and the trace pairing identifying the coadjoint and adjoint representations.

use num_traits::{One, Zero};

use crate::error::Error;
use crate::field::{GaussRat, RatFunc, Ring};
use crate::linalg::Matrix;

/// A Lie algebra of `n x n` matrices given by a basis.
///
/// The dual is identified with the algebra itself through `<a, b> = tr(a b)`,
/// so every basis must have an invertible trace Gram matrix.
#[derive(Clone, Debug)]
pub struct MatrixLieAlgebra {
    name: String,
    n: usize,
    basis: Vec<Matrix<GaussRat>>,
    labels: Vec<String>,
    gram_inv: Matrix<GaussRat>,
}

impl MatrixLieAlgebra {
    pub fn new(name: impl Into<String>, labels: Vec<String>, basis: Vec<Matrix<GaussRat>>) -> Result<Self, Error> {
        let n = basis.first().map_or(0, Matrix::rows);
        if basis.iter().any(|b| b.rows() != n || b.cols() != n) || labels.len() != basis.len() {
            return Err(Error::Shape("basis matrices must all be n x n with one label each".into()));
        }
        let d = basis.len();
        let gram = Matrix::from_fn(d, d, |a, b| basis[a].try_mul(&basis[b]).expect("square").trace());
        let gram_inv = gram.inverse().map_err(|_| Error::DegeneratePairing)?;
        let alg = MatrixLieAlgebra { name: name.into(), n, basis, labels, gram_inv };
        // an invertible Gram matrix already forces linear independence
        for a in 0..d {
            for b in a + 1..d {
                let c = alg.basis[a].commutator(&alg.basis[b])?;
                alg.coordinates(&c.map(RatFunc::from_gauss))
                    .map_err(|_| Error::validation(alg.name.clone(), format!("[{}, {}] leaves the span", alg.labels[a], alg.labels[b])))?;
            }
        }
        Ok(alg)
    }

    /// `sl_n` with basis `E_ij (i < j)`, `H_k = E_kk - E_{k+1,k+1}`, `E_ij (i > j)`.
    /// For `n = 2` the labels are the usual `E, H, F`.
    pub fn sl(n: usize) -> Self {
        assert!(n >= 2, "sl_n needs n >= 2");
        let unit = |i: usize, j: usize| {
            let mut m = Matrix::zeros(n, n);
            m[(i, j)] = GaussRat::one();
            m
        };
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                basis.push(unit(i, j));
                labels.push(format!("E{}{}", i + 1, j + 1));
            }
        }
        for k in 0..n - 1 {
            basis.push(unit(k, k).try_sub(&unit(k + 1, k + 1)).expect("same shape"));
            labels.push(format!("H{}", k + 1));
        }
        for i in 0..n {
            for j in 0..i {
                basis.push(unit(i, j));
                labels.push(format!("E{}{}", i + 1, j + 1));
            }
        }
        if n == 2 {
            labels = vec!["E".into(), "H".into(), "F".into()];
        }
        MatrixLieAlgebra::new(format!("sl{n}"), labels, basis).expect("sl_n is a valid matrix Lie algebra")
    }

    pub fn by_name(name: &str) -> Option<Self> {
        let n: usize = name.strip_prefix("sl")?.parse().ok()?;
        (2..=6).contains(&n).then(|| MatrixLieAlgebra::sl(n))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Matrix size.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix<GaussRat>] {
        &self.basis
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Basis element as a loop-algebra element with constant entries.
    pub fn generator(&self, label: &str) -> Option<LoopAlgebraElement> {
        self.index_of(label).map(|k| LoopAlgebraElement(self.basis[k].map(RatFunc::from_gauss)))
    }

    /// `sum_a c_a * basis_a`.
    pub fn combine<R: Ring>(&self, coords: &[R]) -> Matrix<R> {
        let mut out = Matrix::<R>::zeros(self.n, self.n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for i in 0..self.n {
                for j in 0..self.n {
                    let e = &b[(i, j)];
                    if !e.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + c.clone() * R::from_gauss(e);
                    }
                }
            }
        }
        out
    }

    /// `tr(m * basis_a)` for each basis element.
    pub fn pairings_with_basis<R: Ring>(&self, m: &Matrix<R>) -> Vec<R> {
        self.basis
            .iter()
            .map(|b| {
                let mut acc = R::zero();
                for i in 0..self.n {
                    for j in 0..self.n {
                        let e = &b[(j, i)];
                        if !e.is_zero() && !m[(i, j)].is_zero() {
                            acc = acc + m[(i, j)].clone() * R::from_gauss(e);
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// The unique element `M` of the span with `tr(M * basis_a) = values_a`.
    pub fn dualize<R: Ring>(&self, values: &[R]) -> Result<Matrix<R>, Error> {
        if values.len() != self.dim() {
            return Err(Error::Shape(format!("{} pairing values for a {}-dimensional algebra", values.len(), self.dim())));
        }
        // the Gram matrix is symmetric, so coords = G^-1 * values
        let coords: Vec<R> = (0..self.dim())
            .map(|a| {
                values.iter().enumerate().fold(R::zero(), |acc, (b, v)| {
                    let g = &self.gram_inv[(a, b)];
                    if g.is_zero() { acc } else { acc + R::from_gauss(g) * v.clone() }
                })
            })
            .collect();
        Ok(self.combine(&coords))
    }

    /// Coordinates of `m` in the basis, verified by reconstruction.
    pub fn coordinates<R: Ring>(&self, m: &Matrix<R>) -> Result<Vec<R>, Error> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::Shape(format!("{}x{} matrix for {}", m.rows(), m.cols(), self.name)));
        }
        let values = self.pairings_with_basis(m);
        let coords: Vec<R> = (0..self.dim())
            .map(|a| {
                values.iter().enumerate().fold(R::zero(), |acc, (b, v)| {
                    let g = &self.gram_inv[(a, b)];
                    if g.is_zero() { acc } else { acc + R::from_gauss(g) * v.clone() }
                })
            })
            .collect();
        if self.combine(&coords) != *m {
            return Err(Error::NotInAlgebra);
        }
        Ok(coords)
    }

    pub fn contains<R: Ring>(&self, m: &Matrix<R>) -> bool {
        self.coordinates(m).is_ok()
    }
}

/// An element of the loop algebra `g(D^x)`: a matrix of rational functions in the span of the basis.
#[derive(Clone, PartialEq, Debug)]
pub struct LoopAlgebraElement(pub Matrix<RatFunc>);

/// A coadjoint element, represented through the trace pairing `<phi, xi> = tr(phi * xi)`.
#[derive(Clone, PartialEq, Debug)]
pub struct CoadjointElement(pub Matrix<RatFunc>);

impl LoopAlgebraElement {
    pub fn new(alg: &MatrixLieAlgebra, mat: Matrix<RatFunc>) -> Result<Self, Error> {
        alg.coordinates(&mat)?;
        Ok(LoopAlgebraElement(mat))
    }

    pub fn zero(n: usize) -> Self {
        LoopAlgebraElement(Matrix::zeros(n, n))
    }

    pub fn mat(&self) -> &Matrix<RatFunc> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn scale(&self, f: &RatFunc) -> Self {
        LoopAlgebraElement(self.0.scale(f))
    }

    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        Ok(LoopAlgebraElement(self.0.try_add(&o.0)?))
    }

    /// Order of the worst pole at 0 among the entries (0 when regular).
    pub fn pole_order(&self) -> i64 {
        pole_order(&self.0)
    }
}

impl CoadjointElement {
    pub fn new(alg: &MatrixLieAlgebra, mat: Matrix<RatFunc>) -> Result<Self, Error> {
        alg.coordinates(&mat)?;
        Ok(CoadjointElement(mat))
    }

    pub fn zero(n: usize) -> Self {
        CoadjointElement(Matrix::zeros(n, n))
    }

    pub fn mat(&self) -> &Matrix<RatFunc> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn scale(&self, f: &RatFunc) -> Self {
        CoadjointElement(self.0.scale(f))
    }

    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        Ok(CoadjointElement(self.0.try_add(&o.0)?))
    }

    pub fn pole_order(&self) -> i64 {
        pole_order(&self.0)
    }
}

pub(crate) fn pole_order(m: &Matrix<RatFunc>) -> i64 {
    m.entries().iter().filter_map(RatFunc::valuation).map(|v| (-v).max(0)).max().unwrap_or(0)
}

/// `[x, y] = xy - yx`.
pub fn bracket(x: &LoopAlgebraElement, y: &LoopAlgebraElement) -> Result<LoopAlgebraElement, Error> {
    Ok(LoopAlgebraElement(x.0.commutator(&y.0)?))
}

/// `<phi, xi> = tr(phi * xi)`.
pub fn pairing(phi: &CoadjointElement, xi: &LoopAlgebraElement) -> Result<RatFunc, Error> {
    trace_product(&phi.0, &xi.0)
}

pub(crate) fn trace_product<R: Ring>(a: &Matrix<R>, b: &Matrix<R>) -> Result<R, Error> {
    if a.cols() != b.rows() || a.rows() != b.cols() {
        return Err(Error::Shape(format!("tr of {}x{} * {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    let mut acc = R::zero();
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            let (x, y) = (&a[(i, k)], &b[(k, i)]);
            if !x.is_zero() && !y.is_zero() {
                acc = acc + x.clone() * y.clone();
            }
        }
    }
    Ok(acc)
}

/// An element of the loop group `SL_n(D^x)` with its inverse cached.
#[derive(Clone, PartialEq, Debug)]
pub struct LoopGroupElement {
    mat: Matrix<RatFunc>,
    inv: Matrix<RatFunc>,
}

impl LoopGroupElement {
    /// Checks `det = 1` identically; the inverse is the adjugate.
    pub fn new(mat: Matrix<RatFunc>) -> Result<Self, Error> {
        if !mat.is_square() {
            return Err(Error::Shape("group element must be square".into()));
        }
        let det = mat.det()?;
        if !det.is_one() {
            return Err(Error::validation("cocycle", format!("determinant is {det}, expected 1")));
        }
        let inv = mat.adjugate()?;
        Ok(LoopGroupElement { mat, inv })
    }

    pub fn identity(n: usize) -> Self {
        LoopGroupElement { mat: Matrix::identity(n), inv: Matrix::identity(n) }
    }

    /// `I + f * E_jk` for `j != k`.
    pub fn elementary(n: usize, j: usize, k: usize, f: RatFunc) -> Result<Self, Error> {
        if j == k || j >= n || k >= n {
            return Err(Error::Shape(format!("elementary generator e_({j},{k}) in SL_{n}")));
        }
        let mut mat = Matrix::identity(n);
        mat[(j, k)] = f.clone();
        let mut inv = Matrix::identity(n);
        inv[(j, k)] = -f;
        Ok(LoopGroupElement { mat, inv })
    }

    /// `diag(u^a_1, ..., u^a_n)` with `sum a = 0`.
    pub fn torus(exponents: &[i64]) -> Result<Self, Error> {
        if exponents.iter().sum::<i64>() != 0 {
            return Err(Error::validation("cocycle", "torus exponents must sum to zero"));
        }
        let d = |s: i64| exponents.iter().map(|&a| RatFunc::monomial(GaussRat::one(), s * a)).collect();
        Ok(LoopGroupElement { mat: Matrix::diagonal(d(1)), inv: Matrix::diagonal(d(-1)) })
    }

    /// Product of generators in order.
    pub fn word(n: usize, factors: &[LoopGroupElement]) -> Result<Self, Error> {
        factors.iter().try_fold(LoopGroupElement::identity(n), |acc, f| acc.mul(f))
    }

    pub fn mul(&self, o: &Self) -> Result<Self, Error> {
        Ok(LoopGroupElement { mat: self.mat.try_mul(&o.mat)?, inv: o.inv.try_mul(&self.inv)? })
    }

    pub fn inverse(&self) -> Self {
        LoopGroupElement { mat: self.inv.clone(), inv: self.mat.clone() }
    }

    pub fn mat(&self) -> &Matrix<RatFunc> {
        &self.mat
    }

    pub fn inv_mat(&self) -> &Matrix<RatFunc> {
        &self.inv
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    /// `g^-1 xi g`.
    pub fn conjugate_inv(&self, xi: &Matrix<RatFunc>) -> Result<Matrix<RatFunc>, Error> {
        self.inv.try_mul(xi)?.try_mul(&self.mat)
    }

    /// `g xi g^-1`.
    pub fn conjugate(&self, xi: &Matrix<RatFunc>) -> Result<Matrix<RatFunc>, Error> {
        self.mat.try_mul(xi)?.try_mul(&self.inv)
    }
}

/// Coadjoint transition `g^-1 * phi * g`.
pub fn coadjoint_transition(g: &LoopGroupElement, phi: &CoadjointElement) -> Result<CoadjointElement, Error> {
    Ok(CoadjointElement(g.conjugate_inv(&phi.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_ratfunc;

    fn sl2() -> MatrixLieAlgebra {
        MatrixLieAlgebra::sl(2)
    }

    fn gen(label: &str) -> LoopAlgebraElement {
        sl2().generator(label).unwrap()
    }

    fn u(s: &str) -> RatFunc {
        parse_ratfunc(s, "u").unwrap()
    }

    #[test]
    fn sl2_relations() {
        assert_eq!(bracket(&gen("E"), &gen("F")).unwrap(), gen("H"));
        assert_eq!(bracket(&gen("H"), &gen("E")).unwrap(), gen("E").scale(&RatFunc::from_int(2)));
        let x = gen("E").scale(&u("u"));
        let y = gen("F").scale(&u("1/u"));
        assert_eq!(bracket(&x, &y).unwrap(), gen("H"));
    }

    #[test]
    fn trace_pairing() {
        let co = |l: &str| CoadjointElement(gen(l).0);
        assert_eq!(pairing(&co("E"), &gen("F")).unwrap(), RatFunc::from_int(1));
        assert_eq!(pairing(&co("H"), &gen("H")).unwrap(), RatFunc::from_int(2));
        assert_eq!(pairing(&co("E"), &gen("E")).unwrap(), RatFunc::zero());
    }

    #[test]
    fn coadjoint_by_torus() {
        let g = LoopGroupElement::torus(&[-1, 1]).unwrap();
        let e = CoadjointElement(gen("E").0);
        assert_eq!(coadjoint_transition(&g, &e).unwrap(), e.scale(&u("u^2")));
        assert_eq!(coadjoint_transition(&LoopGroupElement::identity(2), &e).unwrap(), e);
    }

    #[test]
    fn dualize_solves_gram_system() {
        // Gram matrix of (E, H, F) is [[0,0,1],[0,2,0],[1,0,0]]; solving by hand:
        // values (0,0,1) -> M = E, values (1,0,0) -> M = F
        let alg = sl2();
        let v = |a: i64, b: i64, c: i64| vec![RatFunc::from_int(a), RatFunc::from_int(b), RatFunc::from_int(c)];
        assert_eq!(alg.dualize(&v(0, 0, 1)).unwrap(), gen("E").0);
        assert_eq!(alg.dualize(&v(1, 0, 0)).unwrap(), gen("F").0);
        assert!(alg.dualize(&v(0, 0, 0)).unwrap().is_zero());
    }

    #[test]
    fn degenerate_gram_rejected() {
        // strictly upper triangular matrices pair to zero with each other
        let mut e = Matrix::zeros(2, 2);
        e[(0, 1)] = GaussRat::one();
        let err = MatrixLieAlgebra::new("n", vec!["E".into()], vec![e]).unwrap_err();
        assert_eq!(err, Error::DegeneratePairing);
    }

    #[test]
    fn membership() {
        let alg = MatrixLieAlgebra::sl(3);
        assert_eq!(alg.dim(), 8);
        assert!(alg.contains(&Matrix::<RatFunc>::identity(3).scale(&RatFunc::zero())));
        assert!(!alg.contains(&Matrix::<RatFunc>::identity(3)));
        let g = LoopGroupElement::elementary(3, 0, 2, u("u^-2 + 3")).unwrap();
        let h = LoopGroupElement::torus(&[2, -1, -1]).unwrap();
        let p = g.mul(&h).unwrap();
        assert!(p.mat().det().unwrap().is_one());
        assert_eq!(p.mat().try_mul(p.inv_mat()).unwrap(), Matrix::identity(3));
        assert_eq!(LoopGroupElement::new(p.mat().clone()).unwrap(), p);
    }
}
