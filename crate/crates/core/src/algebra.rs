//! Lie algebras given by structure constants `[e_i, e_j] = Σ_k c[i][j][k] e_k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{vecops, Matrix};
use crate::scalar::{Rational, Scalar};

/// Default absolute tolerance for "zero" in floating-point mode.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Max-norm of a family of defect vectors, with the first index tuple
/// where it is attained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    pub worst: Vec<usize>,
    /// Every defect component is exactly zero.
    pub exact_zero: bool,
    /// Computed in exact arithmetic.
    pub exact: bool,
}

impl Residual {
    pub(crate) fn new(exact: bool) -> Self {
        Residual {
            value: 0.0,
            worst: Vec::new(),
            exact_zero: true,
            exact,
        }
    }

    pub(crate) fn record<S: Scalar>(&mut self, index: &[usize], defect: &[S]) {
        let norm = vecops::norm_f64(defect);
        if !vecops::is_zero(defect) {
            self.exact_zero = false;
        }
        if self.worst.is_empty() || norm > self.value {
            self.value = norm;
            self.worst = index.to_vec();
        }
    }

    pub(crate) fn record_scalar<S: Scalar>(&mut self, index: &[usize], value: &S) {
        self.record(index, std::slice::from_ref(value))
    }

    /// Zero in exact mode, `≤ tol` otherwise.
    pub fn vanishes(&self, tol: f64) -> bool {
        if self.exact {
            self.exact_zero
        } else {
            self.value <= tol
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra<S> {
    dim: usize,
    // c[(i * dim + j) * dim + k]
    c: Vec<S>,
}

impl<S: Scalar> LieAlgebra<S> {
    pub fn abelian(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        LieAlgebra {
            dim,
            c: vec![S::zero(); dim * dim * dim],
        }
    }

    /// Builds from the brackets `[e_i, e_j]` with `i < j` (0-based); the
    /// rest of the tensor is filled in by antisymmetry. Unlisted pairs are zero.
    pub fn from_brackets<I>(dim: usize, brackets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Vec<S>)>,
    {
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        let mut alg = Self::abelian(dim);
        let mut seen = vec![false; dim * dim];
        for (i, j, v) in brackets {
            if i >= j || j >= dim {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket indices must satisfy i < j <= dim, got ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if std::mem::replace(&mut seen[i * dim + j], true) {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket [e{}, e{}] listed twice",
                    i + 1,
                    j + 1
                )));
            }
            for (k, x) in v.into_iter().enumerate() {
                alg.c[(j * dim + i) * dim + k] = -x.clone();
                alg.c[(i * dim + j) * dim + k] = x;
            }
        }
        Ok(alg)
    }

    /// Builds from a full tensor, rejecting it unless it is antisymmetric.
    pub fn from_tensor(dim: usize, c: Vec<S>) -> Result<Self> {
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        let alg = LieAlgebra { dim, c };
        for i in 0..dim {
            for j in i..dim {
                for k in 0..dim {
                    let s = alg.constant(i, j, k).clone() + alg.constant(j, i, k).clone();
                    let bad = if S::EXACT {
                        !s.is_zero()
                    } else {
                        s.magnitude() > DEFAULT_TOL
                    };
                    if bad {
                        return Err(Error::InvalidAlgebra(format!(
                            "structure constants not antisymmetric at ({}, {}, {})",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &S {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Coordinates of `[e_i, e_j]`.
    pub fn basis_bracket(&self, i: usize, j: usize) -> &[S] {
        let n = self.dim;
        &self.c[(i * n + j) * n..(i * n + j + 1) * n]
    }

    pub fn tensor(&self) -> &[S] {
        &self.c
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(Scalar::is_zero)
    }

    fn check_dim(&self, v: &[S]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn bracket(&self, u: &[S], v: &[S]) -> Result<Vec<S>> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        Ok(self.bracket_unchecked(u, v))
    }

    pub(crate) fn bracket_unchecked(&self, u: &[S], v: &[S]) -> Vec<S> {
        let n = self.dim;
        let mut out = vec![S::zero(); n];
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() || i == j {
                    continue;
                }
                let w = ui.clone() * vj.clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        *o = o.clone() + w.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// Max-norm of `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`
    /// over all basis triples.
    pub fn jacobi_residual(&self) -> Residual {
        let n = self.dim;
        let mut res = Residual::new(S::EXACT);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let e = |t| vecops::basis::<S>(n, t);
                    let a = self.bracket_unchecked(self.basis_bracket(i, j), &e(k));
                    let b = self.bracket_unchecked(self.basis_bracket(j, k), &e(i));
                    let c = self.bracket_unchecked(self.basis_bracket(k, i), &e(j));
                    res.record(&[i, j, k], &vecops::add(&vecops::add(&a, &b), &c));
                }
            }
        }
        res
    }

    /// Satisfies the Jacobi identity (exactly, or within `tol` for floats).
    pub fn is_lie(&self, tol: f64) -> bool {
        self.jacobi_residual().vanishes(tol)
    }

    /// Matrix of `ad_u = [u, ·]`; column `j` is `[u, e_j]`.
    pub fn adjoint_matrix(&self, u: &[S]) -> Result<Matrix<S>> {
        self.check_dim(u)?;
        let n = self.dim;
        let cols: Vec<Vec<S>> = (0..n)
            .map(|j| self.bracket_unchecked(u, &vecops::basis(n, j)))
            .collect();
        Ok(Matrix::from_columns(&cols))
    }

    /// Traces of `ad_{e_i}` for every basis vector.
    pub fn adjoint_traces(&self) -> Vec<S> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).fold(S::zero(), |acc, j| acc + self.constant(i, j, j).clone()))
            .collect()
    }

    pub fn unimodularity(&self, tol: f64) -> Unimodularity<S> {
        let traces = self.adjoint_traces();
        let unimodular = traces
            .iter()
            .all(|t| if S::EXACT { t.is_zero() } else { t.magnitude() <= tol });
        Unimodularity { unimodular, traces }
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        self.unimodularity(tol).unimodular
    }

    /// Basis of the center: the common null space of all `ad_{e_i}`.
    pub fn center(&self, tol: f64) -> Vec<Vec<S>> {
        let n = self.dim;
        let rows: Vec<Vec<S>> = (0..n)
            .flat_map(|i| {
                let ad = self
                    .adjoint_matrix(&vecops::basis(n, i))
                    .expect("basis vector has the right length");
                ad.to_rows()
            })
            .collect();
        Matrix::from_rows(rows)
            .expect("rows have equal length")
            .nullspace(tol)
    }

    /// Structure constants in the basis `f_j = Σ_i P[i][j] e_i`
    /// (the columns of `p`).
    pub fn change_basis(&self, p: &Matrix<S>) -> Result<Self> {
        let n = self.dim;
        if p.rows() != n || p.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.rows(),
            });
        }
        let p_inv = p
            .inverse()
            .ok_or_else(|| Error::InvalidAlgebra("basis change is singular".into()))?;
        let cols: Vec<Vec<S>> = (0..n).map(|j| p.column(j)).collect();
        let mut c = vec![S::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                let br = self.bracket_unchecked(&cols[i], &cols[j]);
                let coords = p_inv.mul_vec(&br);
                for (k, v) in coords.into_iter().enumerate() {
                    c[(i * n + j) * n + k] = v;
                }
            }
        }
        Ok(LieAlgebra { dim: n, c })
    }

    /// Same algebra with every structure constant multiplied by `s`.
    pub fn scaled(&self, s: &S) -> Self {
        LieAlgebra {
            dim: self.dim,
            c: self.c.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    /// Direct sum `self ⊕ other`, basis of `self` first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let d = n + m;
        let mut c = vec![S::zero(); d * d * d];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    c[(i * d + j) * d + k] = self.constant(i, j, k).clone();
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    c[((i + n) * d + j + n) * d + k + n] = other.constant(i, j, k).clone();
                }
            }
        }
        LieAlgebra { dim: d, c }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LieAlgebra<T> {
        LieAlgebra {
            dim: self.dim,
            c: self.c.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> LieAlgebra<f64> {
        self.map(Scalar::to_f64)
    }

    /// Pairs `(i, j, [e_i, e_j])` with `i < j` and a nonzero bracket.
    pub fn nonzero_brackets(&self) -> Vec<(usize, usize, Vec<S>)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = self.basis_bracket(i, j);
                if !vecops::is_zero(v) {
                    out.push((i, j, v.to_vec()));
                }
            }
        }
        out
    }
}

impl LieAlgebra<f64> {
    /// Exact lift of the binary values of the constants.
    pub fn to_rational(&self) -> LieAlgebra<Rational> {
        self.map(|x| Rational::from_f64(*x).expect("finite structure constant"))
    }
}

impl LieAlgebra<Rational> {
    pub fn convert<T: Scalar>(&self) -> LieAlgebra<T> {
        self.map(T::from_rational)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Unimodularity<S> {
    pub unimodular: bool,
    pub traces: Vec<S>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::ratio;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_i64(x)).collect()
    }

    #[test]
    fn heisenberg_bracket() {
        let h = catalog::heisenberg();
        assert_eq!(h.bracket(&q(&[1, 0, 0]), &q(&[0, 1, 0])).unwrap(), q(&[0, 0, 1]));
        assert_eq!(h.bracket(&q(&[0, 1, 0]), &q(&[1, 0, 0])).unwrap(), q(&[0, 0, -1]));
    }

    #[test]
    fn family_bracket() {
        let f = catalog::family(ratio(1, 1), ratio(2, 1), ratio(3, 1));
        // [e1, e3] = γ e2 − α e3
        assert_eq!(f.bracket(&q(&[1, 0, 0]), &q(&[0, 0, 1])).unwrap(), q(&[0, 3, -1]));
    }

    #[test]
    fn abelian_bracket_vanishes() {
        let a = LieAlgebra::<Rational>::abelian(4);
        assert_eq!(a.bracket(&q(&[1, 2, 3, 4]), &q(&[-1, 5, 0, 2])).unwrap(), q(&[0, 0, 0, 0]));
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let h = catalog::heisenberg();
        assert!(matches!(
            h.bracket(&q(&[1, 0]), &q(&[0, 1, 0])),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn construction_rejects_bad_indices() {
        assert!(LieAlgebra::<Rational>::from_brackets(2, vec![(1, 0, q(&[1, 0]))]).is_err());
        assert!(LieAlgebra::<Rational>::from_brackets(2, vec![(0, 1, q(&[1]))]).is_err());
        assert!(LieAlgebra::<Rational>::from_brackets(
            2,
            vec![(0, 1, q(&[1, 0])), (0, 1, q(&[0, 1]))]
        )
        .is_err());
    }

    #[test]
    fn from_tensor_checks_antisymmetry() {
        let at = |i: usize, j: usize, k: usize| (i * 2 + j) * 2 + k;
        let mut c = vec![0.0; 8];
        c[at(0, 1, 1)] = 1.0;
        assert!(LieAlgebra::from_tensor(2, c.clone()).is_err());
        c[at(1, 0, 1)] = -1.0;
        assert!(LieAlgebra::from_tensor(2, c).is_ok());
    }

    #[test]
    fn jacobi_on_catalog_and_mutants() {
        assert!(LieAlgebra::<Rational>::abelian(5).jacobi_residual().exact_zero);
        assert!(catalog::heisenberg().jacobi_residual().exact_zero);
        // [e1,e2]=e3 and [e1,e3]=e2 is still a Lie algebra
        let ok = LieAlgebra::from_brackets(3, vec![(0, 1, q(&[0, 0, 1])), (0, 2, q(&[0, 1, 0]))]).unwrap();
        assert!(ok.jacobi_residual().exact_zero);
        // adding [e2,e3]=e2 to the Heisenberg brackets breaks Jacobi
        let bad = LieAlgebra::from_brackets(3, vec![(0, 1, q(&[0, 0, 1])), (1, 2, q(&[0, 1, 0]))]).unwrap();
        let r = bad.jacobi_residual();
        assert!(!r.exact_zero);
        assert!(r.value > 0.0);
    }

    #[test]
    fn adjoint_matrices() {
        let h = catalog::heisenberg();
        let ad = h.adjoint_matrix(&q(&[1, 0, 0])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if (i, j) == (2, 1) { 1 } else { 0 };
                assert_eq!(ad[(i, j)], Rational::from_i64(expect));
            }
        }
        let (a, b, g) = (ratio(2, 3), ratio(-5, 1), ratio(7, 2));
        let f = catalog::family(a.clone(), b.clone(), g.clone());
        let ad = f.adjoint_matrix(&q(&[1, 0, 0])).unwrap();
        assert_eq!(ad[(1, 1)], a.clone());
        assert_eq!(ad[(1, 2)], g);
        assert_eq!(ad[(2, 1)], b);
        assert_eq!(ad[(2, 2)], -a);
        assert!(LieAlgebra::<Rational>::abelian(3)
            .adjoint_matrix(&q(&[1, 2, 3]))
            .unwrap()
            .to_rows()
            .iter()
            .flatten()
            .all(Scalar::is_zero));
    }

    #[test]
    fn unimodularity() {
        assert!(LieAlgebra::<Rational>::abelian(3).is_unimodular(0.0));
        let f = catalog::family(ratio(3, 1), ratio(1, 2), ratio(-1, 1));
        assert!(f.is_unimodular(0.0));
        let u = catalog::nonabelian_2d().unimodularity(0.0);
        assert!(!u.unimodular);
        assert_eq!(u.traces, q(&[1, 0]));
    }

    #[test]
    fn centers() {
        assert_eq!(catalog::heisenberg().center(0.0), vec![q(&[0, 0, 1])]);
        assert_eq!(LieAlgebra::<Rational>::abelian(2).center(0.0).len(), 2);
        assert!(catalog::family(ratio(1, 1), ratio(2, 1), ratio(-3, 1)).center(0.0).is_empty());
    }

    #[test]
    fn basis_change_round_trip() {
        let h = catalog::family(ratio(1, 1), ratio(2, 1), ratio(3, 1));
        let p = Matrix::from_rows(vec![q(&[1, 2, 0]), q(&[0, 1, 1]), q(&[1, 0, 3])]).unwrap();
        let h2 = h.change_basis(&p).unwrap();
        assert!(h2.jacobi_residual().exact_zero);
        let back = h2.change_basis(&p.inverse().unwrap()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn direct_sum_keeps_jacobi() {
        let s = catalog::heisenberg().direct_sum(&catalog::nonabelian_2d());
        assert_eq!(s.dim(), 5);
        assert!(s.jacobi_residual().exact_zero);
        assert_eq!(s.basis_bracket(3, 4), &q(&[0, 0, 0, 0, 1])[..]);
    }
}
