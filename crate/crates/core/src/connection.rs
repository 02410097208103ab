//! The torsion-free metric product `A` on a Lie algebra and the defect of
//! the compatibility condition `[A_u v, w] + [u, A_w v] = 0`.
//!
//! `A` is determined by
//!
//! ```text
//! 2 a(A_u v, w) = a([u,v], w) + a([w,u], v) + a([w,v], u)
//! ```
//!
//! and satisfies `A_u v − A_v u = [u, v]` and `a(A_u v, w) + a(v, A_u w) = 0`.

use crate::algebra::{LieAlgebra, Residual};
use crate::error::{Error, Result};
use crate::matrix::vecops;
use crate::metric::Metric;
use crate::scalar::Scalar;

/// `A[i][j][k]`: coordinates of `A_{e_i} e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionTensor<S> {
    dim: usize,
    a: Vec<S>,
}

impl<S: Scalar> ConnectionTensor<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of `A_{e_i} e_j`.
    pub fn product(&self, i: usize, j: usize) -> &[S] {
        let n = self.dim;
        &self.a[(i * n + j) * n..(i * n + j + 1) * n]
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> &S {
        &self.a[(i * self.dim + j) * self.dim + k]
    }

    /// `A_u v` by bilinearity.
    pub fn apply(&self, u: &[S], v: &[S]) -> Vec<S> {
        let n = self.dim;
        let mut out = vec![S::zero(); n];
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                let w = ui.clone() * vj.clone();
                for (o, x) in out.iter_mut().zip(self.product(i, j)) {
                    *o = o.clone() + w.clone() * x.clone();
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Scalar::is_zero)
    }

    /// Max-norm of `A_{e_i}e_j − A_{e_j}e_i − [e_i,e_j]`.
    pub fn torsion_defect(&self, alg: &LieAlgebra<S>) -> Residual {
        let n = self.dim;
        let mut res = Residual::new(S::EXACT);
        for i in 0..n {
            for j in 0..n {
                let d = vecops::sub(
                    &vecops::sub(self.product(i, j), self.product(j, i)),
                    alg.basis_bracket(i, j),
                );
                res.record(&[i, j], &d);
            }
        }
        res
    }

    /// Max of `|a(A_{e_i}e_j, e_k) + a(e_j, A_{e_i}e_k)|`.
    pub fn skew_defect(&self, metric: &Metric<S>) -> Residual {
        let n = self.dim;
        let mut res = Residual::new(S::EXACT);
        let m = metric.matrix();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = vecops::dot(self.product(i, j), &m.column(k))
                        + vecops::dot(&m.row(j), self.product(i, k));
                    res.record_scalar(&[i, j, k], &lhs);
                }
            }
        }
        res
    }

    /// Structure in the basis given by the columns of `p` (for testing
    /// naturality under basis change).
    pub fn change_basis(&self, p: &crate::matrix::Matrix<S>) -> Result<Self> {
        let n = self.dim;
        let p_inv = p
            .inverse()
            .ok_or_else(|| Error::InvalidAlgebra("basis change is singular".into()))?;
        let cols: Vec<Vec<S>> = (0..n).map(|j| p.column(j)).collect();
        let mut a = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                a.extend(p_inv.mul_vec(&self.apply(&cols[i], &cols[j])));
            }
        }
        Ok(ConnectionTensor { dim: n, a })
    }
}

/// Solves the defining linear system for every pair of basis vectors.
pub fn levi_civita_product<S: Scalar>(
    alg: &LieAlgebra<S>,
    metric: &Metric<S>,
) -> Result<ConnectionTensor<S>> {
    let n = alg.dim();
    if metric.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: metric.dim(),
        });
    }
    let two_a = metric.matrix().scale(&S::from_i64(2));
    let lu = two_a
        .lu()
        .ok_or_else(|| Error::DegenerateMetric("defining system is singular".into()))?;
    let m = metric.matrix();
    // ca[(i*n + j)*n + w] = a([e_i, e_j], e_w)
    let mut ca = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            let br = alg.basis_bracket(i, j);
            for w in 0..n {
                let mut acc = S::zero();
                for (k, c) in br.iter().enumerate() {
                    if !c.is_zero() {
                        acc = acc + c.clone() * m[(k, w)].clone();
                    }
                }
                ca.push(acc);
            }
        }
    }
    let at = |i: usize, j: usize, w: usize| ca[(i * n + j) * n + w].clone();
    let mut a = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            let rhs: Vec<S> = (0..n)
                .map(|w| at(i, j, w) + at(w, i, j) + at(w, j, i))
                .collect();
            if vecops::is_zero(&rhs) {
                a.extend(std::iter::repeat_n(S::zero(), n));
            } else {
                a.extend(lu.solve(&rhs));
            }
        }
    }
    Ok(ConnectionTensor { dim: n, a })
}

/// Defect vectors `[A_{e_i}e_j, e_k] + [e_i, A_{e_k}e_j]`, flattened in
/// `(i, j, k, component)` order.
pub fn compatibility_defects<S: Scalar>(alg: &LieAlgebra<S>, conn: &ConnectionTensor<S>) -> Vec<S> {
    let n = alg.dim();
    let mut out = Vec::with_capacity(n * n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.extend(triple_defect(alg, conn, i, j, k));
            }
        }
    }
    out
}

fn triple_defect<S: Scalar>(
    alg: &LieAlgebra<S>,
    conn: &ConnectionTensor<S>,
    i: usize,
    j: usize,
    k: usize,
) -> Vec<S> {
    let n = alg.dim();
    let first = alg.bracket_unchecked(conn.product(i, j), &vecops::basis(n, k));
    let second = alg.bracket_unchecked(&vecops::basis(n, i), conn.product(k, j));
    vecops::add(&first, &second)
}

/// Max over basis triples `(u, v, w) = (e_i, e_j, e_k)` of the Euclidean
/// norm of `[A_u v, w] + [u, A_w v]`; `worst` is the first maximizing triple.
pub fn pr_residual<S: Scalar>(alg: &LieAlgebra<S>, metric: &Metric<S>) -> Result<Residual> {
    let conn = levi_civita_product(alg, metric)?;
    Ok(pr_residual_of(alg, &conn))
}

pub fn pr_residual_of<S: Scalar>(alg: &LieAlgebra<S>, conn: &ConnectionTensor<S>) -> Residual {
    let n = alg.dim();
    let mut res = Residual::new(S::EXACT);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                res.record(&[i, j, k], &triple_defect(alg, conn, i, j, k));
            }
        }
    }
    res
}

/// Norm of the single defect `[A_{e_i}e_j, e_k] + [e_i, A_{e_k}e_j]`.
pub fn triple_residual<S: Scalar>(alg: &LieAlgebra<S>, conn: &ConnectionTensor<S>, i: usize, j: usize, k: usize) -> Vec<S> {
    triple_defect(alg, conn, i, j, k)
}

/// Compatibility: zero residual (exact) or residual `≤ tol` (float).
pub fn is_pseudo_riemannian<S: Scalar>(
    alg: &LieAlgebra<S>,
    metric: &Metric<S>,
    tol: f64,
) -> Result<bool> {
    Ok(pr_residual(alg, metric)?.vanishes(tol))
}
