//! Nondegenerate symmetric bilinear forms and their inertia.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Lu, Matrix};
use crate::scalar::{Rational, Scalar};

/// Float metrics are degenerate when `σ_min < DEGENERACY_RATIO · σ_max`.
pub const DEGENERACY_RATIO: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn riemannian(n: usize) -> Self {
        Signature { p: n, q: 0 }
    }

    pub fn is_definite(&self) -> bool {
        self.p == 0 || self.q == 0
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metric<S> {
    a: Matrix<S>,
}

impl<S: Scalar> Metric<S> {
    /// Validates symmetry (exact for rationals, to 1e-12 relative for floats)
    /// and nondegeneracy.
    pub fn new(a: Matrix<S>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSymmetric);
        }
        let n = a.rows();
        let scale = a.max_abs();
        for i in 0..n {
            for j in 0..i {
                let d = a[(i, j)].clone() - a[(j, i)].clone();
                let asym = if S::EXACT {
                    !d.is_zero()
                } else {
                    d.magnitude() > 1e-12 * scale
                };
                if asym {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        if let Some(why) = degeneracy(&a) {
            return Err(Error::DegenerateMetric(why));
        }
        Ok(Metric { a })
    }

    /// Skips validation; used for probes inside the optimizer.
    pub fn new_unchecked(a: Matrix<S>) -> Self {
        Metric { a }
    }

    pub fn identity(n: usize) -> Self {
        Metric {
            a: Matrix::identity(n),
        }
    }

    pub fn diagonal(d: &[S]) -> Result<Self> {
        let n = d.len();
        Self::new(Matrix::from_fn(n, n, |i, j| {
            if i == j {
                d[i].clone()
            } else {
                S::zero()
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.a
    }

    pub fn entry(&self, i: usize, j: usize) -> &S {
        &self.a[(i, j)]
    }

    /// `a(u, v)`.
    pub fn pair(&self, u: &[S], v: &[S]) -> S {
        self.a.bilinear(u, v)
    }

    pub fn lu(&self) -> Result<Lu<S>> {
        self.a
            .lu()
            .ok_or_else(|| Error::DegenerateMetric("singular matrix".into()))
    }

    pub fn scaled(&self, s: &S) -> Self {
        Metric {
            a: self.a.scale(s),
        }
    }

    /// The metric in the basis given by the columns of `p`: `Pᵀ a P`.
    pub fn change_basis(&self, p: &Matrix<S>) -> Self {
        Metric {
            a: p.transpose().mul(&self.a).mul(p),
        }
    }

    pub fn to_f64(&self) -> Metric<f64> {
        Metric {
            a: self.a.to_f64(),
        }
    }

    pub fn signature(&self) -> Result<Signature> {
        signature(&self.a)
    }
}

impl Metric<Rational> {
    pub fn convert<T: Scalar>(&self) -> Metric<T> {
        Metric {
            a: self.a.map(T::from_rational),
        }
    }
}

/// Why `a` counts as degenerate, if it does.
pub fn degeneracy<S: Scalar>(a: &Matrix<S>) -> Option<String> {
    if S::EXACT {
        if a.determinant().is_zero() {
            return Some("determinant is zero".into());
        }
        return None;
    }
    let sv = a.to_nalgebra().singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || !(min >= DEGENERACY_RATIO * max) {
        return Some(format!(
            "singular values range over [{min:e}, {max:e}], below ratio {DEGENERACY_RATIO:e}"
        ));
    }
    None
}

/// Sylvester inertia of a symmetric matrix.
///
/// Exact scalars use Descartes' rule of signs on the characteristic
/// polynomial, which is exact because every root is real. Floats use a
/// symmetric eigendecomposition with the degeneracy threshold.
pub fn signature<S: Scalar>(a: &Matrix<S>) -> Result<Signature> {
    if !a.is_square() {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    if S::EXACT {
        let cp = a.characteristic_polynomial();
        if cp[0].is_zero() {
            return Err(Error::DegenerateMetric("zero eigenvalue".into()));
        }
        let sign_changes = |alternate: bool| {
            let signs: Vec<bool> = cp
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| {
                    let neg = c.to_f64() < 0.0;
                    if alternate && k % 2 == 1 {
                        !neg
                    } else {
                        neg
                    }
                })
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let p = sign_changes(false);
        let q = sign_changes(true);
        debug_assert_eq!(p + q, n);
        return Ok(Signature { p, q });
    }
    let eig = nalgebra::SymmetricEigen::new(a.to_nalgebra());
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut p = 0;
    let mut q = 0;
    for &l in eig.eigenvalues.iter() {
        if !(l.abs() >= DEGENERACY_RATIO * max) || max == 0.0 {
            return Err(Error::DegenerateMetric(format!("eigenvalue {l:e}")));
        }
        if l > 0.0 {
            p += 1;
        } else {
            q += 1;
        }
    }
    Ok(Signature { p, q })
}
