//! Least-squares objectives for the metric search.
//!
//! [`compat_objective`] is the plain sum of squared compatibility defects of
//! the decoded metric. It can be driven towards zero by metrics that
//! approach degeneracy, so the search minimises [`FrameObjective`] instead:
//! the metric is written as `a = Q^{-T} η Q^{-1}` with `η = diag(1_p, −1_q)`,
//! the algebra is moved to the frame `Q`, and the defects there are divided
//! by the squared norm of the moved structure constants. The quotient is
//! invariant under rescaling of the frame, and its zero set is exactly the
//! set of compatible metrics.

use crate::algebra::LieAlgebra;
use crate::connection::{compatibility_defects, levi_civita_product};
use crate::matrix::Matrix;
use crate::metric::{degeneracy, Metric, Signature};
use crate::scalar::{Jet, Real};

/// Value reported for probes that decode to a degenerate metric.
pub const PENALTY: f64 = 1e6;

/// How a parameter vector encodes a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parametrization {
    /// `a = C Cᵀ`, `C` lower triangular with diagonal `exp(θ_ii)`;
    /// parameters in row-major lower-triangle order.
    Cholesky,
    /// Upper triangle of `a`, row-major.
    Symmetric,
}

impl Parametrization {
    pub fn len(self, n: usize) -> usize {
        n * (n + 1) / 2
    }

    pub fn decode<R: Real>(self, n: usize, theta: &[R]) -> Matrix<R> {
        assert_eq!(theta.len(), self.len(n));
        match self {
            Parametrization::Cholesky => {
                let c = lower_factor(n, theta);
                c.mul(&c.transpose())
            }
            Parametrization::Symmetric => {
                let mut a = Matrix::zeros(n, n);
                let mut k = 0;
                for i in 0..n {
                    for j in i..n {
                        a[(i, j)] = theta[k].clone();
                        a[(j, i)] = theta[k].clone();
                        k += 1;
                    }
                }
                a
            }
        }
    }
}

fn lower_factor<R: Real>(n: usize, theta: &[R]) -> Matrix<R> {
    let mut c = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in 0..=i {
            c[(i, j)] = if i == j { theta[k].exp() } else { theta[k].clone() };
            k += 1;
        }
    }
    c
}

fn frobenius<R: Real>(m: &Matrix<R>) -> R {
    let mut s = R::zero();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            s = s + m[(i, j)].square();
        }
    }
    s.sqrt()
}

fn lift<R: Real>(alg: &LieAlgebra<f64>) -> LieAlgebra<R> {
    alg.map(|x| R::from_f64(*x).expect("finite structure constant"))
}

fn jets(theta: &[f64]) -> Vec<Jet> {
    theta
        .iter()
        .enumerate()
        .map(|(i, &x)| Jet::variable(x, i, theta.len()))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveValue {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// The probe was degenerate and `value` is [`PENALTY`].
    pub penalized: bool,
}

fn raw_value<R: Real>(alg: &LieAlgebra<f64>, param: Parametrization, theta: &[R]) -> Option<R> {
    let n = alg.dim();
    let a = param.decode(n, theta);
    if degeneracy(&a.to_f64()).is_some() {
        return None;
    }
    let norm = frobenius(&a);
    let a = a.scale(&(R::one() / norm));
    let alg = lift::<R>(alg);
    let conn = levi_civita_product(&alg, &Metric::new_unchecked(a)).ok()?;
    Some(
        compatibility_defects(&alg, &conn)
            .into_iter()
            .fold(R::zero(), |s, d| s + d.square()),
    )
}

/// Sum over basis triples of `‖[A_u v, w] + [u, A_w v]‖²` for the metric
/// decoded from `theta` and scaled to unit Frobenius norm, with its
/// gradient by forward-mode differentiation.
pub fn compat_objective(alg: &LieAlgebra<f64>, param: Parametrization, theta: &[f64]) -> ObjectiveValue {
    match raw_value::<Jet>(alg, param, &jets(theta)) {
        Some(j) => ObjectiveValue {
            value: j.value,
            gradient: (0..theta.len()).map(|i| j.derivative(i)).collect(),
            penalized: false,
        },
        None => ObjectiveValue {
            value: PENALTY,
            gradient: vec![0.0; theta.len()],
            penalized: true,
        },
    }
}

/// Value only, for finite-difference checks.
pub fn compat_objective_value(alg: &LieAlgebra<f64>, param: Parametrization, theta: &[f64]) -> f64 {
    raw_value::<f64>(alg, param, theta).unwrap_or(PENALTY)
}

/// Frame parametrisation of the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    /// `Q^{-1} = Cᵀ` with `C` as in [`Parametrization::Cholesky`]; `η = I`.
    Cholesky,
    /// `Q` unconstrained (`n²` entries, row-major) with `η` of the given signature.
    General(Signature),
}

#[derive(Clone, Debug)]
pub struct FrameObjective<'a> {
    alg: &'a LieAlgebra<f64>,
    kind: FrameKind,
    floor: f64,
}

/// Decoded probe of a [`FrameObjective`].
#[derive(Clone, Debug)]
pub struct FrameEval<R> {
    /// Normalised defects, `n` components per basis triple.
    pub defects: Vec<R>,
    /// Barrier term on `|det â|`, `â = a / ‖a‖_F`.
    pub barrier: R,
    pub metric: Matrix<R>,
}

impl<'a> FrameObjective<'a> {
    pub fn new(alg: &'a LieAlgebra<f64>, kind: FrameKind, floor: f64) -> Self {
        FrameObjective { alg, kind, floor }
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        let n = self.alg.dim();
        match self.kind {
            FrameKind::Cholesky => n * (n + 1) / 2,
            FrameKind::General(_) => n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn eta<R: Real>(&self) -> Vec<R> {
        let n = self.alg.dim();
        match self.kind {
            FrameKind::Cholesky => vec![R::one(); n],
            FrameKind::General(s) => (0..n)
                .map(|i| if i < s.p { R::one() } else { -R::one() })
                .collect(),
        }
    }

    /// `(Q, Q^{-1})`, or `None` when the frame is singular.
    fn frame<R: Real>(&self, theta: &[R]) -> Option<(Matrix<R>, Matrix<R>)> {
        let n = self.alg.dim();
        match self.kind {
            FrameKind::Cholesky => {
                let q_inv = lower_factor(n, theta).transpose();
                let q = q_inv.inverse()?;
                Some((q, q_inv))
            }
            FrameKind::General(_) => {
                let q = Matrix::from_fn(n, n, |i, j| theta[i * n + j].clone());
                let q_inv = q.inverse()?;
                Some((q, q_inv))
            }
        }
    }

    pub fn evaluate<R: Real>(&self, theta: &[R]) -> Option<FrameEval<R>> {
        let n = self.alg.dim();
        let (q, q_inv) = self.frame(theta)?;
        let eta = self.eta::<R>();
        let eta_m = Matrix::from_fn(n, n, |i, j| if i == j { eta[i].clone() } else { R::zero() });
        let metric = q_inv.transpose().mul(&eta_m).mul(&q_inv);
        let moved = lift::<R>(self.alg).change_basis(&q).ok()?;
        let scale = moved.tensor().iter().fold(R::zero(), |s, c| s + c.square());
        let defects = if scale.to_f64() > 0.0 {
            let conn = levi_civita_product(&moved, &Metric::new_unchecked(eta_m)).ok()?;
            let inv = R::one() / scale;
            compatibility_defects(&moved, &conn)
                .into_iter()
                .map(|d| d * inv.clone())
                .collect()
        } else {
            vec![R::zero(); n * n * n * n]
        };
        let norm = frobenius(&metric);
        let det = metric.scale(&(R::one() / norm)).determinant().abs();
        let threshold = 10.0 * self.floor;
        let barrier = if det.to_f64() < threshold {
            (R::from_f64(threshold).unwrap() / det).ln()
        } else {
            R::zero()
        };
        Some(FrameEval { defects, barrier, metric })
    }

    /// Residual vector `[defects.., barrier]` and its Jacobian (row-major,
    /// one row per residual).
    pub fn residuals_and_jacobian(&self, theta: &[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
        let e = self.evaluate::<Jet>(&jets(theta))?;
        let rows: Vec<Jet> = e.defects.into_iter().chain(std::iter::once(e.barrier)).collect();
        if rows.iter().any(|j| !j.value.is_finite()) {
            return None;
        }
        let r = rows.iter().map(|j| j.value).collect();
        let jac = rows
            .iter()
            .map(|j| (0..theta.len()).map(|i| j.derivative(i)).collect())
            .collect();
        Some((r, jac))
    }

    pub fn residuals(&self, theta: &[f64]) -> Option<Vec<f64>> {
        let e = self.evaluate::<f64>(theta)?;
        let mut r = e.defects;
        r.push(e.barrier);
        r.iter().all(|x| x.is_finite()).then_some(r)
    }

    /// Max Euclidean norm over triples of the normalised defect.
    pub fn triple_residual(&self, theta: &[f64]) -> Option<f64> {
        let e = self.evaluate::<f64>(theta)?;
        let n = self.alg.dim();
        Some(max_chunk_norm(&e.defects, n))
    }

    pub fn metric(&self, theta: &[f64]) -> Option<Matrix<f64>> {
        self.evaluate::<f64>(theta).map(|e| e.metric)
    }
}

pub(crate) fn max_chunk_norm(v: &[f64], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    v.chunks(n)
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}
