//! The linear Lie-Poisson structure on the dual of a Lie algebra and its
//! contravariant Levi-Civita connection for a constant fiber metric.
//!
//! Coordinates `μ_k` on the dual are the linear functions `e_k`, so `dμ_k`
//! is written `de_k`. The bivector is
//!
//! ```text
//! π(de_i, de_j)(μ) = BIVECTOR_SIGN · Σ_k c_ij^k μ_k
//! ```
//!
//! and the fiber metric is `<de_i, de_j> = a_ij`. With `BIVECTOR_SIGN = 1`
//! the form bracket satisfies `[du, dv]_π = d[u, v]` and the connection
//! satisfies `D_{du} dv = d(A_u v)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::forms::{PolyOneForm, PolyVectorField};
use crate::matrix::{vecops, Matrix};
use crate::metric::Metric;
use crate::poly::{Poly, PolySpace, DEFAULT_DEGREE_CAP};
use crate::scalar::Scalar;

pub const BIVECTOR_SIGN: i64 = 1;

/// The Poisson tensor at a point.
pub fn bivector_at<S: Scalar>(alg: &LieAlgebra<S>, mu: &[S]) -> Result<Matrix<S>> {
    let n = alg.dim();
    if mu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mu.len() });
    }
    let sign = S::from_i64(BIVECTOR_SIGN);
    Ok(Matrix::from_fn(n, n, |i, j| {
        sign.clone() * vecops::dot(alg.basis_bracket(i, j), mu)
    }))
}

/// `#π(α)` at a point: the vector `v` with `β(v) = π(α, β)`.
pub fn sharp_pi<S: Scalar>(alg: &LieAlgebra<S>, mu: &[S], alpha: &[S]) -> Result<Vec<S>> {
    let pi = bivector_at(alg, mu)?;
    if alpha.len() != pi.rows() {
        return Err(Error::DimensionMismatch { expected: pi.rows(), got: alpha.len() });
    }
    Ok(pi.transpose().mul_vec(alpha))
}

/// `π` as a matrix of linear polynomials, with the form operations it induces.
#[derive(Clone, Debug)]
pub struct LiePoisson<S> {
    alg: LieAlgebra<S>,
    space: Arc<PolySpace>,
    pi: Vec<Poly<S>>,
}

impl<S: Scalar> LiePoisson<S> {
    pub fn new(alg: &LieAlgebra<S>) -> Self {
        Self::with_cap(alg, DEFAULT_DEGREE_CAP)
    }

    pub fn with_cap(alg: &LieAlgebra<S>, cap: usize) -> Self {
        let n = alg.dim();
        let space = PolySpace::new(n, cap.max(1));
        let sign = S::from_i64(BIVECTOR_SIGN);
        let mut pi = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                pi.push(Poly::linear(&space, &vecops::scale(alg.basis_bracket(i, j), &sign)));
            }
        }
        LiePoisson {
            alg: alg.clone(),
            space,
            pi,
        }
    }

    pub fn algebra(&self) -> &LieAlgebra<S> {
        &self.alg
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn space(&self) -> &Arc<PolySpace> {
        &self.space
    }

    /// `π(de_i, de_j)` as a function on the dual.
    pub fn entry(&self, i: usize, j: usize) -> &Poly<S> {
        &self.pi[i * self.dim() + j]
    }

    /// The linear function `u`.
    pub fn linear_function(&self, u: &[S]) -> Poly<S> {
        Poly::linear(&self.space, u)
    }

    /// The constant form `Σ v_i de_i`.
    pub fn constant_form(&self, v: &[S]) -> PolyOneForm<S> {
        PolyOneForm::constant(&self.space, v)
    }

    pub fn basis_form(&self, i: usize) -> PolyOneForm<S> {
        self.constant_form(&vecops::basis(self.dim(), i))
    }

    /// `(#α)^j = Σ_i α_i π(de_i, de_j)`.
    pub fn sharp(&self, alpha: &PolyOneForm<S>) -> Result<PolyVectorField<S>> {
        let n = self.dim();
        let comps = (0..n)
            .map(|j| {
                let mut acc = Poly::zero(&self.space);
                for i in 0..n {
                    let a = alpha.component(i);
                    if !a.is_zero() {
                        acc = acc.add(&a.mul(self.entry(i, j))?);
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        Ok(PolyVectorField::from_components(comps))
    }

    /// `π(α, β)`.
    pub fn pair(&self, alpha: &PolyOneForm<S>, beta: &PolyOneForm<S>) -> Result<Poly<S>> {
        beta.apply(&self.sharp(alpha)?)
    }

    /// The Hamiltonian vector field `X_f = #π(df)`.
    pub fn hamiltonian(&self, f: &Poly<S>) -> Result<PolyVectorField<S>> {
        self.sharp(&PolyOneForm::differential(f))
    }

    /// `[α, β]_π = L_{#α} β − L_{#β} α − d π(α, β)`.
    pub fn form_bracket(&self, alpha: &PolyOneForm<S>, beta: &PolyOneForm<S>) -> Result<PolyOneForm<S>> {
        let l1 = beta.lie_derivative(&self.sharp(alpha)?)?;
        let l2 = alpha.lie_derivative(&self.sharp(beta)?)?;
        let dp = PolyOneForm::differential(&self.pair(alpha, beta)?);
        Ok(l1.sub(&l2).sub(&dp))
    }
}

/// `form_bracket` without building a [`LiePoisson`] first.
pub fn form_bracket<S: Scalar>(
    alg: &LieAlgebra<S>,
    alpha: &PolyOneForm<S>,
    beta: &PolyOneForm<S>,
) -> Result<PolyOneForm<S>> {
    LiePoisson::with_cap(alg, alpha.space().cap()).form_bracket(alpha, beta)
}

/// The contravariant Levi-Civita connection of `(π, <,>)` with the constant
/// fiber metric `<de_i, de_j> = a_ij`.
#[derive(Clone, Debug)]
pub struct ContravariantConnection<S> {
    poisson: LiePoisson<S>,
    metric: Metric<S>,
    inverse: Matrix<S>,
}

impl<S: Scalar> ContravariantConnection<S> {
    pub fn new(alg: &LieAlgebra<S>, metric: &Metric<S>) -> Result<Self> {
        Self::with_cap(alg, metric, DEFAULT_DEGREE_CAP)
    }

    pub fn with_cap(alg: &LieAlgebra<S>, metric: &Metric<S>, cap: usize) -> Result<Self> {
        if metric.dim() != alg.dim() {
            return Err(Error::DimensionMismatch { expected: alg.dim(), got: metric.dim() });
        }
        let inverse = metric
            .matrix()
            .inverse()
            .ok_or_else(|| Error::DegenerateMetric("singular fiber metric".into()))?;
        Ok(ContravariantConnection {
            poisson: LiePoisson::with_cap(alg, cap),
            metric: metric.clone(),
            inverse,
        })
    }

    pub fn poisson(&self) -> &LiePoisson<S> {
        &self.poisson
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.metric
    }

    /// `<α, β>` as a function.
    pub fn inner(&self, alpha: &PolyOneForm<S>, beta: &PolyOneForm<S>) -> Result<Poly<S>> {
        let n = alpha.dim();
        let mut acc = Poly::zero(alpha.space());
        for i in 0..n {
            if alpha.component(i).is_zero() {
                continue;
            }
            let mut row = Poly::zero(alpha.space());
            for j in 0..n {
                let a = self.metric.entry(i, j);
                if !a.is_zero() {
                    row = row.add(&beta.component(j).scale(a));
                }
            }
            acc = acc.add(&alpha.component(i).mul(&row)?);
        }
        Ok(acc)
    }

    /// `D_α β` from the Koszul formula
    ///
    /// ```text
    /// 2<D_α β, γ> = #α.<β,γ> + #β.<α,γ> − #γ.<α,β>
    ///             + <[α,β]_π, γ> + <[γ,α]_π, β> + <[γ,β]_π, α>
    /// ```
    ///
    /// tested against `γ = de_k` for every `k`.
    pub fn derivative(&self, alpha: &PolyOneForm<S>, beta: &PolyOneForm<S>) -> Result<PolyOneForm<S>> {
        let p = &self.poisson;
        let n = p.dim();
        let xa = p.sharp(alpha)?;
        let xb = p.sharp(beta)?;
        let ab = p.form_bracket(alpha, beta)?;
        let ab_inner = self.inner(alpha, beta)?;
        let mut rhs = Vec::with_capacity(n);
        for k in 0..n {
            let g = p.basis_form(k);
            let xg = p.sharp(&g)?;
            let t = xa
                .derivative_of(&self.inner(beta, &g)?)?
                .add(&xb.derivative_of(&self.inner(alpha, &g)?)?)
                .sub(&xg.derivative_of(&ab_inner)?)
                .add(&self.inner(&ab, &g)?)
                .add(&self.inner(&p.form_bracket(&g, alpha)?, beta)?)
                .add(&self.inner(&p.form_bracket(&g, beta)?, alpha)?);
            rhs.push(t);
        }
        let half = S::one() / S::from_i64(2);
        let comps = (0..n)
            .map(|l| {
                let mut acc = Poly::zero(p.space());
                for (k, r) in rhs.iter().enumerate() {
                    let w = self.inverse[(l, k)].clone();
                    if !w.is_zero() {
                        acc = acc.add(&r.scale(&w));
                    }
                }
                acc.scale(&half)
            })
            .collect();
        Ok(PolyOneForm::from_components(comps))
    }

    /// `Dπ(α,β,γ) = #α.π(β,γ) − π(D_α β, γ) − π(β, D_α γ)`.
    pub fn dpi(&self, alpha: &PolyOneForm<S>, beta: &PolyOneForm<S>, gamma: &PolyOneForm<S>) -> Result<Poly<S>> {
        let p = &self.poisson;
        let lead = p.sharp(alpha)?.derivative_of(&p.pair(beta, gamma)?)?;
        Ok(lead
            .sub(&p.pair(&self.derivative(alpha, beta)?, gamma)?)
            .sub(&p.pair(beta, &self.derivative(alpha, gamma)?)?))
    }
}

/// `D_α β` without building a [`ContravariantConnection`] first.
pub fn contravariant_derivative<S: Scalar>(
    alg: &LieAlgebra<S>,
    metric: &Metric<S>,
    alpha: &PolyOneForm<S>,
    beta: &PolyOneForm<S>,
) -> Result<PolyOneForm<S>> {
    ContravariantConnection::with_cap(alg, metric, alpha.space().cap())?.derivative(alpha, beta)
}

/// Outcome of checking that a family of polynomial expressions vanishes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// Largest `|value|` over the sample points.
    pub sampled: f64,
    /// Largest `|value|` over all expressions, per sample point.
    pub per_sample: Vec<f64>,
    /// Largest coefficient magnitude over all expressions.
    pub coefficient_max: f64,
    /// Every coefficient is exactly zero.
    pub exact_zero: bool,
    /// Basis indices of the expression with the largest coefficient.
    pub worst: Vec<usize>,
    pub exact: bool,
}

impl IdentityCheck {
    fn new(exact: bool, samples: usize) -> Self {
        IdentityCheck {
            sampled: 0.0,
            per_sample: vec![0.0; samples],
            coefficient_max: 0.0,
            exact_zero: true,
            worst: Vec::new(),
            exact,
        }
    }

    fn record<S: Scalar>(&mut self, index: &[usize], p: &Poly<S>, samples: &[Vec<f64>]) {
        let c = p.max_abs_coeff();
        if !p.is_zero() {
            self.exact_zero = false;
        }
        if c > self.coefficient_max || self.worst.is_empty() {
            if c > self.coefficient_max {
                self.coefficient_max = c;
            }
            self.worst = index.to_vec();
        }
        for (x, slot) in samples.iter().zip(&mut self.per_sample) {
            let v = p.eval_f64(x).abs();
            *slot = slot.max(v);
            self.sampled = self.sampled.max(v);
        }
    }

    /// Exactly zero in exact mode; coefficients and samples `≤ tol` otherwise.
    pub fn vanishes(&self, tol: f64) -> bool {
        if self.exact {
            self.exact_zero
        } else {
            self.coefficient_max <= tol && self.sampled <= tol
        }
    }
}

/// Max of `|π(D_α df, β) + π(α, D_β df)|` over `α = de_i`, `β = de_j`,
/// `f = e_k`; zero for every sample exactly when the pair is compatible.
pub fn dpi_residual<S: Scalar>(alg: &LieAlgebra<S>, metric: &Metric<S>, samples: &[Vec<f64>]) -> Result<IdentityCheck> {
    let conn = ContravariantConnection::new(alg, metric)?;
    let p = conn.poisson();
    let n = alg.dim();
    let forms: Vec<_> = (0..n).map(|i| p.basis_form(i)).collect();
    // D_{de_i} de_k, indexed [i][k]
    let mut d = Vec::with_capacity(n * n);
    for a in &forms {
        for b in &forms {
            d.push(conn.derivative(a, b)?);
        }
    }
    let mut check = IdentityCheck::new(S::EXACT, samples.len());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let e = p.pair(&d[i * n + k], &forms[j])?.add(&p.pair(&forms[i], &d[j * n + k])?);
                check.record(&[i, j, k], &e, samples);
            }
        }
    }
    Ok(check)
}

/// Max of `|Dπ(α,β,γ) + Dπ(β,γ,α) + Dπ(γ,α,β)|` over basis triples. This is
/// `−[π,π]_S`, which vanishes for every metric.
pub fn cyclic_schouten_check<S: Scalar>(
    alg: &LieAlgebra<S>,
    metric: &Metric<S>,
    samples: &[Vec<f64>],
) -> Result<IdentityCheck> {
    let conn = ContravariantConnection::new(alg, metric)?;
    let p = conn.poisson();
    let n = alg.dim();
    let forms: Vec<_> = (0..n).map(|i| p.basis_form(i)).collect();
    let mut check = IdentityCheck::new(S::EXACT, samples.len());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b, c) = (&forms[i], &forms[j], &forms[k]);
                let e = conn.dpi(a, b, c)?.add(&conn.dpi(b, c, a)?).add(&conn.dpi(c, a, b)?);
                check.record(&[i, j, k], &e, samples);
            }
        }
    }
    Ok(check)
}

/// Discrepancy between the two sides of
/// `L_{X_f}<,>(α,β) = <D_α df, β> + <α, D_β df>` over `α = de_i`, `β = de_j`,
/// `f = e_k`. The left side is expanded as
/// `X_f.<α,β> − <L_{X_f}α, β> − <α, L_{X_f}β>`.
pub fn lie_derivative_metric_check<S: Scalar>(
    alg: &LieAlgebra<S>,
    metric: &Metric<S>,
    samples: &[Vec<f64>],
) -> Result<IdentityCheck> {
    let conn = ContravariantConnection::new(alg, metric)?;
    let p = conn.poisson();
    let n = alg.dim();
    let forms: Vec<_> = (0..n).map(|i| p.basis_form(i)).collect();
    let mut check = IdentityCheck::new(S::EXACT, samples.len());
    for k in 0..n {
        let f = p.linear_function(&vecops::basis(n, k));
        let df = PolyOneForm::differential(&f);
        let xf = p.hamiltonian(&f)?;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&forms[i], &forms[j]);
                let lhs = xf
                    .derivative_of(&conn.inner(a, b)?)?
                    .sub(&conn.inner(&a.lie_derivative(&xf)?, b)?)
                    .sub(&conn.inner(a, &b.lie_derivative(&xf)?)?);
                let rhs = conn
                    .inner(&conn.derivative(a, &df)?, b)?
                    .add(&conn.inner(a, &conn.derivative(b, &df)?)?);
                check.record(&[i, j, k], &lhs.sub(&rhs), samples);
            }
        }
    }
    Ok(check)
}

/// Value of the modular vector field on a linear function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularValue {
    pub value: f64,
    /// The metric is indefinite and the signed coframe sum was used.
    pub extension: bool,
}

/// `Σ_i ε_i <D_{α_i} du, α_i>(μ)` over a constant coframe with
/// `<α_i, α_j> = ε_i δ_ij`.
pub fn modular_field_value<S: Scalar>(
    alg: &LieAlgebra<S>,
    metric: &Metric<S>,
    u: &[S],
    mu: &[f64],
) -> Result<ModularValue> {
    let conn = ContravariantConnection::new(alg, metric)?;
    modular_value_with(&conn, u, mu)
}

pub(crate) fn modular_value_with<S: Scalar>(
    conn: &ContravariantConnection<S>,
    u: &[S],
    mu: &[f64],
) -> Result<ModularValue> {
    let p = conn.poisson();
    let n = p.dim();
    if u.len() != n || mu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.len().min(mu.len()) });
    }
    let df = p.constant_form(u);
    // b[(i, j)] = <D_{de_i} du, de_j>(μ)
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        let d = conn.derivative(&p.basis_form(i), &df)?;
        for j in 0..n {
            b[i * n + j] = conn.inner(&d, &p.basis_form(j))?.eval_f64(mu);
        }
    }
    let (coframe, signs) = pseudo_orthonormal_coframe(&conn.metric().matrix().to_f64())?;
    let mut value = 0.0;
    for (alpha, eps) in coframe.iter().zip(&signs) {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += alpha[i] * b[i * n + j] * alpha[j];
            }
        }
        value += eps * s;
    }
    Ok(ModularValue {
        value,
        extension: signs.iter().any(|&e| e < 0.0),
    })
}

/// Covectors `α_i` with `α_iᵀ a α_j = ε_i δ_ij`, from the eigenvectors of `a`.
pub fn pseudo_orthonormal_coframe(a: &Matrix<f64>) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    crate::metric::signature(a)?;
    let eig = nalgebra::SymmetricEigen::new(a.to_nalgebra());
    let n = a.rows();
    let mut frame = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    for k in 0..n {
        let l = eig.eigenvalues[k];
        let s = l.abs().sqrt();
        frame.push((0..n).map(|i| eig.eigenvectors[(i, k)] / s).collect());
        signs.push(l.signum());
    }
    Ok((frame, signs))
}

/// Lemma 3.1 on linear Casimirs: `#π(D_α du)` vanishes for every constant
/// `α` and every center element `u`. The statement needs a compatible pair
/// whose metric is nondegenerate on the kernel of the anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasimirLemmaReport {
    pub applicable: bool,
    pub reason: Option<String>,
    pub check: Option<IdentityCheck>,
}

pub fn casimir_anchor_check<S: Scalar>(
    alg: &LieAlgebra<S>,
    metric: &Metric<S>,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<CasimirLemmaReport> {
    let center = alg.center(tol);
    let mut reason = None;
    if center.is_empty() {
        reason = Some("center is trivial".to_string());
    } else if !crate::connection::is_pseudo_riemannian(alg, metric, tol)? {
        reason = Some("pair is not compatible".to_string());
    } else {
        let alg64 = alg.to_f64();
        let m64 = metric.to_f64();
        for mu in samples {
            if let Err(e) = crate::leaf::leaf_frame_at(&alg64, &m64, mu) {
                reason = Some(format!("at {mu:?}: {e}"));
                break;
            }
        }
    }
    let conn = ContravariantConnection::new(alg, metric)?;
    let p = conn.poisson();
    let mut check = IdentityCheck::new(S::EXACT, samples.len());
    for (c, u) in center.iter().enumerate() {
        let du = p.constant_form(u);
        for i in 0..alg.dim() {
            let v = p.sharp(&conn.derivative(&p.basis_form(i), &du)?)?;
            for (j, comp) in v.components().iter().enumerate() {
                check.record(&[c, i, j], comp, samples);
            }
        }
    }
    Ok(CasimirLemmaReport {
        applicable: reason.is_none(),
        reason,
        check: if center.is_empty() { None } else { Some(check) },
    })
}

/// Lemma 3.3(2) on linear Casimirs: each `e ∈ center` has `X_e = 0` and
/// `<du, dv>` is constant for every pair of center elements.
pub fn casimir_inner_products_constant<S: Scalar>(alg: &LieAlgebra<S>, metric: &Metric<S>, tol: f64) -> Result<bool> {
    let conn = ContravariantConnection::new(alg, metric)?;
    let p = conn.poisson();
    let fns: Vec<_> = alg.center(tol).iter().map(|u| p.linear_function(u)).collect();
    for f in &fns {
        if !p.hamiltonian(f)?.is_zero() {
            return Ok(false);
        }
        for g in &fns {
            let ip = conn.inner(&PolyOneForm::differential(f), &PolyOneForm::differential(g))?;
            if !ip.is_constant() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::connection::levi_civita_product;
    use crate::scalar::{ratio, Rational};

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_i64(x)).collect()
    }

    #[test]
    fn sign_convention() {
        assert_eq!(BIVECTOR_SIGN, 1);
        let h = catalog::heisenberg();
        let pi = bivector_at(&h, &q(&[0, 0, 1])).unwrap();
        assert_eq!(pi[(0, 1)], ratio(1, 1));
        assert_eq!(pi[(1, 0)], ratio(-1, 1));
        for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1), (0, 0)] {
            assert_eq!(pi[(i, j)], ratio(0, 1));
        }
        assert_eq!(pi.rank(0.0), 2);
    }

    #[test]
    fn bivector_trivial_cases() {
        let h = catalog::heisenberg();
        assert_eq!(bivector_at(&h, &q(&[0, 0, 0])).unwrap(), Matrix::zeros(3, 3));
        let a = LieAlgebra::<Rational>::abelian(3);
        assert_eq!(bivector_at(&a, &q(&[1, 2, 3])).unwrap(), Matrix::zeros(3, 3));
        assert!(bivector_at(&h, &q(&[1])).is_err());
    }

    #[test]
    fn sharp_map_matches_pairing() {
        let h = catalog::heisenberg();
        let mu = q(&[0, 0, 1]);
        let pi = bivector_at(&h, &mu).unwrap();
        let v = sharp_pi(&h, &mu, &q(&[1, 0, 0])).unwrap();
        assert_eq!(v, q(&[0, 1, 0]));
        for b in 0..3 {
            let beta = vecops::basis::<Rational>(3, b);
            assert_eq!(vecops::dot(&beta, &v), pi.bilinear(&q(&[1, 0, 0]), &beta));
        }
        assert!(vecops::is_zero(&sharp_pi(&h, &mu, &q(&[0, 0, 1])).unwrap()));
        assert!(vecops::is_zero(&sharp_pi(&h, &q(&[0, 0, 0]), &q(&[1, 2, 3])).unwrap()));
    }

    #[test]
    fn bracket_of_coordinate_differentials() {
        let h = catalog::heisenberg();
        let p = LiePoisson::new(&h);
        let b = p.form_bracket(&p.basis_form(0), &p.basis_form(1)).unwrap();
        assert_eq!(b, p.basis_form(2));
        let a = LiePoisson::new(&LieAlgebra::<Rational>::abelian(3));
        let x = a.constant_form(&q(&[1, -2, 5]));
        let y = a.constant_form(&q(&[0, 3, 1]));
        assert!(a.form_bracket(&x, &y).unwrap().is_zero());
    }

    #[test]
    fn pairing_two_ways() {
        let alg = catalog::family(ratio(1, 2), ratio(2, 1), ratio(3, 1));
        let p = LiePoisson::new(&alg);
        let mu = vec![ratio(1, 3), ratio(-2, 1), ratio(5, 7)];
        let pi = bivector_at(&alg, &mu).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let f = p.pair(&p.basis_form(i), &p.basis_form(j)).unwrap();
                assert_eq!(f.eval(&mu), pi[(i, j)]);
            }
        }
    }

    #[test]
    fn derivative_on_constants_is_the_product() {
        let h = catalog::heisenberg();
        let m = Metric::new(Matrix::from_rows(vec![q(&[2, 1, 0]), q(&[1, 3, 1]), q(&[0, 1, -1])]).unwrap()).unwrap();
        let conn = ContravariantConnection::new(&h, &m).unwrap();
        let a = levi_civita_product(&h, &m).unwrap();
        let p = conn.poisson();
        for i in 0..3 {
            for j in 0..3 {
                let d = conn.derivative(&p.basis_form(i), &p.basis_form(j)).unwrap();
                assert_eq!(d, p.constant_form(a.product(i, j)));
            }
        }
        let id = ContravariantConnection::new(&h, &Metric::identity(3)).unwrap();
        let d = id.derivative(&p.basis_form(0), &p.basis_form(1)).unwrap();
        assert_eq!(d, p.constant_form(&[ratio(0, 1), ratio(0, 1), ratio(1, 2)]));
    }

    #[test]
    fn heisenberg_identity_dpi_is_nonzero() {
        let h = catalog::heisenberg();
        let r = dpi_residual(&h, &Metric::identity(3), &[vec![0.3, -1.0, 2.0]]).unwrap();
        assert!(!r.exact_zero);
        assert!(r.sampled > 0.0);
        let c = cyclic_schouten_check(&h, &Metric::identity(3), &[vec![0.3, -1.0, 2.0]]).unwrap();
        assert!(c.exact_zero && c.sampled == 0.0);
        let l = lie_derivative_metric_check(&h, &Metric::identity(3), &[]).unwrap();
        assert!(l.exact_zero);
    }

    #[test]
    fn modular_value_of_the_affine_algebra() {
        let alg = catalog::nonabelian_2d();
        let v = modular_field_value(&alg, &Metric::identity(2), &q(&[1, 0]), &[0.4, -0.7]).unwrap();
        assert!((v.value + 1.0).abs() < 1e-14);
        assert!(!v.extension);
        let a = LieAlgebra::<Rational>::abelian(3);
        assert_eq!(modular_field_value(&a, &Metric::identity(3), &q(&[1, 1, 1]), &[1.0, 2.0, 3.0]).unwrap().value, 0.0);
    }

    #[test]
    fn indefinite_modular_value_is_flagged() {
        let alg = catalog::nonabelian_2d();
        let m = Metric::new(Matrix::from_rows(vec![q(&[0, 1]), q(&[1, 0])]).unwrap()).unwrap();
        let v = modular_field_value(&alg, &m, &q(&[1, 0]), &[1.0, 1.0]).unwrap();
        assert!(v.extension);
        assert!((v.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn casimir_checks_on_heisenberg() {
        let h = catalog::heisenberg();
        assert!(casimir_inner_products_constant(&h, &Metric::identity(3), 0.0).unwrap());
        let r = casimir_anchor_check(&h, &Metric::identity(3), &[], 0.0).unwrap();
        assert!(!r.applicable);
        let so3 = catalog::so3();
        let r = casimir_anchor_check(&so3, &Metric::identity(3), &[], 0.0).unwrap();
        assert_eq!(r.reason.as_deref(), Some("center is trivial"));
    }

    #[test]
    fn degree_cap_is_enforced() {
        let h = catalog::heisenberg();
        let p = LiePoisson::with_cap(&h, 2);
        let x = p.linear_function(&q(&[1, 0, 0]));
        let quad = PolyOneForm::differential(&x.mul(&x).unwrap()).mul_poly(&x).unwrap();
        assert!(matches!(p.form_bracket(&quad, &quad), Err(Error::DegreeOverflow { .. })));
    }
}
