//! Pointwise geometry of the symplectic leaf through a point of the dual.
//!
//! At `μ` the cotangent space splits as `Ker #π ⊕ (Ker #π)^⊥`. The anchor
//! maps the complement onto the leaf tangent space, which carries the
//! symplectic form `ω_S(#α, #β) = π(α, β)` and the metric
//! `g_S(u, v) = <#⁻¹u, #⁻¹v>`. Writing `ω_S(u, v) = g_S(Au, v)`, the
//! structure `J = A(−A²)^{-1/2}` is almost complex and `g_S`-orthogonal.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::poisson::bivector_at;

/// Relative singular value cutoff for the rank of `π(μ)`.
pub const RANK_TOL: f64 = 1e-9;
/// Relative cutoff for eigenvalues of `−A²` in the square root.
pub const EIGEN_TOL: f64 = 1e-12;
pub const PROBE_COUNT: usize = 8;
pub const PROBE_RADIUS: f64 = 1e-4;
const PROBE_SEED: u64 = 0x5eed_1eaf;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafFrame {
    pub point: Vec<f64>,
    /// Columns span `Ker #π`.
    pub kernel: Vec<Vec<f64>>,
    /// Columns span the `<,>`-orthogonal complement of the kernel.
    pub complement: Vec<Vec<f64>>,
    /// `#π` applied to the complement basis.
    pub tangents: Vec<Vec<f64>>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafGeometryAt {
    pub frame: LeafFrame,
    pub omega: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
    pub a_op: Vec<Vec<f64>>,
    pub j: Vec<Vec<f64>>,
    /// `‖J² + I‖`, max-abs.
    pub j_square_residual: f64,
    /// `‖Jᵀ g_S J − g_S‖`, max-abs.
    pub j_metric_residual: f64,
    /// `‖Jᵀ ω_S J − ω_S‖`, max-abs.
    pub j_symplectic_residual: f64,
}

fn to_na(m: &crate::matrix::Matrix<f64>) -> DMatrix<f64> {
    m.to_nalgebra()
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn cols_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Orthonormal basis of the null space of `m` and the numerical rank.
fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> (DMatrix<f64>, usize) {
    let n = m.ncols();
    // pad to square so the SVD returns a full right basis
    let mut sq = DMatrix::zeros(m.nrows().max(n), n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    let cut = if smax > 0.0 { rel_tol * smax } else { f64::INFINITY };
    let null: Vec<usize> = (0..n).filter(|&k| !(svd.singular_values[k] > cut)).collect();
    let basis = DMatrix::from_fn(n, null.len(), |i, c| vt[(null[c], i)]);
    (basis, n - null.len())
}

pub fn rank_at(alg: &LieAlgebra<f64>, mu: &[f64]) -> Result<usize> {
    let pi = to_na(&bivector_at(alg, mu)?);
    Ok(null_space(&pi, RANK_TOL).1)
}

pub fn leaf_frame_at(alg: &LieAlgebra<f64>, metric: &Metric<f64>, mu: &[f64]) -> Result<LeafFrame> {
    let n = alg.dim();
    if metric.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: metric.dim() });
    }
    let pi = to_na(&bivector_at(alg, mu)?);
    let a = to_na(metric.matrix());
    let (kernel, rank) = null_space(&pi, RANK_TOL);
    let l = n - rank;
    if l > 0 {
        let gram = kernel.transpose() * &a * &kernel;
        let det = gram.determinant();
        let scale = max_abs(&a).powi(l as i32);
        if !(det.abs() > RANK_TOL * scale) {
            return Err(Error::DegenerateRestriction { gram_det: det });
        }
    }
    let complement = if l == 0 {
        DMatrix::identity(n, n)
    } else {
        null_space(&(kernel.transpose() * &a), RANK_TOL).0
    };
    let tangents = pi.transpose() * &complement;
    Ok(LeafFrame {
        point: mu.to_vec(),
        kernel: cols_of(&kernel),
        complement: cols_of(&complement),
        tangents: cols_of(&tangents),
        rank,
    })
}

/// Rank at seeded perturbations of `mu` within [`PROBE_RADIUS`].
pub fn check_regular(alg: &LieAlgebra<f64>, mu: &[f64], rank: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..PROBE_COUNT {
        let dir: Vec<f64> = (0..mu.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let p: Vec<f64> = mu.iter().zip(&dir).map(|(m, d)| m + PROBE_RADIUS * d / norm).collect();
        let r = rank_at(alg, &p)?;
        if r != rank {
            return Err(Error::NotRegular { rank, neighbor_rank: r });
        }
    }
    Ok(())
}

pub fn kahler_check_at(alg: &LieAlgebra<f64>, metric: &Metric<f64>, mu: &[f64]) -> Result<LeafGeometryAt> {
    metric.signature().and_then(|s| {
        if s.q == 0 {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite)
        }
    })?;
    let frame = leaf_frame_at(alg, metric, mu)?;
    if frame.rank < 2 {
        return Err(Error::RankDeficient { rank: frame.rank, required: 2 });
    }
    check_regular(alg, mu, frame.rank)?;
    let n = alg.dim();
    let pi = to_na(&bivector_at(alg, mu)?);
    let a = to_na(metric.matrix());
    let b = DMatrix::from_fn(n, frame.complement.len(), |i, c| frame.complement[c][i]);
    let g = b.transpose() * &a * &b;
    let omega = b.transpose() * &pi * &b;
    let g = (&g + g.transpose()) * 0.5;
    let chol = g.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let lower = chol.l();
    let lower_inv = lower
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric("leaf metric".into()))?;
    let g_inv = chol.inverse();
    let a_op = -(&g_inv * &omega);
    // orthonormal coordinates y = Lᵀ u, where A is skew
    let a_tilde = lower.transpose() * &a_op * lower_inv.transpose();
    let a_tilde = (&a_tilde - a_tilde.transpose()) * 0.5;
    let s = a_tilde.transpose() * &a_tilde;
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&x| !(x > EIGEN_TOL * lmax)) {
        return Err(Error::DegenerateMetric(format!("−A² has eigenvalue {bad:e}")));
    }
    let inv_sqrt = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|x| 1.0 / x.sqrt()));
    let s_inv_sqrt = &eig.eigenvectors * DMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.transpose();
    let j_tilde = &a_tilde * s_inv_sqrt;
    let j = lower_inv.transpose() * j_tilde * lower.transpose();
    let k = j.nrows();
    let sq = &j * &j + DMatrix::identity(k, k);
    let gm = j.transpose() * &g * &j - &g;
    let om = j.transpose() * &omega * &j - &omega;
    Ok(LeafGeometryAt {
        frame,
        omega: rows_of(&omega),
        g: rows_of(&g),
        a_op: rows_of(&a_op),
        j: rows_of(&j),
        j_square_residual: max_abs(&sq),
        j_metric_residual: max_abs(&gm),
        j_symplectic_residual: max_abs(&om),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::matrix::Matrix;

    fn heis() -> LieAlgebra<f64> {
        catalog::heisenberg().to_f64()
    }

    fn pd() -> Metric<f64> {
        Metric::new(Matrix::from_rows(vec![vec![2.0, 0.5, 0.1], vec![0.5, 1.0, 0.2], vec![0.1, 0.2, 3.0]]).unwrap()).unwrap()
    }

    #[test]
    fn heisenberg_frame() {
        let m = pd();
        let f = leaf_frame_at(&heis(), &m, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.rank, 2);
        assert_eq!(f.kernel.len(), 1);
        let k = &f.kernel[0];
        assert!(k[0].abs() < 1e-12 && k[1].abs() < 1e-12 && (k[2].abs() - 1.0).abs() < 1e-12);
        let a = m.matrix();
        for c in &f.complement {
            assert!(a.bilinear(c, k).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_point_and_abelian() {
        let f = leaf_frame_at(&heis(), &pd(), &[0.0; 3]).unwrap();
        assert_eq!(f.rank, 0);
        assert_eq!(f.kernel.len(), 3);
        let ab = LieAlgebra::<f64>::abelian(3);
        assert_eq!(leaf_frame_at(&ab, &pd(), &[1.0, 2.0, 3.0]).unwrap().rank, 0);
        assert!(matches!(
            kahler_check_at(&heis(), &pd(), &[0.0; 3]),
            Err(Error::RankDeficient { rank: 0, .. })
        ));
    }

    #[test]
    fn degenerate_restriction_is_reported() {
        let m = Metric::new(Matrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]).unwrap()).unwrap();
        assert!(matches!(
            leaf_frame_at(&heis(), &m, &[0.0, 0.0, 1.0]),
            Err(Error::DegenerateRestriction { .. })
        ));
    }

    #[test]
    fn rank_two_leaf_is_kahler() {
        let r = kahler_check_at(&heis(), &pd(), &[0.3, -0.2, 1.5]).unwrap();
        assert!(r.j_square_residual < 1e-10);
        assert!(r.j_metric_residual < 1e-10);
        assert!(r.j_symplectic_residual < 1e-10);
    }

    #[test]
    fn singular_point_is_not_regular() {
        // the rank drops to 0 on the axis μ2 = μ3 = 0
        let e2 = catalog::load("family_e2").unwrap().algebra.to_f64();
        assert_eq!(rank_at(&e2, &[1.0, 0.0, 0.0]).unwrap(), 0);
        assert!(matches!(
            check_regular(&e2, &[1.0, 0.0, 0.0], 0),
            Err(Error::NotRegular { rank: 0, neighbor_rank: 2 })
        ));
    }
}
