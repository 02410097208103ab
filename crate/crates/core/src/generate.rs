//! Seeded random algebras, metrics and points for tests and sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::LieAlgebra;
use crate::catalog;
use crate::matrix::Matrix;
use crate::metric::Metric;
use crate::scalar::{ratio, Rational, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` standard normal points in `n` dimensions.
pub fn random_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| (0..n).map(|_| StandardNormal.sample(&mut r)).collect())
        .collect()
}

fn small_int<R: Rng>(r: &mut R, bound: i64) -> Rational {
    Rational::from_i64(r.random_range(-bound..=bound))
}

/// Integer matrix with entries in `[-2, 2]` and nonzero determinant.
pub fn random_invertible<R: Rng>(r: &mut R, n: usize) -> Matrix<Rational> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| small_int(r, 2));
        if !m.determinant().is_zero() {
            return m;
        }
    }
}

/// Symmetric nondegenerate integer matrix, any signature.
pub fn random_metric<R: Rng>(r: &mut R, n: usize) -> Metric<Rational> {
    loop {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = small_int(r, 3);
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        if let Ok(metric) = Metric::new(m) {
            return metric;
        }
    }
}

/// `BᵀB + I` for an integer matrix `B`.
pub fn random_positive_metric<R: Rng>(r: &mut R, n: usize) -> Metric<Rational> {
    let b = Matrix::from_fn(n, n, |_, _| small_int(r, 2));
    let m = b.transpose().mul(&b).add(&Matrix::identity(n));
    Metric::new(m).expect("BᵀB + I is positive definite")
}

/// A random Lie algebra of dimension `n ≥ 1`, conjugated by a random
/// integer basis change. The building blocks are semidirect products
/// `R ⋉_M R^{n-1}`, which satisfy Jacobi for every `M`, and catalog algebras
/// padded with an abelian summand.
pub fn random_algebra<R: Rng>(r: &mut R, n: usize) -> LieAlgebra<Rational> {
    let base = match r.random_range(0..3) {
        0 if n >= 2 => semidirect(r, n),
        1 if n >= 3 => {
            let pick = [catalog::heisenberg(), catalog::so3(), catalog::load("family_123").unwrap().algebra];
            let a = pick[r.random_range(0..pick.len())].clone();
            if n > 3 {
                a.direct_sum(&LieAlgebra::abelian(n - 3))
            } else {
                a
            }
        }
        _ if n >= 2 => semidirect(r, n),
        _ => LieAlgebra::abelian(n),
    };
    let p = random_invertible(r, n);
    base.change_basis(&p).expect("invertible basis change")
}

fn semidirect<R: Rng>(r: &mut R, n: usize) -> LieAlgebra<Rational> {
    let mut brackets = Vec::new();
    for j in 1..n {
        let mut v = vec![Rational::from_i64(0)];
        v.extend((1..n).map(|_| small_int(r, 2)));
        brackets.push((0, j, v));
    }
    LieAlgebra::from_brackets(n, brackets).expect("well formed")
}

/// Parameters `k/4` with `k ∈ [-12, 12]`.
pub fn random_family_params<R: Rng>(r: &mut R) -> [Rational; 3] {
    std::array::from_fn(|_| ratio(r.random_range(-12..=12), 4))
}
