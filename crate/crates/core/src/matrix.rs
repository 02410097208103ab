//! Small dense matrices over any [`Scalar`], with Gaussian elimination.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from row vectors; `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if !a.is_zero() {
                    acc = acc + a.clone() * other[(k, j)].clone();
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (k, vk) in v.iter().enumerate() {
                    acc = acc + self[(i, k)].clone() * vk.clone();
                }
                acc
            })
            .collect()
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: &[S], v: &[S]) -> S {
        let mv = self.mul_vec(v);
        u.iter()
            .zip(mv)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b)
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn is_symmetric_exact(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    /// LU factorization with partial pivoting by magnitude.
    /// `None` when a pivot column is entirely zero.
    pub fn lu(&self) -> Option<Lu<S>> {
        assert!(self.is_square(), "LU of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, a[(i, k)].magnitude()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if a[(p, k)].is_zero() || best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let factor = a[(i, k)].clone() / pivot.clone();
                for j in k + 1..n {
                    let v = a[(i, j)].clone() - factor.clone() * a[(k, j)].clone();
                    a[(i, j)] = v;
                }
                a[(i, k)] = factor;
            }
        }
        Some(Lu {
            factors: a,
            perm,
            odd: swaps % 2 == 1,
        })
    }

    pub fn solve(&self, rhs: &[S]) -> Option<Vec<S>> {
        self.lu().map(|lu| lu.solve(rhs))
    }

    pub fn inverse(&self) -> Option<Self> {
        let lu = self.lu()?;
        let n = self.rows;
        let cols: Vec<Vec<S>> = (0..n)
            .map(|j| {
                let mut e = vec![S::zero(); n];
                e[j] = S::one();
                lu.solve(&e)
            })
            .collect();
        Some(Self::from_columns(&cols))
    }

    pub fn determinant(&self) -> S {
        match self.lu() {
            Some(lu) => lu.determinant(),
            None => S::zero(),
        }
    }

    /// Reduced row echelon form. Entries with magnitude at most
    /// `tol * max_abs` are treated as zero (ignored in exact arithmetic).
    /// Returns the reduced matrix and its pivot columns.
    pub fn rref(&self, tol: f64) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let thresh = if S::EXACT { 0.0 } else { tol * self.max_abs() };
        let negligible = |x: &S| x.is_zero() || (!S::EXACT && x.magnitude() <= thresh);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let (p, mag) = (r..a.rows)
                .map(|i| (i, a[(i, c)].magnitude()))
                .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if mag < 0.0 || negligible(&a[(p, c)]) {
                for i in r..a.rows {
                    a[(i, c)] = S::zero();
                }
                continue;
            }
            for j in 0..a.cols {
                a.data.swap(r * a.cols + j, p * a.cols + j);
            }
            let pivot = a[(r, c)].clone();
            for j in 0..a.cols {
                let v = a[(r, j)].clone() / pivot.clone();
                a[(r, j)] = v;
            }
            for i in 0..a.rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in 0..a.cols {
                    let v = a[(i, j)].clone() - f.clone() * a[(r, j)].clone();
                    a[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.rref(tol).1.len()
    }

    /// Basis of `{x : M x = 0}` read off the reduced row echelon form.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Characteristic polynomial `det(xI − M)` by Faddeev–LeVerrier;
    /// coefficients from the constant term up, leading coefficient 1.
    pub fn characteristic_polynomial(&self) -> Vec<S> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![S::zero(); n + 1];
        coeffs[n] = S::one();
        let mut m = Matrix::<S>::zeros(n, n);
        let id = Matrix::<S>::identity(n);
        for k in 1..=n {
            m = self.mul(&m).add(&id.scale(&coeffs[n - k + 1]));
            let am = self.mul(&m);
            coeffs[n - k] = -am.trace() / S::from_i64(k as i64);
        }
        coeffs
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Packed `PA = LU` factors.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    factors: Matrix<S>,
    perm: Vec<usize>,
    odd: bool,
}

impl<S: Scalar> Lu<S> {
    pub fn solve(&self, rhs: &[S]) -> Vec<S> {
        let n = self.perm.len();
        assert_eq!(rhs.len(), n);
        let a = &self.factors;
        let mut y: Vec<S> = self.perm.iter().map(|&p| rhs[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                if !a[(i, j)].is_zero() {
                    let v = y[i].clone() - a[(i, j)].clone() * y[j].clone();
                    y[i] = v;
                }
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                if !a[(i, j)].is_zero() {
                    let v = y[i].clone() - a[(i, j)].clone() * y[j].clone();
                    y[i] = v;
                }
            }
            let v = y[i].clone() / a[(i, i)].clone();
            y[i] = v;
        }
        y
    }

    pub fn determinant(&self) -> S {
        let n = self.perm.len();
        let d = (0..n).fold(S::one(), |acc, i| acc * self.factors[(i, i)].clone());
        if self.odd {
            -d
        } else {
            d
        }
    }
}

/// Vector helpers shared by the algebra and geometry modules.
pub mod vecops {
    use crate::scalar::Scalar;

    pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
        a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
    }

    pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
        a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
    }

    pub fn scale<S: Scalar>(a: &[S], s: &S) -> Vec<S> {
        a.iter().map(|x| x.clone() * s.clone()).collect()
    }

    pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
        a.iter()
            .zip(b)
            .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    }

    pub fn basis<S: Scalar>(n: usize, i: usize) -> Vec<S> {
        let mut v = vec![S::zero(); n];
        v[i] = S::one();
        v
    }

    pub fn is_zero<S: Scalar>(a: &[S]) -> bool {
        a.iter().all(Scalar::is_zero)
    }

    pub fn norm_f64<S: Scalar>(a: &[S]) -> f64 {
        a.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    pub fn to_f64<S: Scalar>(a: &[S]) -> Vec<f64> {
        a.iter().map(Scalar::to_f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_i64(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn exact_solve_and_inverse() {
        let m = q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        assert_eq!(m.determinant(), Rational::from_i64(18));
        let x = m.solve(&[ratio(1, 1), ratio(0, 1), ratio(0, 1)]).unwrap();
        assert_eq!(x[0], ratio(11, 18));
    }

    #[test]
    fn singular_has_no_lu() {
        let m = q(&[&[1, 2], &[2, 4]]);
        assert!(m.lu().is_none());
        assert_eq!(m.determinant(), Rational::from_i64(0));
        let ns = m.nullspace(0.0);
        assert_eq!(ns, vec![vec![ratio(-2, 1), ratio(1, 1)]]);
    }

    #[test]
    fn determinant_sign_tracks_pivoting() {
        let m = q(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.determinant(), Rational::from_i64(-1));
    }

    #[test]
    fn characteristic_polynomial_matches_expansion() {
        // det(xI - M) for M = [[2,1],[1,2]] is x^2 - 4x + 3
        let m = q(&[&[2, 1], &[1, 2]]);
        assert_eq!(
            m.characteristic_polynomial(),
            vec![ratio(3, 1), ratio(-4, 1), ratio(1, 1)]
        );
    }

    #[test]
    fn float_nullspace_uses_tolerance() {
        let m = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14]]).unwrap();
        assert_eq!(m.nullspace(1e-10).len(), 1);
        assert_eq!(m.nullspace(1e-16).len(), 0);
    }
}
