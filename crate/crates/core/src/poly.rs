//! Dense multivariate polynomials with a total-degree cap.
//!
//! Coefficients are stored against a shared table of all monomials in
//! `nvars` variables of degree at most `cap`. Products that would exceed the
//! cap fail with [`Error::DegreeOverflow`] instead of truncating.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_DEGREE_CAP: usize = 3;

#[derive(Debug)]
pub struct PolySpace {
    nvars: usize,
    cap: usize,
    monomials: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl PolySpace {
    pub fn new(nvars: usize, cap: usize) -> Arc<Self> {
        let mut monomials = Vec::new();
        for d in 0..=cap {
            let mut current = vec![0u8; nvars];
            push_degree(&mut monomials, &mut current, 0, d);
        }
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Arc::new(PolySpace {
            nvars,
            cap,
            monomials,
            index,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monomials[i]
    }

    fn degree_of(m: &[u8]) -> usize {
        m.iter().map(|&e| e as usize).sum()
    }
}

// all exponent vectors of total degree `left` in variables `var..`
fn push_degree(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, left: usize) {
    if current.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if var + 1 == current.len() {
        current[var] = left as u8;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for e in (0..=left).rev() {
        current[var] = e as u8;
        push_degree(out, current, var + 1, left - e);
    }
    current[var] = 0;
}

#[derive(Clone, Debug)]
pub struct Poly<S> {
    space: Arc<PolySpace>,
    coeffs: Vec<S>,
}

impl<S: Scalar> PartialEq for Poly<S> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<S: Scalar> Poly<S> {
    pub fn zero(space: &Arc<PolySpace>) -> Self {
        Poly {
            space: Arc::clone(space),
            coeffs: vec![S::zero(); space.len()],
        }
    }

    pub fn constant(space: &Arc<PolySpace>, c: S) -> Self {
        let mut p = Self::zero(space);
        p.coeffs[0] = c;
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(space: &Arc<PolySpace>, i: usize) -> Self {
        Self::linear(space, &crate::matrix::vecops::basis(space.nvars, i))
    }

    /// `Σ_i w_i x_i`.
    pub fn linear(space: &Arc<PolySpace>, w: &[S]) -> Self {
        assert_eq!(w.len(), space.nvars);
        let mut p = Self::zero(space);
        if space.cap == 0 {
            assert!(w.iter().all(Scalar::is_zero), "linear term needs degree cap >= 1");
            return p;
        }
        let mut m = vec![0u8; space.nvars];
        for (i, wi) in w.iter().enumerate() {
            m[i] = 1;
            p.coeffs[space.index[&m]] = wi.clone();
            m[i] = 0;
        }
        p
    }

    pub fn space(&self) -> &Arc<PolySpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coefficient(&self, monomial: &[u8]) -> S {
        self.space
            .index
            .get(monomial)
            .map(|&i| self.coeffs[i].clone())
            .unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(Scalar::is_zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| PolySpace::degree_of(&self.space.monomials[i]))
            .max()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        Poly {
            space: Arc::clone(&self.space),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Poly {
            space: Arc::clone(&self.space),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Poly {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let sp = &self.space;
        let mut out = Self::zero(sp);
        let mut m = vec![0u8; sp.nvars];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for (v, e) in m.iter_mut().enumerate() {
                    *e = sp.monomials[i][v] + sp.monomials[j][v];
                }
                let idx = *sp.index.get(&m).ok_or(Error::DegreeOverflow {
                    degree: PolySpace::degree_of(&m),
                    cap: sp.cap,
                })?;
                out.coeffs[idx] = out.coeffs[idx].clone() + a.clone() * b.clone();
            }
        }
        Ok(out)
    }

    /// `∂/∂x_var`.
    pub fn derivative(&self, var: usize) -> Self {
        let sp = &self.space;
        let mut out = Self::zero(sp);
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = sp.monomials[i][var];
            if e == 0 || c.is_zero() {
                continue;
            }
            let mut m = sp.monomials[i].clone();
            m[var] -= 1;
            let idx = sp.index[&m];
            out.coeffs[idx] = out.coeffs[idx].clone() + c.clone() * S::from_i64(e as i64);
        }
        out
    }

    pub fn eval(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.space.nvars);
        let mut acc = S::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for (v, &e) in self.space.monomials[i].iter().enumerate() {
                for _ in 0..e {
                    term = term * point[v].clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.space.nvars);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                self.space.monomials[i]
                    .iter()
                    .zip(point)
                    .fold(c.to_f64(), |t, (&e, &x)| t * x.powi(e as i32))
            })
            .sum()
    }
}
