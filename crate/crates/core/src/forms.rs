//! Polynomial 1-forms `Σ f_i dμ_i` and vector fields `Σ X^i ∂_i` on a
//! coordinate space.

use std::sync::Arc;

use crate::error::Result;
use crate::poly::{Poly, PolySpace};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct PolyOneForm<S> {
    comps: Vec<Poly<S>>,
}

#[derive(Clone, Debug)]
pub struct PolyVectorField<S> {
    comps: Vec<Poly<S>>,
}

macro_rules! shared_ops {
    ($t:ident) => {
        impl<S: Scalar> PartialEq for $t<S> {
            fn eq(&self, other: &Self) -> bool {
                self.comps == other.comps
            }
        }

        impl<S: Scalar> $t<S> {
            pub fn from_components(comps: Vec<Poly<S>>) -> Self {
                $t { comps }
            }

            pub fn zero(space: &Arc<PolySpace>) -> Self {
                $t {
                    comps: (0..space.nvars()).map(|_| Poly::zero(space)).collect(),
                }
            }

            /// Constant coefficients.
            pub fn constant(space: &Arc<PolySpace>, v: &[S]) -> Self {
                assert_eq!(v.len(), space.nvars());
                $t {
                    comps: v.iter().map(|c| Poly::constant(space, c.clone())).collect(),
                }
            }

            pub fn dim(&self) -> usize {
                self.comps.len()
            }

            pub fn components(&self) -> &[Poly<S>] {
                &self.comps
            }

            pub fn component(&self, i: usize) -> &Poly<S> {
                &self.comps[i]
            }

            pub fn space(&self) -> &Arc<PolySpace> {
                self.comps[0].space()
            }

            pub fn is_zero(&self) -> bool {
                self.comps.iter().all(Poly::is_zero)
            }

            pub fn degree(&self) -> Option<usize> {
                self.comps.iter().filter_map(Poly::degree).max()
            }

            pub fn max_abs_coeff(&self) -> f64 {
                self.comps.iter().map(Poly::max_abs_coeff).fold(0.0, f64::max)
            }

            pub fn add(&self, other: &Self) -> Self {
                $t {
                    comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
                }
            }

            pub fn sub(&self, other: &Self) -> Self {
                $t {
                    comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect(),
                }
            }

            pub fn scale(&self, s: &S) -> Self {
                $t {
                    comps: self.comps.iter().map(|a| a.scale(s)).collect(),
                }
            }

            /// Pointwise product with a function.
            pub fn mul_poly(&self, f: &Poly<S>) -> Result<Self> {
                Ok($t {
                    comps: self.comps.iter().map(|a| a.mul(f)).collect::<Result<_>>()?,
                })
            }

            pub fn eval(&self, point: &[S]) -> Vec<S> {
                self.comps.iter().map(|c| c.eval(point)).collect()
            }

            pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
                self.comps.iter().map(|c| c.eval_f64(point)).collect()
            }
        }
    };
}

shared_ops!(PolyOneForm);
shared_ops!(PolyVectorField);

impl<S: Scalar> PolyOneForm<S> {
    /// `df = Σ ∂_i f dμ_i`.
    pub fn differential(f: &Poly<S>) -> Self {
        PolyOneForm {
            comps: (0..f.space().nvars()).map(|i| f.derivative(i)).collect(),
        }
    }

    /// `α(X)`.
    pub fn apply(&self, x: &PolyVectorField<S>) -> Result<Poly<S>> {
        let mut acc = Poly::zero(self.space());
        for (a, xi) in self.comps.iter().zip(&x.comps) {
            acc = acc.add(&a.mul(xi)?);
        }
        Ok(acc)
    }

    /// `(L_X α)_j = X^i ∂_i α_j + α_i ∂_j X^i`.
    pub fn lie_derivative(&self, x: &PolyVectorField<S>) -> Result<Self> {
        let n = self.dim();
        let mut comps = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = x.derivative_of(&self.comps[j])?;
            for i in 0..n {
                acc = acc.add(&self.comps[i].mul(&x.comps[i].derivative(j))?);
            }
            comps.push(acc);
        }
        Ok(PolyOneForm { comps })
    }
}

impl<S: Scalar> PolyVectorField<S> {
    /// `X.f = Σ X^i ∂_i f`.
    pub fn derivative_of(&self, f: &Poly<S>) -> Result<Poly<S>> {
        let mut acc = Poly::zero(f.space());
        for (i, xi) in self.comps.iter().enumerate() {
            let d = f.derivative(i);
            if !d.is_zero() {
                acc = acc.add(&xi.mul(&d)?);
            }
        }
        Ok(acc)
    }

    /// `[X, Y]^j = X.Y^j − Y.X^j`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let comps = (0..self.dim())
            .map(|j| Ok(self.derivative_of(&other.comps[j])?.sub(&other.derivative_of(&self.comps[j])?)))
            .collect::<Result<_>>()?;
        Ok(PolyVectorField { comps })
    }
}
