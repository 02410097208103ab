//! Lie algebras with compatible pseudo-metrics and the geometry of their
//! linear Lie-Poisson duals.

pub mod algebra;
pub mod catalog;
pub mod classify;
pub mod connection;
pub mod error;
pub mod forms;
pub mod generate;
pub mod io;
pub mod leaf;
pub mod lm;
pub mod matrix;
pub mod metric;
pub mod objective;
pub mod poisson;
pub mod poly;
pub mod scalar;
pub mod search;
pub mod sweep;

pub use algebra::{LieAlgebra, Residual, DEFAULT_TOL};
pub use connection::{is_pseudo_riemannian, levi_civita_product, pr_residual, ConnectionTensor};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use metric::{Metric, Signature};
pub use scalar::{Jet, Rational, Scalar};
