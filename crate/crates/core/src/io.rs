//! JSON file formats for algebras and metrics.
//!
//! Algebra files list the brackets `[e_i, e_j]` for `i < j` (1-based) as
//! coefficient vectors of exact rationals written `"p/q"` or as integers:
//!
//! ```json
//! { "dim": 3, "brackets": [ { "i": 1, "j": 2, "v": ["0", "0", "1"] } ] }
//! ```
//!
//! Float coefficients are accepted only when the file declares
//! `"scalar": "float"`. Metric files carry a full symmetric matrix:
//! `{ "matrix": [["1", "0"], ["0", "1"]], "scalar": "rational" }`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    #[default]
    Rational,
    Float,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub v: Vec<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<ScalarKind>,
    /// `(α, β, γ)` when the algebra is a member of the three-parameter family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<Value>>,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
}

/// A parsed algebra. Float files are lifted to rationals through the exact
/// binary value of each coefficient; `scalar` records what the file declared.
#[derive(Clone, Debug)]
pub struct LoadedAlgebra {
    pub name: Option<String>,
    pub scalar: ScalarKind,
    pub algebra: LieAlgebra<Rational>,
    pub family: Option<[Rational; 3]>,
}

fn parse_value(v: &Value, allow_float: bool) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s, allow_float)
            .ok_or_else(|| Error::Parse(format!("not a rational number: {s:?}"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_i64(i))
            } else if allow_float {
                n.as_f64()
                    .and_then(Rational::from_f64)
                    .ok_or_else(|| Error::Parse(format!("bad number {n}")))
            } else {
                Err(Error::Parse(format!(
                    "float coefficient {n} requires \"scalar\": \"float\""
                )))
            }
        }
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

pub fn parse_algebra(text: &str) -> Result<LoadedAlgebra> {
    let file: AlgebraFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    algebra_from_file(&file)
}

pub fn algebra_from_file(file: &AlgebraFile) -> Result<LoadedAlgebra> {
    let scalar = file.scalar.unwrap_or_default();
    let allow_float = scalar == ScalarKind::Float;
    if file.dim == 0 {
        return Err(Error::Parse("dim must be positive".into()));
    }
    let mut brackets = Vec::with_capacity(file.brackets.len());
    for b in &file.brackets {
        if b.i == 0 || b.j == 0 {
            return Err(Error::Parse("bracket indices are 1-based".into()));
        }
        let v = b
            .v
            .iter()
            .map(|x| parse_value(x, allow_float))
            .collect::<Result<Vec<_>>>()?;
        brackets.push((b.i - 1, b.j - 1, v));
    }
    let algebra = LieAlgebra::from_brackets(file.dim, brackets)?;
    let family = match &file.family {
        None => None,
        Some(v) if v.len() == 3 => {
            let p = v
                .iter()
                .map(|x| parse_value(x, allow_float))
                .collect::<Result<Vec<_>>>()?;
            Some([p[0].clone(), p[1].clone(), p[2].clone()])
        }
        Some(_) => return Err(Error::Parse("family needs three parameters".into())),
    };
    Ok(LoadedAlgebra {
        name: file.name.clone(),
        scalar,
        algebra,
        family,
    })
}

pub fn algebra_to_file(alg: &LieAlgebra<Rational>, name: Option<&str>) -> AlgebraFile {
    AlgebraFile {
        name: name.map(str::to_owned),
        comment: None,
        dim: alg.dim(),
        scalar: None,
        family: None,
        brackets: alg
            .nonzero_brackets()
            .into_iter()
            .map(|(i, j, v)| BracketEntry {
                i: i + 1,
                j: j + 1,
                v: v.iter().map(|x| Value::String(format_rational(x))).collect(),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricFile {
    pub matrix: Vec<Vec<Value>>,
    #[serde(default)]
    pub scalar: ScalarKind,
}

/// A metric matrix as read from disk; symmetry and squareness are checked,
/// nondegeneracy is left to [`crate::metric::Metric::new`].
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedMetric {
    Rational(Matrix<Rational>),
    Float(Matrix<f64>),
}

impl LoadedMetric {
    pub fn dim(&self) -> usize {
        match self {
            LoadedMetric::Rational(m) => m.rows(),
            LoadedMetric::Float(m) => m.rows(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        match self {
            LoadedMetric::Rational(m) => m.to_f64(),
            LoadedMetric::Float(m) => m.clone(),
        }
    }

    /// Exact matrix; floats are lifted through their binary values.
    pub fn to_rational(&self) -> Matrix<Rational> {
        match self {
            LoadedMetric::Rational(m) => m.clone(),
            LoadedMetric::Float(m) => m.map(|x| Rational::from_f64(*x).expect("finite entry")),
        }
    }
}

pub fn parse_metric(text: &str) -> Result<LoadedMetric> {
    let file: MetricFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = file.matrix.len();
    if n == 0 || file.matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("metric matrix must be square and non-empty".into()));
    }
    let loaded = match file.scalar {
        ScalarKind::Rational => {
            let rows = file
                .matrix
                .iter()
                .map(|r| r.iter().map(|x| parse_value(x, false)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            LoadedMetric::Rational(Matrix::from_rows(rows).expect("square"))
        }
        ScalarKind::Float => {
            let rows = file
                .matrix
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|x| match x {
                            Value::Number(n) => n
                                .as_f64()
                                .ok_or_else(|| Error::Parse(format!("bad number {n}"))),
                            Value::String(s) => s
                                .trim()
                                .parse::<f64>()
                                .map_err(|_| Error::Parse(format!("bad number {s:?}"))),
                            other => Err(Error::Parse(format!("expected a number, got {other}"))),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            LoadedMetric::Float(Matrix::from_rows(rows).expect("square"))
        }
    };
    let symmetric = match &loaded {
        LoadedMetric::Rational(m) => m.is_symmetric_exact(),
        LoadedMetric::Float(m) => m.is_symmetric_exact(),
    };
    if !symmetric {
        return Err(Error::NotSymmetric);
    }
    Ok(loaded)
}

pub fn metric_file_rational(m: &Matrix<Rational>) -> MetricFile {
    MetricFile {
        matrix: m
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| Value::String(format_rational(x))).collect())
            .collect(),
        scalar: ScalarKind::Rational,
    }
}

pub fn metric_file_float(m: &Matrix<f64>) -> MetricFile {
    MetricFile {
        matrix: m
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| serde_json::json!(x)).collect())
            .collect(),
        scalar: ScalarKind::Float,
    }
}
