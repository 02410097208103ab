//! Pointwise identity checks over sampled dual points.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::leaf::kahler_check_at;
use crate::matrix::vecops;
use crate::metric::Metric;
use crate::poisson::{
    cyclic_schouten_check, dpi_residual, lie_derivative_metric_check, modular_value_with, ContravariantConnection,
};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCheck {
    /// Compatibility of the contravariant connection with `π`.
    Dpi,
    /// Cyclic sum of `Dπ`.
    Cyclic,
    /// Lie derivative of the metric along Hamiltonian fields.
    LieDerivative,
    /// `max_k |φ(e_k)(μ)|` for the modular field `φ`.
    Modular,
    /// `max(‖J² + I‖, ‖g_S(J·,J·) − g_S‖)` on the leaf through `μ`.
    Kahler,
}

impl SweepCheck {
    pub const ALL: [SweepCheck; 5] = [
        SweepCheck::Dpi,
        SweepCheck::Cyclic,
        SweepCheck::LieDerivative,
        SweepCheck::Modular,
        SweepCheck::Kahler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepCheck::Dpi => "dpi",
            SweepCheck::Cyclic => "cyclic",
            SweepCheck::LieDerivative => "lie_derivative",
            SweepCheck::Modular => "modular",
            SweepCheck::Kahler => "kahler",
        }
    }
}

impl fmt::Display for SweepCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepCheck::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub point: Vec<f64>,
    pub check: SweepCheck,
    /// `None` when the check does not apply at this point.
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One record per point and check, grouped by check in the order given.
pub fn dual_sweep<S: Scalar>(
    alg: &LieAlgebra<S>,
    metric: &Metric<S>,
    points: &[Vec<f64>],
    checks: &[SweepCheck],
) -> Result<Vec<SweepRecord>> {
    let n = alg.dim();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: p.len() });
    }
    let record = |point: &Vec<f64>, check, value, note| SweepRecord {
        point: point.clone(),
        check,
        value,
        note,
    };
    let mut out = Vec::with_capacity(points.len() * checks.len());
    for &check in checks {
        match check {
            SweepCheck::Dpi | SweepCheck::Cyclic | SweepCheck::LieDerivative => {
                let r = match check {
                    SweepCheck::Dpi => dpi_residual(alg, metric, points)?,
                    SweepCheck::Cyclic => cyclic_schouten_check(alg, metric, points)?,
                    _ => lie_derivative_metric_check(alg, metric, points)?,
                };
                out.extend(points.iter().zip(&r.per_sample).map(|(p, v)| record(p, check, Some(*v), None)));
            }
            SweepCheck::Modular => {
                let conn = ContravariantConnection::new(alg, metric)?;
                for p in points {
                    let mut worst = 0.0f64;
                    let mut extension = false;
                    for k in 0..n {
                        let m = modular_value_with(&conn, &vecops::basis(n, k), p)?;
                        worst = worst.max(m.value.abs());
                        extension |= m.extension;
                    }
                    let note = extension.then(|| "indefinite metric: signed coframe sum".to_string());
                    out.push(record(p, check, Some(worst), note));
                }
            }
            SweepCheck::Kahler => {
                let (alg64, metric64) = (alg.to_f64(), metric.to_f64());
                for p in points {
                    out.push(match kahler_check_at(&alg64, &metric64, p) {
                        Ok(g) => record(p, check, Some(g.j_square_residual.max(g.j_metric_residual)), None),
                        Err(e) => record(p, check, None, Some(e.to_string())),
                    });
                }
            }
        }
    }
    Ok(out)
}
