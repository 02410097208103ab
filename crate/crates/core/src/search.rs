//! Multi-restart feasibility search for compatible metrics.
//!
//! Each restart minimises the frame residual of [`crate::objective`] with
//! Levenberg-Marquardt from a seeded random start. A restart counts as found
//! only after its metric passes an independent check: the entries are
//! rationalised and re-verified exactly when possible, and otherwise the
//! plain compatibility residual is re-checked in floating point at a
//! tolerance ten times tighter.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebra;
use crate::connection::pr_residual;
use crate::error::{Error, Result};
use crate::lm::{self, LmConfig};
use crate::matrix::Matrix;
use crate::metric::{Metric, Signature};
use crate::objective::{FrameKind, FrameObjective};
use crate::scalar::{format_rational, parse_rational, rationalize, Rational};

/// Largest denominator tried when rationalising a found metric.
pub const MAX_DENOMINATOR: u64 = 1_000_000;
const RATIONALIZE_TOL: f64 = 1e-9;
const BATCH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureConstraint {
    Any,
    PositiveDefinite,
    Fixed(Signature),
}

impl FromStr for SignatureConstraint {
    type Err = Error;

    /// `any`, `riemann`, or `p,q`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "any" => Ok(SignatureConstraint::Any),
            "riemann" | "positive_definite" => Ok(SignatureConstraint::PositiveDefinite),
            other => {
                let (p, q) = other
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidConfig(format!("bad signature {other:?}")))?;
                let p = p.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad p in {other:?}")))?;
                let q = q.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad q in {other:?}")))?;
                Ok(SignatureConstraint::Fixed(Signature { p, q }))
            }
        }
    }
}

impl std::fmt::Display for SignatureConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignatureConstraint::Any => write!(f, "any"),
            SignatureConstraint::PositiveDefinite => write!(f, "riemann"),
            SignatureConstraint::Fixed(s) => write!(f, "{},{}", s.p, s.q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub signature: SignatureConstraint,
    pub restarts: usize,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub degeneracy_floor: f64,
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            signature: SignatureConstraint::Any,
            restarts: 64,
            max_iters: 500,
            residual_tol: crate::algebra::DEFAULT_TOL,
            degeneracy_floor: 1e-8,
            rng_seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidConfig("residual_tol must be positive".into()));
        }
        if !(self.degeneracy_floor > 0.0) {
            return Err(Error::InvalidConfig("degeneracy_floor must be positive".into()));
        }
        if let SignatureConstraint::Fixed(s) = self.signature {
            if s.p + s.q != n {
                return Err(Error::InvalidConfig(format!("signature {s} does not have p + q = {n}")));
            }
        }
        Ok(())
    }

    /// Signatures tried in turn by successive restarts. `a` and `−a` have the
    /// same product, so `Any` only needs `p ≥ q`.
    pub fn schedule(&self, n: usize) -> Vec<Signature> {
        match self.signature {
            SignatureConstraint::Any => (0..=n / 2).map(|q| Signature { p: n - q, q }).collect(),
            SignatureConstraint::PositiveDefinite => vec![Signature::riemannian(n)],
            SignatureConstraint::Fixed(s) => vec![s],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    NotFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartLog {
    pub index: usize,
    pub signature: Signature,
    /// Frame residual at the end of the restart.
    pub final_residual: f64,
    pub iterations: usize,
    pub stop: String,
    pub found: bool,
}

/// Evidence attached to a found metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricCertificate {
    /// Unit Frobenius norm.
    pub float: Vec<Vec<f64>>,
    /// Rationalised entries, present when the exact residual is zero.
    pub rational: Option<Vec<Vec<String>>>,
    pub exact: bool,
    /// Compatibility residual of `float`.
    pub float_residual: f64,
    pub signature: Signature,
}

impl MetricCertificate {
    pub fn exact_metric(&self) -> Option<Metric<Rational>> {
        let rows = self.rational.as_ref()?;
        let m = rows
            .iter()
            .map(|r| r.iter().map(|x| parse_rational(x, false)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Metric::new(Matrix::from_rows(m)?).ok()
    }

    pub fn float_metric(&self) -> Metric<f64> {
        Metric::new_unchecked(Matrix::from_rows(self.float.clone()).expect("square"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub best_residual: f64,
    pub best_restart: usize,
    /// Metric of the best restart, unit Frobenius norm.
    pub best_metric: Option<Vec<Vec<f64>>>,
    pub certificate: Option<MetricCertificate>,
    pub log: Vec<RestartLog>,
    pub seed: u64,
    pub restarts_run: usize,
}

impl SearchResult {
    pub fn found(&self) -> bool {
        self.status == SearchStatus::Found
    }
}

struct RestartOutcome {
    log: RestartLog,
    metric: Option<Matrix<f64>>,
    certificate: Option<MetricCertificate>,
}

fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index as u64);
    r
}

fn initial_theta<R: Rng>(rng: &mut R, n: usize, kind: FrameKind) -> Vec<f64> {
    match kind {
        FrameKind::Cholesky => {
            // exp of N(−½, 1) has unit mean
            let diag = Normal::new(-0.5, 1.0).expect("valid normal");
            let mut t = Vec::with_capacity(n * (n + 1) / 2);
            for i in 0..n {
                for j in 0..=i {
                    t.push(if i == j { diag.sample(rng) } else { StandardNormal.sample(rng) });
                }
            }
            t
        }
        FrameKind::General(_) => (0..n * n).map(|_| StandardNormal.sample(rng)).collect(),
    }
}

/// Searched signature and whether the result must be negated to reach the
/// requested one.
fn searched(sig: Signature) -> (Signature, bool) {
    if sig.p < sig.q {
        (Signature { p: sig.q, q: sig.p }, true)
    } else {
        (sig, false)
    }
}

fn run_restart(
    alg: &LieAlgebra<Rational>,
    alg64: &LieAlgebra<f64>,
    cfg: &SearchConfig,
    schedule: &[Signature],
    index: usize,
) -> RestartOutcome {
    let n = alg.dim();
    let target = schedule[index % schedule.len()];
    let (sig, negate) = searched(target);
    let kind = if sig.q == 0 { FrameKind::Cholesky } else { FrameKind::General(sig) };
    let obj = FrameObjective::new(alg64, kind, cfg.degeneracy_floor);
    let mut rng = restart_rng(cfg.rng_seed, index);
    let theta0 = initial_theta(&mut rng, n, kind);
    let lm_cfg = LmConfig {
        max_iters: cfg.max_iters,
        ..LmConfig::default()
    };
    let out = lm::minimize(|t| obj.residuals_and_jacobian(t), &theta0, &lm_cfg);
    let residual = obj.triple_residual(&out.x).unwrap_or(f64::INFINITY);
    let metric = obj.metric(&out.x).map(|m| if negate { m.scale(&-1.0) } else { m });
    let certificate = match &metric {
        Some(m) if residual <= cfg.residual_tol => certify(alg, alg64, m, target, cfg),
        _ => None,
    };
    RestartOutcome {
        log: RestartLog {
            index,
            signature: target,
            final_residual: residual,
            iterations: out.iterations,
            stop: format!("{:?}", out.reason),
            found: certificate.is_some(),
        },
        metric,
        certificate,
    }
}

fn normalized(a: &Matrix<f64>) -> Matrix<f64> {
    let f = (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)] * a[(i, j)])
        .sum::<f64>()
        .sqrt();
    a.scale(&(1.0 / f))
}

/// Checks a candidate metric independently of the optimizer.
pub fn certify(
    alg: &LieAlgebra<Rational>,
    alg64: &LieAlgebra<f64>,
    a: &Matrix<f64>,
    target: Signature,
    cfg: &SearchConfig,
) -> Option<MetricCertificate> {
    let n = alg.dim();
    let mut hat = normalized(a);
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (hat[(i, j)] + hat[(j, i)]);
            hat[(i, j)] = s;
            hat[(j, i)] = s;
        }
    }
    let metric = Metric::new(hat.clone()).ok()?;
    if hat.determinant().abs() < cfg.degeneracy_floor || metric.signature().ok()? != target {
        return None;
    }
    let float_residual = pr_residual(alg64, &metric).ok()?.value;
    let rational = rationalized(&hat).filter(|q| {
        Metric::new(q.clone())
            .ok()
            .filter(|m| m.signature().ok() == Some(target))
            .and_then(|m| pr_residual(alg, &m).ok())
            .is_some_and(|r| r.exact_zero)
    });
    let exact = rational.is_some();
    if !exact && float_residual > cfg.residual_tol / 10.0 {
        return None;
    }
    Some(MetricCertificate {
        float: hat.to_rows(),
        rational: rational.map(|q| q.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect()),
        exact,
        float_residual,
        signature: target,
    })
}

/// Continued-fraction rounding after scaling the largest entry to 1.
fn rationalized(a: &Matrix<f64>) -> Option<Matrix<Rational>> {
    let n = a.rows();
    let s = a.max_abs();
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let r = rationalize(a[(i, j)] / s, MAX_DENOMINATOR, RATIONALIZE_TOL)?;
            q[(i, j)] = r.clone();
            q[(j, i)] = r;
        }
    }
    Some(q)
}

#[cfg(feature = "parallel")]
fn run_batch<F>(range: std::ops::Range<usize>, f: F) -> Vec<RestartOutcome>
where
    F: Fn(usize) -> RestartOutcome + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_batch<F>(range: std::ops::Range<usize>, f: F) -> Vec<RestartOutcome>
where
    F: Fn(usize) -> RestartOutcome,
{
    range.map(f).collect()
}

/// Runs restarts in fixed batches and stops after the first batch that
/// contains a found restart, so the log is the same for serial and parallel
/// schedules.
pub fn find_compatible_metric(alg: &LieAlgebra<Rational>, cfg: &SearchConfig) -> Result<SearchResult> {
    let n = alg.dim();
    cfg.validate(n)?;
    let alg64 = alg.to_f64();
    let schedule = cfg.schedule(n);
    let mut outcomes: Vec<RestartOutcome> = Vec::with_capacity(cfg.restarts);
    let mut start = 0;
    while start < cfg.restarts {
        let end = (start + BATCH).min(cfg.restarts);
        let batch = run_batch(start..end, |i| run_restart(alg, &alg64, cfg, &schedule, i));
        let hit = batch.iter().any(|o| o.certificate.is_some());
        outcomes.extend(batch);
        start = end;
        if hit {
            break;
        }
    }
    let best = outcomes
        .iter()
        .find(|o| o.certificate.is_some())
        .or_else(|| {
            outcomes
                .iter()
                .min_by(|a, b| a.log.final_residual.total_cmp(&b.log.final_residual))
        })
        .expect("at least one restart");
    let certificate = best.certificate.clone();
    Ok(SearchResult {
        status: if certificate.is_some() { SearchStatus::Found } else { SearchStatus::NotFound },
        best_residual: best.log.final_residual,
        best_restart: best.log.index,
        best_metric: best.metric.as_ref().map(|m| normalized(m).to_rows()),
        certificate,
        restarts_run: outcomes.len(),
        log: outcomes.into_iter().map(|o| o.log).collect(),
        seed: cfg.rng_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn cfg(signature: SignatureConstraint, restarts: usize) -> SearchConfig {
        SearchConfig {
            signature,
            restarts,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn parses_signature_flags() {
        assert_eq!("any".parse::<SignatureConstraint>().unwrap(), SignatureConstraint::Any);
        assert_eq!("riemann".parse::<SignatureConstraint>().unwrap(), SignatureConstraint::PositiveDefinite);
        assert_eq!(
            "2,1".parse::<SignatureConstraint>().unwrap(),
            SignatureConstraint::Fixed(Signature { p: 2, q: 1 })
        );
        assert!("2;1".parse::<SignatureConstraint>().is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let h = catalog::heisenberg();
        assert!(find_compatible_metric(&h, &cfg(SignatureConstraint::Any, 0)).is_err());
        let bad = cfg(SignatureConstraint::Fixed(Signature { p: 1, q: 1 }), 4);
        assert!(matches!(find_compatible_metric(&h, &bad), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn abelian_is_found_immediately() {
        let a = LieAlgebra::<Rational>::abelian(3);
        let r = find_compatible_metric(&a, &cfg(SignatureConstraint::PositiveDefinite, 4)).unwrap();
        assert!(r.found());
        assert_eq!(r.best_residual, 0.0);
        assert!(r.certificate.unwrap().exact);
    }

    #[test]
    fn heisenberg_pseudo_metric_is_exact() {
        let h = catalog::heisenberg();
        let r = find_compatible_metric(&h, &cfg(SignatureConstraint::Any, 16)).unwrap();
        assert!(r.found());
        let c = r.certificate.unwrap();
        assert!(c.exact);
        assert_eq!(c.signature, Signature { p: 2, q: 1 });
        let m = c.exact_metric().unwrap();
        assert!(pr_residual(&h, &m).unwrap().exact_zero);
    }

    #[test]
    fn negative_definite_is_a_flip() {
        let e2 = catalog::load("family_e2").unwrap().algebra;
        let r = find_compatible_metric(&e2, &cfg(SignatureConstraint::Fixed(Signature { p: 0, q: 3 }), 8)).unwrap();
        assert!(r.found());
        assert_eq!(r.certificate.unwrap().signature, Signature { p: 0, q: 3 });
    }

    #[test]
    fn search_is_deterministic() {
        let alg = catalog::nonabelian_2d();
        let c = cfg(SignatureConstraint::Any, 10);
        let a = find_compatible_metric(&alg, &c).unwrap();
        let b = find_compatible_metric(&alg, &c).unwrap();
        assert_eq!(a, b);
        assert!(!a.found());
        assert_eq!(a.restarts_run, 10);
    }
}
