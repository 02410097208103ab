//! Numerical check of the classification of pseudo-Riemannian Lie algebras
//! in dimensions 2 and 3.
//!
//! Every case is searched in both signature modes and compared with the
//! predicted answer. A search that finds a metric is a certificate, so a
//! found metric against a negative prediction is a hard disagreement; a
//! failed search against a positive prediction is only soft.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebra;
use crate::catalog;
use crate::error::Result;
use crate::generate;
use crate::scalar::{format_rational, ratio, Rational};
use crate::search::{find_compatible_metric, MetricCertificate, SearchConfig, SearchStatus, SignatureConstraint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family2bParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl Family2bParams {
    pub fn new(alpha: Rational, beta: Rational, gamma: Rational) -> Self {
        Family2bParams { alpha, beta, gamma }
    }

    /// `α² + βγ`, minus the determinant of `ad_{e1}` on `span(e2, e3)`.
    pub fn discriminant(&self) -> Rational {
        &self.alpha * &self.alpha + &self.beta * &self.gamma
    }

    pub fn algebra(&self) -> LieAlgebra<Rational> {
        catalog::family(self.alpha.clone(), self.beta.clone(), self.gamma.clone())
    }

    /// Parameters of the same algebra after `e1 ↦ −e1`.
    pub fn flipped(&self) -> Self {
        Family2bParams::new(-self.alpha.clone(), -self.beta.clone(), -self.gamma.clone())
    }

    /// Parameters of the same algebra after swapping `e2` and `e3`.
    pub fn swapped(&self) -> Self {
        Family2bParams::new(-self.alpha.clone(), self.gamma.clone(), self.beta.clone())
    }

    pub fn to_strings(&self) -> [String; 3] {
        [&self.alpha, &self.beta, &self.gamma].map(format_rational)
    }
}

/// Pseudo case: `α² + βγ ≠ 0`. Riemannian case: `α² + βγ < 0` and `γ > β`.
pub fn predicted_existence(p: &Family2bParams, positive_definite: bool) -> bool {
    let d = p.discriminant();
    if positive_definite {
        d.is_negative() && p.gamma > p.beta
    } else {
        !d.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Pseudo,
    Riemann,
}

impl Mode {
    pub fn constraint(self) -> SignatureConstraint {
        match self {
            Mode::Pseudo => SignatureConstraint::Any,
            Mode::Riemann => SignatureConstraint::PositiveDefinite,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Agree,
    /// Predicted to exist, not found.
    Soft,
    /// Found, predicted not to exist.
    Hard,
}

/// The prediction for the same algebra written in another basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantPrediction {
    pub label: String,
    pub params: [String; 3],
    pub predicted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub name: String,
    pub dim: usize,
    pub params: Option<[String; 3]>,
    pub stratum: Option<String>,
    pub mode: Mode,
    pub predicted: bool,
    pub found: bool,
    pub verdict: Verdict,
    pub best_residual: f64,
    pub restarts_run: usize,
    pub seed: u64,
    pub certificate: Option<MetricCertificate>,
    pub variants: Vec<VariantPrediction>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Restrict to one dimension.
    pub dim: Option<usize>,
    pub sample_count: usize,
    pub sample_seed: u64,
    /// Search settings; the signature constraint is set per mode.
    pub search: SearchConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            dim: None,
            sample_count: 40,
            sample_seed: 0,
            search: SearchConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub cases: Vec<CaseOutcome>,
    pub agreements: usize,
    pub soft_disagreements: usize,
    pub hard_disagreements: usize,
    /// Family samples whose prediction changes under a basis change that
    /// keeps the family form.
    pub basis_dependent: usize,
    pub sample_seed: u64,
}

impl ClassificationReport {
    pub fn hard_failures(&self) -> impl Iterator<Item = &CaseOutcome> {
        self.cases.iter().filter(|c| c.verdict == Verdict::Hard)
    }
}

/// Signs of `(α² + βγ, γ − β)` for the four strata, visited in turn.
const STRATA: [(bool, bool); 4] = [(true, true), (true, false), (false, true), (false, false)];

fn stratum_label(negative_disc: bool, gamma_above: bool) -> String {
    format!(
        "disc{}0,gamma{}beta",
        if negative_disc { "<" } else { ">" },
        if gamma_above { ">" } else { "<" }
    )
}

/// `count` parameter triples with entries `k/4`, `k ∈ [−12, 12]`, spread
/// evenly over the strata. Boundary triples (zero discriminant or `γ = β`)
/// are not drawn.
pub fn stratified_samples(count: usize, seed: u64) -> Vec<(String, Family2bParams)> {
    let mut r = generate::rng(seed);
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let (neg, above) = STRATA[idx % STRATA.len()];
        loop {
            let [a, b, g] = generate::random_family_params(&mut r);
            let p = Family2bParams::new(a, b, g);
            let d = p.discriminant();
            if d.is_zero() || p.gamma == p.beta {
                continue;
            }
            if d.is_negative() == neg && (p.gamma > p.beta) == above {
                out.push((stratum_label(neg, above), p));
                break;
            }
        }
    }
    out
}

struct Case {
    name: String,
    algebra: LieAlgebra<Rational>,
    params: Option<Family2bParams>,
    stratum: Option<String>,
    predicted: [bool; 2],
}

fn fixed_cases() -> Vec<Case> {
    let fixed = |name: &str, algebra, pseudo, riemann| Case {
        name: name.to_string(),
        algebra,
        params: None,
        stratum: None,
        predicted: [pseudo, riemann],
    };
    vec![
        fixed("abelian_2d", LieAlgebra::abelian(2), true, true),
        fixed("nonabelian_2d", catalog::nonabelian_2d(), false, false),
        fixed("heisenberg", catalog::heisenberg(), true, false),
    ]
}

fn run_case(case: &Case, mode: Mode, cfg: &ClassifyConfig) -> Result<CaseOutcome> {
    let predicted = case.predicted[(mode == Mode::Riemann) as usize];
    let search = SearchConfig {
        signature: mode.constraint(),
        ..cfg.search.clone()
    };
    let result = find_compatible_metric(&case.algebra, &search)?;
    let found = result.status == SearchStatus::Found;
    let verdict = match (predicted, found) {
        (true, true) | (false, false) => Verdict::Agree,
        (true, false) => Verdict::Soft,
        (false, true) => Verdict::Hard,
    };
    let variants = case
        .params
        .as_ref()
        .map(|p| {
            [("flip_e1", p.flipped()), ("swap_e2_e3", p.swapped())]
                .into_iter()
                .map(|(label, v)| VariantPrediction {
                    label: label.to_string(),
                    predicted: predicted_existence(&v, mode == Mode::Riemann),
                    params: v.to_strings(),
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(CaseOutcome {
        name: case.name.clone(),
        dim: case.algebra.dim(),
        params: case.params.as_ref().map(Family2bParams::to_strings),
        stratum: case.stratum.clone(),
        mode,
        predicted,
        found,
        verdict,
        best_residual: result.best_residual,
        restarts_run: result.restarts_run,
        seed: result.seed,
        certificate: result.certificate,
        variants,
    })
}

pub fn verify_theorem_1_6(cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    let mut cases = fixed_cases();
    for (stratum, p) in stratified_samples(cfg.sample_count, cfg.sample_seed) {
        let [a, b, g] = p.to_strings();
        cases.push(Case {
            name: format!("family({a},{b},{g})"),
            algebra: p.algebra(),
            predicted: [predicted_existence(&p, false), predicted_existence(&p, true)],
            params: Some(p),
            stratum: Some(stratum),
        });
    }
    cases.retain(|c| cfg.dim.is_none_or(|d| d == c.algebra.dim()));

    let mut outcomes = Vec::with_capacity(2 * cases.len());
    for case in &cases {
        for mode in [Mode::Pseudo, Mode::Riemann] {
            outcomes.push(run_case(case, mode, cfg)?);
        }
    }
    let count = |v: Verdict| outcomes.iter().filter(|c| c.verdict == v).count();
    let basis_dependent = outcomes
        .iter()
        .filter(|c| c.variants.iter().any(|v| v.predicted != c.predicted))
        .count();
    Ok(ClassificationReport {
        agreements: count(Verdict::Agree),
        soft_disagreements: count(Verdict::Soft),
        hard_disagreements: count(Verdict::Hard),
        basis_dependent,
        sample_seed: cfg.sample_seed,
        cases: outcomes,
    })
}

/// `family(0, −1, 1)`, the standard Riemannian member of the family.
pub fn e2_params() -> Family2bParams {
    Family2bParams::new(ratio(0, 1), ratio(-1, 1), ratio(1, 1))
}
