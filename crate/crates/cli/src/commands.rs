use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use liecompat::classify::{verify_theorem_1_6, ClassifyConfig, Mode, Verdict};
use liecompat::connection::{levi_civita_product, pr_residual, pr_residual_of};
use liecompat::generate::random_points;
use liecompat::io::{metric_file_float, metric_file_rational, parse_algebra, MetricFile, parse_metric, LoadedAlgebra, LoadedMetric};
use liecompat::poisson::{cyclic_schouten_check, dpi_residual, lie_derivative_metric_check, IdentityCheck};
use liecompat::search::{find_compatible_metric, SearchConfig};
use liecompat::sweep::{dual_sweep, SweepCheck, SweepRecord};
use liecompat::{catalog, Error, LieAlgebra, Matrix, Metric, Rational, Residual, Scalar};
use serde_json::json;
use thiserror::Error;

use crate::report::{CheckResult, InputDigest, RunReport, Status};
use crate::{Cli, Command, ScalarMode, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_NOT_FOUND, EXIT_OK};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error("{0}")]
    Input(String),
}

type Result<T> = std::result::Result<T, CliError>;

/// Runs the parsed command. Input errors become a failed `input` row with
/// exit code 2 rather than an `Err`, so a report is always produced.
pub fn run(cli: &Cli, argv: Vec<String>) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport::new(argv, cli.scalar.name(), cli.tol, cli.seed);
    let code = match dispatch(cli, &mut report) {
        Ok(code) => code,
        Err(e) => {
            report.push(CheckResult::new("input", Status::Fail).detail(e.to_string()));
            EXIT_INPUT
        }
    };
    report.exit_code = code;
    report.wall_time_s = start.elapsed().as_secs_f64();
    report
}

fn dispatch(cli: &Cli, report: &mut RunReport) -> Result<i32> {
    if !(cli.tol > 0.0) {
        return Err(CliError::Input("--tol must be positive".into()));
    }
    match &cli.command {
        Command::Validate { algebra } => validate(cli, algebra, report),
        Command::Check { algebra, metric, points } => check(cli, algebra, metric, *points, report),
        Command::Search {
            algebra,
            signature,
            restarts,
            max_iters,
            out,
        } => {
            let cfg = SearchConfig {
                signature: *signature,
                restarts: *restarts,
                max_iters: *max_iters,
                residual_tol: cli.tol,
                rng_seed: cli.seed,
                ..SearchConfig::default()
            };
            search(cli, algebra, cfg, out.as_deref(), report)
        }
        Command::Classify { dim, samples, restarts } => classify(cli, dim.map(usize::from), *samples, *restarts, report),
        Command::DualSweep {
            algebra,
            metric,
            points,
            count,
            checks,
            out,
        } => sweep(cli, algebra, metric, points.as_deref(), *count, checks, out.as_deref(), report),
    }
}

fn read_input(arg: &str, report: &mut RunReport) -> Result<String> {
    let text = match arg.strip_prefix("catalog:") {
        Some(name) => catalog::SOURCES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| CliError::Input(format!("no catalog entry named {name:?}")))?,
        None => fs::read_to_string(arg).map_err(|source| CliError::Read {
            path: arg.to_string(),
            source,
        })?,
    };
    report.inputs.push(InputDigest::of(arg, text.as_bytes()));
    Ok(text)
}

/// A parsed algebra that also satisfies the Jacobi identity.
fn load_algebra(arg: &str, report: &mut RunReport) -> Result<LoadedAlgebra> {
    let loaded = parse_algebra(&read_input(arg, report)?).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    let jacobi = loaded.algebra.jacobi_residual();
    if !jacobi.exact_zero {
        return Err(CliError::Input(format!(
            "{arg}: Jacobi identity fails at {}",
            triple(&jacobi.worst)
        )));
    }
    Ok(loaded)
}

fn load_metric(arg: &str, dim: usize, report: &mut RunReport) -> Result<LoadedMetric> {
    let m = parse_metric(&read_input(arg, report)?).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    if m.dim() != dim {
        return Err(CliError::Input(format!("{arg}: metric is {0}x{0}, algebra has dimension {dim}", m.dim())));
    }
    Ok(m)
}

/// Float metric files are evaluated in f64 even in rational mode.
fn effective_scalar(cli: &Cli, metric: &LoadedMetric, report: &mut RunReport) -> ScalarMode {
    let mode = match metric {
        LoadedMetric::Float(_) => ScalarMode::Float,
        LoadedMetric::Rational(_) => cli.scalar,
    };
    if mode != cli.scalar {
        report.push(CheckResult::new("scalar", Status::Info).detail("float metric file, evaluated in f64"));
    }
    report.scalar = mode.name().to_string();
    mode
}

fn triple(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| format!("e{}", i + 1)).collect();
    format!("({})", parts.join(","))
}

fn pass_fail(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn residual_row(name: &str, r: &Residual, tol: f64) -> CheckResult {
    let ok = r.vanishes(tol);
    let row = CheckResult::new(name, pass_fail(ok)).residual(r.value);
    if ok {
        row
    } else {
        row.detail(format!("worst at {}", triple(&r.worst)))
    }
}

fn identity_row(name: &str, r: &IdentityCheck, tol: f64) -> CheckResult {
    let row = CheckResult::new(name, pass_fail(r.vanishes(tol))).residual(r.sampled);
    if r.exact && r.exact_zero {
        row.detail("identically zero")
    } else {
        row.detail(format!("{} points", r.per_sample.len()))
    }
}

fn validate(cli: &Cli, arg: &str, report: &mut RunReport) -> Result<i32> {
    let text = read_input(arg, report)?;
    let loaded = match parse_algebra(&text) {
        Ok(l) => l,
        Err(Error::Parse(m)) => return Err(CliError::Input(format!("{arg}: {m}"))),
        Err(e) => {
            report.push(CheckResult::new("antisymmetry", Status::Fail).detail(e.to_string()));
            return Ok(EXIT_CHECK_FAILED);
        }
    };
    let alg = &loaded.algebra;
    report.push(CheckResult::new("antisymmetry", Status::Pass).detail("brackets given for i < j"));
    let jacobi = match cli.scalar {
        ScalarMode::Rational => alg.jacobi_residual(),
        ScalarMode::Float => alg.to_f64().jacobi_residual(),
    };
    let ok = jacobi.vanishes(cli.tol);
    report.push(residual_row("jacobi", &jacobi, cli.tol));
    report.push(CheckResult::new("structure", Status::Info).detail(format!(
        "dim {}, {} nonzero brackets{}",
        alg.dim(),
        alg.nonzero_brackets().len(),
        if alg.is_abelian() { ", abelian" } else { "" }
    )));
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn check(cli: &Cli, alg_arg: &str, metric_arg: &str, count: usize, report: &mut RunReport) -> Result<i32> {
    let loaded = load_algebra(alg_arg, report)?;
    let n = loaded.algebra.dim();
    let metric = load_metric(metric_arg, n, report)?;
    let points = random_points(n, count, cli.seed);
    match effective_scalar(cli, &metric, report) {
        ScalarMode::Rational => check_with(&loaded.algebra, metric.to_rational(), &points, cli.tol, report),
        ScalarMode::Float => check_with(&loaded.algebra.to_f64(), metric.to_f64(), &points, cli.tol, report),
    }
}

fn check_with<S: Scalar>(
    alg: &LieAlgebra<S>,
    a: Matrix<S>,
    points: &[Vec<f64>],
    tol: f64,
    report: &mut RunReport,
) -> Result<i32> {
    let metric = match Metric::new(a) {
        Ok(m) => m,
        Err(e) => {
            report.push(CheckResult::new("metric", Status::Fail).detail(e.to_string()));
            return Ok(EXIT_CHECK_FAILED);
        }
    };
    let signature = metric.signature().map_err(|e| CliError::Input(e.to_string()))?;
    report.push(CheckResult::new("metric", Status::Pass).detail(format!("signature {signature}")));

    let conn = levi_civita_product(alg, &metric).map_err(|e| CliError::Input(e.to_string()))?;
    report.push(residual_row("torsion", &conn.torsion_defect(alg), tol));
    report.push(residual_row("metric_skew", &conn.skew_defect(&metric), tol));
    let pr = pr_residual_of(alg, &conn);
    let compatible = pr.vanishes(tol);
    report.push(residual_row("pr_residual", &pr, tol));

    let uni = alg.unimodularity(tol);
    let traces: Vec<String> = uni.traces.iter().map(|t| t.to_f64().to_string()).collect();
    report.push(CheckResult::new("unimodular", Status::Info).detail(format!(
        "{}, ad traces ({})",
        if uni.unimodular { "yes" } else { "no" },
        traces.join(", ")
    )));

    let lib = |e: Error| CliError::Input(e.to_string());
    report.push(identity_row("dpi", &dpi_residual(alg, &metric, points).map_err(lib)?, tol));
    report.push(identity_row("cyclic", &cyclic_schouten_check(alg, &metric, points).map_err(lib)?, tol));
    report.push(identity_row(
        "lie_derivative",
        &lie_derivative_metric_check(alg, &metric, points).map_err(lib)?,
        tol,
    ));

    let modular = dual_sweep(alg, &metric, points, &[SweepCheck::Modular]).map_err(lib)?;
    let worst = modular.iter().filter_map(|r| r.value).fold(0.0, f64::max);
    let status = if compatible && signature.is_definite() {
        pass_fail(worst <= tol)
    } else {
        Status::Info
    };
    let mut detail = format!("max over {} points", points.len());
    if modular.iter().any(|r| r.note.is_some()) {
        detail.push_str(", signed coframe sum");
    }
    report.push(CheckResult::new("modular", status).residual(worst).detail(detail));

    Ok(if report.any(Status::Fail) { EXIT_CHECK_FAILED } else { EXIT_OK })
}

fn default_out(arg: &str) -> PathBuf {
    match arg.strip_prefix("catalog:") {
        Some(name) => PathBuf::from(format!("{name}.metric.json")),
        None => {
            let p = Path::new(arg);
            let stem = p.file_stem().map_or("algebra".into(), |s| s.to_string_lossy());
            p.with_file_name(format!("{stem}.metric.json"))
        }
    }
}

fn search(cli: &Cli, arg: &str, cfg: SearchConfig, out: Option<&Path>, report: &mut RunReport) -> Result<i32> {
    let loaded = load_algebra(arg, report)?;
    let alg = &loaded.algebra;
    cfg.validate(alg.dim()).map_err(|e| CliError::Input(e.to_string()))?;
    let res = find_compatible_metric(alg, &cfg).map_err(|e| CliError::Input(e.to_string()))?;
    let signature = cfg.signature.to_string();

    let Some(cert) = &res.certificate else {
        let mut stops = BTreeMap::<String, usize>::new();
        for l in &res.log {
            *stops.entry(l.stop.clone()).or_default() += 1;
        }
        report.push(
            CheckResult::new("search", Status::NotFound)
                .residual(res.best_residual)
                .detail(format!("signature {signature}, {} restarts", res.restarts_run))
                .payload(json!({
                    "seed": res.seed,
                    "restarts_run": res.restarts_run,
                    "best_restart": res.best_restart,
                    "best_residual": res.best_residual,
                    "best_metric": res.best_metric,
                    "stops": stops,
                    "log": res.log,
                })),
        );
        return Ok(EXIT_NOT_FOUND);
    };

    let exact = match (cli.scalar, cert.exact_metric()) {
        (ScalarMode::Rational, Some(m)) if cert.exact => Some(m),
        _ => None,
    };
    let file = match &exact {
        Some(m) => metric_file_rational(m.matrix()),
        None => metric_file_float(cert.float_metric().matrix()),
    };
    let path = out.map_or_else(|| default_out(arg), Path::to_path_buf);
    let text = metric_text(&file);
    fs::write(&path, &text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })?;
    report.push(
        CheckResult::new("search", Status::Found)
            .residual(cert.float_residual)
            .detail(format!(
                "signature {}, {} certificate, restart {}",
                cert.signature,
                if cert.exact { "exact" } else { "float" },
                res.best_restart
            ))
            .payload(json!({
                "certificate": cert,
                "output": path.display().to_string(),
                "seed": res.seed,
                "restarts_run": res.restarts_run,
            })),
    );

    // re-read what was written
    let reread = parse_metric(&text).map_err(|e| CliError::Input(e.to_string()))?;
    let recheck = match reread {
        LoadedMetric::Rational(m) => pr_residual(alg, &Metric::new(m).map_err(|e| CliError::Input(e.to_string()))?),
        LoadedMetric::Float(m) => pr_residual(&alg.to_f64(), &Metric::new_unchecked(m)),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    let tol = if recheck.exact { cli.tol } else { cfg.residual_tol };
    report.push(residual_row("recheck", &recheck, tol).detail(path.display().to_string()));
    Ok(if report.any(Status::Fail) { EXIT_CHECK_FAILED } else { EXIT_OK })
}

/// One matrix row per line.
fn metric_text(file: &MetricFile) -> String {
    let rows: Vec<String> = file
        .matrix
        .iter()
        .map(|r| format!("    {}", serde_json::to_string(r).expect("row serialises")))
        .collect();
    let scalar = serde_json::to_value(file.scalar).expect("scalar serialises");
    format!("{{\n  \"matrix\": [\n{}\n  ],\n  \"scalar\": {scalar}\n}}\n", rows.join(",\n"))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn classify(cli: &Cli, dim: Option<usize>, samples: usize, restarts: usize, report: &mut RunReport) -> Result<i32> {
    let cfg = ClassifyConfig {
        dim,
        sample_count: samples,
        sample_seed: cli.seed,
        search: SearchConfig {
            restarts,
            residual_tol: cli.tol,
            rng_seed: cli.seed,
            ..SearchConfig::default()
        },
    };
    let rep = verify_theorem_1_6(&cfg).map_err(|e| CliError::Input(e.to_string()))?;
    for c in &rep.cases {
        let status = match c.verdict {
            Verdict::Agree => Status::Pass,
            Verdict::Soft => Status::Warn,
            Verdict::Hard => Status::Fail,
        };
        let mode = match c.mode {
            Mode::Pseudo => "any",
            Mode::Riemann => "riemann",
        };
        let mut detail = format!("predicted {}, found {}", yes_no(c.predicted), yes_no(c.found));
        if let Some(s) = &c.stratum {
            detail.push_str(&format!(", {s}"));
        }
        if c.variants.iter().any(|v| v.predicted != c.predicted) {
            detail.push_str(", basis dependent");
        }
        let payload = match &c.certificate {
            Some(cert) => json!({ "certificate": cert, "variants": c.variants }),
            None => json!({ "seed": c.seed, "restarts_run": c.restarts_run, "variants": c.variants }),
        };
        report.push(
            CheckResult::new(format!("{} [{mode}]", c.name), status)
                .residual(c.best_residual)
                .detail(detail)
                .payload(payload),
        );
    }
    report.push(CheckResult::new("summary", Status::Info).detail(format!(
        "{} agree, {} soft, {} hard, {} basis dependent",
        rep.agreements, rep.soft_disagreements, rep.hard_disagreements, rep.basis_dependent
    )));
    Ok(if rep.hard_disagreements == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    cli: &Cli,
    alg_arg: &str,
    metric_arg: &str,
    points_file: Option<&Path>,
    count: usize,
    checks: &[SweepCheck],
    out: Option<&Path>,
    report: &mut RunReport,
) -> Result<i32> {
    let loaded = load_algebra(alg_arg, report)?;
    let n = loaded.algebra.dim();
    let metric = load_metric(metric_arg, n, report)?;
    let points: Vec<Vec<f64>> = match points_file {
        Some(p) => {
            let label = p.display().to_string();
            let text = read_input(&label, report)?;
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{label}: {e}")))?
        }
        None => random_points(n, count, cli.seed),
    };
    let input = |e: Error| CliError::Input(e.to_string());
    let records = match effective_scalar(cli, &metric, report) {
        ScalarMode::Rational => dual_sweep::<Rational>(
            &loaded.algebra,
            &Metric::new(metric.to_rational()).map_err(input)?,
            &points,
            checks,
        ),
        ScalarMode::Float => dual_sweep(
            &loaded.algebra.to_f64(),
            &Metric::new(metric.to_f64()).map_err(input)?,
            &points,
            checks,
        ),
    }
    .map_err(input)?;

    let text = serde_json::to_string_pretty(&records).expect("records serialise");
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(|source| CliError::Write {
            path: p.display().to_string(),
            source,
        })?,
        None => println!("{text}"),
    }

    for &c in checks {
        report.push(sweep_row(c, &records, cli.tol));
    }
    Ok(if report.any(Status::Fail) { EXIT_CHECK_FAILED } else { EXIT_OK })
}

/// Cyclic and Lie-derivative sums vanish for every metric; the other
/// columns are informational.
fn sweep_row(check: SweepCheck, records: &[SweepRecord], tol: f64) -> CheckResult {
    let mine: Vec<&SweepRecord> = records.iter().filter(|r| r.check == check).collect();
    let worst = mine.iter().filter_map(|r| r.value).fold(0.0, f64::max);
    let missing = mine.iter().filter(|r| r.value.is_none()).count();
    let status = match check {
        SweepCheck::Cyclic | SweepCheck::LieDerivative => pass_fail(worst <= tol),
        _ => Status::Info,
    };
    let mut detail = format!("{} points", mine.len());
    if missing > 0 {
        detail.push_str(&format!(", {missing} undefined"));
    }
    CheckResult::new(check.name(), status).residual(worst).detail(detail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use liecompat::scalar::ratio;

    #[test]
    fn default_output_paths() {
        assert_eq!(default_out("catalog:so3"), PathBuf::from("so3.metric.json"));
        assert_eq!(default_out("data/h.json"), PathBuf::from("data/h.metric.json"));
    }

    #[test]
    fn metric_text_round_trips() {
        let m = Matrix::from_rows(vec![vec![ratio(1, 3), ratio(-2, 1)], vec![ratio(-2, 1), ratio(0, 1)]]).unwrap();
        let text = metric_text(&metric_file_rational(&m));
        assert_eq!(text.lines().count(), 7);
        assert_eq!(parse_metric(&text).unwrap(), LoadedMetric::Rational(m));
    }

    #[test]
    fn triples_are_one_based() {
        assert_eq!(triple(&[0, 0, 2]), "(e1,e1,e3)");
    }
}
