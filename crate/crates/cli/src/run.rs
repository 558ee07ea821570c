//! Experiment execution and the JSON report.

use std::time::Instant;

use nctorus::connection_space::{
    bracket, default_probes, general_inner_curvature, inner_curvature, make_commutant_mu,
    mu_kernel_residual, normalize_inner, perturbed_compatibility_check, Direction, InnerDerivation,
    MuMap,
};
use nctorus::geometry::{
    connection_coeffs, gauss_bonnet_conformal, gauss_bonnet_diagonal, Metric, ModuleVector,
};
use nctorus::oracle::PositivityCertificate;
use nctorus::{AlgebraMatrix, Error, SolverOptions, TorusElement, TruncationPolicy};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    build_element, build_metric, Config, ElementSpec, Experiment, MetricSpec, MuSpec,
};

pub const REPORT_SCHEMA: &str = "nct-report/1";

/// Below this, consecutive Gauss-Bonnet values count as noise when checking
/// monotone decrease.
const NOISE_FLOOR: f64 = 1e-14;
/// Smallest compatibility residual counted as detecting a kernel violation.
const DETECTION_FLOOR: f64 = 1e-3;
/// Smallest curvature norm counted as a bracket violation.
const VIOLATION_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
    pub oracle_q: usize,
    pub max_n: Option<u32>,
    pub fail_fast: bool,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub p: i64,
    pub q: usize,
    pub heuristic: bool,
}

impl From<&PositivityCertificate> for Certificate {
    fn from(c: &PositivityCertificate) -> Self {
        Self {
            lambda_min: c.lambda_min,
            lambda_max: c.lambda_max,
            p: c.p,
            q: c.q,
            heuristic: c.heuristic,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub radius: u32,
    pub theta: f64,
    pub tol: f64,
    pub value: [f64; 2],
    pub abs: f64,
    pub tail_mass: f64,
    pub max_residual: f64,
    pub path_difference: Option<f64>,
    pub truncation_limited: bool,
    pub certificates: Vec<Certificate>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=",
            limit,
            pass: value <= limit,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=",
            limit,
            pass: value >= limit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub inputs: serde_json::Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepPoint>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub theta: f64,
    pub seed: u64,
    pub oracle_q: usize,
    pub status: Status,
    pub experiments: Vec<ExperimentReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn options(tol: f64, oracle_q: usize) -> SolverOptions {
    SolverOptions {
        tol,
        oracle_q,
        ..SolverOptions::default()
    }
}

/// One Gauss-Bonnet evaluation at the given radius, theta and tolerance.
pub fn gauss_bonnet_point(
    metric: &MetricSpec,
    theta: f64,
    radius: u32,
    tol: f64,
    oracle_q: usize,
) -> nctorus::Result<SweepPoint> {
    let start = Instant::now();
    let opts = options(tol, oracle_q);
    let mut pol = TruncationPolicy::new(radius);
    let el = |s: &ElementSpec, pol: &mut TruncationPolicy| build_element(s, theta, &opts, pol);
    let gb = match metric {
        MetricSpec::Flat => {
            let one = TorusElement::one(theta);
            gauss_bonnet_diagonal(&one, &one, &opts, &mut pol)?
        }
        MetricSpec::Diagonal { a1, a2 } => {
            let a1 = el(a1, &mut pol)?;
            let a2 = el(a2, &mut pol)?;
            gauss_bonnet_diagonal(&a1, &a2, &opts, &mut pol)?
        }
        MetricSpec::Conformal { h } => {
            let h = el(h, &mut pol)?;
            gauss_bonnet_conformal(&h, &opts, &mut pol)?
        }
        MetricSpec::General { .. } => {
            return Err(Error::InvalidInput(
                "Gauss-Bonnet needs a diagonal or conformal metric".into(),
            ))
        }
    };
    Ok(SweepPoint {
        radius,
        theta,
        tol,
        value: [gb.value.re, gb.value.im],
        abs: gb.value.norm(),
        tail_mass: pol.tail_report(),
        max_residual: gb.max_residual,
        path_difference: gb.path_difference,
        truncation_limited: gb.truncation_limited,
        certificates: gb.certificates.iter().map(Certificate::from).collect(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

struct Outcome {
    sweep: Vec<SweepPoint>,
    checks: Vec<Check>,
    skipped: Vec<String>,
}

fn run_gauss_bonnet(
    metric: &MetricSpec,
    radii: &[u32],
    tol: f64,
    max_abs: Option<f64>,
    monotone: bool,
    theta: f64,
    oracle_q: usize,
) -> nctorus::Result<Outcome> {
    let sweep = radii
        .iter()
        .map(|&n| gauss_bonnet_point(metric, theta, n, tol, oracle_q))
        .collect::<nctorus::Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    let last = sweep.last().expect("radii validated non-empty");
    if let Some(limit) = max_abs {
        checks.push(Check::at_most(
            format!("|value| at N = {}", last.radius),
            last.abs,
            limit,
        ));
    }
    if monotone {
        for w in sweep.windows(2) {
            checks.push(Check::at_most(
                format!("|value| at N = {} vs 2x N = {}", w[1].radius, w[0].radius),
                w[1].abs,
                2.0 * w[0].abs.max(NOISE_FLOOR),
            ));
        }
    }
    Ok(Outcome {
        sweep,
        checks,
        skipped: Vec::new(),
    })
}

fn random_element(rng: &mut ChaCha8Rng, theta: f64) -> TorusElement {
    TorusElement::from_terms(
        theta,
        (0..3).map(|_| {
            (
                (rng.gen_range(-2..=2), rng.gen_range(-2..=2)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        }),
    )
}

fn basis_pairs(theta: f64) -> nctorus::Result<Vec<(ModuleVector, ModuleVector)>> {
    let mut out = Vec::new();
    for k in 1..=2 {
        for l in 1..=2 {
            out.push((
                ModuleVector::basis(theta, k)?,
                ModuleVector::basis(theta, l)?,
            ));
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn run_proposition1(
    metric: &MetricSpec,
    radius: u32,
    polynomials: &[Vec<f64>],
    random_vectors: usize,
    violations: &[[[ElementSpec; 2]; 2]],
    kernel_tol: f64,
    compat_tol: f64,
    theta: f64,
    oracle_q: usize,
    seed: u64,
) -> nctorus::Result<Outcome> {
    let opts = options(1e-12, oracle_q);
    let mut pol = TruncationPolicy::new(radius);
    let g = build_metric(metric, theta, &opts, &mut pol)?;
    let probes = default_probes(theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = basis_pairs(theta)?;
    for _ in 0..random_vectors {
        let x = ModuleVector::new(
            random_element(&mut rng, theta),
            random_element(&mut rng, theta),
        )?;
        let y = ModuleVector::new(
            random_element(&mut rng, theta),
            random_element(&mut rng, theta),
        )?;
        pairs.push((x, y));
    }

    let compat_max =
        |nu: &AlgebraMatrix, pairs: &[(ModuleVector, ModuleVector)]| -> nctorus::Result<f64> {
            let mut worst = 0.0f64;
            for d in &probes {
                let mu = MuMap::new(theta).with(d.clone(), nu.clone())?;
                for (x, y) in pairs {
                    worst = worst.max(perturbed_compatibility_check(&g, &mu, d, x, y)?);
                }
            }
            Ok(worst)
        };

    let mut checks = Vec::new();
    for (i, f) in polynomials.iter().enumerate() {
        let nu = make_commutant_mu(f, &g);
        checks.push(Check::at_most(
            format!("kernel residual of i f_{i}(gamma)"),
            mu_kernel_residual(&nu, &g)?,
            kernel_tol,
        ));
        checks.push(Check::at_most(
            format!("compatibility residual of i f_{i}(gamma)"),
            compat_max(&nu, &pairs)?,
            compat_tol,
        ));
    }
    let base = make_commutant_mu(&polynomials[0], &g);
    let basis = basis_pairs(theta)?;
    for (k, v) in violations.iter().enumerate() {
        let mut rows = Vec::new();
        for row in v {
            let mut r = Vec::new();
            for s in row {
                r.push(build_element(s, theta, &opts, &mut pol)?);
            }
            rows.push(r);
        }
        let nu = base.add(&AlgebraMatrix::from_rows(rows)?)?;
        let kernel = mu_kernel_residual(&nu, &g)?;
        checks.push(Check::at_least(
            format!("kernel residual of violation {k}"),
            kernel,
            1e-2,
        ));
        checks.push(Check::at_least(
            format!("compatibility residual of violation {k} on basis pairs"),
            compat_max(&nu, &basis)?,
            DETECTION_FLOOR,
        ));
    }
    Ok(Outcome {
        sweep: Vec::new(),
        checks,
        skipped: Vec::new(),
    })
}

fn homomorphism_mu(theta: f64, probes: &[InnerDerivation]) -> nctorus::Result<MuMap> {
    let mut mu = MuMap::new(theta);
    let mut basis = probes.to_vec();
    for x in probes {
        for y in probes {
            basis.push(bracket(x, y)?);
        }
    }
    for d in basis {
        let value = AlgebraMatrix::element_identity(&d.element().scale_real(-1.0), 2);
        match mu.insert(d, value) {
            Ok(()) | Err(Error::InvalidInput(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(mu)
}

fn run_proposition2(
    metric: &MetricSpec,
    radius: u32,
    mu_spec: &MuSpec,
    tol: f64,
    theta: f64,
    oracle_q: usize,
) -> nctorus::Result<Outcome> {
    let opts = options(1e-12, oracle_q);
    let mut pol = TruncationPolicy::new(radius);
    let g: Metric = build_metric(metric, theta, &opts, &mut pol)?;
    let conn = connection_coeffs(&g);
    let i = Complex64::new(0.0, 1.0);
    let mut skipped = Vec::new();

    let (mu, pairs, expect_flat) = match mu_spec {
        MuSpec::Homomorphism => {
            let probes = default_probes(theta)?;
            let mut pairs = Vec::new();
            for a in &probes {
                for b in &probes {
                    pairs.push((a.clone(), b.clone()));
                }
            }
            (homomorphism_mu(theta, &probes)?, pairs, true)
        }
        MuSpec::Violating => {
            let u = |j| TorusElement::generator(theta, j);
            let a = normalize_inner(&(&u(1)? - &u(1)?.star()))?;
            let b = normalize_inner(&(&u(2)? - &u(2)?.star()))?;
            let gamma = g.matrix();
            let mu = MuMap::new(theta)
                .with(a.clone(), AlgebraMatrix::scalar_identity(theta, 2, i))?
                .with(b.clone(), gamma.scale(i))?
                .with(bracket(&b, &a)?, gamma.mul(gamma)?.scale(i))?;
            (mu, vec![(a, b)], false)
        }
        MuSpec::Table {
            entries,
            expect_flat,
        } => {
            let mut mu = MuMap::new(theta);
            let mut ds = Vec::new();
            for e in entries {
                let d = normalize_inner(&build_element(&e.derivation, theta, &opts, &mut pol)?)?;
                mu.insert(d.clone(), make_commutant_mu(&e.gamma_polynomial, &g))?;
                ds.push(d);
            }
            let mut pairs = Vec::new();
            for (k, a) in ds.iter().enumerate() {
                for b in &ds[k + 1..] {
                    pairs.push((a.clone(), b.clone()));
                }
            }
            (mu, pairs, *expect_flat)
        }
    };

    let (mut worst, mut cross) = (0.0f64, 0.0f64);
    for (k, (a, b)) in pairs.iter().enumerate() {
        let r = match inner_curvature(&mu, a, b) {
            Ok(r) => r,
            Err(Error::OutsideSpan { residual }) => {
                skipped.push(format!(
                    "pair {k}: bracket outside the span of mu (residual {residual:.3e})"
                ));
                continue;
            }
            Err(e) => return Err(e),
        };
        let r2 = general_inner_curvature(&conn, &mu, a, &Direction::Inner(b.clone()))?;
        worst = worst.max(r.norm_l1());
        cross = cross.max(r.sub(&r2)?.norm_l1());
    }
    let mut checks = Vec::new();
    if expect_flat {
        checks.push(Check::at_most("max inner curvature", worst, tol));
    } else {
        checks.push(Check::at_least(
            "max inner curvature",
            worst,
            VIOLATION_FLOOR,
        ));
    }
    checks.push(Check::at_most("cross-path difference", cross, tol));
    Ok(Outcome {
        sweep: Vec::new(),
        checks,
        skipped,
    })
}

fn run_experiment(
    cfg: &Config,
    index: usize,
    e: &Experiment,
    opts: &RunOptions,
) -> ExperimentReport {
    let start = Instant::now();
    let theta = cfg.theta;
    let q = opts.oracle_q;
    let result = match e {
        Experiment::GaussBonnet {
            metric,
            radii,
            tol,
            max_abs,
            monotone,
            ..
        } => {
            let (kept, dropped): (Vec<u32>, Vec<u32>) = radii
                .iter()
                .partition(|&&n| opts.max_n.is_none_or(|m| n <= m));
            run_gauss_bonnet(metric, &kept, *tol, *max_abs, *monotone, theta, q).map(|mut o| {
                o.skipped
                    .extend(dropped.iter().map(|n| format!("N = {n} exceeds --max-n")));
                o
            })
        }
        Experiment::Proposition1 {
            metric,
            radius,
            polynomials,
            random_vectors,
            violations,
            kernel_tol,
            compat_tol,
            ..
        } => run_proposition1(
            metric,
            *radius,
            polynomials,
            *random_vectors,
            violations,
            *kernel_tol,
            *compat_tol,
            theta,
            q,
            opts.seed.wrapping_add(index as u64),
        ),
        Experiment::Proposition2 {
            metric,
            radius,
            mu,
            tol,
            ..
        } => run_proposition2(metric, *radius, mu, *tol, theta, q),
    };
    let inputs = serde_json::to_value(e).expect("config serializes");
    let (status, error, outcome) = match result {
        Ok(o) => {
            let ok = o.checks.iter().all(|c| c.pass);
            (if ok { Status::Pass } else { Status::Fail }, None, o)
        }
        Err(err) => (
            Status::Fail,
            Some(err.to_string()),
            Outcome {
                sweep: Vec::new(),
                checks: Vec::new(),
                skipped: Vec::new(),
            },
        ),
    };
    ExperimentReport {
        name: e.name().to_string(),
        kind: e.kind(),
        status,
        error,
        inputs,
        sweep: outcome.sweep,
        checks: outcome.checks,
        skipped: outcome.skipped,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn skipped_report(e: &Experiment) -> ExperimentReport {
    ExperimentReport {
        name: e.name().to_string(),
        kind: e.kind(),
        status: Status::Skipped,
        error: None,
        inputs: serde_json::to_value(e).expect("config serializes"),
        sweep: Vec::new(),
        checks: Vec::new(),
        skipped: Vec::new(),
        seconds: 0.0,
    }
}

pub fn run(cfg: &Config, opts: &RunOptions) -> Report {
    let experiments: Vec<ExperimentReport> = if opts.fail_fast {
        let mut out = Vec::new();
        let mut failed = false;
        for (k, e) in cfg.experiments.iter().enumerate() {
            if failed {
                out.push(skipped_report(e));
                continue;
            }
            let r = run_experiment(cfg, k, e, opts);
            failed = r.status == Status::Fail;
            out.push(r);
        }
        out
    } else {
        cfg.experiments
            .par_iter()
            .enumerate()
            .map(|(k, e)| run_experiment(cfg, k, e, opts))
            .collect()
    };
    let status = if experiments.iter().any(|e| e.status == Status::Fail) {
        Status::Fail
    } else {
        Status::Pass
    };
    Report {
        schema: REPORT_SCHEMA,
        theta: cfg.theta,
        seed: opts.seed,
        oracle_q: opts.oracle_q,
        status,
        experiments,
    }
}
