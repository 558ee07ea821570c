//! Experiment configuration: schema, validation and element construction.

use std::path::Path;

use nctorus::functional::{circle_function, invert, sample_circle};
use nctorus::geometry::Metric;
use nctorus::{SolverOptions, TorusElement, TruncationPolicy};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_THETA: f64 = 0.3183098861837907;

/// Problems with the configuration itself (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn default_theta() -> f64 {
    DEFAULT_THETA
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub oracle_q: Option<usize>,
    pub experiments: Vec<Experiment>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementSpec {
    /// `[[m, n, re, im], ...]`
    Coeffs(Vec<(i32, i32, f64, f64)>),
    Scalar(f64),
    Circle(CircleSpec),
    /// Computed with `invert` at the experiment radius.
    InverseOf(Box<ElementSpec>),
}

/// `f(t) = (c0 + sum_k c_k cos(k t))^power` as a function of `u_generator`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSpec {
    pub generator: usize,
    pub cosine: Vec<f64>,
    #[serde(default = "one")]
    pub power: f64,
    pub bandwidth: usize,
    #[serde(default)]
    pub grid: Option<usize>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    Flat,
    Conformal {
        h: ElementSpec,
    },
    Diagonal {
        a1: ElementSpec,
        a2: ElementSpec,
    },
    General {
        g11: ElementSpec,
        g12: ElementSpec,
        g22: ElementSpec,
    },
}

fn default_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    GaussBonnet {
        name: String,
        metric: MetricSpec,
        radii: Vec<u32>,
        #[serde(default = "default_tol")]
        tol: f64,
        /// Asserted bound on the value at the largest radius.
        #[serde(default)]
        max_abs: Option<f64>,
        /// Assert `|v(N_k+1)| <= 2 |v(N_k)|` along the radii.
        #[serde(default)]
        monotone: bool,
    },
    Proposition1 {
        name: String,
        metric: MetricSpec,
        radius: u32,
        /// Real polynomials `f`; each gives `mu = i f(gamma)`.
        polynomials: Vec<Vec<f64>>,
        #[serde(default = "default_vectors")]
        random_vectors: usize,
        /// Perturbations added to `i f(gamma)` that must be detected.
        #[serde(default)]
        violations: Vec<[[ElementSpec; 2]; 2]>,
        #[serde(default = "default_kernel_tol")]
        kernel_tol: f64,
        #[serde(default = "default_compat_tol")]
        compat_tol: f64,
    },
    Proposition2 {
        name: String,
        metric: MetricSpec,
        radius: u32,
        mu: MuSpec,
        #[serde(default = "default_kernel_tol")]
        tol: f64,
    },
}

fn default_vectors() -> usize {
    4
}

fn default_kernel_tol() -> f64 {
    1e-10
}

fn default_compat_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MuSpec {
    /// `mu(a) = -a I`, a Lie homomorphism, on the default probes and their brackets.
    Homomorphism,
    /// `mu(u1 - u1*) = i`, `mu(u2 - u2*) = i gamma`, `mu([., .]) = i gamma^2`.
    Violating,
    /// Explicit values `i f(gamma)` on the given derivations; pairs whose bracket
    /// leaves the span are skipped and reported.
    Table {
        entries: Vec<MuEntry>,
        expect_flat: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuEntry {
    pub derivation: ElementSpec,
    pub gamma_polynomial: Vec<f64>,
}

impl Experiment {
    pub fn name(&self) -> &str {
        match self {
            Experiment::GaussBonnet { name, .. }
            | Experiment::Proposition1 { name, .. }
            | Experiment::Proposition2 { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::GaussBonnet { .. } => "gauss_bonnet",
            Experiment::Proposition1 { .. } => "proposition1",
            Experiment::Proposition2 { .. } => "proposition2",
        }
    }
}

pub fn load(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let cfg: Config = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(bad(format!(
                "unsupported version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if !(self.theta.is_finite() && (0.0..1.0).contains(&self.theta)) {
            return Err(bad(format!("theta must lie in [0, 1), got {}", self.theta)));
        }
        if self.experiments.is_empty() {
            return Err(bad("experiments: at least one experiment is required"));
        }
        let mut names = std::collections::BTreeSet::new();
        for (i, e) in self.experiments.iter().enumerate() {
            let at = format!("experiments[{i}] ({})", e.name());
            if !names.insert(e.name().to_string()) {
                return Err(bad(format!("{at}: duplicate name")));
            }
            match e {
                Experiment::GaussBonnet {
                    metric, radii, tol, ..
                } => {
                    if radii.is_empty() {
                        return Err(bad(format!("{at}.radii: must not be empty")));
                    }
                    if matches!(metric, MetricSpec::General { .. }) {
                        return Err(bad(format!(
                            "{at}.metric: the Gauss-Bonnet integral is defined for flat, conformal and diagonal metrics"
                        )));
                    }
                    check_tol(&at, *tol)?;
                    validate_metric(&format!("{at}.metric"), metric)?;
                }
                Experiment::Proposition1 {
                    metric,
                    polynomials,
                    violations,
                    ..
                } => {
                    if polynomials.is_empty() {
                        return Err(bad(format!("{at}.polynomials: must not be empty")));
                    }
                    validate_metric(&format!("{at}.metric"), metric)?;
                    for (k, v) in violations.iter().enumerate() {
                        for (r, row) in v.iter().enumerate() {
                            for (c, s) in row.iter().enumerate() {
                                validate_element(&format!("{at}.violations[{k}][{r}][{c}]"), s)?;
                            }
                        }
                    }
                }
                Experiment::Proposition2 {
                    metric, mu, tol, ..
                } => {
                    check_tol(&at, *tol)?;
                    validate_metric(&format!("{at}.metric"), metric)?;
                    if let MuSpec::Table { entries, .. } = mu {
                        for (k, en) in entries.iter().enumerate() {
                            validate_element(
                                &format!("{at}.mu.entries[{k}].derivation"),
                                &en.derivation,
                            )?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl Config {
    /// Rejects experiments that cannot run under a `--max-n` cap.
    pub fn check_max_n(&self, max_n: u32) -> Result<(), ConfigError> {
        for (i, e) in self.experiments.iter().enumerate() {
            let at = format!("experiments[{i}] ({})", e.name());
            match e {
                Experiment::GaussBonnet { radii, .. } if radii.iter().all(|&n| n > max_n) => {
                    return Err(bad(format!(
                        "{at}.radii: no radius is within --max-n {max_n}"
                    )));
                }
                Experiment::Proposition1 { radius, .. }
                | Experiment::Proposition2 { radius, .. }
                    if *radius > max_n =>
                {
                    return Err(bad(format!(
                        "{at}.radius: {radius} exceeds --max-n {max_n}"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn check_tol(at: &str, tol: f64) -> Result<(), ConfigError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(bad(format!("{at}.tol: must be positive, got {tol}")));
    }
    Ok(())
}

fn validate_metric(at: &str, m: &MetricSpec) -> Result<(), ConfigError> {
    match m {
        MetricSpec::Flat => Ok(()),
        MetricSpec::Conformal { h } => validate_element(&format!("{at}.h"), h),
        MetricSpec::Diagonal { a1, a2 } => {
            validate_element(&format!("{at}.a1"), a1)?;
            validate_element(&format!("{at}.a2"), a2)
        }
        MetricSpec::General { g11, g12, g22 } => {
            validate_element(&format!("{at}.g11"), g11)?;
            validate_element(&format!("{at}.g12"), g12)?;
            validate_element(&format!("{at}.g22"), g22)
        }
    }
}

fn validate_element(at: &str, e: &ElementSpec) -> Result<(), ConfigError> {
    match e {
        ElementSpec::Coeffs(cs) => {
            if cs
                .iter()
                .any(|(_, _, re, im)| !(re.is_finite() && im.is_finite()))
            {
                return Err(bad(format!("{at}.coeffs: non-finite coefficient")));
            }
            Ok(())
        }
        ElementSpec::Scalar(x) if !x.is_finite() => Err(bad(format!("{at}.scalar: non-finite"))),
        ElementSpec::Scalar(_) => Ok(()),
        ElementSpec::Circle(c) => {
            if c.generator != 1 && c.generator != 2 {
                return Err(bad(format!("{at}.circle.generator: must be 1 or 2")));
            }
            if c.cosine.is_empty() {
                return Err(bad(format!("{at}.circle.cosine: must not be empty")));
            }
            let grid = c.grid.unwrap_or(4 * c.bandwidth + 1);
            if grid < 2 * c.bandwidth + 1 {
                return Err(bad(format!(
                    "{at}.circle.grid: needs at least 2 * bandwidth + 1 points"
                )));
            }
            Ok(())
        }
        ElementSpec::InverseOf(inner) => validate_element(&format!("{at}.inverse_of"), inner),
    }
}

/// Builds an element at `theta`; inverses are taken at the policy radius.
pub fn build_element(
    spec: &ElementSpec,
    theta: f64,
    opts: &SolverOptions,
    policy: &mut TruncationPolicy,
) -> nctorus::Result<TorusElement> {
    match spec {
        ElementSpec::Coeffs(cs) => {
            let mut out = TorusElement::zero(theta);
            for &(m, n, re, im) in cs {
                out = &out + &TorusElement::monomial(theta, m, n, Complex64::new(re, im));
            }
            Ok(out)
        }
        ElementSpec::Scalar(x) => Ok(TorusElement::real(theta, *x)),
        ElementSpec::Circle(c) => {
            let grid = c.grid.unwrap_or(4 * c.bandwidth + 1);
            let f = |t: f64| {
                let s: f64 = c
                    .cosine
                    .iter()
                    .enumerate()
                    .map(|(k, ck)| ck * (k as f64 * t).cos())
                    .sum();
                s.powf(c.power)
            };
            circle_function(theta, &sample_circle(f, grid), c.generator, c.bandwidth)
        }
        ElementSpec::InverseOf(inner) => {
            let a = build_element(inner, theta, opts, policy)?;
            Ok(invert(&a, opts, policy)?.value)
        }
    }
}

pub fn build_metric(
    spec: &MetricSpec,
    theta: f64,
    opts: &SolverOptions,
    policy: &mut TruncationPolicy,
) -> nctorus::Result<Metric> {
    let mut el = |s: &ElementSpec| build_element(s, theta, opts, policy);
    match spec {
        MetricSpec::Flat => Ok(Metric::flat(theta)),
        MetricSpec::Conformal { h } => {
            let h = el(h)?;
            Metric::conformal(&h, opts, policy)
        }
        MetricSpec::Diagonal { a1, a2 } => {
            let (a1, a2) = (el(a1)?, el(a2)?);
            Metric::diagonal(&a1, &a2, opts, policy)
        }
        MetricSpec::General { g11, g12, g22 } => {
            let (g11, g12, g22) = (el(g11)?, el(g12)?, el(g22)?);
            Metric::general(&g11, &g12, &g22, opts, policy)
        }
    }
}
