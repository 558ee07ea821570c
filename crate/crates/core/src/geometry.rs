//! Metrics on the free module `(A_theta)^2`, the Levi-Civita connection,
//! the curvature component `R_1212` and Gauss-Bonnet integrals.
//!
//! Conventions:
//!
//! * a module vector `x1 d1 + x2 d2` is a row `(x1, x2)`;
//! * `<X, Y> = sum_jk x_j g_jk y_k*` (left-linear, right conjugate-linear);
//! * `nabla_j d_k = sum_l Gamma^l_jk d_l`;
//! * curvature follows `R(X, Y) = nabla_Y nabla_X - nabla_X nabla_Y + nabla_[X,Y]`,
//!   the opposite sign of the usual differential-geometry convention, and
//!   `R_1212 = <R(d1, d2) d1, d2>`.

use num_complex::Complex64;

use crate::algebra::{TorusElement, TruncationPolicy};
use crate::algebra_matrix::AlgebraMatrix;
use crate::error::{Error, Result};
use crate::functional::{self, Certified, SolverOptions};
use crate::oracle::{self, PositivityCertificate};

/// Metrics whose oracle `lambda_min` falls at or below this are rejected.
pub const MIN_METRIC_EIGENVALUE: f64 = 1e-6;

/// `X = x1 d1 + x2 d2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    pub x: [TorusElement; 2],
}

impl ModuleVector {
    pub fn new(x1: TorusElement, x2: TorusElement) -> Result<Self> {
        if !x1.same_theta(&x2) {
            return Err(Error::ThetaMismatch {
                left: x1.theta(),
                right: x2.theta(),
            });
        }
        Ok(Self { x: [x1, x2] })
    }

    /// The coordinate derivation `d_k`, `k` in {1, 2}.
    pub fn basis(theta: f64, k: usize) -> Result<Self> {
        let (one, zero) = (TorusElement::one(theta), TorusElement::zero(theta));
        match k {
            1 => Ok(Self { x: [one, zero] }),
            2 => Ok(Self { x: [zero, one] }),
            _ => Err(Error::BadDirection(k)),
        }
    }

    pub fn zero(theta: f64) -> Self {
        Self {
            x: [TorusElement::zero(theta), TorusElement::zero(theta)],
        }
    }

    pub fn theta(&self) -> f64 {
        self.x[0].theta()
    }

    /// `a X`.
    pub fn left_mul(&self, a: &TorusElement) -> Self {
        Self {
            x: [a * &self.x[0], a * &self.x[1]],
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            x: [&self.x[0] + &other.x[0], &self.x[1] + &other.x[1]],
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            x: [&self.x[0] - &other.x[0], &self.x[1] - &other.x[1]],
        }
    }

    /// Image under the module endomorphism with matrix `nu`, where
    /// `nu(d_k) = sum_l nu_kl d_l`; on rows this is `X nu`.
    pub fn apply_endomorphism(&self, nu: &AlgebraMatrix) -> Self {
        let mut out = [TorusElement::zero(self.theta()), TorusElement::zero(self.theta())];
        for (l, slot) in out.iter_mut().enumerate() {
            for k in 0..2 {
                if self.x[k].is_empty() {
                    continue;
                }
                *slot = &*slot + &(&self.x[k] * nu.get(k, l));
            }
        }
        Self { x: out }
    }

    pub fn norm_l1(&self) -> f64 {
        self.x[0].norm_l1() + self.x[1].norm_l1()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    Flat,
    Conformal { h: TorusElement },
    Diagonal,
    General,
}

/// A positive invertible `2 x 2` metric with self-adjoint entries, together
/// with its certified inverse.
#[derive(Debug, Clone)]
pub struct Metric {
    g: AlgebraMatrix,
    kind: MetricKind,
    inverse: AlgebraMatrix,
    inverse_residual: f64,
    certificates: Vec<PositivityCertificate>,
}

fn require_self_adjoint(name: &str, a: &TorusElement) -> Result<()> {
    let defect = a.self_adjoint_defect();
    if defect > 1e-10 * a.norm_l1().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "metric entry {name} is not self-adjoint (defect {defect:.3e})"
        )));
    }
    Ok(())
}

impl Metric {
    pub fn flat(theta: f64) -> Self {
        Self {
            g: AlgebraMatrix::identity(theta, 2),
            kind: MetricKind::Flat,
            inverse: AlgebraMatrix::identity(theta, 2),
            inverse_residual: 0.0,
            certificates: Vec::new(),
        }
    }

    /// `g = diag(a1, a2)`; both entries are oracle-certified and inverted.
    pub fn diagonal(
        a1: &TorusElement,
        a2: &TorusElement,
        opts: &SolverOptions,
        policy: &mut TruncationPolicy,
    ) -> Result<Self> {
        if !a1.same_theta(a2) {
            return Err(Error::ThetaMismatch {
                left: a1.theta(),
                right: a2.theta(),
            });
        }
        require_self_adjoint("a1", a1)?;
        require_self_adjoint("a2", a2)?;
        let strict = SolverOptions {
            positivity_threshold: opts.positivity_threshold.max(MIN_METRIC_EIGENVALUE),
            ..*opts
        };
        let i1 = functional::invert(a1, &strict, policy)?;
        let i2 = functional::invert(a2, &strict, policy)?;
        let certificates = [&i1, &i2].iter().filter_map(|c| c.certificate).collect();
        Ok(Self {
            g: AlgebraMatrix::diagonal(vec![a1.clone(), a2.clone()])?,
            kind: MetricKind::Diagonal,
            inverse_residual: i1.residual.max(i2.residual),
            inverse: AlgebraMatrix::diagonal(vec![i1.value, i2.value])?,
            certificates,
        })
    }

    /// `g = e^h I_2`, inverse `e^-h I_2`; positivity is automatic.
    pub fn conformal(
        h: &TorusElement,
        opts: &SolverOptions,
        policy: &mut TruncationPolicy,
    ) -> Result<Self> {
        require_self_adjoint("h", h)?;
        let ep = functional::exp_series(h, opts, policy)?;
        let em = functional::exp_series(&-h, opts, policy)?;
        let residual = (&(&ep.value * &em.value) - &TorusElement::one(h.theta())).norm_l1();
        Ok(Self {
            g: AlgebraMatrix::element_identity(&ep.value, 2),
            kind: MetricKind::Conformal { h: h.clone() },
            inverse: AlgebraMatrix::element_identity(&em.value, 2),
            inverse_residual: residual,
            certificates: Vec::new(),
        })
    }

    /// General symmetric metric `[[g11, g12], [g12, g22]]` with self-adjoint entries.
    pub fn general(
        g11: &TorusElement,
        g12: &TorusElement,
        g22: &TorusElement,
        opts: &SolverOptions,
        policy: &mut TruncationPolicy,
    ) -> Result<Self> {
        require_self_adjoint("g11", g11)?;
        require_self_adjoint("g12", g12)?;
        require_self_adjoint("g22", g22)?;
        let g = AlgebraMatrix::from_rows(vec![
            vec![g11.clone(), g12.clone()],
            vec![g12.clone(), g22.clone()],
        ])?;
        let cert = oracle::certify_positive_matrix(
            &g,
            opts.oracle_q,
            opts.positivity_threshold.max(MIN_METRIC_EIGENVALUE),
        )?;
        let inv = invert_matrix(&g, opts, policy)?;
        Ok(Self {
            g,
            kind: MetricKind::General,
            inverse: inv.value,
            inverse_residual: inv.residual,
            certificates: vec![cert],
        })
    }

    pub fn matrix(&self) -> &AlgebraMatrix {
        &self.g
    }

    pub fn entry(&self, j: usize, k: usize) -> &TorusElement {
        self.g.get(j, k)
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn inverse(&self) -> &AlgebraMatrix {
        &self.inverse
    }

    pub fn inverse_residual(&self) -> f64 {
        self.inverse_residual
    }

    pub fn certificates(&self) -> &[PositivityCertificate] {
        &self.certificates
    }

    pub fn theta(&self) -> f64 {
        self.g.theta()
    }

    /// True for flat, conformal and diagonal metrics.
    pub fn is_diagonal(&self) -> bool {
        !matches!(self.kind, MetricKind::General)
    }
}

/// Block Newton inverse in `M_n(A)`: `X <- X (2 - g X)`, `X0 = I / rho`
/// with `rho` the largest row sum of entry l1 norms.
pub fn invert_matrix(
    g: &AlgebraMatrix,
    opts: &SolverOptions,
    policy: &mut TruncationPolicy,
) -> Result<Certified<AlgebraMatrix>> {
    let theta = g.theta();
    let n = g.dim();
    let id = AlgebraMatrix::identity(theta, n);
    let two = AlgebraMatrix::scalar_identity(theta, n, Complex64::new(2.0, 0.0));
    let rho = g.row_norm_l1();
    let mut x = AlgebraMatrix::scalar_identity(theta, n, Complex64::new(1.0 / rho, 0.0));
    let mut previous = f64::INFINITY;
    let mut dropped = 0.0;
    for it in 0..=opts.max_iter {
        let gx = g.mul(&x)?;
        let residual = gx.sub(&id)?.norm_l1();
        let stalled = residual > 0.5 * previous && residual <= 10.0 * rho * dropped;
        if residual <= opts.tol || stalled {
            return Ok(Certified {
                value: x,
                residual,
                iterations: it,
                truncation_limited: residual > opts.tol,
                certificate: None,
            });
        }
        if it == opts.max_iter {
            return Err(Error::NoConvergence {
                method: "invert_matrix",
                iterations: it,
                residual,
            });
        }
        let before = policy.tail_report();
        x = x.mul(&two.sub(&gx)?)?.truncate(policy);
        dropped = policy.tail_report() - before;
        previous = residual;
    }
    unreachable!()
}

/// `<X, Y> = sum_jk x_j g_jk y_k*`.
pub fn inner_product(x: &ModuleVector, y: &ModuleVector, g: &AlgebraMatrix) -> Result<TorusElement> {
    if !x.x[0].same_theta(&y.x[0]) || x.theta().to_bits() != g.theta().to_bits() {
        return Err(Error::ThetaMismatch {
            left: x.theta(),
            right: y.theta(),
        });
    }
    let theta = x.theta();
    let ystar = [y.x[0].star(), y.x[1].star()];
    let mut acc = TorusElement::zero(theta);
    for j in 0..2 {
        if x.x[j].is_empty() {
            continue;
        }
        for k in 0..2 {
            let gjk = g.get(j, k);
            if gjk.is_empty() || ystar[k].is_empty() {
                continue;
            }
            acc = &acc + &(&(&x.x[j] * gjk) * &ystar[k]);
        }
    }
    Ok(acc)
}

/// `T[j][k][l]`, zero-based indices for directions 1 and 2.
pub type Tensor3 = [[[TorusElement; 2]; 2]; 2];

fn tensor_zero(theta: f64) -> Tensor3 {
    std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| TorusElement::zero(theta))))
}

/// `<nabla_j d_k, d_l> = (d_j g_kl + d_k g_jl - d_l g_jk) / 2`.
pub fn christoffel_inner(g: &Metric) -> Tensor3 {
    let m = g.matrix();
    // dg[i][a][b] = d_(i+1) g_ab
    let dg: Vec<Vec<Vec<TorusElement>>> = (0..2)
        .map(|i| {
            (0..2)
                .map(|a| (0..2).map(|b| m.get(a, b).derive(i + 1).expect("direction")).collect())
                .collect()
        })
        .collect();
    let mut out = tensor_zero(g.theta());
    for j in 0..2 {
        for k in 0..2 {
            for l in 0..2 {
                let s = &(&dg[j][k][l] + &dg[k][j][l]) - &dg[l][j][k];
                out[j][k][l] = s.scale_real(0.5);
            }
        }
    }
    out
}

/// Largest self-adjointness defect over the Christoffel table.
pub fn realness_defect(table: &Tensor3) -> f64 {
    table
        .iter()
        .flatten()
        .flatten()
        .map(TorusElement::self_adjoint_defect)
        .fold(0.0, f64::max)
}

/// Christoffel data `Gamma^l_jk`, stored as `gamma[j][k][l]`.
///
/// Only `j <= k` is computed; `gamma[1][0]` is a copy of `gamma[0][1]`, so
/// torsion-freeness holds exactly.
#[derive(Debug, Clone)]
pub struct Connection {
    gamma: Tensor3,
    g: AlgebraMatrix,
}

impl Connection {
    /// `Gamma^l_jk`, one-based direction indices.
    pub fn gamma(&self, l: usize, j: usize, k: usize) -> &TorusElement {
        &self.gamma[j - 1][k - 1][l - 1]
    }

    pub fn table(&self) -> &Tensor3 {
        &self.gamma
    }

    pub fn metric_matrix(&self) -> &AlgebraMatrix {
        &self.g
    }

    pub fn theta(&self) -> f64 {
        self.g.theta()
    }

    pub fn is_torsion_free(&self) -> bool {
        (0..2).all(|l| self.gamma[0][1][l] == self.gamma[1][0][l])
    }
}

fn build_connection(g: &Metric, solve: impl Fn(&[TorusElement; 2]) -> [TorusElement; 2]) -> Connection {
    let c = christoffel_inner(g);
    let mut gamma = tensor_zero(g.theta());
    for (j, k) in [(0, 0), (0, 1), (1, 1)] {
        gamma[j][k] = solve(&c[j][k]);
    }
    gamma[1][0] = gamma[0][1].clone();
    Connection {
        gamma,
        g: g.matrix().clone(),
    }
}

/// Levi-Civita connection. Diagonal metrics use the closed forms
/// `Gamma^l_jk = <nabla_j d_k, d_l> a_l^-1`; general metrics go through
/// the block inverse.
pub fn connection_coeffs(g: &Metric) -> Connection {
    if g.is_diagonal() {
        let inv = g.inverse();
        build_connection(g, |row| {
            [&row[0] * inv.get(0, 0), &row[1] * inv.get(1, 1)]
        })
    } else {
        connection_coeffs_general(g, g.inverse())
    }
}

/// Solves `sum_m Gamma^m_jk g_ml = <nabla_j d_k, d_l>` with a supplied
/// `g^-1`, i.e. `Gamma_jk = C_jk g^-1` on rows.
pub fn connection_coeffs_general(g: &Metric, inverse: &AlgebraMatrix) -> Connection {
    build_connection(g, |row| {
        let v = ModuleVector { x: row.clone() };
        v.apply_endomorphism(inverse).x
    })
}

/// `nabla_j Y = sum_k (d_j y_k) d_k + sum_kl y_k Gamma^l_jk d_l`.
pub fn nabla_apply(c: &Connection, j: usize, y: &ModuleVector) -> Result<ModuleVector> {
    if j != 1 && j != 2 {
        return Err(Error::BadDirection(j));
    }
    let mut out = [y.x[0].derive(j)?, y.x[1].derive(j)?];
    for k in 0..2 {
        if y.x[k].is_empty() {
            continue;
        }
        for (l, slot) in out.iter_mut().enumerate() {
            let gm = &c.gamma[j - 1][k][l];
            if gm.is_empty() {
                continue;
            }
            *slot = &*slot + &(&y.x[k] * gm);
        }
    }
    Ok(ModuleVector { x: out })
}

/// `d_j <Y, Z> - <nabla_j Y, Z> - <Y, nabla_j Z>` in l1.
pub fn compatibility_residual(
    c: &Connection,
    j: usize,
    y: &ModuleVector,
    z: &ModuleVector,
) -> Result<f64> {
    let g = c.metric_matrix();
    let lhs = inner_product(y, z, g)?.derive(j)?;
    let r1 = inner_product(&nabla_apply(c, j, y)?, z, g)?;
    let r2 = inner_product(y, &nabla_apply(c, j, z)?, g)?;
    Ok((&(&lhs - &r1) - &r2).norm_l1())
}

fn truncate_vector(v: ModuleVector, policy: &mut TruncationPolicy) -> ModuleVector {
    ModuleVector {
        x: [v.x[0].truncate(policy), v.x[1].truncate(policy)],
    }
}

/// `<(nabla_2 nabla_1 - nabla_1 nabla_2) d1, d2>` evaluated through
/// [`nabla_apply`], truncating every intermediate under `policy`.
pub fn curvature_operational(c: &Connection, policy: &mut TruncationPolicy) -> Result<TorusElement> {
    let theta = c.theta();
    let d1 = ModuleVector::basis(theta, 1)?;
    let d2 = ModuleVector::basis(theta, 2)?;
    let n1 = truncate_vector(nabla_apply(c, 1, &d1)?, policy);
    let n2 = truncate_vector(nabla_apply(c, 2, &d1)?, policy);
    let n21 = truncate_vector(nabla_apply(c, 2, &n1)?, policy);
    let n12 = truncate_vector(nabla_apply(c, 1, &n2)?, policy);
    Ok(inner_product(&n21.sub(&n12), &d2, c.metric_matrix())?.truncate(policy))
}

/// Closed form for diagonal metrics:
///
/// ```text
/// 4 R_1212 = (d1 a1) a1^-1 (d1 a2) + (d2 a1) a2^-1 (d2 a2)
///          + (d2 a1) a1^-1 (d2 a1) + (d1 a2) a2^-1 (d1 a2)
///          - 2 (d1 d1 a2 + d2 d2 a1)
/// ```
pub fn curvature_closed_form(
    a1: &TorusElement,
    a2: &TorusElement,
    a1_inv: &TorusElement,
    a2_inv: &TorusElement,
    policy: &mut TruncationPolicy,
) -> Result<TorusElement> {
    let d1a1 = a1.derive(1)?;
    let d2a1 = a1.derive(2)?;
    let d1a2 = a2.derive(1)?;
    let d2a2 = a2.derive(2)?;
    let mut triple = |x: &TorusElement, y: &TorusElement, z: &TorusElement| {
        let xy = (x * y).truncate(policy);
        (&xy * z).truncate(policy)
    };
    let t1 = triple(&d1a1, a1_inv, &d1a2);
    let t2 = triple(&d2a1, a2_inv, &d2a2);
    let t3 = triple(&d2a1, a1_inv, &d2a1);
    let t4 = triple(&d1a2, a2_inv, &d1a2);
    let second = &d1a2.derive(1)? + &d2a1.derive(2)?;
    let four_r = &(&(&(&t1 + &t2) + &t3) + &t4) - &second.scale_real(2.0);
    Ok(four_r.scale_real(0.25).truncate(policy))
}

#[derive(Debug, Clone)]
pub struct Curvature {
    pub r1212: TorusElement,
    /// l1 distance between the operational and closed-form paths (diagonal metrics only).
    pub path_difference: Option<f64>,
}

/// `R_1212`, cross-checked against the closed form on diagonal metrics.
///
/// The closed form relies on `d(a^-1) = -a^-1 (d a) a^-1`, which the computed
/// inverse satisfies only up to its residual, and both paths truncate their
/// intermediates. The agreement limit is `10 (max(tol, inverse residual) + tail)`
/// scaled by the size of the data, where `tail` is the mass discarded here.
pub fn curvature_1212(
    c: &Connection,
    g: &Metric,
    tol: f64,
    policy: &mut TruncationPolicy,
) -> Result<Curvature> {
    let tail_before = policy.tail_report();
    let r = curvature_operational(c, policy)?;
    if !g.is_diagonal() {
        return Ok(Curvature {
            r1212: r,
            path_difference: None,
        });
    }
    let (a1, a2) = (g.entry(0, 0), g.entry(1, 1));
    let closed = curvature_closed_form(a1, a2, g.inverse().get(0, 0), g.inverse().get(1, 1), policy)?;
    let difference = r.distance_l1(&closed)?;
    let scale = (1..=2)
        .flat_map(|j| [a1.derive(j).map(|d| d.norm_l1()), a2.derive(j).map(|d| d.norm_l1())])
        .map(|x| x.unwrap_or(0.0))
        .fold(1.0, f64::max);
    let tail = policy.tail_report() - tail_before;
    let limit = 10.0 * (tol.max(g.inverse_residual()) + tail) * scale * scale;
    if difference > limit {
        return Err(Error::PathDisagreement { difference, limit });
    }
    Ok(Curvature {
        r1212: r,
        path_difference: Some(difference),
    })
}

#[derive(Debug, Clone)]
pub struct GaussBonnet {
    pub value: Complex64,
    pub curvature_l1: f64,
    pub path_difference: Option<f64>,
    /// Largest residual among the functional-calculus results used.
    pub max_residual: f64,
    pub truncation_limited: bool,
    pub certificates: Vec<PositivityCertificate>,
}

/// `tau(a1^-1/2 R_1212 a2^-1/2)` for the diagonal metric `diag(a1, a2)`.
pub fn gauss_bonnet_diagonal(
    a1: &TorusElement,
    a2: &TorusElement,
    opts: &SolverOptions,
    policy: &mut TruncationPolicy,
) -> Result<GaussBonnet> {
    let g = Metric::diagonal(a1, a2, opts, policy)?;
    let c = connection_coeffs(&g);
    let curv = curvature_1212(&c, &g, opts.tol, policy)?;
    let y1 = functional::inv_sqrt(a1, opts, policy)?;
    let y2 = functional::inv_sqrt(a2, opts, policy)?;
    let value = (&y1.value * &curv.r1212).trace_product(&y2.value)?;
    Ok(GaussBonnet {
        value,
        curvature_l1: curv.r1212.norm_l1(),
        path_difference: curv.path_difference,
        max_residual: g.inverse_residual().max(y1.residual).max(y2.residual),
        truncation_limited: y1.truncation_limited || y2.truncation_limited || g.inverse_residual() > opts.tol,
        certificates: g.certificates().to_vec(),
    })
}

/// `tau(R_1212 e^-h)` for the conformal metric `e^h I_2`.
pub fn gauss_bonnet_conformal(
    h: &TorusElement,
    opts: &SolverOptions,
    policy: &mut TruncationPolicy,
) -> Result<GaussBonnet> {
    let g = Metric::conformal(h, opts, policy)?;
    let c = connection_coeffs(&g);
    let curv = curvature_1212(&c, &g, opts.tol, policy)?;
    let value = curv.r1212.trace_product(g.inverse().get(0, 0))?;
    Ok(GaussBonnet {
        value,
        curvature_l1: curv.r1212.norm_l1(),
        path_difference: curv.path_difference,
        max_residual: g.inverse_residual(),
        truncation_limited: false,
        certificates: Vec::new(),
    })
}
