//! Functional calculus for positive and self-adjoint elements.
//!
//! Every iterate of the Newton schemes below is a polynomial in the input,
//! so iterates commute with it and stay self-adjoint. Each update is
//! truncated once under the caller's [`TruncationPolicy`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{TorusElement, TruncationPolicy};
use crate::error::{Error, Result};
use crate::oracle::{self, PositivityCertificate, DEFAULT_ORACLE_Q};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub oracle_q: usize,
    /// Inputs whose oracle `lambda_min` is at or below this are rejected.
    pub positivity_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            oracle_q: DEFAULT_ORACLE_Q,
            positivity_threshold: 0.0,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// A computed value together with the residual it achieved.
#[derive(Debug, Clone)]
pub struct Certified<T> {
    pub value: T,
    pub residual: f64,
    pub iterations: usize,
    /// The residual stalled at the level of the discarded truncation mass
    /// before reaching `tol`; raising the radius is the remedy.
    pub truncation_limited: bool,
    pub certificate: Option<PositivityCertificate>,
}

fn require_self_adjoint(a: &TorusElement) -> Result<()> {
    let defect = a.self_adjoint_defect();
    if defect > 1e-10 * a.norm_l1().max(1.0) {
        return Err(Error::NotSelfAdjoint { defect });
    }
    Ok(())
}

/// Residual stagnation attributable to truncation: the last update lost
/// mass comparable to the residual itself.
fn truncation_stalled(residual: f64, previous: f64, scale: f64, dropped: f64) -> bool {
    residual > 0.5 * previous && residual <= 10.0 * scale * dropped
}

/// Newton-Hotelling inverse `x <- x (2 - a x)`, started at `x0 = 1/||a||_1`.
pub fn invert(
    a: &TorusElement,
    opts: &SolverOptions,
    policy: &mut TruncationPolicy,
) -> Result<Certified<TorusElement>> {
    require_self_adjoint(a)?;
    let cert = oracle::certify_positive(a, opts.oracle_q, opts.positivity_threshold)?;
    let theta = a.theta();
    let one = TorusElement::one(theta);
    let rho = a.norm_l1();
    let mut x = TorusElement::real(theta, 1.0 / rho);
    let mut previous = f64::INFINITY;
    let mut dropped = 0.0;

    for it in 0..=opts.max_iter {
        let r = &one - &(a * &x);
        let residual = r.norm_l1();
        if residual <= opts.tol || truncation_stalled(residual, previous, rho, dropped) {
            return Ok(Certified {
                value: x,
                residual,
                iterations: it,
                truncation_limited: residual > opts.tol,
                certificate: Some(cert),
            });
        }
        if it == opts.max_iter {
            return Err(Error::NoConvergence {
                method: "invert",
                iterations: it,
                residual,
            });
        }
        let before = policy.tail_report();
        x = (&x + &(&x * &r)).truncate(policy);
        dropped = policy.tail_report() - before;
        previous = residual;
    }
    unreachable!()
}

/// Newton-Schulz inverse square root `y <- y (3 - a y^2) / 2`, `y0 = s 1`.
pub fn inv_sqrt(
    a: &TorusElement,
    opts: &SolverOptions,
    policy: &mut TruncationPolicy,
) -> Result<Certified<TorusElement>> {
    require_self_adjoint(a)?;
    let cert = oracle::certify_positive(a, opts.oracle_q, opts.positivity_threshold)?;
    let theta = a.theta();
    let one = TorusElement::one(theta);
    let rho = a.norm_l1();

    // Scaling guard: contraction of 1 - s^2 a in l1, or failing that on the
    // oracle spectral interval.
    let mut s2 = 1.0 / rho;
    let l1_contraction = (&one - &a.scale_real(s2)).norm_l1();
    if l1_contraction >= 1.0 {
        let spectral = |s2: f64| {
            (1.0 - s2 * cert.lambda_min)
                .abs()
                .max((1.0 - s2 * cert.lambda_max).abs())
        };
        if spectral(s2) >= 1.0 {
            s2 = 1.0 / cert.lambda_max;
        }
        if spectral(s2) >= 1.0 {
            return Err(Error::ScalingGuard);
        }
    }

    let mut y = TorusElement::real(theta, s2.sqrt());
    let mut previous = f64::INFINITY;
    let mut dropped = 0.0;
    let three = TorusElement::real(theta, 3.0);
    for it in 0..=opts.max_iter {
        let y2a = &(&y * &y) * a;
        let residual = (&y2a - &one).norm_l1();
        if residual <= opts.tol || truncation_stalled(residual, previous, rho, dropped) {
            return Ok(Certified {
                value: y,
                residual,
                iterations: it,
                truncation_limited: residual > opts.tol,
                certificate: Some(cert),
            });
        }
        if it == opts.max_iter {
            return Err(Error::NoConvergence {
                method: "inv_sqrt",
                iterations: it,
                residual,
            });
        }
        let before = policy.tail_report();
        y = (&y * &(&three - &y2a)).scale_real(0.5).truncate(policy);
        dropped = policy.tail_report() - before;
        previous = residual;
    }
    unreachable!()
}

/// `e^h` by scaling and squaring of the Taylor series.
///
/// The residual is an a priori bound on the Taylor remainder propagated
/// through the squarings.
pub fn exp_series(
    h: &TorusElement,
    opts: &SolverOptions,
    policy: &mut TruncationPolicy,
) -> Result<Certified<TorusElement>> {
    require_self_adjoint(h)?;
    let theta = h.theta();
    let norm = h.norm_l1();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let x = h.scale_real(1.0 / 2f64.powi(squarings as i32));
    let xn = norm / 2f64.powi(squarings as i32);

    let mut sum = TorusElement::one(theta);
    let mut term = TorusElement::one(theta);
    let mut bound = 1.0;
    let mut k = 0usize;
    // remainder after the k-th term is at most bound * xn / (k+1) * e^xn
    let target = opts.tol * 1e-3;
    loop {
        k += 1;
        if k > opts.max_iter {
            return Err(Error::NoConvergence {
                method: "exp_series",
                iterations: k,
                residual: bound,
            });
        }
        term = (&term * &x).scale_real(1.0 / k as f64).truncate(policy);
        bound *= xn / k as f64;
        sum = &sum + &term;
        if bound * xn / (k + 1) as f64 * xn.exp() <= target {
            break;
        }
    }
    let remainder = bound * xn / (k + 1) as f64 * xn.exp();

    for _ in 0..squarings {
        sum = (&sum * &sum).truncate(policy);
    }
    let residual = remainder * 2f64.powi(squarings as i32) * norm.exp();
    Ok(Certified {
        value: sum,
        residual,
        iterations: k,
        truncation_limited: false,
        certificate: None,
    })
}

/// Samples `f` on the uniform grid `t_l = 2 pi l / m`.
pub fn sample_circle(f: impl Fn(f64) -> f64, m: usize) -> Vec<f64> {
    (0..m).map(|l| f(2.0 * PI * l as f64 / m as f64)).collect()
}

/// `sum_{|k| <= K} fhat(k) u_j^k` from samples of a positive function on the circle.
pub fn circle_function(
    theta: f64,
    samples: &[f64],
    j: usize,
    bandwidth: usize,
) -> Result<TorusElement> {
    if j != 1 && j != 2 {
        return Err(Error::BadDirection(j));
    }
    let m = samples.len();
    if m < 2 * bandwidth + 1 {
        return Err(Error::InvalidInput(format!(
            "grid of {m} samples cannot resolve bandwidth {bandwidth}"
        )));
    }
    if let Some(bad) = samples.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "circle samples must be strictly positive, found {bad}"
        )));
    }
    let coeff = |k: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, &f) in samples.iter().enumerate() {
            let ang = -2.0 * PI * ((k * l) % m) as f64 / m as f64;
            acc += Complex64::from_polar(f, ang);
        }
        acc / m as f64
    };
    let key = |k: i32| if j == 1 { (k, 0) } else { (0, k) };
    let mut terms = vec![(key(0), Complex64::new(coeff(0).re, 0.0))];
    for k in 1..=bandwidth {
        let c = coeff(k);
        // real samples: fhat(-k) = conj(fhat(k)), imposed exactly
        terms.push((key(k as i32), c));
        terms.push((key(-(k as i32)), c.conj()));
    }
    Ok(TorusElement::from_terms(theta, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TH: f64 = 0.3183098861837907;

    fn a_example(j: usize) -> TorusElement {
        let u = TorusElement::generator(TH, j).unwrap();
        &(&u + &TorusElement::real(TH, 3.0)) + &u.star()
    }

    /// Composite Simpson rule on [0, 2 pi]; periodic integrands converge fast.
    fn circle_mean(f: impl Fn(f64) -> f64) -> f64 {
        let n = 4000;
        let h = 2.0 * PI / n as f64;
        let mut s = f(0.0) + f(2.0 * PI);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0 / (2.0 * PI)
    }

    #[test]
    fn quadrature_oracle_sanity() {
        assert!((circle_mean(|t| 1.0 / (3.0 + 2.0 * t.cos())) - 1.0 / 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn invert_scalar() {
        let mut pol = TruncationPolicy::new(40);
        let r = invert(&TorusElement::real(TH, 2.0), &SolverOptions::default(), &mut pol).unwrap();
        assert!(r.value.approx_eq(&TorusElement::real(TH, 0.5), 1e-14));
    }

    #[test]
    fn invert_circle_element() {
        let a = a_example(1);
        let mut pol = TruncationPolicy::new(40);
        let r = invert(&a, &SolverOptions::default(), &mut pol).unwrap();
        assert!(r.residual <= 1e-12);
        assert!(!r.truncation_limited);
        let expect = circle_mean(|t| 1.0 / (3.0 + 2.0 * t.cos()));
        assert!((r.value.trace().re - expect).abs() < 1e-10);
        assert!(r.value.self_adjoint_defect() < 1e-13);
        assert!(r.value.commutator(&a).unwrap().norm_l1() < 1e-11);
    }

    #[test]
    fn invert_derivative_identity() {
        let u1 = TorusElement::generator(TH, 1).unwrap();
        let u2 = TorusElement::generator(TH, 2).unwrap();
        let a = &(&a_example(1) + &u2.scale_real(0.5)) + &u2.star().scale_real(0.5);
        let _ = u1;
        let mut pol = TruncationPolicy::new(40);
        let opts = SolverOptions::default();
        let inv = invert(&a, &opts, &mut pol).unwrap().value;
        for j in 1..=2 {
            let lhs = inv.derive(j).unwrap();
            let rhs = -&(&(&inv * &a.derive(j).unwrap()) * &inv);
            assert!(lhs.distance_l1(&rhs).unwrap() <= 1e-10, "j = {j}");
        }
    }

    #[test]
    fn invert_rejects_non_positive() {
        let u1 = TorusElement::generator(TH, 1).unwrap();
        let a = &u1 + &u1.star();
        let mut pol = TruncationPolicy::new(20);
        assert!(matches!(
            invert(&a, &SolverOptions::default(), &mut pol),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            invert(&u1, &SolverOptions::default(), &mut pol),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn invert_reports_non_convergence() {
        let opts = SolverOptions {
            max_iter: 2,
            ..SolverOptions::default()
        };
        let mut pol = TruncationPolicy::new(40);
        match invert(&a_example(2), &opts, &mut pol) {
            Err(Error::NoConvergence { residual, .. }) => assert!(residual > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invert_truncation_limited_at_small_radius() {
        let mut pol = TruncationPolicy::new(8);
        let r = invert(&a_example(1), &SolverOptions::default(), &mut pol).unwrap();
        assert!(r.truncation_limited);
        assert!(r.residual > 1e-12 && r.residual < 1e-2);
        assert!(pol.tail_report() > 0.0);
    }

    #[test]
    fn inv_sqrt_examples() {
        let mut pol = TruncationPolicy::new(40);
        let opts = SolverOptions::default();
        let r = inv_sqrt(&TorusElement::real(TH, 4.0), &opts, &mut pol).unwrap();
        assert!(r.value.approx_eq(&TorusElement::real(TH, 0.5), 1e-14));

        let a = a_example(1);
        let y = inv_sqrt(&a, &opts, &mut pol).unwrap();
        assert!(y.residual <= 1e-12);
        let expect = circle_mean(|t| (3.0 + 2.0 * t.cos()).powf(-0.5));
        assert!((y.value.trace().re - expect).abs() < 1e-10);
        let inv = invert(&a, &opts, &mut pol).unwrap().value;
        assert!((&y.value * &y.value).distance_l1(&inv).unwrap() <= 1e-11);
        assert!(y.value.commutator(&a).unwrap().norm_l1() <= 1e-11);
    }

    #[test]
    fn inv_sqrt_uses_spectral_guard_when_l1_fails() {
        // ||1 - a/||a||_1||_1 = 1 here, so the l1 contraction test cannot pass
        let u1 = TorusElement::generator(TH, 1).unwrap();
        let u2 = TorusElement::generator(TH, 2).unwrap();
        let a = &(&(&a_example(1) + &u2.scale_real(0.5)) + &u2.star().scale_real(0.5)) - &u1.scale_real(0.0);
        let one = TorusElement::one(TH);
        assert!((&one - &a.scale_real(1.0 / a.norm_l1())).norm_l1() >= 1.0 - 1e-15);
        let mut pol = TruncationPolicy::new(40);
        let y = inv_sqrt(&a, &SolverOptions::default(), &mut pol).unwrap();
        assert!(y.residual <= 1e-12);
    }

    #[test]
    fn exp_examples() {
        let mut pol = TruncationPolicy::new(40);
        let opts = SolverOptions::default();
        let e0 = exp_series(&TorusElement::zero(TH), &opts, &mut pol).unwrap();
        assert!(e0.value.approx_eq(&TorusElement::one(TH), 1e-15));
        let e2 = exp_series(&TorusElement::real(TH, 2f64.ln()), &opts, &mut pol).unwrap();
        assert!(e2.value.approx_eq(&TorusElement::real(TH, 2.0), 1e-14));

        let u1 = TorusElement::generator(TH, 1).unwrap();
        let h = &u1 + &u1.star();
        let e = exp_series(&h, &opts, &mut pol).unwrap();
        let i0 = circle_mean(|t| (2.0 * t.cos()).exp());
        assert!((e.value.trace().re - i0).abs() < 1e-11);
        assert!((i0 - 2.2795853).abs() < 1e-7);
    }

    #[test]
    fn exp_inverse_pair() {
        let u1 = TorusElement::generator(TH, 1).unwrap();
        let u2 = TorusElement::generator(TH, 2).unwrap();
        let h = &(&u1 + &u1.star()).scale_real(0.4) + &(&u2 + &u2.star()).scale_real(0.3);
        let mut pol = TruncationPolicy::new(40);
        let opts = SolverOptions::default();
        let ep = exp_series(&h, &opts, &mut pol).unwrap().value;
        let em = exp_series(&-&h, &opts, &mut pol).unwrap().value;
        let prod = &ep * &em;
        assert!(prod.distance_l1(&TorusElement::one(TH)).unwrap() < 1e-12);
        assert!(ep.commutator(&h).unwrap().norm_l1() < 1e-11);
    }

    #[test]
    fn circle_function_examples() {
        let s = sample_circle(|t| 3.0 + 2.0 * t.cos(), 64);
        let a = circle_function(TH, &s, 1, 10).unwrap();
        assert!(a.approx_eq(&a_example(1), 1e-14));
        assert!(a.self_adjoint_defect() < 1e-15);

        let one = circle_function(TH, &sample_circle(|_| 1.0, 16), 2, 5).unwrap();
        assert!(one.approx_eq(&TorusElement::one(TH), 1e-15));

        let f = sample_circle(|t| 1.0 / (3.0 + 2.0 * t.cos()), 256);
        let b = circle_function(TH, &f, 2, 40).unwrap();
        let mut pol = TruncationPolicy::new(40);
        let inv = invert(&a_example(2), &SolverOptions::default(), &mut pol).unwrap().value;
        assert!(b.distance_l1(&inv).unwrap() <= 1e-8);
    }

    #[test]
    fn circle_function_rejects_bad_input() {
        assert!(circle_function(TH, &[1.0, -1.0, 2.0], 1, 1).is_err());
        assert!(circle_function(TH, &[1.0, 1.0], 1, 1).is_err());
        assert!(circle_function(TH, &[1.0; 8], 3, 1).is_err());
    }

    #[test]
    fn circle_functions_commute_with_own_derivatives() {
        let s = sample_circle(|t| 2.0 + t.sin() + 0.5 * (2.0 * t).cos(), 128);
        for j in 1..=2 {
            let a = circle_function(TH, &s, j, 20).unwrap();
            for k in 1..=2 {
                let d = a.derive(k).unwrap();
                assert!(a.commutator(&d).unwrap().norm_l1() <= 1e-13);
            }
        }
    }
}
