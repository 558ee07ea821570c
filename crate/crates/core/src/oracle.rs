//! Clock-and-shift representation of the rational torus, used as an
//! independent numerical oracle.
//!
//! For `theta = p/q` with `gcd(p, q) = 1`, `U1 = diag(w^0, ..., w^(q-1))` with
//! `w = e^{2 pi i p/q}` and `U2` the cyclic shift `e_k -> e_(k+1)` satisfy
//! `U1 U2 = w U2 U1`. Elements supported in `max(|m|,|n|) < q/2` are mapped
//! faithfully enough that `tau(a) = tr(rep(a))/q`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::algebra::{cis_turns, TorusElement};
use crate::algebra_matrix::AlgebraMatrix;
use crate::error::{Error, Result};

/// Default oracle dimension (prime, above `2N+1` for `N = 40`).
pub const DEFAULT_ORACLE_Q: usize = 101;

const HERMITIAN_TOL: f64 = 1e-10;
const RATIONAL_TOL: f64 = 1e-9;

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

/// Dense `q x q` image of an element (or a block matrix of elements).
#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub q: usize,
    pub p: i64,
    pub data: DMatrix<Complex64>,
}

impl MatrixRep {
    /// `tr(data) / dim`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.data.trace() / self.data.nrows() as f64
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            q: self.q,
            p: self.p,
            data: &self.data * &other.data,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            q: self.q,
            p: self.p,
            data: self.data.adjoint(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_entry_diff(&self, other: &Self) -> f64 {
        (&self.data - &other.data)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Clock matrix `diag(w^k)`.
pub fn clock(p: i64, q: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(q, q, |r, c| {
        if r == c {
            cis_turns((p * r as i64).rem_euclid(q as i64) as f64 / q as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Shift matrix `e_k -> e_(k+1 mod q)`.
pub fn shift(q: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(q, q, |r, c| {
        if r == (c + 1) % q {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Numerator `p` with `theta = p/q` within rounding, if any.
pub fn exact_numerator(theta: f64, q: usize) -> Option<i64> {
    let x = theta * q as f64;
    let p = x.round();
    ((x - p).abs() <= RATIONAL_TOL && gcd(p as i64, q as i64) == 1).then_some(p as i64)
}

/// Adds `c U1^m U2^n` into `out` at block offset `(row0, col0)`.
fn accumulate_monomial(
    out: &mut DMatrix<Complex64>,
    row0: usize,
    col0: usize,
    p: i64,
    q: usize,
    m: i32,
    n: i32,
    c: Complex64,
) {
    let qi = q as i64;
    // (U1^m U2^n) e_k = w^{m (k+n)} e_{k+n}
    for k in 0..qi {
        let r = (k + n as i64).rem_euclid(qi);
        let ph = cis_turns(((m as i64 * r * p).rem_euclid(qi)) as f64 / q as f64);
        out[(row0 + r as usize, col0 + k as usize)] += c * ph;
    }
}

fn check_support(radius: u32, q: usize) -> Result<()> {
    if 2 * radius as usize >= q {
        return Err(Error::Oracle(format!(
            "support radius {radius} too large for q = {q} (need 2r < q)"
        )));
    }
    Ok(())
}

/// Representation at an explicitly chosen `p/q`, ignoring `a.theta()`.
///
/// Used for heuristic positivity certificates at irrational theta.
pub fn represent_at(a: &TorusElement, p: i64, q: usize) -> Result<MatrixRep> {
    check_support(a.support_radius(), q)?;
    let mut data = DMatrix::from_element(q, q, Complex64::new(0.0, 0.0));
    for ((m, n), c) in a.terms() {
        accumulate_monomial(&mut data, 0, 0, p, q, m, n, c);
    }
    Ok(MatrixRep { q, p, data })
}

/// `sum c[m,n] U1^m U2^n`; requires `a.theta() == p/q` and support `< q/2`.
pub fn represent(a: &TorusElement, q: usize) -> Result<MatrixRep> {
    let p = exact_numerator(a.theta(), q).ok_or_else(|| {
        Error::Oracle(format!("theta = {} is not p/{q} with gcd(p, q) = 1", a.theta()))
    })?;
    represent_at(a, p, q)
}

/// Block representation of an `n x n` algebra matrix, size `nq x nq`.
pub fn represent_matrix_at(g: &AlgebraMatrix, p: i64, q: usize) -> Result<MatrixRep> {
    check_support(g.support_radius(), q)?;
    let n = g.dim();
    let mut data = DMatrix::from_element(n * q, n * q, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            for ((m, k), c) in g.get(i, j).terms() {
                accumulate_monomial(&mut data, i * q, j * q, p, q, m, k, c);
            }
        }
    }
    Ok(MatrixRep { q, p, data })
}

/// Smallest and largest eigenvalue of a Hermitian representation.
pub fn spectral_bounds(rep: &MatrixRep) -> Result<(f64, f64)> {
    let defect = (&rep.data - rep.data.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if defect > HERMITIAN_TOL {
        return Err(Error::Oracle(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    let eig = SymmetricEigen::new(rep.data.clone());
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Oracle evidence that an element (or metric matrix) is positive invertible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityCertificate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub p: i64,
    pub q: usize,
    /// True when `p/q` only approximates theta.
    pub heuristic: bool,
}

/// Picks `(p, q)` with `q >= q_min`, `2 * radius < q` and `gcd(p, q) = 1`,
/// preferring an exact match for theta.
pub fn choose_dimension(theta: f64, q_min: usize, radius: u32) -> (i64, usize, bool) {
    let mut q = q_min.max(2 * radius as usize + 1).max(2);
    loop {
        if let Some(p) = exact_numerator(theta, q) {
            return (p, q, false);
        }
        let p = (theta * q as f64).round() as i64;
        if p != 0 && gcd(p, q as i64) == 1 {
            return (p, q, true);
        }
        q += 1;
    }
}

fn certificate_from(mut rep: MatrixRep, heuristic: bool, threshold: f64) -> Result<PositivityCertificate> {
    if heuristic {
        // self-adjointness at theta only holds up to O(|theta - p/q|) at p/q
        rep.data = (&rep.data + rep.data.adjoint()).scale(0.5);
    }
    let (lambda_min, lambda_max) = spectral_bounds(&rep)?;
    if lambda_min <= threshold {
        return Err(Error::NotPositive {
            lambda_min,
            threshold,
        });
    }
    Ok(PositivityCertificate {
        lambda_min,
        lambda_max,
        p: rep.p,
        q: rep.q,
        heuristic,
    })
}

/// Certifies `lambda_min(a) > threshold` through the finite model.
pub fn certify_positive(a: &TorusElement, q_min: usize, threshold: f64) -> Result<PositivityCertificate> {
    let (p, q, heuristic) = choose_dimension(a.theta(), q_min, a.support_radius());
    let rep = represent_at(a, p, q)?;
    certificate_from(rep, heuristic, threshold)
}

/// Certifies positivity of a self-adjoint algebra matrix via its block image.
pub fn certify_positive_matrix(
    g: &AlgebraMatrix,
    q_min: usize,
    threshold: f64,
) -> Result<PositivityCertificate> {
    let (p, q, heuristic) = choose_dimension(g.theta(), q_min, g.support_radius());
    let rep = represent_matrix_at(g, p, q)?;
    certificate_from(rep, heuristic, threshold)
}
