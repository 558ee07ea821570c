//! Smooth noncommutative two-torus as finitely supported twisted Fourier series.
//!
//! An element is stored in normal order, `sum c[m,n] u1^m u2^n` with every
//! power of `u1` to the left of every power of `u2`. The generators satisfy
//! `u1 u2 = e^{2 pi i theta} u2 u1`, which gives the product rule
//!
//! ```text
//! (u1^m u2^n)(u1^m' u2^n') = e^{-2 pi i theta n m'} u1^(m+m') u2^(n+n')
//! ```
//!
//! and the adjoint `(u1^m u2^n)* = e^{-2 pi i theta m n} u1^-m u2^-n`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped as denormal noise.
const DENORMAL_GUARD: f64 = 1e-300;

/// Default coefficientwise tolerance used by [`TorusElement::approx_eq`].
pub const DEFAULT_EQ_TOL: f64 = 1e-12;

/// `e^{2 pi i x}` with the argument reduced mod 1 first.
pub(crate) fn cis_turns(x: f64) -> Complex64 {
    let r = x - x.round();
    let (s, c) = (2.0 * PI * r).sin_cos();
    Complex64::new(c, s)
}

/// `e^{2 pi i theta k}`; the rounding error of `theta * k` is recovered
/// with a fused multiply-add so large `k` keeps full phase accuracy.
pub(crate) fn phase(theta: f64, k: i64) -> Complex64 {
    let kf = k as f64;
    let x = theta * kf;
    let err = theta.mul_add(kf, -x);
    cis_turns((x - x.round()) + err)
}

fn is_negligible(c: Complex64) -> bool {
    c.re.abs() < DENORMAL_GUARD && c.im.abs() < DENORMAL_GUARD
}

/// Bookkeeping for support truncation to the box `max(|m|, |n|) <= radius`.
///
/// The discarded l1 mass only ever grows.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPolicy {
    radius: u32,
    tail: f64,
}

impl TruncationPolicy {
    pub fn new(radius: u32) -> Self {
        Self { radius, tail: 0.0 }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Total l1 mass discarded so far.
    pub fn tail_report(&self) -> f64 {
        self.tail
    }

    fn record(&mut self, mass: f64) {
        debug_assert!(mass >= 0.0);
        self.tail += mass;
    }
}

/// An element of the smooth noncommutative torus with finite support.
#[derive(Clone, PartialEq)]
pub struct TorusElement {
    theta: f64,
    coeffs: BTreeMap<(i32, i32), Complex64>,
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TorusElement(theta={}, ", self.theta)?;
        f.debug_map()
            .entries(self.coeffs.iter().map(|(k, v)| (k, v)))
            .finish()?;
        write!(f, ")")
    }
}

impl TorusElement {
    pub fn zero(theta: f64) -> Self {
        Self {
            theta,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(theta: f64) -> Self {
        Self::scalar(theta, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(theta: f64, z: Complex64) -> Self {
        Self::monomial(theta, 0, 0, z)
    }

    pub fn real(theta: f64, x: f64) -> Self {
        Self::scalar(theta, Complex64::new(x, 0.0))
    }

    /// `c u1^m u2^n`.
    pub fn monomial(theta: f64, m: i32, n: i32, c: Complex64) -> Self {
        let mut out = Self::zero(theta);
        if !is_negligible(c) {
            out.coeffs.insert((m, n), c);
        }
        out
    }

    /// The unitary generator `u_j`, `j` in {1, 2}.
    pub fn generator(theta: f64, j: usize) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        match j {
            1 => Ok(Self::monomial(theta, 1, 0, one)),
            2 => Ok(Self::monomial(theta, 0, 1, one)),
            _ => Err(Error::BadDirection(j)),
        }
    }

    /// Builds an element from `(m, n, c)` triples; repeated keys are summed.
    pub fn from_terms<I>(theta: f64, terms: I) -> Self
    where
        I: IntoIterator<Item = ((i32, i32), Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut out = Self { theta, coeffs };
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| !is_negligible(*c));
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn coeff(&self, m: i32, n: i32) -> Complex64 {
        self.coeffs
            .get(&(m, n))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Nonzero coefficients in lexicographic `(m, n)` order.
    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), Complex64)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max(|m|, |n|)` over the support, 0 for the zero element.
    pub fn support_radius(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|&(m, n)| m.unsigned_abs().max(n.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    fn check_theta(&self, other: &Self) -> Result<()> {
        if self.theta.to_bits() == other.theta.to_bits() {
            Ok(())
        } else {
            Err(Error::ThetaMismatch {
                left: self.theta,
                right: other.theta,
            })
        }
    }

    pub fn same_theta(&self, other: &Self) -> bool {
        self.check_theta(other).is_ok()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_theta(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            *out.coeffs.entry(*k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_theta(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            *out.coeffs.entry(*k).or_insert(Complex64::new(0.0, 0.0)) -= c;
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = Self {
            theta: self.theta,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c * z)).collect(),
        };
        out.prune();
        out
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    /// Twisted convolution. Exact: no truncation happens here.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_theta(other)?;
        if self.is_empty() || other.is_empty() {
            return Ok(Self::zero(self.theta));
        }
        let a = DenseBox::from_element(self);
        let b = DenseBox::from_element(other);

        let m_lo = a.m_lo + b.m_lo;
        let n_lo = a.n_lo + b.n_lo;
        let rows = a.rows + b.rows - 1;
        let cols = a.cols + b.cols - 1;

        // phase[i][k] = e^{-2 pi i theta n m'} for n = a.n_lo + i, m' = b.m_lo + k
        let theta = self.theta;
        let phase: Vec<Complex64> = (0..a.cols)
            .flat_map(|i| {
                let n = (a.n_lo + i as i32) as i64;
                (0..b.rows).map(move |k| {
                    let mp = (b.m_lo + k as i32) as i64;
                    phase(theta, -(n * mp))
                })
            })
            .collect();

        let out_rows: Vec<Vec<Complex64>> = (0..rows)
            .into_par_iter()
            .map(|r| {
                let mut acc = vec![Complex64::new(0.0, 0.0); cols];
                let i_min = r.saturating_sub(b.rows - 1);
                let i_max = r.min(a.rows - 1);
                for ia in i_min..=i_max {
                    let ib = r - ia;
                    let a_row = a.row(ia);
                    let b_row = b.row(ib);
                    if a.row_empty[ia] || b.row_empty[ib] {
                        continue;
                    }
                    for (ja, &ca) in a_row.iter().enumerate() {
                        if ca.re == 0.0 && ca.im == 0.0 {
                            continue;
                        }
                        let w = ca * phase[ja * b.rows + ib];
                        let dst = &mut acc[ja..ja + b.cols];
                        for (d, &cb) in dst.iter_mut().zip(b_row) {
                            *d += w * cb;
                        }
                    }
                }
                acc
            })
            .collect();

        let mut coeffs = BTreeMap::new();
        for (r, row) in out_rows.into_iter().enumerate() {
            for (c, z) in row.into_iter().enumerate() {
                if !is_negligible(z) {
                    coeffs.insert((m_lo + r as i32, n_lo + c as i32), z);
                }
            }
        }
        Ok(Self { theta, coeffs })
    }

    /// The involution: `c[m,n]` contributes `conj(c) e^{-2 pi i theta m n}` at `(-m, -n)`.
    pub fn star(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&(m, n), c)| {
                let ph = phase(self.theta, -(m as i64 * n as i64));
                ((-m, -n), c.conj() * ph)
            })
            .collect();
        let mut out = Self {
            theta: self.theta,
            coeffs,
        };
        out.prune();
        out
    }

    /// Canonical derivation `d_j`, with `d_j u_k = 2 pi i delta_jk u_k`.
    pub fn derive(&self, j: usize) -> Result<Self> {
        if j != 1 && j != 2 {
            return Err(Error::BadDirection(j));
        }
        let mut out = Self {
            theta: self.theta,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(m, n), c)| {
                    let k = if j == 1 { m } else { n };
                    ((m, n), c * Complex64::new(0.0, 2.0 * PI * k as f64))
                })
                .collect(),
        };
        out.prune();
        Ok(out)
    }

    /// The invariant tracial state: the `(0,0)` coefficient.
    pub fn trace(&self) -> Complex64 {
        self.coeff(0, 0)
    }

    /// `tau(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        self.check_theta(other)?;
        // the phase e^{2 pi i theta m n} is invariant under (m,n) -> (-m,-n),
        // so iterating over either factor gives the same sum
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(m, n), c) in &small.coeffs {
            if let Some(d) = large.coeffs.get(&(-m, -n)) {
                // tau(c u1^m u2^n * d u1^-m u2^-n) = c d e^{2 pi i theta n m}
                acc += c * d * phase(self.theta, m as i64 * n as i64);
            }
        }
        Ok(acc)
    }

    /// Sum of coefficient magnitudes; dominates the C*-norm.
    pub fn norm_l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, |s, x| s + x)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops everything outside the radius box and records its l1 mass.
    pub fn truncate(&self, policy: &mut TruncationPolicy) -> Self {
        let r = policy.radius as i64;
        let mut dropped = 0.0;
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(&(m, n), &c)| {
                if (m as i64).abs() <= r && (n as i64).abs() <= r {
                    Some(((m, n), c))
                } else {
                    dropped += c.norm();
                    None
                }
            })
            .collect();
        policy.record(dropped);
        Self {
            theta: self.theta,
            coeffs,
        }
    }

    /// l1 norm of `self - self*`.
    pub fn self_adjoint_defect(&self) -> f64 {
        (self - &self.star()).norm_l1()
    }

    /// l1 norm of `self + self*`.
    pub fn skew_adjoint_defect(&self) -> f64 {
        (self + &self.star()).norm_l1()
    }

    pub fn distance_l1(&self, other: &Self) -> Result<f64> {
        Ok(self.checked_sub(other)?.norm_l1())
    }

    /// Coefficientwise comparison with absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match self.checked_sub(other) {
            Ok(d) => d.max_abs_coeff() <= tol,
            Err(_) => false,
        }
    }

    /// `[self, other] = self other - other self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)?
            .checked_sub(&other.checked_mul(self)?)
    }

    /// `self` with the `(0,0)` coefficient removed.
    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.remove(&(0, 0));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ElementJson::from(self)).expect("element serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ElementJson = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
        raw.try_into()
    }
}

/// Dense row-major copy of an element over its bounding box.
struct DenseBox {
    m_lo: i32,
    n_lo: i32,
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
    row_empty: Vec<bool>,
}

impl DenseBox {
    fn from_element(a: &TorusElement) -> Self {
        let (mut m_lo, mut m_hi, mut n_lo, mut n_hi) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
        for &(m, n) in a.coeffs.keys() {
            m_lo = m_lo.min(m);
            m_hi = m_hi.max(m);
            n_lo = n_lo.min(n);
            n_hi = n_hi.max(n);
        }
        let rows = (m_hi - m_lo + 1) as usize;
        let cols = (n_hi - n_lo + 1) as usize;
        let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
        let mut row_empty = vec![true; rows];
        for (&(m, n), &c) in &a.coeffs {
            let r = (m - m_lo) as usize;
            data[r * cols + (n - n_lo) as usize] = c;
            row_empty[r] = false;
        }
        Self {
            m_lo,
            n_lo,
            rows,
            cols,
            data,
            row_empty,
        }
    }

    fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

// Operator forms panic on theta mismatch; use the `checked_*` methods at API
// boundaries where the inputs have not been validated yet.

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: &TorusElement) -> TorusElement {
        self.checked_add(rhs).expect("theta mismatch in +")
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: &TorusElement) -> TorusElement {
        self.checked_sub(rhs).expect("theta mismatch in -")
    }
}

impl Mul for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: &TorusElement) -> TorusElement {
        self.checked_mul(rhs).expect("theta mismatch in *")
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        self.scale_real(-1.0)
    }
}

impl Add for TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: TorusElement) -> TorusElement {
        &self + &rhs
    }
}

impl Sub for TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: TorusElement) -> TorusElement {
        &self - &rhs
    }
}

impl Mul for TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: TorusElement) -> TorusElement {
        &self * &rhs
    }
}

impl Neg for TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        -&self
    }
}

/// Interchange form: `{"theta": f, "coeffs": [[m, n, re, im], ...]}` sorted by `(m, n)`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ElementJson {
    pub theta: f64,
    pub coeffs: Vec<(i32, i32, f64, f64)>,
}

impl From<&TorusElement> for ElementJson {
    fn from(a: &TorusElement) -> Self {
        Self {
            theta: a.theta,
            coeffs: a
                .coeffs
                .iter()
                .map(|(&(m, n), c)| (m, n, c.re, c.im))
                .collect(),
        }
    }
}

impl TryFrom<ElementJson> for TorusElement {
    type Error = Error;
    fn try_from(raw: ElementJson) -> Result<Self> {
        if !raw.theta.is_finite() {
            return Err(Error::Json("theta must be finite".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(m, n, re, im) in &raw.coeffs {
            if !seen.insert((m, n)) {
                return Err(Error::Json(format!("duplicate coefficient ({m}, {n})")));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Json(format!("non-finite coefficient at ({m}, {n})")));
            }
        }
        Ok(TorusElement::from_terms(
            raw.theta,
            raw.coeffs
                .into_iter()
                .map(|(m, n, re, im)| ((m, n), Complex64::new(re, im))),
        ))
    }
}

impl Serialize for TorusElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ElementJson::deserialize(d)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TH: f64 = 0.3183098861837907;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn u(theta: f64, j: usize) -> TorusElement {
        TorusElement::generator(theta, j).unwrap()
    }

    fn a_example(theta: f64, j: usize) -> TorusElement {
        let uj = u(theta, j);
        &(&uj + &TorusElement::real(theta, 3.0)) + &uj.star()
    }

    #[test]
    fn add_and_scale_canonical() {
        let u1 = u(TH, 1);
        let two = &u1 + &u1;
        assert_eq!(two.coeff(1, 0), c(2.0, 0.0));
        assert!(u1.scale(c(0.0, 0.0)).is_empty());
        let z = &u1 - &u1;
        assert!(z.is_empty());
        assert_eq!(z, TorusElement::zero(TH));
    }

    #[test]
    fn theta_mismatch_rejected() {
        let a = TorusElement::one(0.25);
        let b = TorusElement::one(0.5);
        assert!(matches!(a.checked_add(&b), Err(Error::ThetaMismatch { .. })));
        assert!(matches!(a.checked_mul(&b), Err(Error::ThetaMismatch { .. })));
    }

    #[test]
    fn product_phases_quarter() {
        let u1 = u(0.25, 1);
        let u2 = u(0.25, 2);
        let p = &u1 * &u2;
        assert_eq!(p.coeff(1, 1), c(1.0, 0.0));
        let q = &u2 * &u1;
        assert!((q.coeff(1, 1) - c(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn generator_relation() {
        let u1 = u(TH, 1);
        let u2 = u(TH, 2);
        let lhs = &u1 * &u2;
        let rhs = (&u2 * &u1).scale(cis_turns(TH));
        assert!(lhs.approx_eq(&rhs, 1e-15));
    }

    #[test]
    fn star_examples() {
        let u1 = u(0.25, 1);
        let s = u1.star();
        assert_eq!(s.coeff(-1, 0), c(1.0, 0.0));
        let uv = &u1 * &u(0.25, 2);
        let st = uv.star();
        assert!((st.coeff(-1, -1) - c(0.0, -1.0)).norm() < 1e-15);
        let a = a_example(TH, 1);
        assert!(a.star().approx_eq(&a, 1e-15));
        assert!(a.self_adjoint_defect() < 1e-15);
    }

    #[test]
    fn derivation_examples() {
        let u1 = u(TH, 1);
        let u2 = u(TH, 2);
        let x = &(&u1 * &u1) * &u2;
        let d = x.derive(1).unwrap();
        assert!((d.coeff(2, 1) - c(0.0, 4.0 * PI)).norm() < 1e-13);
        assert!(u1.derive(2).unwrap().is_empty());
        let a = a_example(TH, 1);
        let da = a.derive(1).unwrap();
        let expected = (&u1 - &u1.star()).scale(c(0.0, 2.0 * PI));
        assert!(da.approx_eq(&expected, 1e-13));
        assert!(matches!(a.derive(3), Err(Error::BadDirection(3))));
    }

    #[test]
    fn trace_examples() {
        let u1 = u(TH, 1);
        assert_eq!(TorusElement::one(TH).trace(), c(1.0, 0.0));
        assert_eq!(u1.trace(), c(0.0, 0.0));
        assert!(((&u1 * &u1.star()).trace() - c(1.0, 0.0)).norm() < 1e-15);
        let x = TorusElement::monomial(TH, 3, -2, c(1.0, 1.0));
        assert_eq!(x.trace(), c(0.0, 0.0));
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = TorusElement::from_terms(
            TH,
            [((1, 2), c(0.5, 0.1)), ((-1, 0), c(1.0, -2.0)), ((0, 0), c(0.3, 0.0))],
        );
        let b = TorusElement::from_terms(
            TH,
            [((-1, -2), c(0.7, 0.2)), ((1, 0), c(0.2, 0.4)), ((0, 1), c(1.0, 0.0))],
        );
        let full = (&a * &b).trace();
        let fast = a.trace_product(&b).unwrap();
        assert!((full - fast).norm() < 1e-15);
        let fast_rev = b.trace_product(&a).unwrap();
        assert!((full - fast_rev).norm() < 1e-15);
    }

    #[test]
    fn norm_l1_examples() {
        assert_eq!(a_example(TH, 1).norm_l1(), 5.0);
        assert_eq!(TorusElement::zero(TH).norm_l1(), 0.0);
    }

    #[test]
    fn truncate_examples() {
        let mut pol = TruncationPolicy::new(3);
        let a = a_example(TH, 2);
        let t = a.truncate(&mut pol);
        assert_eq!(t, a);
        assert_eq!(pol.tail_report(), 0.0);
        let far = TorusElement::monomial(TH, 4, 0, c(1.0, 0.0));
        assert!(far.truncate(&mut pol).is_empty());
        assert_eq!(pol.tail_report(), 1.0);
        let far2 = TorusElement::monomial(TH, 0, -9, c(0.0, 2.0));
        far2.truncate(&mut pol);
        assert_eq!(pol.tail_report(), 3.0);
    }

    #[test]
    fn json_roundtrip_sorted() {
        let a = TorusElement::from_terms(
            0.25,
            [((1, -1), c(1.0, 2.0)), ((-3, 0), c(0.5, 0.0)), ((1, -2), c(0.0, -1.0))],
        );
        let s = a.to_json();
        assert_eq!(
            s,
            r#"{"theta":0.25,"coeffs":[[-3,0,0.5,0.0],[1,-2,0.0,-1.0],[1,-1,1.0,2.0]]}"#
        );
        let back = TorusElement::from_json(&s).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn json_rejects_duplicates() {
        let s = r#"{"theta":0.25,"coeffs":[[1,0,1,0],[1,0,2,0]]}"#;
        assert!(TorusElement::from_json(s).is_err());
        let zero = r#"{"theta":0.25,"coeffs":[[1,0,0,0]]}"#;
        assert!(TorusElement::from_json(zero).unwrap().is_empty());
    }
}
