//! Small square matrices over the torus algebra (metrics, endomorphisms).

use num_complex::Complex64;

use crate::algebra::{TorusElement, TruncationPolicy};
use crate::error::{Error, Result};

/// An `n x n` matrix over [`TorusElement`], stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraMatrix {
    n: usize,
    theta: f64,
    entries: Vec<TorusElement>,
}

impl AlgebraMatrix {
    pub fn from_rows(rows: Vec<Vec<TorusElement>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows must have length n".into()));
        }
        let entries: Vec<TorusElement> = rows.into_iter().flatten().collect();
        let theta = entries[0].theta();
        for e in &entries {
            if !e.same_theta(&entries[0]) {
                return Err(Error::ThetaMismatch {
                    left: theta,
                    right: e.theta(),
                });
            }
        }
        Ok(Self { n, theta, entries })
    }

    pub fn zeros(theta: f64, n: usize) -> Self {
        Self {
            n,
            theta,
            entries: vec![TorusElement::zero(theta); n * n],
        }
    }

    pub fn scalar_identity(theta: f64, n: usize, z: Complex64) -> Self {
        Self::diagonal(vec![TorusElement::scalar(theta, z); n]).expect("uniform theta")
    }

    pub fn identity(theta: f64, n: usize) -> Self {
        Self::scalar_identity(theta, n, Complex64::new(1.0, 0.0))
    }

    /// `a I_n`.
    pub fn element_identity(a: &TorusElement, n: usize) -> Self {
        Self::diagonal(vec![a.clone(); n]).expect("uniform theta")
    }

    pub fn diagonal(diag: Vec<TorusElement>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::Dimension("empty diagonal".into()));
        }
        let theta = diag[0].theta();
        let mut out = Self::zeros(theta, n);
        for (i, d) in diag.into_iter().enumerate() {
            if !d.same_theta(&out.entries[0]) {
                return Err(Error::ThetaMismatch {
                    left: theta,
                    right: d.theta(),
                });
            }
            out.entries[i * n + i] = d;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn get(&self, i: usize, j: usize) -> &TorusElement {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: TorusElement) -> Result<()> {
        if !value.same_theta(&self.entries[0]) {
            return Err(Error::ThetaMismatch {
                left: self.theta,
                right: value.theta(),
            });
        }
        self.entries[i * self.n + j] = value;
        Ok(())
    }

    pub fn entries(&self) -> &[TorusElement] {
        &self.entries
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{} vs {}", self.n, other.n)));
        }
        if self.theta.to_bits() != other.theta.to_bits() {
            return Err(Error::ThetaMismatch {
                left: self.theta,
                right: other.theta,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&TorusElement, &TorusElement) -> TorusElement) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            n: self.n,
            theta: self.theta,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        self.map(|e| e.scale(z))
    }

    pub fn map(&self, f: impl Fn(&TorusElement) -> TorusElement) -> Self {
        Self {
            n: self.n,
            theta: self.theta,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.n;
        let mut out = Self::zeros(self.theta, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = TorusElement::zero(self.theta);
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_empty() || b.is_empty() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                out.entries[i * n + j] = acc;
            }
        }
        Ok(out)
    }

    /// Conjugate transpose: `(A*)_{ij} = (A_{ji})*`.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(self.theta, n);
        for i in 0..n {
            for j in 0..n {
                out.entries[i * n + j] = self.get(j, i).star();
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn truncate(&self, policy: &mut TruncationPolicy) -> Self {
        Self {
            n: self.n,
            theta: self.theta,
            entries: self.entries.iter().map(|e| e.truncate(policy)).collect(),
        }
    }

    /// Sum of the l1 norms of all entries.
    pub fn norm_l1(&self) -> f64 {
        self.entries.iter().map(TorusElement::norm_l1).fold(0.0, |s, x| s + x)
    }

    /// Largest row sum of entry l1 norms; bounds the operator norm for
    /// self-adjoint matrices.
    pub fn row_norm_l1(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).norm_l1()).fold(0.0, |s, x| s + x))
            .fold(0.0, f64::max)
    }

    pub fn support_radius(&self) -> u32 {
        self.entries
            .iter()
            .map(TorusElement::support_radius)
            .max()
            .unwrap_or(0)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_empty()))
    }

    pub fn self_adjoint_defect(&self) -> f64 {
        self.sub(&self.adjoint()).expect("same shape").norm_l1()
    }

    /// Evaluates `sum_k c_k A^k` by Horner's rule.
    pub fn polynomial(&self, coeffs: &[Complex64]) -> Self {
        let mut acc = Self::zeros(self.theta, self.n);
        for &c in coeffs.iter().rev() {
            acc = acc
                .mul(self)
                .expect("same shape")
                .add(&Self::scalar_identity(self.theta, self.n, c))
                .expect("same shape");
        }
        acc
    }
}
