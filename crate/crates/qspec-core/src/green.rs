//! Green kernel of the Friedrichs extension at spectral parameter zero.
//!
//! The kernel factors through the two zero-energy solutions of the
//! recurrence,
//!
//! ```text
//! G_{jk} = Q1(min(j, k)) Q2(max(j, k)),
//! ```
//!
//! and is Hilbert-Schmidt with the closed-form squared norm
//!
//! ```text
//! ||G||_HS^2 = (1 + q^{2+nu}) / ((1 - q^2)(1 - q^{1+nu})^2 (1 - q^{2+nu})).
//! ```
//!
//! Because `G` inverts the operator, `1 / ||G||_HS` is a lower bound for the
//! smallest Friedrichs eigenvalue, and the largest eigenvalue of a truncation
//! of `G` is a sharpening of that bound from below.
//!
//! The quadratic form of the kernel admits a rearrangement into a sum of
//! squares,
//!
//! ```text
//! <f, G f> = sum_{k>=0} q^k (sum_{j>=0} q^{(1+nu)j/2} f_{k+j})^2,
//! ```
//!
//! which is the numerically preferred route: every addend is nonnegative, so
//! nothing cancels. The naive double sum over `G_{jk}` is kept alongside as
//! an independent check.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::qhyper::QNuParams;
use crate::{jacobi, Error, Result};

/// Kernel entry `G_{jk} = Q1(min) Q2(max)`.
pub fn green_entry(params: &QNuParams, j: u32, k: u32) -> f64 {
    let lo = j.min(k) as i64;
    let hi = j.max(k) as i64;
    jacobi::q1(params, lo) * jacobi::q2(params, hi)
}

/// Closed form of the squared Hilbert-Schmidt norm of the kernel.
pub fn hs_norm_sq_closed(params: &QNuParams) -> f64 {
    let q = params.q();
    let nu = params.nu();
    let d1 = 1.0 - math::pow(q, 1.0 + nu);
    (1.0 + math::pow(q, 2.0 + nu)) / ((1.0 - q * q) * d1 * d1 * (1.0 - math::pow(q, 2.0 + nu)))
}

/// Quadratic form `<f, G f>` through the sum-of-squares rearrangement.
///
/// All addends are nonnegative, so the result is exact to rounding at its
/// own scale regardless of sign patterns in `f`.
pub fn quadratic_form(params: &QNuParams, f: &[f64]) -> f64 {
    let q = params.q();
    let w = math::pow(q, (1.0 + params.nu()) / 2.0);
    let n = f.len();
    let mut total = 0.0;
    let mut qk = 1.0; // q^k
    for k in 0..n {
        // inner = sum_{j} w^j f_{k+j}, accumulated from the tail down so the
        // smallest contributions enter first
        let mut inner = 0.0;
        for i in (k..n).rev() {
            inner = inner * w + f[i];
        }
        // the Horner pass above computes f_k + w f_{k+1} + ... directly
        total += qk * inner * inner;
        qk *= q;
    }
    total
}

/// Quadratic form `<f, G f>` as the literal double sum over kernel entries.
/// Pairwise slower and less stable than [`quadratic_form`]; kept as the
/// independent route for validation.
pub fn quadratic_form_entrywise(params: &QNuParams, f: &[f64]) -> f64 {
    let n = f.len();
    let mut total = 0.0;
    for j in 0..n {
        for k in 0..n {
            total += green_entry(params, j as u32, k as u32) * f[j] * f[k];
        }
    }
    total
}

/// Residual of the inverse relation `T (G_N f) = f` on a truncation.
///
/// `f` is a finitely supported vector whose support should sit well inside
/// the truncation size `n`. The kernel block of size `n` is applied to `f`,
/// the result is pushed through the tridiagonal matrix, and the Euclidean
/// distance to `f` is measured over the first `n - 2` coordinates; the last
/// two rows are excluded because the matrix couples them to entries the
/// truncation cut away.
pub fn inverse_residual(params: &QNuParams, f: &[f64], n: usize) -> f64 {
    assert!(n >= 3, "need at least 3 rows to leave an untruncated block");
    assert!(f.len() <= n, "support must fit inside the truncation");
    let mut gf = Vec::with_capacity(n);
    for j in 0..n {
        let mut s = 0.0;
        for (k, fk) in f.iter().enumerate() {
            s += green_entry(params, j as u32, k as u32) * fk;
        }
        gf.push(s);
    }
    let tgf = jacobi::apply(params, &gf);
    let mut err_sq = 0.0;
    for (j, v) in tgf.iter().enumerate().take(n - 2) {
        let target = if j < f.len() { f[j] } else { 0.0 };
        err_sq += (v - target) * (v - target);
    }
    math::sqrt(err_sq)
}

/// Dense truncation of the Green kernel to its leading `n x n` block.
#[derive(Debug, Clone)]
pub struct GreenTruncation {
    n: usize,
    data: Vec<f64>, // row-major n x n, symmetric
}

impl GreenTruncation {
    pub fn new(params: &QNuParams, n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for j in 0..n {
            for k in j..n {
                let v = green_entry(params, j as u32, k as u32);
                data[j * n + k] = v;
                data[k * n + j] = v;
            }
        }
        GreenTruncation { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.data[j * self.n + k]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        let mut out = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let row = &self.data[j * self.n..(j + 1) * self.n];
            out.push(row.iter().zip(v).map(|(a, b)| a * b).sum());
        }
        out
    }

    /// Largest eigenvalue by power iteration.
    ///
    /// The truncation is symmetric positive definite, so the iteration
    /// converges from a generic start; convergence is declared when two
    /// consecutive Rayleigh quotients agree to `tol` relatively.
    pub fn largest_eigenvalue(&self, tol: f64) -> Result<f64> {
        let mut v = vec![1.0; self.n];
        // break symmetry so no eigenvector is exactly orthogonal to the start
        for (i, vi) in v.iter_mut().enumerate() {
            *vi += (i % 7) as f64 * 0.01;
        }
        let mut lambda = 0.0f64;
        for _ in 0..20_000 {
            let w = self.apply(&v);
            let norm = math::sqrt(w.iter().map(|x| x * x).sum());
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::Overflow("power iteration degenerated"));
            }
            let next: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / norm;
            }
            if math::abs(next - lambda) <= tol * math::abs(next) {
                return Ok(next);
            }
            lambda = next;
        }
        Err(Error::NonConverged { terms: 20_000 })
    }
}
