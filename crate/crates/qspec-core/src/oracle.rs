//! Independent spectral oracle: Sturm-sequence bisection on finite
//! truncations of the operator.
//!
//! Everything here is built from the matrix entries alone. The eigensolver
//! deliberately never touches the hypergeometric machinery or the
//! characteristic functions, so agreement between its eigenvalues and the
//! roots found in `spectra` is a genuine cross-check, not a tautology.
//!
//! Dirichlet truncation (dropping rows and columns past `N`) converges to
//! the Friedrichs spectrum in both the determinate and indeterminate
//! regimes; [`compare_friedrichs`] quantifies the agreement.

use alloc::vec::Vec;

use crate::qhyper::QNuParams;
use crate::{jacobi, spectra, Error, Result};

/// Leading `N x N` principal block of the operator, stored as the two
/// tridiagonal bands.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    params: QNuParams,
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl TruncatedOperator {
    /// Builds the truncation, rejecting sizes whose entries leave f64
    /// range (they grow like `q^{-n}` down the diagonal).
    pub fn new(params: &QNuParams, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("truncation size must be at least 1"));
        }
        let diag: Vec<f64> = (0..n).map(|k| jacobi::beta(params, k as i64)).collect();
        let off: Vec<f64> = (0..n - 1)
            .map(|k| jacobi::alpha(params, k as i64))
            .collect();
        if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Overflow("truncation entries left f64 range"));
        }
        // the factorization squares the off-diagonals, so entries that are
        // representable but exceed sqrt(f64::MAX) still poison the pivots
        if off.iter().any(|v| !(v * v).is_finite()) {
            return Err(Error::Overflow("truncation pivots leave f64 range"));
        }
        Ok(TruncatedOperator {
            params: *params,
            diag,
            off,
        })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn params(&self) -> &QNuParams {
        &self.params
    }

    /// Number of eigenvalues strictly below `x`, by counting negative
    /// pivots of the LDL^T factorization of `A - x`. A vanishing pivot is
    /// nudged to a tiny negative value (the standard underflow guard),
    /// which at worst shifts the count by one at an exact eigenvalue.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0usize;
        let mut d = self.diag[0] - x;
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
        for k in 1..self.diag.len() {
            let e = self.off[k - 1];
            d = (self.diag[k] - x) - e * e / d;
            if d == 0.0 {
                d = -f64::MIN_POSITIVE;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Interval certain to contain the whole spectrum of the truncation.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let mut r = 0.0;
            if k > 0 {
                r += self.off[k - 1].abs();
            }
            if k < n - 1 {
                r += self.off[k].abs();
            }
            lo = lo.min(self.diag[k] - r);
            hi = hi.max(self.diag[k] + r);
        }
        (lo, hi)
    }

    /// The `count` smallest eigenvalues, each located by bisection on the
    /// pivot count to 1e-12 absolute (or a few ulps for large magnitudes).
    pub fn sturm_eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        if count == 0 || count > self.size() {
            return Err(Error::Domain(
                "eigenvalue count must be between 1 and the truncation size",
            ));
        }
        let (glo, ghi) = self.gershgorin();
        let mut out = Vec::with_capacity(count);
        for j in 1..=count {
            // invariant: count_below(lo) < j <= count_below(hi)
            let mut lo = glo;
            let mut hi = ghi;
            for _ in 0..2000 {
                let mid = 0.5 * (lo + hi);
                let width = hi - lo;
                if width <= 1e-12
                    || width <= 8.0 * f64::EPSILON * mid.abs()
                    || mid == lo
                    || mid == hi
                {
                    break;
                }
                if self.count_below(mid) >= j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        Ok(out)
    }
}

/// Maximum relative deviation between the first `count` Friedrichs
/// eigenvalues (roots of the characteristic function) and the `count`
/// smallest eigenvalues of the size-`n` Dirichlet truncation.
pub fn compare_friedrichs(params: &QNuParams, count: usize, n: usize) -> Result<f64> {
    let spec = spectra::friedrichs_spectrum(params, count)?;
    let trunc = TruncatedOperator::new(params, n)?;
    let approx = trunc.sturm_eigenvalues(count)?;
    let mut worst = 0.0f64;
    for (xi, lam) in spec.eigenvalues.iter().zip(&approx) {
        let dev = ((lam - xi) / xi).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: f64, nu: f64) -> QNuParams {
        QNuParams::new(q, nu).unwrap()
    }

    #[test]
    fn one_by_one_is_the_corner_entry() {
        let params = p(0.5, 1.0);
        let op = TruncatedOperator::new(&params, 1).unwrap();
        let eig = op.sturm_eigenvalues(1).unwrap();
        assert!((eig[0] - jacobi::beta(&params, 0)).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_matches_quadratic_formula() {
        // [[1.5, -1], [-1, 3]]: trace 4.5, det 3.5, eigenvalues 1 and 3.5
        let params = p(0.5, 1.0);
        let op = TruncatedOperator::new(&params, 2).unwrap();
        assert!((op.diag[0] - 1.5).abs() < 1e-15);
        assert!((op.diag[1] - 3.0).abs() < 1e-15);
        assert!((op.off[0] + 1.0).abs() < 1e-15);
        let eig = op.sturm_eigenvalues(2).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-12, "{}", eig[0]);
        assert!((eig[1] - 3.5).abs() < 1e-12, "{}", eig[1]);
    }

    #[test]
    fn pivot_count_is_monotone() {
        let params = p(0.5, 0.5);
        let op = TruncatedOperator::new(&params, 40).unwrap();
        let (lo, hi) = op.gershgorin();
        let mut prev = 0usize;
        let mut x = lo;
        let step = (hi - lo) / 64.0;
        for _ in 0..=64 {
            let c = op.count_below(x);
            assert!(c >= prev, "count dropped at x={x}");
            prev = c;
            x += step;
        }
        assert_eq!(op.count_below(lo - 1.0), 0);
        assert_eq!(op.count_below(hi + 1.0), 40);
    }

    #[test]
    fn count_at_eigenvalues_brackets_index() {
        let params = p(0.5, 1.0);
        let op = TruncatedOperator::new(&params, 25).unwrap();
        let eig = op.sturm_eigenvalues(5).unwrap();
        for (i, lam) in eig.iter().enumerate() {
            assert!(op.count_below(lam - 1e-9) <= i);
            assert!(op.count_below(lam + 1e-9) > i);
        }
    }

    #[test]
    fn oversized_truncation_overflows() {
        let params = p(0.1, 1.0);
        assert!(matches!(
            TruncatedOperator::new(&params, 400),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn truncation_tracks_friedrichs_determinate() {
        // truncation error decays geometrically and sits under the
        // bisection resolution (~1e-13 relative) for every N on this
        // ladder, so "monotone in N" degenerates to "flat at the floor"
        let params = p(0.5, 2.0);
        for n in [100usize, 200, 300] {
            let dev = compare_friedrichs(&params, 4, n).unwrap();
            assert!(dev < 1e-10, "N={n}: deviation {dev}");
        }
    }

    #[test]
    fn truncation_tracks_friedrichs_indeterminate() {
        let params = p(0.5, 0.5);
        let dev = compare_friedrichs(&params, 3, 400).unwrap();
        assert!(dev < 1e-6, "deviation {dev}");
        // the one resolvable rung of the convergence ladder before the
        // deviation reaches the bisection floor
        let d50 = compare_friedrichs(&params, 3, 50).unwrap();
        let d100 = compare_friedrichs(&params, 3, 100).unwrap();
        assert!(d50 > 1e-9 && d100 < 1e-10 && d50 > d100, "{d50} {d100}");
    }
}
