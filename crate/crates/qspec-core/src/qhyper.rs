//! q-Pochhammer symbols, the `1phi1` basic hypergeometric series, and the
//! Hahn-Exton q-Bessel function together with its q-difference equation.
//!
//! Conventions, for `0 < q < 1`:
//!
//! ```text
//! (a; q)_n   = prod_{k=0}^{n-1} (1 - a q^k),          (a; q)_0 = 1
//! 1phi1(0; b; q, z) = sum_{n>=0} (-1)^n q^{n(n-1)/2} z^n / ((q; q)_n (b; q)_n)
//! J_nu(z; q) = ((q^{nu+1}; q)_inf / (q; q)_inf) z^nu 1phi1(0; q^{nu+1}; q, q z^2)
//! ```
//!
//! The series for `1phi1` alternates for `z > 0`; once `z` exceeds
//! `(1-q)(1-b)` its terms grow before they decay and the direct sum loses
//! precision to cancellation. Evaluation therefore switches to the contiguous
//! relation in the argument,
//!
//! ```text
//! f(z) = (1 + b/q - z) f(qz) - (b/q) f(q^2 z),
//! ```
//!
//! anchored at two directly summed small arguments and climbed back up. The
//! climb runs toward the dominant solution of the relation, so relative
//! accuracy is preserved at the working scale.

use crate::math;
use crate::{Error, Result};

/// Default relative tolerance used when none is supplied.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Direct summation is used while the first term ratio stays below this.
const DIRECT_RATIO: f64 = 0.5;

/// Hard cap on series terms before reporting non-convergence.
const MAX_TERMS: usize = 100_000;

/// Relative slack when testing whether a parameter sits on a pole `q^{-m}`.
const POLE_EPS: f64 = 1e-12;

/// Deformation parameter `q`, order `nu`, and working tolerance.
///
/// `q` must lie strictly inside `(0, 1)` and `nu` must be nonnegative; both
/// are validated once here so the rest of the crate can assume them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QNuParams {
    q: f64,
    nu: f64,
    tol: f64,
}

impl QNuParams {
    /// Validated parameters with the default tolerance.
    pub fn new(q: f64, nu: f64) -> Result<Self> {
        Self::with_tol(q, nu, DEFAULT_TOL)
    }

    /// Validated parameters with an explicit relative tolerance.
    pub fn with_tol(q: f64, nu: f64, tol: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 || q >= 1.0 {
            return Err(Error::Domain("q must lie strictly inside (0, 1)"));
        }
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Domain("nu must be finite and nonnegative"));
        }
        check_tol(tol)?;
        Ok(Self { q, nu, tol })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// True when the operator has a one-parameter family of self-adjoint
    /// extensions (`nu < 1`); for `nu >= 1` it is essentially self-adjoint.
    pub fn is_indeterminate(&self) -> bool {
        self.nu < 1.0
    }
}

/// A summed series value with bookkeeping.
///
/// `tail_bound` estimates the absolute error of `value`: for a directly
/// summed series it is the first omitted term over `1 - q` (a valid tail
/// bound once past the hump), and for a climbed evaluation it is an estimate
/// propagated from the anchors plus roundoff at the largest intermediate
/// magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

fn check_tol(tol: f64) -> Result<()> {
    if !tol.is_finite() || tol <= 0.0 || tol >= 1.0 {
        return Err(Error::Domain("tol must lie in (0, 1)"));
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !q.is_finite() || q <= 0.0 || q >= 1.0 {
        return Err(Error::Domain("q must lie strictly inside (0, 1)"));
    }
    Ok(())
}

/// Finite q-Pochhammer symbol `(a; q)_n`.
pub fn q_pochhammer(a: f64, q: f64, n: u32) -> Result<f64> {
    check_q(q)?;
    let mut prod = 1.0;
    let mut aq = a;
    for _ in 0..n {
        prod *= 1.0 - aq;
        aq *= q;
    }
    Ok(prod)
}

/// Infinite q-Pochhammer symbol `(a; q)_inf`.
///
/// Factors are multiplied until `|a| q^k < tol (1 - q)`, which bounds the
/// relative error of the remaining tail by about `tol`.
pub fn q_pochhammer_inf(a: f64, q: f64, tol: f64) -> Result<f64> {
    check_q(q)?;
    check_tol(tol)?;
    let cutoff = tol * (1.0 - q);
    let mut prod = 1.0;
    let mut aq = a;
    let mut k = 0usize;
    while math::abs(aq) >= cutoff {
        prod *= 1.0 - aq;
        aq *= q;
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::NonConverged { terms: k });
        }
    }
    Ok(prod)
}

/// Outcome of a direct (term-by-term) series summation.
struct RawSum {
    value: f64,
    terms: usize,
    tail: f64,
}

/// Direct summation of `1phi1(0; b; q, z)`.
///
/// Terms follow the exact ratio
/// `t_n / t_{n-1} = -q^{n-1} z / ((1 - q^n)(1 - b q^{n-1}))`.
/// Summation stops at the first term that is below `tol * max(1, |sum|)`
/// with the index already past the hump `ln|z| / ln(1/q)`.
fn phi_1_1_raw(b: f64, q: f64, z: f64, tol: f64) -> Result<RawSum> {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut terms = 1usize;
    let mut q_nm1 = 1.0; // q^{n-1}
    let mut q_n = q; // q^n
    let az = math::abs(z);
    let hump = if az > 1.0 {
        math::ln(az) / math::ln(1.0 / q)
    } else {
        0.0
    };
    let mut n = 1usize;
    loop {
        let denom_b = 1.0 - b * q_nm1;
        if math::abs(denom_b) <= POLE_EPS * (1.0 + math::abs(b * q_nm1)) {
            return Err(Error::Pole { b });
        }
        term *= -q_nm1 * z / ((1.0 - q_n) * denom_b);
        if math::abs(term) < tol * math::max(1.0, math::abs(sum)) && n as f64 > hump {
            return Ok(RawSum {
                value: sum,
                terms,
                tail: math::abs(term) / (1.0 - q),
            });
        }
        sum += term;
        terms += 1;
        if !sum.is_finite() {
            return Err(Error::Overflow("1phi1 series sum left f64 range"));
        }
        if terms > MAX_TERMS {
            return Err(Error::NonConverged { terms });
        }
        q_nm1 = q_n;
        q_n *= q;
        n += 1;
    }
}

/// Detect `b = q^{-m}` (a pole of the series) up front.
fn pole_check(b: f64, q: f64) -> Result<()> {
    if b < 1.0 - POLE_EPS {
        return Ok(());
    }
    let m = math::round(math::ln(b) / math::ln(1.0 / q));
    if m >= 0.0 {
        let bq_m = b * math::qn(q, m as i64);
        if math::abs(bq_m - 1.0) <= POLE_EPS * (1.0 + bq_m) {
            return Err(Error::Pole { b });
        }
    }
    Ok(())
}

/// `1phi1(0; b; q, z)` evaluated to relative tolerance `tol`.
///
/// Arguments in the cancellation-free region (`z <= 0`, or small positive
/// `z`, or `b >= 1`) are summed directly; large positive arguments with
/// `b < 1` go through the argument climb described in the module docs.
///
/// Returns a [`Pole`](Error::Pole) error when `b` is (numerically) `q^{-m}`.
pub fn phi_1_1(b: f64, q: f64, z: f64, tol: f64) -> Result<SeriesValue> {
    check_q(q)?;
    check_tol(tol)?;
    pole_check(b, q)?;
    let thr = DIRECT_RATIO * (1.0 - q) * (1.0 - b);
    if z <= 0.0 || b >= 1.0 || z <= thr {
        let raw = phi_1_1_raw(b, q, z, tol)?;
        return Ok(SeriesValue {
            value: raw.value,
            terms_used: raw.terms,
            tail_bound: raw.tail,
        });
    }
    let (value, terms_used, tail_bound) = climb(b, q, z, tol, false)?.collapse();
    Ok(SeriesValue {
        value,
        terms_used,
        tail_bound,
    })
}

/// Value and argument derivative of `1phi1(0; b; q, .)` at `z`, via the same
/// direct/climb dispatch as [`phi_1_1`]. Crate-internal: feeds the q-Bessel
/// derivative.
pub(crate) fn phi_1_1_with_deriv(b: f64, q: f64, z: f64, tol: f64) -> Result<(f64, f64)> {
    check_q(q)?;
    check_tol(tol)?;
    pole_check(b, q)?;
    let thr = DIRECT_RATIO * (1.0 - q) * (1.0 - b);
    if z <= 0.0 || b >= 1.0 || z <= thr {
        let (g, gp) = raw_with_deriv(b, q, z, tol)?;
        return Ok((g, gp));
    }
    let out = climb(b, q, z, tol, true)?;
    Ok((out.value, out.deriv))
}

/// Direct summation of the series and its term-wise z-derivative.
fn raw_with_deriv(b: f64, q: f64, z: f64, tol: f64) -> Result<(f64, f64)> {
    if z == 0.0 {
        let c1 = -1.0 / ((1.0 - q) * (1.0 - b));
        return Ok((1.0, c1));
    }
    let mut sum = 1.0;
    let mut dsum = 0.0;
    let mut term = 1.0;
    let mut q_nm1 = 1.0;
    let mut q_n = q;
    let az = math::abs(z);
    let hump = if az > 1.0 {
        math::ln(az) / math::ln(1.0 / q)
    } else {
        0.0
    };
    let mut n = 1usize;
    loop {
        let denom_b = 1.0 - b * q_nm1;
        if math::abs(denom_b) <= POLE_EPS * (1.0 + math::abs(b * q_nm1)) {
            return Err(Error::Pole { b });
        }
        term *= -q_nm1 * z / ((1.0 - q_n) * denom_b);
        if math::abs(term) * (1.0 + n as f64 / az) < tol * math::max(1.0, math::abs(sum))
            && n as f64 > hump
        {
            return Ok((sum, dsum));
        }
        sum += term;
        dsum += n as f64 * term / z;
        if !sum.is_finite() || !dsum.is_finite() {
            return Err(Error::Overflow("1phi1 series sum left f64 range"));
        }
        if n > MAX_TERMS {
            return Err(Error::NonConverged { terms: n });
        }
        q_nm1 = q_n;
        q_n *= q;
        n += 1;
    }
}

/// Result of an argument climb: value, derivative (if requested), term
/// bookkeeping, and an absolute error estimate.
struct ClimbOut {
    value: f64,
    deriv: f64,
    terms: usize,
    err: f64,
}

impl ClimbOut {
    fn collapse(self) -> (f64, usize, f64) {
        (self.value, self.terms, self.err)
    }
}

/// Evaluate `f(z) = 1phi1(0; b; q, z)` for large positive `z` and `b < 1` by
/// summing at two small anchor arguments `q^{k} z`, `q^{k+1} z` and climbing
/// the contiguous relation `f(u) = (1 + b/q - u) f(qu) - (b/q) f(q^2 u)` back
/// to `u = z`. When `want_deriv` is set, the differentiated relation is
/// climbed alongside.
fn climb(b: f64, q: f64, z: f64, tol: f64, want_deriv: bool) -> Result<ClimbOut> {
    let thr = DIRECT_RATIO * (1.0 - q) * (1.0 - b);
    let k = math::ceil(math::ln(z / thr) / math::ln(1.0 / q)) as i64;
    if k <= 0 || k > 1_000_000 {
        return Err(Error::Domain("argument climb depth out of range"));
    }
    let z_anchor = z * math::qn(q, k);
    let a0 = phi_1_1_raw(b, q, z_anchor, tol)?;
    let a1 = phi_1_1_raw(b, q, q * z_anchor, tol)?;
    let bq = b / q;
    // g1 tracks level `lvl`, g2 level `lvl + 1`; likewise the derivatives.
    let mut g1 = a0.value;
    let mut g2 = a1.value;
    let (mut d1, mut d2) = if want_deriv {
        let (_, d0) = raw_with_deriv(b, q, z_anchor, tol)?;
        let (_, dn) = raw_with_deriv(b, q, q * z_anchor, tol)?;
        (d0, dn)
    } else {
        (0.0, 0.0)
    };
    let mut peak = math::max(math::abs(g1), math::abs(g2));
    let mut u = z_anchor;
    let mut lvl = k;
    while lvl > 0 {
        lvl -= 1;
        u /= q;
        let coef = 1.0 + bq - u;
        let g0 = coef * g1 - bq * g2;
        if want_deriv {
            let d0 = -g1 + coef * q * d1 - bq * q * q * d2;
            d2 = d1;
            d1 = d0;
        }
        g2 = g1;
        g1 = g0;
        if !g1.is_finite() {
            return Err(Error::Overflow("1phi1 argument climb left f64 range"));
        }
        peak = math::max(peak, math::abs(g1));
    }
    let anchor_rel =
        (a0.tail + a1.tail) / math::max(math::min(math::abs(a0.value), math::abs(a1.value)), 0.25);
    let err = (anchor_rel + 4.0 * (k as f64) * f64::EPSILON) * peak;
    Ok(ClimbOut {
        value: g1,
        deriv: d1,
        terms: a0.terms + a1.terms + k as usize,
        err,
    })
}

/// Power `z^nu` with the branch conventions of the q-Bessel prefactor:
/// integer orders act through the usual signed power, non-integer orders
/// require `z > 0` (checked by the callers).
fn z_pow(z: f64, nu: f64) -> f64 {
    math::pow(z, nu)
}

fn is_integer(nu: f64) -> bool {
    nu == math::round(nu)
}

/// Hahn-Exton q-Bessel function `J_nu(z; q)`.
///
/// Valid for orders `nu > -1` (negative non-integer orders appear in the
/// second characteristic function). For non-integer order the argument must
/// be nonnegative; for integer order the parity `J_nu(-z) = (-1)^nu J_nu(z)`
/// follows from the `z^nu` prefactor.
pub fn hahn_exton_j(nu: f64, z: f64, q: f64, tol: f64) -> Result<f64> {
    check_q(q)?;
    check_tol(tol)?;
    if !nu.is_finite() || nu <= -1.0 {
        return Err(Error::Domain("order nu must be finite and > -1"));
    }
    if z < 0.0 && !is_integer(nu) {
        return Err(Error::Domain("negative argument requires integer order"));
    }
    if z == 0.0 {
        return if nu > 0.0 {
            Ok(0.0)
        } else if nu == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::Domain("negative order diverges at z = 0"))
        };
    }
    let b = math::pow(q, nu + 1.0);
    let pref = q_pochhammer_inf(b, q, tol)? / q_pochhammer_inf(q, q, tol)?;
    let series = phi_1_1(b, q, q * z * z, tol)?;
    Ok(pref * z_pow(z, nu) * series.value)
}

/// Argument derivative `d/dz J_nu(z; q)`, from the term-wise derivative of
/// the defining series:
///
/// ```text
/// J_nu'(z; q) = pref * ( nu z^{nu-1} f(q z^2) + 2 q z^{nu+1} f'(q z^2) ),
/// f = 1phi1(0; q^{nu+1}; q, .)
/// ```
pub fn hahn_exton_j_dz(nu: f64, z: f64, q: f64, tol: f64) -> Result<f64> {
    check_q(q)?;
    check_tol(tol)?;
    if !nu.is_finite() || nu <= -1.0 {
        return Err(Error::Domain("order nu must be finite and > -1"));
    }
    if z < 0.0 && !is_integer(nu) {
        return Err(Error::Domain("negative argument requires integer order"));
    }
    let b = math::pow(q, nu + 1.0);
    if z == 0.0 {
        return if nu == 0.0 || nu > 1.0 {
            Ok(0.0)
        } else if nu == 1.0 {
            let pref = q_pochhammer_inf(b, q, tol)? / q_pochhammer_inf(q, q, tol)?;
            Ok(pref)
        } else {
            Err(Error::Domain(
                "derivative unbounded at z = 0 for 0 < nu < 1",
            ))
        };
    }
    let pref = q_pochhammer_inf(b, q, tol)? / q_pochhammer_inf(q, q, tol)?;
    let (f, fp) = phi_1_1_with_deriv(b, q, q * z * z, tol)?;
    let slope = nu * z_pow(z, nu - 1.0) * f + 2.0 * q * z_pow(z, nu + 1.0) * fp;
    Ok(pref * slope)
}

/// Relative residual of the q-difference equation
///
/// ```text
/// J_nu(qz; q) + q^{-nu/2} (q z^2 - 1 - q^nu) J_nu(q^{1/2} z; q) + J_nu(z; q) = 0,
/// ```
///
/// scaled by the sum of the three term magnitudes. Identically zero in exact
/// arithmetic; the returned value measures evaluation error only.
pub fn residual_diffeq(nu: f64, z: f64, q: f64, tol: f64) -> Result<f64> {
    let j_down = hahn_exton_j(nu, q * z, q, tol)?;
    let j_half = hahn_exton_j(nu, math::sqrt(q) * z, q, tol)?;
    let j_at = hahn_exton_j(nu, z, q, tol)?;
    let coef = math::pow(q, -nu / 2.0) * (q * z * z - 1.0 - math::pow(q, nu));
    let scale = math::abs(j_down) + math::abs(coef * j_half) + math::abs(j_at);
    let resid = math::abs(j_down + coef * j_half + j_at);
    Ok(if scale > 0.0 { resid / scale } else { resid })
}
