//! Spectra of the self-adjoint extensions and their validation apparatus.
//!
//! The Friedrichs spectrum is the zero set of `Phi`; the spectrum of the
//! extension labeled by `kappa` (admissible only for `0 <= nu < 1`) is the
//! root set of `F = kappa Phi + Psi`. Both are pure point, simple, and
//! accumulate only at infinity, with the m-th positive eigenvalue close to
//! `q^{1-m}`. That geometric law drives the bracketing grid; refinement is
//! derivative-free (bisection, then bracket-safe Illinois interpolation).
//!
//! Consecutive Friedrichs eigenvalues bracket exactly one root of `F` for
//! every `kappa`, with sign changes guaranteed at the endpoints because the
//! endpoint values reduce to `Psi` there. Only the lowest root of `F` can
//! escape below the Friedrichs ground state (and below zero for
//! `kappa < -q^nu`), so it alone needs a downward search.
//!
//! The module also exposes the positive zeros of the Hahn-Exton q-Bessel
//! function (rescaled eigenvalues), the two orthogonality relations they
//! generate, eigenvector synthesis by independent routes, and the quadratic
//! form identity used to pin the extension parametrization.

use alloc::vec::Vec;

use crate::charfn::{self, Route};
use crate::math;
use crate::qhyper::{self, QNuParams};
use crate::{green, jacobi, Error, Result};

/// Which self-adjoint extension an object refers to.
///
/// `Kappa` is admissible only in the indeterminate regime `0 <= nu < 1`;
/// for `nu >= 1` the operator is essentially self-adjoint and `Friedrichs`
/// is the only member of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtensionId {
    Friedrichs,
    Kappa(f64),
}

/// Computed spectrum: ordered eigenvalues with the brackets that isolated
/// them and the characteristic-function residuals at the returned roots.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub ext: ExtensionId,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub brackets: Vec<(f64, f64)>,
}

/// Ordered positive zeros `w_1 < w_2 < ...` of the q-Bessel function of the
/// given order, obtained from the Friedrichs eigenvalues via `x = q w^2`.
#[derive(Debug, Clone)]
pub struct BesselZeros {
    pub params: QNuParams,
    pub w: Vec<f64>,
}

/// Eigenvector synthesized by the closed form together with the
/// polynomial-sequence route, and the angle defect between the two.
#[derive(Debug, Clone)]
pub struct Eigenvector {
    /// Closed-form components `u_0 .. u_{N-1}`.
    pub components: Vec<f64>,
    /// Same eigenvector through the polynomial sequence (proportional,
    /// not equal, to `components`).
    pub phat_route: Vec<f64>,
    /// Sine of the angle between the two routes; zero for perfect
    /// collinearity.
    pub collinearity_defect: f64,
}

/// Residual threshold for accepting a point as an eigenvalue in
/// [`eigenvector`]: refined roots land many orders below this, while the
/// characteristic functions at a non-eigenvalue are O(1) or larger.
const EIGENVALUE_GUARD: f64 = 1e-6;

/// Rigorous lower bound for the smallest Friedrichs eigenvalue,
/// `1 / ||G||_HS`.
pub fn friedrichs_lower_bound(params: &QNuParams) -> f64 {
    1.0 / math::sqrt(green::hs_norm_sq_closed(params))
}

/// Copy of `params` with the series tolerance pushed to machine level.
///
/// Root positions feed forward into quantities that amplify eigenvalue
/// error exponentially (polynomial tails, spectral masses), so the
/// characteristic functions are evaluated as sharply as f64 allows during
/// refinement; the user tolerance keeps its meaning as the acceptance
/// scale for residuals.
fn tighten(params: &QNuParams) -> QNuParams {
    QNuParams::with_tol(params.q(), params.nu(), math::min(params.tol(), 1e-15)).unwrap_or(*params)
}

fn phi_at(params: &QNuParams, x: f64) -> Result<f64> {
    Ok(charfn::phi(params, x, Route::Hypergeom)?.value)
}

fn psi_at(params: &QNuParams, x: f64) -> Result<f64> {
    let route = if params.nu() == 0.0 {
        Route::SeriesSum
    } else {
        Route::Hypergeom
    };
    Ok(charfn::psi(params, x, route)?.value)
}

/// Characteristic function of the given extension.
pub fn ext_char_fn(params: &QNuParams, ext: ExtensionId, x: f64) -> Result<f64> {
    match ext {
        ExtensionId::Friedrichs => phi_at(params, x),
        ExtensionId::Kappa(kappa) => Ok(kappa * phi_at(params, x)? + psi_at(params, x)?),
    }
}

/// Largest `|x|` at which the characteristic functions are still safely
/// representable for `x < 0`: their all-positive series peak near
/// `exp(ln^2 |x| / (2 ln(1/q)))`.
fn negative_probe_cap(q: f64) -> f64 {
    math::exp(math::sqrt(1380.0 * math::ln(1.0 / q)))
}

/// Bracket-safe root refinement: bisection down to 1e-3 relative width,
/// then Illinois-style interpolation down to machine width. Returns the
/// root and the absolute residual `|f(root)|`.
fn refine_root<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok((a, 0.0));
    }
    if fb == 0.0 {
        return Ok((b, 0.0));
    }
    debug_assert!((fa > 0.0) != (fb > 0.0), "refine_root needs a sign change");

    // coarse phase: plain bisection
    while math::abs(b - a) > 5e-4 * math::abs(a + b) {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok((m, 0.0));
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }

    // sharp phase: Illinois (false position with stale-endpoint damping)
    let mut side = 0i8;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if math::abs(b - a) <= 4.0 * f64::EPSILON * math::max(math::abs(mid), f64::MIN_POSITIVE) {
            break;
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if !(x > lo && x < hi) {
            x = mid;
        }
        if x == a || x == b {
            break;
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok((x, 0.0));
        }
        if (fx > 0.0) == (fa > 0.0) {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    let root = if math::abs(fa) <= math::abs(fb) { a } else { b };
    Ok((root, math::abs(f(root)?)))
}

/// The first `count` eigenvalues of the Friedrichs extension, as zeros of
/// `Phi` located by an upward geometric march.
///
/// `Phi` is positive below the rigorous ground-state bound `1/||G||_HS`,
/// its zeros are simple, and consecutive zeros sit roughly a factor `1/q`
/// apart, so marching with the much finer step `q^{-1/6}` and refining
/// every sign change enumerates the spectrum in order. The asymptotic
/// cells `[q^{3/2-m}, q^{1/2-m}]` are not used directly: near `q = 1` the
/// `O(q^m)` corrections to the zero positions exceed the cell width.
pub fn friedrichs_spectrum(params: &QNuParams, count: usize) -> Result<Spectrum> {
    if count == 0 {
        return Err(Error::Domain("eigenvalue count must be at least 1"));
    }
    let q = params.q();
    let tight = tighten(params);
    let f = |x: f64| phi_at(&tight, x);
    let mut eigenvalues = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut brackets = Vec::with_capacity(count);

    let step = math::pow(1.0 / q, 1.0 / 6.0);
    let start = 0.99 * friedrichs_lower_bound(params);
    // enough steps to pass xi_count ~ q^{1-count} with a wide margin
    let span = (count as f64 + 4.0) * math::ln(1.0 / q) + math::ln(math::max(1.0, 1.0 / start));
    let max_steps = (span / math::ln(step)) as usize + 64;

    let mut x_prev = start;
    let mut f_prev = f(x_prev)?;
    for _ in 0..max_steps {
        if eigenvalues.len() == count {
            break;
        }
        let x = x_prev * step;
        let fx = f(x)?;
        if fx == 0.0 {
            // grid point is a zero to full precision; the sign flips across it
            eigenvalues.push(x);
            residuals.push(0.0);
            brackets.push((x_prev, x));
            x_prev = x;
            f_prev = if f_prev > 0.0 {
                -f64::MIN_POSITIVE
            } else {
                f64::MIN_POSITIVE
            };
            continue;
        }
        if (fx > 0.0) != (f_prev > 0.0) {
            let (root, resid) = refine_root(&f, x_prev, x, f_prev, fx)?;
            eigenvalues.push(root);
            residuals.push(resid);
            brackets.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    if eigenvalues.len() < count {
        return Err(Error::BracketFail {
            lo: start,
            hi: x_prev,
        });
    }
    Ok(Spectrum {
        ext: ExtensionId::Friedrichs,
        eigenvalues,
        residuals,
        brackets,
    })
}

/// The first `count` eigenvalues of the extension `T(kappa)`, as roots of
/// `kappa Phi + Psi`.
///
/// Roots beyond the first are bracketed by consecutive Friedrichs
/// eigenvalues, where a sign change is guaranteed (the endpoint values
/// reduce to `Psi`, which alternates there). The lowest root lies below the
/// Friedrichs ground state and may be negative; it is found by geometric
/// downward expansion (factor 4, at most 40 times) capped at the largest
/// magnitude where the series are still representable.
pub fn kappa_spectrum(params: &QNuParams, kappa: f64, count: usize) -> Result<Spectrum> {
    if params.nu() >= 1.0 {
        return Err(Error::Domain("kappa extensions exist only for 0 <= nu < 1"));
    }
    if !kappa.is_finite() {
        return Err(Error::Domain(
            "kappa must be finite; the kappa = infinity member is the Friedrichs extension",
        ));
    }
    if count == 0 {
        return Err(Error::Domain("eigenvalue count must be at least 1"));
    }
    let tight = tighten(params);
    let fr = friedrichs_spectrum(params, count)?;
    let f = |x: f64| ext_char_fn(&tight, ExtensionId::Kappa(kappa), x);

    let mut eigenvalues = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut brackets = Vec::with_capacity(count);

    // lowest root: somewhere in (-inf, xi_1(inf))
    let hi = fr.eigenvalues[0];
    let fhi = f(hi)?;
    let f0 = f(0.0)?;
    if f0 == 0.0 {
        eigenvalues.push(0.0);
        residuals.push(0.0);
        brackets.push((0.0, 0.0));
    } else if (f0 > 0.0) != (fhi > 0.0) {
        let (root, resid) = refine_root(&f, 0.0, hi, f0, fhi)?;
        eigenvalues.push(root);
        residuals.push(resid);
        brackets.push((0.0, hi));
    } else {
        let cap = negative_probe_cap(params.q());
        let mut prev = 0.0;
        let mut fprev = f0;
        let mut lo = -math::max(hi, 1.0);
        let mut found = None;
        for _ in 0..40 {
            if math::abs(lo) > cap {
                break;
            }
            let flo = f(lo)?;
            if flo == 0.0 {
                found = Some((lo, 0.0));
                break;
            }
            if (flo > 0.0) != (fprev > 0.0) {
                found = Some(refine_root(&f, lo, prev, flo, fprev)?);
                break;
            }
            prev = lo;
            fprev = flo;
            lo *= 4.0;
        }
        match found {
            Some((root, resid)) => {
                eigenvalues.push(root);
                residuals.push(resid);
                brackets.push((lo, prev));
            }
            None => return Err(Error::BracketFail { lo, hi: 0.0 }),
        }
    }

    // every further root is pinned between consecutive Friedrichs levels
    for n in 2..=count {
        let a = fr.eigenvalues[n - 2];
        let b = fr.eigenvalues[n - 1];
        let fa = f(a)?;
        let fb = f(b)?;
        if fa != 0.0 && fb != 0.0 && (fa > 0.0) == (fb > 0.0) {
            return Err(Error::BracketFail { lo: a, hi: b });
        }
        let (root, resid) = refine_root(&f, a, b, fa, fb)?;
        eigenvalues.push(root);
        residuals.push(resid);
        brackets.push((a, b));
    }

    Ok(Spectrum {
        ext: ExtensionId::Kappa(kappa),
        eigenvalues,
        residuals,
        brackets,
    })
}

/// Eigenvalue trajectories over a grid of extension parameters: one row
/// `(kappa, [xi_1(kappa), ..., xi_count(kappa)])` per requested `kappa`.
pub fn kappa_sweep(
    params: &QNuParams,
    kappas: &[f64],
    count: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut rows = Vec::with_capacity(kappas.len());
    for &k in kappas {
        let spec = kappa_spectrum(params, k, count)?;
        rows.push((k, spec.eigenvalues));
    }
    Ok(rows)
}

/// Strict interlacing `xi_1(kappa) < xi_1(inf) < xi_2(kappa) < xi_2(inf) < ...`
/// over the shared length of the two lists.
pub fn interlaces(kappa_eigs: &[f64], friedrichs_eigs: &[f64]) -> bool {
    // strictly-less through partial_cmp so a NaN anywhere fails the chain
    let lt = |a: f64, b: f64| a.partial_cmp(&b) == Some(core::cmp::Ordering::Less);
    let n = kappa_eigs.len().min(friedrichs_eigs.len());
    for i in 0..n {
        if !lt(kappa_eigs[i], friedrichs_eigs[i]) {
            return false;
        }
        if i + 1 < n && !lt(friedrichs_eigs[i], kappa_eigs[i + 1]) {
            return false;
        }
    }
    true
}

/// Eigenvector of the given extension at eigenvalue `x`, components
/// `0..N-1`, via the closed form together with the polynomial route.
///
/// For the Friedrichs extension the closed form is
/// `u_k = q^{k/2} J_nu(q^{k/2} sqrt(x); q)` (any global scale works, so the
/// same expression serves `nu = 0`). For a `kappa` extension with
/// `0 < nu < 1` it is the two-branch hypergeometric combination whose
/// boundary constants are exactly `(1, kappa)`; at `nu = 0` that form needs
/// parameter derivatives which are out of scope, so the polynomial route
/// itself is returned for both vectors with zero defect.
pub fn eigenvector(params: &QNuParams, ext: ExtensionId, x: f64, n: usize) -> Result<Eigenvector> {
    if n < 2 {
        return Err(Error::Domain("eigenvector needs at least 2 components"));
    }
    let fx = ext_char_fn(&tighten(params), ext, x)?;
    if !fx.is_finite() || math::abs(fx) >= EIGENVALUE_GUARD {
        return Err(Error::Domain(
            "x is not an eigenvalue of the requested extension",
        ));
    }
    let q = params.q();
    let nu = params.nu();
    let tol = params.tol();

    let seq = jacobi::scaled_poly_seq(params, x, n - 1);
    let phat: Vec<f64> = (0..n).map(|k| seq.phat(k)).collect();

    let components = match ext {
        ExtensionId::Friedrichs => {
            if x <= 0.0 {
                return Err(Error::Domain("friedrichs eigenvalues are positive"));
            }
            let sx = math::sqrt(x);
            let mut u = Vec::with_capacity(n);
            for k in 0..n {
                let z = math::pow(q, k as f64 / 2.0);
                u.push(z * qhyper::hahn_exton_j(nu, z * sx, q, tol)?);
            }
            u
        }
        ExtensionId::Kappa(kappa) => {
            if nu >= 1.0 {
                return Err(Error::Domain("kappa extensions exist only for 0 <= nu < 1"));
            }
            if nu == 0.0 {
                // polynomial route only; defect is identically zero
                phat.clone()
            } else {
                let b1 = math::pow(q, nu + 1.0);
                let b2 = math::pow(q, 1.0 - nu);
                let mut u = Vec::with_capacity(n);
                for k in 0..n {
                    let kf = k as f64;
                    let phi1 = qhyper::phi_1_1(b1, q, math::pow(q, kf + 1.0) * x, tol)?.value;
                    let phi2 = qhyper::phi_1_1(b2, q, math::pow(q, kf + 1.0 - nu) * x, tol)?.value;
                    u.push(
                        kappa * math::pow(q, (1.0 + nu) * kf / 2.0) * phi1
                            + math::pow(q, (1.0 - nu) * kf / 2.0) * phi2,
                    );
                }
                u
            }
        }
    };

    let mut suu = 0.0;
    let mut spp = 0.0;
    let mut sup = 0.0;
    for (u, p) in components.iter().zip(&phat) {
        suu += u * u;
        spp += p * p;
        sup += u * p;
    }
    let cos_sq = if suu > 0.0 && spp > 0.0 {
        (sup * sup) / (suu * spp)
    } else {
        0.0
    };
    let defect = math::sqrt(math::max(0.0, 1.0 - cos_sq));

    Ok(Eigenvector {
        components,
        phat_route: phat,
        collinearity_defect: defect,
    })
}

/// The first `count` positive zeros of `J_nu(.; q)`, through the eigenvalue
/// correspondence `xi_m = q w_m^2`.
pub fn bessel_zeros(params: &QNuParams, count: usize) -> Result<BesselZeros> {
    let spec = friedrichs_spectrum(params, count)?;
    let w = spec
        .eigenvalues
        .iter()
        .map(|&xi| math::sqrt(xi / params.q()))
        .collect();
    Ok(BesselZeros { params: *params, w })
}

/// Both sides of the q-Bessel orthogonality relation
///
/// ```text
/// sum_{k>=0} q^k J_nu(q^{(k+1)/2} w_m; q) J_nu(q^{(k+1)/2} w_n; q)
///   = -(q^{nu/2 - 1} / (2 w_n)) J_nu(q^{1/2} w_n; q) J_nu'(w_n; q) delta_{mn},
/// ```
///
/// with the left side summed to `terms` terms and the right side from the
/// closed form. `m`, `n` are 1-based zero indices.
pub fn orthogonality_qj(
    params: &QNuParams,
    m: usize,
    n: usize,
    terms: usize,
) -> Result<(f64, f64)> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("zero indices are 1-based"));
    }
    let q = params.q();
    let nu = params.nu();
    let tol = params.tol();
    let zeros = bessel_zeros(params, m.max(n))?;
    let wm = zeros.w[m - 1];
    let wn = zeros.w[n - 1];

    let mut lhs = 0.0;
    let mut qk = 1.0;
    for k in 0..terms {
        let r = math::pow(q, (k as f64 + 1.0) / 2.0);
        lhs += qk
            * qhyper::hahn_exton_j(nu, r * wm, q, tol)?
            * qhyper::hahn_exton_j(nu, r * wn, q, tol)?;
        qk *= q;
    }

    let rhs = if m == n {
        -(math::pow(q, nu / 2.0 - 1.0) / (2.0 * wn))
            * qhyper::hahn_exton_j(nu, math::sqrt(q) * wn, q, tol)?
            * qhyper::hahn_exton_j_dz(nu, wn, q, tol)?
    } else {
        0.0
    };
    Ok((lhs, rhs))
}

/// Mass the spectral measure of the Friedrichs extension places on an
/// eigenvalue `x`, as the reciprocal of the (all-positive, absolutely
/// convergent) sum `sum_m Phat_m(x)^2`.
///
/// Returns 0 when the sum leaves f64 range: that happens only for masses
/// far below the smallest positive double.
pub fn spectral_mass(params: &QNuParams, x: f64) -> f64 {
    let seq = jacobi::scaled_poly_seq(params, x, 400);
    let mut s = 0.0f64;
    let mut prev = f64::INFINITY;
    for m in 0..=400 {
        let p = seq.phat(m);
        let t = p * p;
        if !t.is_finite() {
            return 0.0;
        }
        // past the minimum of the term sequence the recurrence only adds
        // eigenvalue-roundoff contamination, which grows with m: cut there
        if m >= 4 && t > prev && t < 1e-16 * s {
            break;
        }
        s += t;
        prev = t;
    }
    1.0 / s
}

/// Partial sum of the dual orthogonality relation for the polynomial
/// sequence over the first `k_zeros` spectral points:
///
/// ```text
/// -2 q^{1 - nu/2} sum_k (w_k J_nu(q^{1/2} w_k; q) / J_nu'(w_k; q))
///                       Phat_m(q w_k^2) Phat_n(q w_k^2)  ->  delta_{mn}.
/// ```
///
/// The zeros satisfy `q^{1/2} w_k = w_{k-1}` to relative accuracy
/// `O(q^{k(k-1)})`, so the numerator of the weight sits closer to a zero of
/// the function than f64 can resolve pointwise after the first several k.
/// Once the evaluated numerator falls under its own cancellation noise
/// floor, the term's weight is taken instead from the equal-by-construction
/// spectral-mass form [`spectral_mass`] (both express the measure of
/// `{q w_k^2}`); the displayed form is used wherever f64 resolves it.
pub fn orthogonality_polys(params: &QNuParams, m: usize, n: usize, k_zeros: usize) -> Result<f64> {
    let q = params.q();
    let nu = params.nu();
    let tol = params.tol();
    let zeros = bessel_zeros(params, k_zeros)?;
    let deg = m.max(n);
    let norm = -2.0 * math::pow(q, 1.0 - nu / 2.0);
    let mut total = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &w in &zeros.w {
        let x = q * w * w;
        let seq = jacobi::scaled_poly_seq(params, x, deg);
        let jhalf = qhyper::hahn_exton_j(nu, math::sqrt(q) * w, q, tol)?;
        let jd = qhyper::hahn_exton_j_dz(nu, w, q, tol)?;
        // noise floor of jhalf: machine epsilon times the local scale of
        // the function, estimated from slope and width of the cell below
        let resolvable = match prev {
            None => true,
            Some((w_prev, jd_prev)) => {
                math::abs(jhalf) > 1e5 * f64::EPSILON * math::abs(jd_prev) * w_prev
            }
        };
        let mass = if resolvable {
            norm * w * jhalf / jd
        } else {
            spectral_mass(params, x)
        };
        total += mass * seq.phat(m) * seq.phat(n);
        prev = Some((w, jd));
    }
    Ok(total)
}

/// Quadratic form identity pinning the extension parametrization: for
/// `h = tau Q2 + Q1` with `tau = (kappa + q^nu)/(1 - q^nu)`, the form value
/// `<h, T h>` equals `tau (tau + 1)`.
///
/// Since `T Q2 = e_0` and `T Q1 = 0` hold row by row including row 0,
/// `T h` is supported entirely on index 0 with value `tau`, and every term
/// the truncation drops is identically zero: the truncated pairing equals
/// the full form value up to roundoff. The depth is kept small on purpose,
/// because the rows of `T` carry entries of size `q^{-n}` whose exact
/// cancellation leaves noise that grows with depth while contributing no
/// information.
pub fn form_identity_check(params: &QNuParams, kappa: f64) -> Result<(f64, f64)> {
    let nu = params.nu();
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Domain("form identity requires 0 < nu < 1"));
    }
    if !kappa.is_finite() {
        return Err(Error::Domain("kappa must be finite"));
    }
    let qnu = math::pow(params.q(), nu);
    let tau = (kappa + qnu) / (1.0 - qnu);

    const DEPTH: usize = 12;
    let h: Vec<f64> = (0..DEPTH as i64)
        .map(|k| tau * jacobi::q2(params, k) + jacobi::q1(params, k))
        .collect();
    let th = jacobi::apply(params, &h);
    // last two rows of the truncated application see the cut edge
    let lhs: f64 = h
        .iter()
        .zip(th.iter())
        .take(DEPTH - 2)
        .map(|(a, b)| a * b)
        .sum();
    Ok((lhs, tau * (tau + 1.0)))
}
