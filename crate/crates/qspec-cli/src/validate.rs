//! Invariant suites behind `qspec validate`: each runs one family of
//! checks at the configured scale and reports measured deviations against
//! its bound, one record per check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qspec_core::charfn::{self, Route};
use qspec_core::{green, oracle, qhyper, spectra, Error};

use crate::output::{Field, Table};
use crate::RunConfig;

type Result<T> = core::result::Result<T, Error>;

const COLUMNS: &[&str] = &["check", "measured", "bound", "pass"];

fn record(table: &mut Table, check: &'static str, measured: f64, bound: f64, pass: bool) {
    table.push(vec![
        Field::Text(check),
        Field::Num(measured),
        Field::Num(bound),
        Field::Flag(pass),
    ]);
}

fn all_pass(table: &Table) -> bool {
    table
        .rows
        .iter()
        .all(|row| matches!(row[3], Field::Flag(true)))
}

/// Difference-equation residual over random (q, nu, z) samples drawn from
/// q in [0.1, 0.95], nu in [0, 4], z in (0, 2]. Reads only the tolerance,
/// sample count, and seed from the configuration.
pub fn diffeq(cfg: &RunConfig) -> Result<(Table, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_residual = 0.0f64;
    for _ in 0..cfg.count {
        let q = rng.gen_range(0.1..=0.95);
        let nu = rng.gen_range(0.0..=4.0);
        let z = 2.0 - rng.gen_range(0.0..2.0);
        let r = qhyper::residual_diffeq(nu, z, q, cfg.tol)?;
        max_residual = max_residual.max(r);
    }
    let mut table = Table::new(COLUMNS);
    record(
        &mut table,
        "diffeq-residual",
        max_residual,
        1e-10,
        max_residual < 1e-10,
    );
    let ok = all_pass(&table);
    Ok((table, ok))
}

/// Agreement of the characteristic-function routes on random points of
/// [-2, 5], measured as deviation over the allowed
/// `max(est_err_a, est_err_b, 1e-10 max(1, |value|))`, so the bound is 1.
///
/// The polynomial-limit route joins the comparison for nu > 0 only: at
/// nu = 0 it converges too slowly for sharp tolerances. Psi has a second
/// route only in the indeterminate regime 0 < nu < 1.
pub fn routes(cfg: &RunConfig) -> Result<(Table, bool)> {
    let params = cfg.params()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_phi = 0.0f64;
    let mut max_psi = 0.0f64;
    let compare_psi = cfg.nu > 0.0 && cfg.nu < 1.0;
    for _ in 0..cfg.count {
        let x = rng.gen_range(-2.0..=5.0);
        let mut evals = vec![
            charfn::phi(&params, x, Route::SeriesSum)?,
            charfn::phi(&params, x, Route::Hypergeom)?,
        ];
        if cfg.nu > 0.0 {
            evals.push(charfn::phi(&params, x, Route::PolyLimit)?);
        }
        for i in 0..evals.len() {
            for j in i + 1..evals.len() {
                let (a, b) = (&evals[i], &evals[j]);
                let scale = 1.0f64.max(a.value.abs()).max(b.value.abs());
                let allowed = a.est_err.max(b.est_err).max(1e-10 * scale);
                max_phi = max_phi.max((a.value - b.value).abs() / allowed);
            }
        }
        if compare_psi {
            let a = charfn::psi(&params, x, Route::SeriesSum)?;
            let b = charfn::psi(&params, x, Route::Hypergeom)?;
            let scale = 1.0f64.max(a.value.abs()).max(b.value.abs());
            let allowed = a.est_err.max(b.est_err).max(1e-10 * scale);
            max_psi = max_psi.max((a.value - b.value).abs() / allowed);
        }
    }
    let mut table = Table::new(COLUMNS);
    record(&mut table, "phi-routes", max_phi, 1.0, max_phi < 1.0);
    if compare_psi {
        record(&mut table, "psi-routes", max_psi, 1.0, max_psi < 1.0);
    }
    let ok = all_pass(&table);
    Ok((table, ok))
}

/// Green-kernel truncation: the Frobenius norm against the closed-form
/// Hilbert-Schmidt norm (relative), and the reciprocal of the largest
/// truncation eigenvalue against the first eigenvalue of the Friedrichs
/// extension (absolute). Near q = 1 the first check needs a larger
/// truncation than the default to clear its bound.
pub fn green_suite(cfg: &RunConfig) -> Result<(Table, bool)> {
    if cfg.n == 0 {
        return Err(Error::Domain("truncation size must be at least 1"));
    }
    let params = cfg.params()?;
    let g = green::GreenTruncation::new(&params, cfg.n);
    let closed = green::hs_norm_sq_closed(&params);
    let mut frob = 0.0;
    for j in 0..cfg.n {
        for k in 0..cfg.n {
            let e = g.entry(j, k);
            frob += e * e;
        }
    }
    let dev_hs = ((frob - closed) / closed).abs();

    let lam = g.largest_eigenvalue(1e-13)?;
    let fr = spectra::friedrichs_spectrum(&params, 1)?;
    let dev_inv = (1.0 / lam - fr.eigenvalues[0]).abs();

    let mut table = Table::new(COLUMNS);
    record(
        &mut table,
        "hs-norm-truncation",
        dev_hs,
        1e-12,
        dev_hs < 1e-12,
    );
    record(
        &mut table,
        "resolvent-top-eigenvalue",
        dev_inv,
        1e-8,
        dev_inv < 1e-8,
    );
    let ok = all_pass(&table);
    Ok((table, ok))
}

/// Orthogonality of the q-Bessel functions at their positive zeros:
/// off-diagonal inner products against the geometric mean of the
/// diagonal masses, and diagonal sums against the closed form.
pub fn ortho(cfg: &RunConfig) -> Result<(Table, bool)> {
    if cfg.count == 0 {
        return Err(Error::Domain("count must be at least 1"));
    }
    let params = cfg.params()?;
    let mut diag = vec![0.0f64; cfg.count + 1];
    let mut max_diag = 0.0f64;
    for (m, slot) in diag.iter_mut().enumerate().skip(1) {
        let (lhs, rhs) = spectra::orthogonality_qj(&params, m, m, cfg.n)?;
        *slot = rhs;
        max_diag = max_diag.max((lhs - rhs).abs() / rhs.abs());
    }
    let mut max_off = 0.0f64;
    for m in 1..=cfg.count {
        for n in m + 1..=cfg.count {
            let (lhs, _) = spectra::orthogonality_qj(&params, m, n, cfg.n)?;
            max_off = max_off.max(lhs.abs() / (diag[m] * diag[n]).sqrt());
        }
    }
    let mut table = Table::new(COLUMNS);
    record(&mut table, "qj-diagonal", max_diag, 1e-9, max_diag < 1e-9);
    record(
        &mut table,
        "qj-off-diagonal",
        max_off,
        1e-10,
        max_off < 1e-10,
    );
    let ok = all_pass(&table);
    Ok((table, ok))
}

/// Strict interlacing of the kappa spectrum with the Friedrichs spectrum.
/// The measured value is the smallest normalized gap between consecutive
/// members of the merged sequence; it must stay positive.
pub fn interlace(cfg: &RunConfig) -> Result<(Table, bool)> {
    let kappa = cfg.kappa.ok_or(Error::Domain("kappa is required"))?;
    let params = cfg.params()?;
    let ks = spectra::kappa_spectrum(&params, kappa, cfg.count)?;
    let fr = spectra::friedrichs_spectrum(&params, cfg.count)?;
    let strict = spectra::interlaces(&ks.eigenvalues, &fr.eigenvalues);
    let mut margin = f64::INFINITY;
    for i in 0..cfg.count {
        let scale = 1.0f64.max(fr.eigenvalues[i].abs());
        margin = margin.min((fr.eigenvalues[i] - ks.eigenvalues[i]) / scale);
        if i + 1 < cfg.count {
            margin = margin.min((ks.eigenvalues[i + 1] - fr.eigenvalues[i]) / scale);
        }
    }
    let mut table = Table::new(COLUMNS);
    record(&mut table, "kappa-interlacing", margin, 0.0, strict);
    let ok = all_pass(&table);
    Ok((table, ok))
}

/// Friedrichs eigenvalues against the Sturm-bisection truncation oracle,
/// as a maximal relative deviation over the first `count` levels.
pub fn oracle_suite(cfg: &RunConfig, bound: f64) -> Result<(Table, bool)> {
    let params = cfg.params()?;
    let dev = oracle::compare_friedrichs(&params, cfg.count, cfg.n)?;
    let mut table = Table::new(COLUMNS);
    record(&mut table, "friedrichs-vs-sturm", dev, bound, dev < bound);
    let ok = all_pass(&table);
    Ok((table, ok))
}

/// Quadratic form identity pinning the extension parametrization,
/// `<h, T h> = tau (tau + 1)`, relative to the scale of the right side.
pub fn form_identity(cfg: &RunConfig) -> Result<(Table, bool)> {
    let kappa = cfg.kappa.ok_or(Error::Domain("kappa is required"))?;
    let params = cfg.params()?;
    let (lhs, rhs) = spectra::form_identity_check(&params, kappa)?;
    let dev = (lhs - rhs).abs() / 1.0f64.max(rhs.abs());
    let mut table = Table::new(COLUMNS);
    record(&mut table, "form-identity", dev, 1e-10, dev < 1e-10);
    let ok = all_pass(&table);
    Ok((table, ok))
}
