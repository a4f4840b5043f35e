//! Builders for the evaluation, spectrum, and sweep result tables.

use qspec_core::charfn::{self, CharFnEval, Route};
use qspec_core::{qhyper, spectra, Error};

use crate::output::{Field, Table};
use crate::RunConfig;

type Result<T> = core::result::Result<T, Error>;

/// Which characteristic function an `eval` invocation targets.
#[derive(Debug, Clone, Copy)]
pub enum CharKind {
    Phi,
    Psi,
}

pub fn route_name(route: Route) -> &'static str {
    match route {
        Route::PolyLimit => "poly-limit",
        Route::SeriesSum => "series",
        Route::Hypergeom => "hypergeom",
    }
}

const EVAL_COLUMNS: &[&str] = &["value", "route", "terms", "est_err"];

/// Evaluates the Hahn-Exton q-Bessel function. The order may be any
/// `nu > -1` here; the operator-parameter restrictions of the other
/// subcommands do not apply to a plain function evaluation.
pub fn eval_j(cfg: &RunConfig, z: f64) -> Result<Table> {
    let (q, nu, tol) = (cfg.q, cfg.nu, cfg.tol);
    let value = qhyper::hahn_exton_j(nu, z, q, tol)?;
    // series bookkeeping from the defining evaluation; the z = 0 branch
    // is a closed form and sums nothing
    let (terms, est_err) = if z == 0.0 {
        (0, 0.0)
    } else {
        let b = q.powf(nu + 1.0);
        let pref = qhyper::q_pochhammer_inf(b, q, tol)? / qhyper::q_pochhammer_inf(q, q, tol)?;
        let sv = qhyper::phi_1_1(b, q, q * z * z, tol)?;
        (sv.terms_used, pref * z.abs().powf(nu) * sv.tail_bound)
    };
    let mut table = Table::new(EVAL_COLUMNS);
    table.push(vec![
        Field::Num(value),
        Field::Text("series"),
        Field::Int(terms),
        Field::Num(est_err),
    ]);
    Ok(table)
}

/// Evaluates a characteristic function through the requested route.
pub fn eval_char(cfg: &RunConfig, kind: CharKind, x: f64, route: Route) -> Result<Table> {
    let params = cfg.params()?;
    let ev: CharFnEval = match kind {
        CharKind::Phi => charfn::phi(&params, x, route)?,
        CharKind::Psi => charfn::psi(&params, x, route)?,
    };
    let mut table = Table::new(EVAL_COLUMNS);
    table.push(vec![
        Field::Num(ev.value),
        Field::Text(route_name(ev.route)),
        Field::Int(ev.terms),
        Field::Num(ev.est_err),
    ]);
    Ok(table)
}

const SPECTRUM_COLUMNS: &[&str] = &["n", "xi", "residual", "bracket_lo", "bracket_hi"];

/// Computes the low eigenvalues of the configured extension: Friedrichs
/// when `kappa` is absent, the boundary-condition extension otherwise.
pub fn spectrum(cfg: &RunConfig) -> Result<Table> {
    if cfg.count == 0 {
        return Err(Error::Domain("count must be at least 1"));
    }
    let params = cfg.params()?;
    let spec = match cfg.kappa {
        None => spectra::friedrichs_spectrum(&params, cfg.count)?,
        Some(k) => spectra::kappa_spectrum(&params, k, cfg.count)?,
    };
    let mut table = Table::new(SPECTRUM_COLUMNS);
    for (i, &xi) in spec.eigenvalues.iter().enumerate() {
        let (lo, hi) = spec.brackets[i];
        table.push(vec![
            Field::Int(i + 1),
            Field::Num(xi),
            Field::Num(spec.residuals[i]),
            Field::Num(lo),
            Field::Num(hi),
        ]);
    }
    Ok(table)
}

const SWEEP_COLUMNS: &[&str] = &["kappa", "n", "xi"];

/// Tabulates eigenvalue trajectories over an even grid of extension
/// parameters, long form: one row per (kappa, level).
pub fn sweep(cfg: &RunConfig, kappa_min: f64, kappa_max: f64, steps: usize) -> Result<Table> {
    if steps == 0 {
        return Err(Error::Domain("steps must be at least 1"));
    }
    if cfg.count == 0 {
        return Err(Error::Domain("count must be at least 1"));
    }
    let params = cfg.params()?;
    let kappas: Vec<f64> = if steps == 1 {
        vec![kappa_min]
    } else {
        let h = (kappa_max - kappa_min) / (steps - 1) as f64;
        (0..steps).map(|i| kappa_min + h * i as f64).collect()
    };
    let rows = spectra::kappa_sweep(&params, &kappas, cfg.count)?;
    let mut table = Table::new(SWEEP_COLUMNS);
    for (kappa, eigenvalues) in rows {
        for (i, &xi) in eigenvalues.iter().enumerate() {
            table.push(vec![Field::Num(kappa), Field::Int(i + 1), Field::Num(xi)]);
        }
    }
    Ok(table)
}
