//! Command-line front end for the q-Bessel spectral library: function and
//! characteristic-function evaluation, extension spectra, parameter sweeps,
//! and validation suites, emitted as CSV or JSON for scripting and plots.
//!
//! Exit codes: 0 success, 1 validation failure, 2 domain error,
//! 3 nonconvergence, 4 bracketing failure.

mod commands;
mod output;
mod validate;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qspec_core::charfn::Route;
use qspec_core::{Error, QNuParams, DEFAULT_TOL};

use commands::CharKind;
use output::{Format, Table};

/// Resolved run configuration: the parameter point, the series tolerance
/// after flag / environment / default resolution, the scales a subcommand
/// consumes, and the output format. Identical configurations produce
/// byte-identical output. The randomized suites read only the tolerance,
/// count, and seed; they sample the parameter point instead.
pub struct RunConfig {
    pub q: f64,
    pub nu: f64,
    pub kappa: Option<f64>,
    pub tol: f64,
    pub count: usize,
    pub n: usize,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    fn at(q: f64, nu: f64, tol: f64, format: Format) -> Self {
        RunConfig {
            q,
            nu,
            kappa: None,
            tol,
            count: 0,
            n: 0,
            format,
            seed: 0,
        }
    }

    /// Validated operator parameters for this configuration.
    pub fn params(&self) -> Result<QNuParams, Error> {
        QNuParams::with_tol(self.q, self.nu, self.tol)
    }
}

#[derive(Parser)]
#[command(
    name = "qspec",
    version,
    about = "Spectral computations for the Hahn-Exton q-Bessel Jacobi matrix family"
)]
struct Cli {
    /// Series tolerance in (0, 1); overrides the QSPEC_TOL environment
    /// variable (default 1e-12)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write the output to a file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the q-Bessel function or a characteristic function
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Low eigenvalues of a self-adjoint extension
    Spectrum(SpectrumArgs),
    /// Run an invariant suite and report per-check pass/fail
    #[command(subcommand)]
    Validate(ValidateCmd),
    /// Eigenvalue trajectories over a grid of extension parameters
    SweepKappa(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    /// Pointwise limit of the rescaled polynomial sequence
    PolyLimit,
    /// Defining series over the polynomial sequence
    Series,
    /// Basic hypergeometric closed form
    Hypergeom,
}

fn route(arg: RouteArg) -> Route {
    match arg {
        RouteArg::PolyLimit => Route::PolyLimit,
        RouteArg::Series => Route::SeriesSum,
        RouteArg::Hypergeom => Route::Hypergeom,
    }
}

#[derive(Subcommand)]
enum EvalCmd {
    /// Hahn-Exton q-Bessel function J_nu(z; q)
    J(JArgs),
    /// First characteristic function Phi(x)
    Phi(CharArgs),
    /// Second characteristic function Psi(x); requires 0 <= nu < 1
    Psi(CharArgs),
}

#[derive(Args)]
struct JArgs {
    /// Base q in (0, 1)
    #[arg(long)]
    q: f64,
    /// Order nu > -1
    #[arg(long, allow_hyphen_values = true)]
    nu: f64,
    /// Argument z
    #[arg(long, allow_hyphen_values = true)]
    z: f64,
}

#[derive(Args)]
struct CharArgs {
    /// Base q in (0, 1)
    #[arg(long)]
    q: f64,
    /// Order nu >= 0
    #[arg(long)]
    nu: f64,
    /// Spectral parameter x
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    /// Evaluation route
    #[arg(long, value_enum, default_value_t = RouteArg::Series)]
    route: RouteArg,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Base q in (0, 1)
    #[arg(long)]
    q: f64,
    /// Order nu >= 0
    #[arg(long)]
    nu: f64,
    /// Use the Friedrichs extension (the default when --kappa is absent)
    #[arg(long, conflicts_with = "kappa")]
    friedrichs: bool,
    /// Extension parameter; admissible for 0 <= nu < 1
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// Number of eigenvalues
    #[arg(long, default_value_t = 4)]
    count: usize,
}

#[derive(Subcommand)]
enum ValidateCmd {
    /// Difference-equation residual over random (q, nu, z) samples
    Diffeq {
        /// Number of random samples
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Agreement of the characteristic-function evaluation routes
    Routes {
        /// Base q in (0, 1)
        #[arg(long)]
        q: f64,
        /// Order nu >= 0
        #[arg(long)]
        nu: f64,
        /// Number of random sample points
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hilbert-Schmidt norm and top eigenvalue of the Green truncation
    Green {
        /// Base q in (0, 1)
        #[arg(long)]
        q: f64,
        /// Order nu >= 0
        #[arg(long)]
        nu: f64,
        /// Truncation size
        #[arg(long = "N", default_value_t = 200)]
        n: usize,
    },
    /// q-Bessel orthogonality at the positive zeros
    Ortho {
        /// Base q in (0, 1)
        #[arg(long)]
        q: f64,
        /// Order nu >= 0
        #[arg(long)]
        nu: f64,
        /// Number of zeros
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// Series terms per inner product
        #[arg(long = "N", default_value_t = 300)]
        n: usize,
    },
    /// Interlacing of a kappa spectrum with the Friedrichs spectrum
    Interlace {
        /// Base q in (0, 1)
        #[arg(long)]
        q: f64,
        /// Order nu in [0, 1)
        #[arg(long)]
        nu: f64,
        /// Extension parameter
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        /// Number of eigenvalues
        #[arg(long, default_value_t = 4)]
        count: usize,
    },
    /// Friedrichs eigenvalues against the Sturm-bisection truncation
    Oracle {
        /// Base q in (0, 1)
        #[arg(long)]
        q: f64,
        /// Order nu >= 0
        #[arg(long)]
        nu: f64,
        /// Number of eigenvalues
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// Truncation size
        #[arg(long = "N", default_value_t = 300)]
        n: usize,
        /// Relative agreement bound
        #[arg(long, default_value_t = 1e-8)]
        bound: f64,
    },
    /// Quadratic form identity for the extension parametrization
    FormIdentity {
        /// Base q in (0, 1)
        #[arg(long)]
        q: f64,
        /// Order nu in (0, 1)
        #[arg(long)]
        nu: f64,
        /// Extension parameter
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Base q in (0, 1)
    #[arg(long)]
    q: f64,
    /// Order nu in [0, 1)
    #[arg(long)]
    nu: f64,
    /// Eigenvalues per kappa
    #[arg(long, default_value_t = 4)]
    count: usize,
    /// Grid start
    #[arg(long, allow_hyphen_values = true)]
    kappa_min: f64,
    /// Grid end
    #[arg(long, allow_hyphen_values = true)]
    kappa_max: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 9)]
    steps: usize,
}

/// Tolerance resolution: explicit flag, then QSPEC_TOL, then the default.
fn resolve_tol(flag: Option<f64>) -> Result<f64, String> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("QSPEC_TOL") {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("QSPEC_TOL is not a number: {s}")),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConverged { .. } => 3,
        Error::BracketFail { .. } => 4,
        _ => 2,
    }
}

/// Serializes the table, writes it to the configured destination, and
/// converts the pass/fail summary into an exit code.
fn finish(table: &Table, all_pass: bool, cfg: &RunConfig, out: Option<&Path>) -> i32 {
    let text = output::emit(table, cfg.format);
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("qspec: cannot write {}: {e}", path.display());
            return 2;
        }
    } else {
        print!("{text}");
    }
    if all_pass {
        0
    } else {
        1
    }
}

fn run() -> i32 {
    let cli = Cli::parse();
    let tol = match resolve_tol(cli.tol) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("qspec: {msg}");
            return 2;
        }
    };
    let format = cli.format;
    let out = cli.out.as_deref();

    let outcome: Result<i32, Error> = match cli.cmd {
        Cmd::Eval(ev) => match ev {
            EvalCmd::J(a) => {
                let cfg = RunConfig::at(a.q, a.nu, tol, format);
                commands::eval_j(&cfg, a.z).map(|t| finish(&t, true, &cfg, out))
            }
            EvalCmd::Phi(a) => {
                let cfg = RunConfig::at(a.q, a.nu, tol, format);
                commands::eval_char(&cfg, CharKind::Phi, a.x, route(a.route))
                    .map(|t| finish(&t, true, &cfg, out))
            }
            EvalCmd::Psi(a) => {
                let cfg = RunConfig::at(a.q, a.nu, tol, format);
                commands::eval_char(&cfg, CharKind::Psi, a.x, route(a.route))
                    .map(|t| finish(&t, true, &cfg, out))
            }
        },
        Cmd::Spectrum(a) => {
            let kappa = if a.friedrichs { None } else { a.kappa };
            let cfg = RunConfig {
                kappa,
                count: a.count,
                ..RunConfig::at(a.q, a.nu, tol, format)
            };
            commands::spectrum(&cfg).map(|t| finish(&t, true, &cfg, out))
        }
        Cmd::Validate(v) => match v {
            ValidateCmd::Diffeq { count, seed } => {
                // the parameter point is sampled, not configured; the
                // placeholder coordinates are never read
                let cfg = RunConfig {
                    count,
                    seed,
                    ..RunConfig::at(0.5, 0.0, tol, format)
                };
                validate::diffeq(&cfg).map(|(t, ok)| finish(&t, ok, &cfg, out))
            }
            ValidateCmd::Routes { q, nu, count, seed } => {
                let cfg = RunConfig {
                    count,
                    seed,
                    ..RunConfig::at(q, nu, tol, format)
                };
                validate::routes(&cfg).map(|(t, ok)| finish(&t, ok, &cfg, out))
            }
            ValidateCmd::Green { q, nu, n } => {
                let cfg = RunConfig {
                    n,
                    ..RunConfig::at(q, nu, tol, format)
                };
                validate::green_suite(&cfg).map(|(t, ok)| finish(&t, ok, &cfg, out))
            }
            ValidateCmd::Ortho { q, nu, count, n } => {
                let cfg = RunConfig {
                    count,
                    n,
                    ..RunConfig::at(q, nu, tol, format)
                };
                validate::ortho(&cfg).map(|(t, ok)| finish(&t, ok, &cfg, out))
            }
            ValidateCmd::Interlace {
                q,
                nu,
                kappa,
                count,
            } => {
                let cfg = RunConfig {
                    kappa: Some(kappa),
                    count,
                    ..RunConfig::at(q, nu, tol, format)
                };
                validate::interlace(&cfg).map(|(t, ok)| finish(&t, ok, &cfg, out))
            }
            ValidateCmd::Oracle {
                q,
                nu,
                count,
                n,
                bound,
            } => {
                let cfg = RunConfig {
                    count,
                    n,
                    ..RunConfig::at(q, nu, tol, format)
                };
                validate::oracle_suite(&cfg, bound).map(|(t, ok)| finish(&t, ok, &cfg, out))
            }
            ValidateCmd::FormIdentity { q, nu, kappa } => {
                let cfg = RunConfig {
                    kappa: Some(kappa),
                    ..RunConfig::at(q, nu, tol, format)
                };
                validate::form_identity(&cfg).map(|(t, ok)| finish(&t, ok, &cfg, out))
            }
        },
        Cmd::SweepKappa(a) => {
            let cfg = RunConfig {
                count: a.count,
                ..RunConfig::at(a.q, a.nu, tol, format)
            };
            commands::sweep(&cfg, a.kappa_min, a.kappa_max, a.steps)
                .map(|t| finish(&t, true, &cfg, out))
        }
    };

    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qspec: {e}");
            exit_code(&e)
        }
    }
}

fn main() {
    std::process::exit(run());
}
