//! Spectral theory of a q-deformed Bessel Jacobi operator, in doubles.
//!
//! The library evaluates the Hahn-Exton q-Bessel function and the objects
//! attached to the semi-infinite Jacobi matrix whose characteristic function
//! it is: orthogonal polynomial sequences, the Green (inverse) matrix, the
//! pair of entire characteristic functions, eigenvalues and eigenvectors of
//! the self-adjoint extensions, and their orthogonality relations. A small
//! dense tridiagonal eigensolver is included as an independent cross-check.
//!
//! Everything is plain `f64` arithmetic with explicit tolerances and error
//! reporting; results are deterministic. The crate is `no_std` (it allocates
//! through `alloc` and takes its transcendental functions from `libm`).
//!
//! Modules:
//!
//! * [`qhyper`] - q-Pochhammer symbols, the `1phi1` basic hypergeometric
//!   series, the Hahn-Exton q-Bessel function and its q-difference equation.
//! * [`jacobi`] - matrix entries, scaled orthogonal polynomials, kernel
//!   (Wronskian) solutions, the Cholesky-like factorization, and asymptotic
//!   boundary constants.
//! * [`green`] - closed-form inverse matrix of the Friedrichs extension and
//!   its Hilbert-Schmidt norm.
//! * [`charfn`] - the characteristic functions `phi` and `psi` along
//!   independent evaluation routes, plus a derivative-sum identity.
//! * [`spectra`] - eigenvalue computation for the Friedrichs and `kappa`
//!   extensions, eigenvectors, q-Bessel zeros, orthogonality relations.
//! * [`oracle`] - Sturm-sequence bisection for truncated sections, used to
//!   validate the characteristic-function route.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

use core::fmt;

pub mod charfn;
pub mod green;
pub mod jacobi;
mod math;
pub mod oracle;
pub mod qhyper;
pub mod spectra;

pub use qhyper::{QNuParams, SeriesValue, DEFAULT_TOL};

/// Errors reported by the numerical routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    Domain(&'static str),
    /// The `1phi1` series was evaluated at a pole of its parameter
    /// (`b = q^{-m}` for some nonnegative integer `m`).
    Pole { b: f64 },
    /// An iteration or series failed to converge within its budget.
    NonConverged { terms: usize },
    /// A root bracket did not show the expected sign change.
    BracketFail { lo: f64, hi: f64 },
    /// A least-squares extraction was too ill-conditioned to trust.
    IllConditioned { cond: f64 },
    /// An intermediate quantity left the range of `f64`.
    Overflow(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Pole { b } => write!(f, "series parameter b = {b} hits a pole q^-m"),
            Error::NonConverged { terms } => {
                write!(f, "no convergence within {terms} terms/iterations")
            }
            Error::BracketFail { lo, hi } => {
                write!(f, "no sign change in bracket [{lo}, {hi}]")
            }
            Error::IllConditioned { cond } => {
                write!(f, "ill-conditioned fit (condition estimate {cond:.3e})")
            }
            Error::Overflow(msg) => write!(f, "overflow: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
