//! Thin wrappers over `libm` so the library body stays `no_std`.

#[inline]
pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn max(a: f64, b: f64) -> f64 {
    libm::fmax(a, b)
}

#[inline]
pub(crate) fn min(a: f64, b: f64) -> f64 {
    libm::fmin(a, b)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// Integer power of q, `q^n`, for signed `n`.
#[inline]
pub(crate) fn qn(q: f64, n: i64) -> f64 {
    libm::pow(q, n as f64)
}
