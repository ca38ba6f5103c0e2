//! Error function, complementary error function and the standard Gaussian
//! density, accurate to better than 1e-15 absolute.

/// erf(x), exactly odd.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// erfc(x) = 1 - erf(x), computed without cancellation for large x.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal density `exp(-x^2/2) / sqrt(2 pi)`.
pub fn gaussian(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// erf'(x) = (2/sqrt(pi)) exp(-x^2).
pub fn erf_deriv(x: f64) -> f64 {
    2.0 / std::f64::consts::PI.sqrt() * (-x * x).exp()
}

/// erf''(x) = -(4x/sqrt(pi)) exp(-x^2).
pub fn erf_deriv2(x: f64) -> f64 {
    -4.0 * x / std::f64::consts::PI.sqrt() * (-x * x).exp()
}
