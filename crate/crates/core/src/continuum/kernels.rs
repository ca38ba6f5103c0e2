//! Closed-form continuum kernels of the four diffusive limits and their
//! analytic partial derivatives.
//!
//! Variants:
//! * bulk — `K(y,z) = erfc((z-y)/(2 sqrt(2t)))` on the whole line;
//! * half-space — a Gaussian-weighted double integral over the initial
//!   half-line, reduced here to a single finite integral by integrating the
//!   Gaussian factor in closed form (the public [`kernel_halfspace`]
//!   evaluates the original iterated double integral for cross-checking);
//! * killed — `1 - erf((z+y)/s) erf((z-y)/s)` on `(0, inf)`;
//! * reflected — an `erf''`-weighted double integral on `[0, inf)`, reduced
//!   to a single integral the same way.
//!
//! Every cross-derivative comes out in closed form, which the Fredholm
//! discretization downstream relies on.

use super::special::{erf, erf_deriv, erf_deriv2, erfc, gaussian};
use super::{quad, ContinuumError};

pub(crate) const FAST_TOL: f64 = 1e-12;
const SPEC_TOL: f64 = 1e-10;

fn check_time(t: f64) -> Result<(), ContinuumError> {
    if t > 0.0 {
        Ok(())
    } else {
        Err(ContinuumError::NonPositiveTime(t))
    }
}

// ---------------------------------------------------------------- bulk (A)

pub fn bulk_k(y: f64, z: f64, t: f64) -> f64 {
    erfc((z - y) / (2.0 * (2.0 * t).sqrt()))
}

pub fn bulk_dz(y: f64, z: f64, t: f64) -> f64 {
    let s = 2.0 * (2.0 * t).sqrt();
    -erf_deriv((z - y) / s) / s
}

pub fn bulk_dy(y: f64, z: f64, t: f64) -> f64 {
    -bulk_dz(y, z, t)
}

pub fn bulk_dyz(y: f64, z: f64, t: f64) -> f64 {
    let s = 2.0 * (2.0 * t).sqrt();
    erf_deriv2((z - y) / s) / (s * s)
}

/// `erfc((z-y)/(2 sqrt(2t)))`, the whole-line maximal-entrance-law kernel.
pub fn kernel_bulk(y: f64, z: f64, t: f64) -> Result<f64, ContinuumError> {
    check_time(t)?;
    Ok(bulk_k(y, z, t))
}

// ---------------------------------------------------------- half-space (B)

/// Integrand of the half-space double integral:
/// `G(u,v) = (u-v) phi(u-v) erfc((u+v)/sqrt(2))` with `phi` the standard
/// normal density.
fn halfspace_g(u: f64, v: f64) -> f64 {
    (u - v) * gaussian(u - v) * erfc((u + v) / std::f64::consts::SQRT_2)
}

/// Half-space kernel by the iterated double integral
/// `1 + int_{v=a}^{b} int_{u=-inf}^{a} G(u,v) du dv` with `a = y/(2 sqrt t)`,
/// `b = z/(2 sqrt t)`, evaluated by nested adaptive Gauss–Legendre with a
/// 10:1 outer/inner tolerance split.
pub fn kernel_halfspace(y: f64, z: f64, t: f64) -> Result<f64, ContinuumError> {
    check_time(t)?;
    let a = y / (2.0 * t.sqrt());
    let b = z / (2.0 * t.sqrt());
    if b <= a {
        return Ok(1.0);
    }
    let inner_tol = SPEC_TOL / 10.0;
    let outer = quad::adaptive(
        |v: f64| {
            // The Gaussian factor kills the integrand below u = v - 9;
            // u <= a <= v on this domain.
            let lo = (v - 9.0).min(a);
            quad::adaptive(|u: f64| halfspace_g(u, v), lo, a, inner_tol).unwrap_or(f64::NAN)
        },
        a,
        b,
        SPEC_TOL,
    )
    .map_err(|e| ContinuumError::Quadrature { achieved: e.achieved, requested: e.requested })?;
    if !outer.is_finite() {
        return Err(ContinuumError::Quadrature { achieved: f64::NAN, requested: SPEC_TOL });
    }
    Ok(1.0 + outer)
}

/// Fast evaluator: the inner integral done in closed form leaves
/// `K = 1 - (1/4)(1+erf a)(erf b - erf a)
///        - int_a^b phi(v-a) erfc((a+v)/sqrt 2) dv`.
pub fn halfspace_k(y: f64, z: f64, t: f64) -> f64 {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let b = z * c;
    if b <= a {
        return 1.0;
    }
    let tail = quad::adaptive(
        |v: f64| gaussian(v - a) * erfc((a + v) / std::f64::consts::SQRT_2),
        a,
        b.min(a + 9.0),
        FAST_TOL,
    )
    .unwrap_or_else(|e| panic!("halfspace quadrature stalled at {:e}", e.achieved));
    1.0 - 0.25 * (1.0 + erf(a)) * (erf(b) - erf(a)) - tail
}

pub fn halfspace_dz(y: f64, z: f64, t: f64) -> f64 {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let b = z * c;
    // d/dz = c * H(b), H(v) = -phi(v-a) erfc((a+v)/sqrt2)
    //                         - (1+erf a) e^{-v^2} / (2 sqrt pi)
    c * (-gaussian(b - a) * erfc((a + b) / std::f64::consts::SQRT_2)
        - (1.0 + erf(a)) * (-b * b).exp() / (2.0 * std::f64::consts::PI.sqrt()))
}

pub fn halfspace_dy(y: f64, z: f64, t: f64) -> f64 {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let b = z * c;
    let boundary = gaussian(0.0) * erfc(std::f64::consts::SQRT_2 * a)
        + (-a * a).exp() * (1.0 + erf(a)) / (2.0 * std::f64::consts::PI.sqrt());
    if b <= a {
        return c * boundary;
    }
    let integral = quad::adaptive(
        |v: f64| (v - a) * gaussian(v - a) * erfc((a + v) / std::f64::consts::SQRT_2),
        a,
        b.min(a + 9.0),
        FAST_TOL,
    )
    .unwrap_or_else(|e| panic!("halfspace quadrature stalled at {:e}", e.achieved));
    c * (boundary - integral)
}

pub fn halfspace_dyz(y: f64, z: f64, t: f64) -> f64 {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let b = z * c;
    c * c * halfspace_g(a, b)
}

// --------------------------------------------------------------- killed (C)

fn killed_check(y: f64, z: f64) -> Result<(), ContinuumError> {
    if !(0.0 < y && y <= z) {
        return Err(ContinuumError::DomainViolation { y, z, variant: "killed" });
    }
    Ok(())
}

pub fn killed_k(y: f64, z: f64, t: f64) -> f64 {
    let s = 2.0 * (2.0 * t).sqrt();
    1.0 - erf((z + y) / s) * erf((z - y) / s)
}

pub fn killed_dz(y: f64, z: f64, t: f64) -> f64 {
    let s = 2.0 * (2.0 * t).sqrt();
    let (alpha, beta) = ((z + y) / s, (z - y) / s);
    -(erf_deriv(alpha) * erf(beta) + erf(alpha) * erf_deriv(beta)) / s
}

pub fn killed_dy(y: f64, z: f64, t: f64) -> f64 {
    let s = 2.0 * (2.0 * t).sqrt();
    let (alpha, beta) = ((z + y) / s, (z - y) / s);
    -(erf_deriv(alpha) * erf(beta) - erf(alpha) * erf_deriv(beta)) / s
}

pub fn killed_dyz(y: f64, z: f64, t: f64) -> f64 {
    let s = 2.0 * (2.0 * t).sqrt();
    let (alpha, beta) = ((z + y) / s, (z - y) / s);
    -(erf_deriv2(alpha) * erf(beta) - erf(alpha) * erf_deriv2(beta)) / (s * s)
}

/// `1 - erf((z+y)/(2 sqrt(2t))) erf((z-y)/(2 sqrt(2t)))` on `0 < y <= z`.
pub fn kernel_killed(y: f64, z: f64, t: f64) -> Result<f64, ContinuumError> {
    check_time(t)?;
    killed_check(y, z)?;
    Ok(killed_k(y, z, t))
}

// ------------------------------------------------------------ reflected (D)

fn reflected_check(y: f64, z: f64) -> Result<(), ContinuumError> {
    if !(0.0 <= y && y <= z) {
        return Err(ContinuumError::DomainViolation { y, z, variant: "reflected" });
    }
    Ok(())
}

/// Integrand of the reflected double integral:
/// `F(u,v) = erf''((u-v)/sqrt2) erf((u+v)/sqrt2)
///         + erf''((u+v)/sqrt2) erf((u-v)/sqrt2)`.
fn reflected_f(u: f64, v: f64) -> f64 {
    let d = (u - v) / std::f64::consts::SQRT_2;
    let s = (u + v) / std::f64::consts::SQRT_2;
    erf_deriv2(d) * erf(s) + erf_deriv2(s) * erf(d)
}

/// The inner `v`-integral of `F(u, .)` over `[a, inf)` in closed form:
/// `q(u) = sqrt2 [erf(alpha') erf'(delta') - erf'(alpha') erf(delta')]
///         + (4/sqrt pi) e^{-u^2} erfc(a)` with `alpha' = (u+a)/sqrt2`,
/// `delta' = (u-a)/sqrt2`.
fn reflected_q(u: f64, a: f64) -> f64 {
    let alpha = (u + a) / std::f64::consts::SQRT_2;
    let delta = (u - a) / std::f64::consts::SQRT_2;
    std::f64::consts::SQRT_2 * (erf(alpha) * erf_deriv(delta) - erf_deriv(alpha) * erf(delta))
        + 4.0 / std::f64::consts::PI.sqrt() * (-u * u).exp() * erfc(a)
}

/// Reflected kernel by the iterated double integral
/// `1 - (1/2) int_{u=a}^{b} int_{v=a}^{inf} F(u,v) dv du`, nested adaptive
/// quadrature with the 10:1 tolerance split.
///
/// The prefactor is 1/2: that is the normalization under which the kernel
/// satisfies its boundary condition `K_t(0,z) = erfc(z/(2 sqrt t))`,
/// approaches the bulk kernel deep in the domain, and reproduces the stated
/// reflecting one-point intensity.
pub fn kernel_reflected(y: f64, z: f64, t: f64) -> Result<f64, ContinuumError> {
    check_time(t)?;
    reflected_check(y, z)?;
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let b = z * c;
    if b <= a {
        return Ok(1.0);
    }
    let inner_tol = SPEC_TOL / 10.0;
    let outer = quad::adaptive(
        |u: f64| {
            quad::adaptive_to_infinity(|v: f64| reflected_f(u, v), a, inner_tol)
                .unwrap_or(f64::NAN)
        },
        a,
        b,
        SPEC_TOL,
    )
    .map_err(|e| ContinuumError::Quadrature { achieved: e.achieved, requested: e.requested })?;
    if !outer.is_finite() {
        return Err(ContinuumError::Quadrature { achieved: f64::NAN, requested: SPEC_TOL });
    }
    Ok(1.0 - 0.5 * outer)
}

/// Fast evaluator with the inner integral in closed form.
pub fn reflected_k(y: f64, z: f64, t: f64) -> f64 {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let b = z * c;
    if b <= a {
        return 1.0;
    }
    let integral = quad::adaptive(|u: f64| reflected_q(u, a), a, b, FAST_TOL)
        .unwrap_or_else(|e| panic!("reflected quadrature stalled at {:e}", e.achieved));
    1.0 - 0.5 * integral
}

pub fn reflected_dz(y: f64, z: f64, t: f64) -> f64 {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let b = z * c;
    -0.5 * c * reflected_q(b, a)
}

pub fn reflected_dy(y: f64, z: f64, t: f64) -> f64 {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let b = z * c;
    let at_diag = 0.5 * c * reflected_q(a, a);
    if b <= a {
        return at_diag;
    }
    let integral = quad::adaptive(|u: f64| reflected_f(u, a), a, b, FAST_TOL)
        .unwrap_or_else(|e| panic!("reflected quadrature stalled at {:e}", e.achieved));
    at_diag + 0.5 * c * integral
}

pub fn reflected_dyz(y: f64, z: f64, t: f64) -> f64 {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let b = z * c;
    -0.5 * c * c * reflected_f(a, b)
}

// ------------------------------------------------------- row evaluation

/// Cumulative integrals of two integrands over `[a, b_1], [a, b_2], ...`
/// for ascending `b`, by composite Gauss–Legendre panels per segment.
fn cumulative_pair(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    a: f64,
    bs: &[f64],
    max_panel: f64,
) -> Vec<(f64, f64)> {
    let (xs, ws) = quad::gauss_legendre(12);
    let mut out = Vec::with_capacity(bs.len());
    let mut lo = a;
    let mut acc_f = 0.0;
    let mut acc_g = 0.0;
    for &b in bs {
        let width = b - lo;
        if width > 0.0 {
            let panels = (width / max_panel).ceil().max(1.0) as usize;
            let h = width / panels as f64;
            for p in 0..panels {
                let (pa, pb) = (lo + p as f64 * h, lo + (p + 1) as f64 * h);
                let mid = 0.5 * (pa + pb);
                let half = 0.5 * (pb - pa);
                for (x, w) in xs.iter().zip(&ws) {
                    let u = mid + half * x;
                    acc_f += w * half * f(u);
                    acc_g += w * half * g(u);
                }
            }
            lo = b;
        }
        out.push((acc_f, acc_g));
    }
    out
}

/// Half-space kernel and partials along a row: fixed `y`, ascending `zs`
/// with `zs[0] >= y`. Returns `(K, dK/dy, dK/dz, d2K/dydz)` per `z`.
pub fn halfspace_row(y: f64, zs: &[f64], t: f64) -> Vec<(f64, f64, f64, f64)> {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let bs: Vec<f64> = zs.iter().map(|z| (z * c).min(a + 9.0)).collect();
    let ints = cumulative_pair(
        &|v: f64| gaussian(v - a) * erfc((a + v) / std::f64::consts::SQRT_2),
        &|v: f64| (v - a) * gaussian(v - a) * erfc((a + v) / std::f64::consts::SQRT_2),
        a,
        &bs,
        0.25,
    );
    let boundary = gaussian(0.0) * erfc(std::f64::consts::SQRT_2 * a)
        + (-a * a).exp() * (1.0 + erf(a)) / (2.0 * std::f64::consts::PI.sqrt());
    zs.iter()
        .zip(&ints)
        .map(|(&z, &(i1, i2))| {
            let b = z * c;
            let k = 1.0 - 0.25 * (1.0 + erf(a)) * (erf(b) - erf(a)) - i1;
            let dy = c * (boundary - i2);
            let dz = halfspace_dz(y, z, t);
            let dyz = halfspace_dyz(y, z, t);
            (k, dy, dz, dyz)
        })
        .collect()
}

/// Reflected kernel and partials along a row, same shape as
/// [`halfspace_row`].
pub fn reflected_row(y: f64, zs: &[f64], t: f64) -> Vec<(f64, f64, f64, f64)> {
    let c = 1.0 / (2.0 * t.sqrt());
    let a = y * c;
    let bs: Vec<f64> = zs.iter().map(|z| z * c).collect();
    let ints = cumulative_pair(&|u: f64| reflected_q(u, a), &|u: f64| reflected_f(u, a), a, &bs, 0.25);
    let q_diag = reflected_q(a, a);
    zs.iter()
        .zip(&ints)
        .map(|(&z, &(j1, j2))| {
            let b = z * c;
            let k = 1.0 - 0.5 * j1;
            let dy = 0.5 * c * q_diag + 0.5 * c * j2;
            let dz = -0.5 * c * reflected_q(b, a);
            let dyz = -0.5 * c * c * reflected_f(a, b);
            (k, dy, dz, dyz)
        })
        .collect()
}
