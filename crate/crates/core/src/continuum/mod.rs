//! Continuum (diffusive-limit) Pfaffian kernels and the lattice-vs-continuum
//! scaling comparison.

pub mod kernels;
pub mod quad;
pub mod special;

pub use kernels::{kernel_bulk, kernel_halfspace, kernel_killed, kernel_reflected};

use crate::kernel::{KernelError, KernelVariant, MatrixKernel};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContinuumError {
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("({y},{z}) outside the {variant} kernel domain")]
    DomainViolation { y: f64, z: f64, variant: &'static str },
    #[error("theta must lie in [0,1], got {0}")]
    ThetaOutOfRange(f64),
    #[error("quadrature did not reach tolerance {requested:e} (achieved {achieved:e})")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("lattice kernel variant does not match continuum variant")]
    VariantMismatch,
    #[error("comparison point ({y},{z}) is not on the epsilon-grid")]
    PairNotOnGrid { y: f64, z: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// The four closed-form diffusive limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuumVariant {
    /// Maximal entrance law on the whole line.
    Bulk,
    /// Half-space maximal entrance law on the whole line.
    Halfspace,
    /// Maximal entrance law on `(0, inf)`, killed at the origin.
    Killed,
    /// Maximal entrance law on `[0, inf)`, reflected at the origin.
    Reflected,
}

impl ContinuumVariant {
    fn check_domain(self, y: f64, z: f64) -> Result<(), ContinuumError> {
        let ok = match self {
            ContinuumVariant::Bulk | ContinuumVariant::Halfspace => y <= z,
            ContinuumVariant::Killed => 0.0 < y && y <= z,
            ContinuumVariant::Reflected => 0.0 <= y && y <= z,
        };
        if ok {
            Ok(())
        } else {
            Err(ContinuumError::DomainViolation { y, z, variant: self.name() })
        }
    }

    fn contains(self, x: f64) -> bool {
        match self {
            ContinuumVariant::Bulk | ContinuumVariant::Halfspace => true,
            ContinuumVariant::Killed => x > 0.0,
            ContinuumVariant::Reflected => x >= 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ContinuumVariant::Bulk => "bulk",
            ContinuumVariant::Halfspace => "halfspace",
            ContinuumVariant::Killed => "killed",
            ContinuumVariant::Reflected => "reflected",
        }
    }

    /// Lattice kernel variant whose diffusive limit this is.
    pub fn lattice_variant(self) -> KernelVariant {
        match self {
            ContinuumVariant::Bulk | ContinuumVariant::Halfspace => KernelVariant::Free,
            ContinuumVariant::Killed => KernelVariant::Killed,
            ContinuumVariant::Reflected => KernelVariant::Reflected,
        }
    }
}

/// A continuum matrix kernel: scalar kernel plus its analytic partials,
/// scaled by `1/(1+theta)` (or a custom thinning factor).
#[derive(Debug, Clone)]
pub struct ContinuumKernel {
    variant: ContinuumVariant,
    t: f64,
    theta: f64,
    prefactor: f64,
}

/// Builds the block-kernel evaluator for a variant at time `t`.
pub fn assemble_continuum_kernel(
    variant: ContinuumVariant,
    t: f64,
    theta: f64,
) -> Result<ContinuumKernel, ContinuumError> {
    if !(t > 0.0) {
        return Err(ContinuumError::NonPositiveTime(t));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(ContinuumError::ThetaOutOfRange(theta));
    }
    Ok(ContinuumKernel { variant, t, theta, prefactor: 1.0 / (1.0 + theta) })
}

impl ContinuumKernel {
    pub fn variant(&self) -> ContinuumVariant {
        self.variant
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// Replaces `1/(1+theta)` by an arbitrary thinning factor.
    pub fn with_prefactor(mut self, prefactor: f64) -> Self {
        self.prefactor = prefactor;
        self
    }

    /// Scalar kernel `K_t(y,z)`, `y <= z`.
    pub fn k(&self, y: f64, z: f64) -> Result<f64, ContinuumError> {
        self.variant.check_domain(y, z)?;
        Ok(match self.variant {
            ContinuumVariant::Bulk => kernels::bulk_k(y, z, self.t),
            ContinuumVariant::Halfspace => kernels::halfspace_k(y, z, self.t),
            ContinuumVariant::Killed => kernels::killed_k(y, z, self.t),
            ContinuumVariant::Reflected => kernels::reflected_k(y, z, self.t),
        })
    }

    pub fn dk_dy(&self, y: f64, z: f64) -> Result<f64, ContinuumError> {
        self.variant.check_domain(y, z)?;
        Ok(match self.variant {
            ContinuumVariant::Bulk => kernels::bulk_dy(y, z, self.t),
            ContinuumVariant::Halfspace => kernels::halfspace_dy(y, z, self.t),
            ContinuumVariant::Killed => kernels::killed_dy(y, z, self.t),
            ContinuumVariant::Reflected => kernels::reflected_dy(y, z, self.t),
        })
    }

    pub fn dk_dz(&self, y: f64, z: f64) -> Result<f64, ContinuumError> {
        self.variant.check_domain(y, z)?;
        Ok(match self.variant {
            ContinuumVariant::Bulk => kernels::bulk_dz(y, z, self.t),
            ContinuumVariant::Halfspace => kernels::halfspace_dz(y, z, self.t),
            ContinuumVariant::Killed => kernels::killed_dz(y, z, self.t),
            ContinuumVariant::Reflected => kernels::reflected_dz(y, z, self.t),
        })
    }

    pub fn d2k_dydz(&self, y: f64, z: f64) -> Result<f64, ContinuumError> {
        self.variant.check_domain(y, z)?;
        Ok(match self.variant {
            ContinuumVariant::Bulk => kernels::bulk_dyz(y, z, self.t),
            ContinuumVariant::Halfspace => kernels::halfspace_dyz(y, z, self.t),
            ContinuumVariant::Killed => kernels::killed_dyz(y, z, self.t),
            ContinuumVariant::Reflected => kernels::reflected_dyz(y, z, self.t),
        })
    }

    /// One-point intensity `-dK/dz(y,y) / (1+theta)`.
    pub fn intensity(&self, y: f64) -> Result<f64, ContinuumError> {
        if !self.variant.contains(y) {
            return Err(ContinuumError::DomainViolation { y, z: y, variant: self.variant.name() });
        }
        Ok(-self.prefactor * self.dk_dz(y, y)?)
    }

    /// The 2x2 block; `y > z` filled by antisymmetry, the diagonal by the
    /// intensity rule.
    pub fn block(&self, y: f64, z: f64) -> Result<[[f64; 2]; 2], ContinuumError> {
        if y > z {
            let b = self.block(z, y)?;
            return Ok([[-b[0][0], -b[1][0]], [-b[0][1], -b[1][1]]]);
        }
        if y == z {
            let rho = self.intensity(y)?;
            return Ok([[0.0, rho], [-rho, 0.0]]);
        }
        let c = self.prefactor;
        Ok([
            [c * self.k(y, z)?, -c * self.dk_dz(y, z)?],
            [-c * self.dk_dy(y, z)?, c * self.d2k_dydz(y, z)?],
        ])
    }

    /// Blocks for a whole row `(y, z_1), (y, z_2), ...` with ascending
    /// `zs[0] >= y`. For the integral-based kernels this shares one
    /// cumulative quadrature pass across the row instead of re-integrating
    /// per pair.
    pub fn blocks_row(&self, y: f64, zs: &[f64]) -> Result<Vec<[[f64; 2]; 2]>, ContinuumError> {
        if zs.is_empty() {
            return Ok(Vec::new());
        }
        if zs.windows(2).any(|w| w[0] > w[1]) || zs[0] < y {
            return Err(ContinuumError::DomainViolation {
                y,
                z: zs[0],
                variant: self.variant.name(),
            });
        }
        match self.variant {
            ContinuumVariant::Bulk | ContinuumVariant::Killed => {
                zs.iter().map(|&z| self.block(y, z)).collect()
            }
            ContinuumVariant::Halfspace | ContinuumVariant::Reflected => {
                self.variant.check_domain(y, zs[0])?;
                let raw = match self.variant {
                    ContinuumVariant::Halfspace => kernels::halfspace_row(y, zs, self.t),
                    _ => kernels::reflected_row(y, zs, self.t),
                };
                let c = self.prefactor;
                Ok(zs
                    .iter()
                    .zip(raw)
                    .map(|(&z, (k, dy, dz, dyz))| {
                        if z == y {
                            let rho = -c * dz;
                            [[0.0, rho], [-rho, 0.0]]
                        } else {
                            [[c * k, -c * dz], [-c * dy, c * dyz]]
                        }
                    })
                    .collect())
            }
        }
    }
}

/// Supremum over the supplied pairs of the blockwise deviation between the
/// diffusively rescaled lattice kernel at scale `epsilon` and the continuum
/// kernel. Lattice entries are scaled `(1, 1/eps, 1/eps, 1/eps^2)` blockwise
/// before comparison; pairs must sit on the epsilon-grid.
pub fn scaling_compare(
    lattice: &MatrixKernel,
    epsilon: f64,
    continuum: &ContinuumKernel,
    pairs: &[(f64, f64)],
) -> Result<f64, ContinuumError> {
    if lattice.scalar().variant() != continuum.variant.lattice_variant() {
        return Err(ContinuumError::VariantMismatch);
    }
    let snap = |x: f64| -> Result<i64, ContinuumError> {
        let i = (x / epsilon).round();
        if ((x / epsilon) - i).abs() > 1e-9 {
            Err(ContinuumError::PairNotOnGrid { y: x, z: x })
        } else {
            Ok(i as i64)
        }
    };
    let mut worst = 0.0f64;
    for &(y, z) in pairs {
        let (iy, iz) = (snap(y)?, snap(z)?);
        let lat = lattice.block(iy, iz)?;
        let scaled = [
            [lat[0][0], lat[0][1] / epsilon],
            [lat[1][0] / epsilon, lat[1][1] / (epsilon * epsilon)],
        ];
        let cont = continuum.block(y, z)?;
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max((scaled[a][b] - cont[a][b]).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bulk_intensity_closed_form() {
        // rho = 1 / ((1+theta) sqrt(2 pi t)); at t = 1/4, theta = 1 this is
        // 1/sqrt(2 pi) ~ 0.398942, the real-Ginibre bulk density of real
        // eigenvalues.
        let ck = assemble_continuum_kernel(ContinuumVariant::Bulk, 0.25, 1.0).unwrap();
        let rho = ck.intensity(0.3).unwrap();
        let expect = 0.398942280401432677939946059934;
        assert!((rho - expect).abs() < 1e-14, "{rho} vs {expect}");
        // And at theta = 0, t = 1/4 the bulk level of the figure: 2/sqrt(2 pi).
        let ck0 = assemble_continuum_kernel(ContinuumVariant::Bulk, 0.25, 0.0).unwrap();
        let rho0 = ck0.intensity(-1.0).unwrap();
        assert!((rho0 - 0.797884560802865355879892119869).abs() < 1e-14);
    }

    #[test]
    fn killed_intensity_matches_stated_formula() {
        let (t, theta) = (0.4, 0.5);
        let ck = assemble_continuum_kernel(ContinuumVariant::Killed, t, theta).unwrap();
        for y in [0.2, 0.8, 1.9] {
            let rho = ck.intensity(y).unwrap();
            let expect = special::erf(y / (2.0 * t).sqrt())
                / ((1.0 + theta) * (2.0 * std::f64::consts::PI * t).sqrt());
            assert!((rho - expect).abs() < 1e-12, "y={y}: {rho} vs {expect}");
        }
    }

    #[test]
    fn reflected_intensity_matches_stated_formula() {
        let (t, theta) = (0.25, 0.0);
        let ck = assemble_continuum_kernel(ContinuumVariant::Reflected, t, theta).unwrap();
        for y in [0.0, 0.3, 1.0, 2.5] {
            let rho = ck.intensity(y).unwrap();
            let expect = (special::erf(y / (2.0 * t).sqrt())
                / (2.0 * std::f64::consts::PI * t).sqrt()
                + (-y * y / (4.0 * t)).exp() * special::erfc(y / (2.0 * t.sqrt()))
                    / (std::f64::consts::PI * t).sqrt())
                / (1.0 + theta);
            assert!((rho - expect).abs() < 1e-12, "y={y}: {rho} vs {expect}");
        }
        // Figure anchors: reflecting density at the origin is 2/sqrt(pi).
        let rho0 = ck.intensity(0.0).unwrap();
        assert!((rho0 - 1.12837916709551257389615890312).abs() < 1e-12);
    }

    #[test]
    fn absorbing_intensity_vanishes_at_origin() {
        let ck = assemble_continuum_kernel(ContinuumVariant::Killed, 0.25, 0.0).unwrap();
        // Open domain: approach zero from inside; rho(y) ~ y sqrt(2/pi)/t.
        let rho = ck.intensity(1e-9).unwrap();
        assert!(rho.abs() < 1e-8);
    }

    #[test]
    fn two_point_correlation_factorizes_at_large_separation() {
        let ck = assemble_continuum_kernel(ContinuumVariant::Bulk, 0.25, 0.5).unwrap();
        let (y, z) = (0.0, 25.0 * 0.5); // 25 sqrt(t)
        let b = ck.block(y, z).unwrap();
        // Off-diagonal blocks decay, so rho2 -> rho(y) rho(z).
        let rho2 = ck.intensity(y).unwrap() * ck.intensity(z).unwrap()
            - b[0][0] * b[1][1]
            + b[0][1] * b[1][0];
        let product = ck.intensity(y).unwrap() * ck.intensity(z).unwrap();
        assert!((rho2 - product).abs() < 1e-12);
        for a in 0..2 {
            for c in 0..2 {
                assert!(b[a][c].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_block_is_intensity() {
        let ck = assemble_continuum_kernel(ContinuumVariant::Halfspace, 0.25, 1.0).unwrap();
        let b = ck.block(0.4, 0.4).unwrap();
        assert_eq!(b[0][1], ck.intensity(0.4).unwrap());
        assert_eq!(b[0][0], 0.0);
    }
}
