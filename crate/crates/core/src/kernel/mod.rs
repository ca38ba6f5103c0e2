//! The scalar kernel `K_t(y,z)` and the 2x2-block matrix kernels built from
//! it.
//!
//! `K_t(y,z) = E[sigma_{y,z}(eta_t)]` solves a two-index lattice heat
//! equation driven by the one-particle dual generator, with the diagonal
//! pinned at 1. Its forward differences assemble into an antisymmetric
//! matrix kernel whose Pfaffians give spin-product expectations and
//! correlation functions of the particle system.

mod assemble;
mod solve;

pub use assemble::{
    alt_matrix_kernel, assemble_matrix_kernel, predict_correlation, predict_spin_product,
    spin_matrix, MatrixForm, MatrixKernel,
};
pub use solve::{
    required_buffer, solve_scalar_kernel, solve_scalar_kernel_from, solve_translation_invariant,
    SolveOptions,
};

use crate::lattice::{Configuration, LatticeError, RateProfile, Window};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(
        "window too small for t={t}: needs a buffer of {required} sites on each open edge"
    )]
    WindowTooSmall { t: f64, required: usize },
    #[error("integration unstable at step {step}: max |K| = {max_abs}")]
    Unstable { step: usize, max_abs: f64 },
    #[error("kernel not defined at ({y},{z})")]
    OutOfWindow { y: i64, z: i64 },
    #[error("pair must satisfy y <= z, got ({0},{1})")]
    UnorderedPair(i64, i64),
    #[error("sites must be ordered ascending")]
    UnorderedSites,
    #[error("site count must be even and positive")]
    OddSiteCount,
    #[error("points must be distinct and ascending")]
    InvalidPoints,
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("Bernoulli density p_{0} = {1} outside [0,1]")]
    BernoulliOutOfRange(i64, f64),
    #[error("ghost values missing: expected {expected} values, got {got}")]
    GhostMissing { expected: usize, got: usize },
    #[error("translation-invariant solve requires homogeneous rates")]
    NotHomogeneous,
    #[error(transparent)]
    Skew(#[from] crate::skew::SkewError),
}

/// Kernel boundary variant, fixed by the boundary mode of the initial
/// configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    /// Whole-line dual walk, window edges value-frozen behind a buffer.
    Free,
    /// Killed model rates: reflected dual walk at the origin (`q_0 = 2`).
    Killed,
    /// Reflected model rates: absorbed dual walk at the origin.
    Reflected,
}

/// The one-particle dual generator `L f(x) = q_x D^+ f(x) + p_x D^- f(x)`,
/// applied on a window with one ghost site each side: `f[0]` holds
/// `f(window.lo - 1)` and `f[len+1]` holds `f(window.hi + 1)`.
pub fn dual_generator(
    f: &[f64],
    window: Window,
    rates: &RateProfile,
) -> Result<Vec<f64>, KernelError> {
    let n = window.len();
    if f.len() != n + 2 {
        return Err(KernelError::GhostMissing { expected: n + 2, got: f.len() });
    }
    let mut out = vec![0.0; n];
    for i in 0..n {
        let x = window.lo + i as i64;
        let center = f[i + 1];
        out[i] = rates.q(x) * (f[i + 2] - center) + rates.p(x) * (f[i] - center);
    }
    Ok(out)
}

/// Initial kernel data for independent Bernoulli(`p_k`) site occupancies:
/// `Phi(y,z) = prod_{k in [y,z)} (1 - (1+theta) p_k)`, `Phi(y,y) = 1`.
pub fn bernoulli_initial<P>(p: P, theta: f64) -> impl Fn(i64, i64) -> f64
where
    P: Fn(i64) -> f64,
{
    move |y: i64, z: i64| {
        let mut prod = 1.0;
        for k in y..z {
            prod *= 1.0 - (1.0 + theta) * p(k);
        }
        prod
    }
}

/// The solved scalar kernel on a grid `{(y,z): y <= z}` over a window.
#[derive(Debug, Clone)]
pub struct ScalarKernel {
    window: Window,
    trusted: Window,
    t: f64,
    theta: f64,
    variant: KernelVariant,
    n: usize,
    values: Vec<f64>,
}

impl ScalarKernel {
    fn tri_index(&self, iy: usize, iz: usize) -> usize {
        debug_assert!(iy <= iz && iz < self.n);
        iy * self.n - iy * (iy + 1) / 2 + iz
    }

    /// Full solved window (includes any buffer supplied by the caller).
    pub fn window(&self) -> Window {
        self.window
    }

    /// Sub-window on which edge-freezing error is below the solver's target.
    pub fn trusted(&self) -> Window {
        self.trusted
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn variant(&self) -> KernelVariant {
        self.variant
    }

    /// `K_t(y,z)` for `y <= z` within the window.
    pub fn value(&self, y: i64, z: i64) -> Result<f64, KernelError> {
        if y > z {
            return Err(KernelError::UnorderedPair(y, z));
        }
        if !self.window.contains(y) || !self.window.contains(z) {
            return Err(KernelError::OutOfWindow { y, z });
        }
        Ok(self.values[self.tri_index(self.window.index(y), self.window.index(z))])
    }

    /// Largest absolute value on the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Builds a kernel from a translation-invariant gap profile
    /// `u[g] = K(y, y+g)`.
    pub fn from_gap_profile(
        u: &[f64],
        window: Window,
        t: f64,
        theta: f64,
    ) -> Result<Self, KernelError> {
        let n = window.len();
        if u.len() < n {
            return Err(KernelError::WindowTooSmall { t, required: n - u.len() });
        }
        let mut values = vec![0.0; n * (n + 1) / 2];
        let mut k = 0;
        for iy in 0..n {
            for iz in iy..n {
                values[k] = u[iz - iy];
                k += 1;
            }
        }
        Ok(Self { window, trusted: window, t, theta, variant: KernelVariant::Free, n, values })
    }

    pub(crate) fn from_parts(
        window: Window,
        trusted: Window,
        t: f64,
        theta: f64,
        variant: KernelVariant,
        values: Vec<f64>,
    ) -> Self {
        let n = window.len();
        debug_assert_eq!(values.len(), n * (n + 1) / 2);
        Self { window, trusted, t, theta, variant, n, values }
    }
}

/// Maps a configuration's boundary mode to the kernel variant solved for it.
pub fn variant_for(config: &Configuration) -> KernelVariant {
    use crate::lattice::BoundaryMode::*;
    match config.boundary() {
        Periodic | Truncated => KernelVariant::Free,
        KilledAtZero => KernelVariant::Killed,
        ReflectedAtZero => KernelVariant::Reflected,
    }
}
