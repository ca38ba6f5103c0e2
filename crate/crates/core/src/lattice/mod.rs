//! Particle configurations, jump-rate profiles and exact simulation of the
//! mixed annihilating/coalescing system on a finite lattice window.

mod ctmc;
mod estimate;
mod sim;

pub use ctmc::exact_ctmc;
pub use estimate::{estimate_products, estimate_spin_products, mean_and_stderr};
pub use sim::{
    simulate, simulate_ensemble, simulate_two_colour, two_colour_ensemble, ColouredSample,
    TwoColourMode,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("window [{lo}, {hi}] is empty")]
    EmptyWindow { lo: i64, hi: i64 },
    #[error("boundary mode {0:?} requires the window to start at 0")]
    BoundaryNeedsOrigin(BoundaryMode),
    #[error("site {0} outside window")]
    SiteOutsideWindow(i64),
    #[error("sites must be adjacent, got {0} and {1}")]
    NotAdjacent(i64, i64),
    #[error("interval endpoints must satisfy y <= z, got y={0}, z={1}")]
    UnorderedInterval(i64, i64),
    #[error("theta must lie in [0,1], got {0}")]
    ThetaOutOfRange(f64),
    #[error("rates must be finite and nonnegative")]
    InvalidRate,
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("points must be distinct")]
    DuplicatePoints,
    #[error("spin-pair sites must be ordered ascending")]
    UnorderedSpinSites,
    #[error("spin-pair site count must be even and positive")]
    OddSpinSites,
    #[error("window length {0} exceeds exact-CTMC limit {1}")]
    WindowTooLarge(usize, usize),
    #[error("probability {0} outside (0,1)")]
    ProbabilityOutOfRange(f64),
    #[error("periodic simulation requires homogeneous rates")]
    PeriodicNeedsHomogeneous,
}

/// Inclusive integer interval `[lo, hi]` of lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self, LatticeError> {
        if lo > hi {
            return Err(LatticeError::EmptyWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    #[inline]
    pub(crate) fn index(&self, x: i64) -> usize {
        debug_assert!(self.contains(x));
        (x - self.lo) as usize
    }
}

/// How the finite window stands in for the infinite lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Jumps wrap around the window.
    Periodic,
    /// Jumps that would leave the window are suppressed.
    Truncated,
    /// Window starts at 0; the jump `0 -> -1` removes the particle.
    KilledAtZero,
    /// Window starts at 0; no left jump from 0 (rate profile has `q_0 = 0`).
    ReflectedAtZero,
}

/// Occupancy state on a window: one bit per site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    window: Window,
    occupancy: Vec<bool>,
    boundary: BoundaryMode,
}

impl Configuration {
    pub fn empty(window: Window, boundary: BoundaryMode) -> Result<Self, LatticeError> {
        match boundary {
            BoundaryMode::KilledAtZero | BoundaryMode::ReflectedAtZero if window.lo != 0 => {
                return Err(LatticeError::BoundaryNeedsOrigin(boundary));
            }
            _ => {}
        }
        Ok(Self { window, occupancy: vec![false; window.len()], boundary })
    }

    /// Every site occupied.
    pub fn full(window: Window, boundary: BoundaryMode) -> Result<Self, LatticeError> {
        let mut c = Self::empty(window, boundary)?;
        c.occupancy.iter_mut().for_each(|b| *b = true);
        Ok(c)
    }

    /// Even sites (relative to the window origin) occupied.
    pub fn alternating(window: Window, boundary: BoundaryMode) -> Result<Self, LatticeError> {
        let mut c = Self::empty(window, boundary)?;
        for i in 0..c.occupancy.len() {
            c.occupancy[i] = i % 2 == 0;
        }
        Ok(c)
    }

    /// Occupied on `x <= 0` (or from the window start when it lies right of 0).
    pub fn half_space(window: Window, boundary: BoundaryMode) -> Result<Self, LatticeError> {
        let mut c = Self::empty(window, boundary)?;
        for x in window.sites() {
            if x <= 0 {
                c.occupancy[window.index(x)] = true;
            }
        }
        Ok(c)
    }

    pub fn from_sites(
        window: Window,
        boundary: BoundaryMode,
        sites: &[i64],
    ) -> Result<Self, LatticeError> {
        let mut c = Self::empty(window, boundary)?;
        for &x in sites {
            if !window.contains(x) {
                return Err(LatticeError::SiteOutsideWindow(x));
            }
            c.occupancy[window.index(x)] = true;
        }
        Ok(c)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    #[inline]
    pub fn occupied(&self, x: i64) -> bool {
        self.window.contains(x) && self.occupancy[self.window.index(x)]
    }

    pub fn set(&mut self, x: i64, value: bool) -> Result<(), LatticeError> {
        if !self.window.contains(x) {
            return Err(LatticeError::SiteOutsideWindow(x));
        }
        let i = self.window.index(x);
        self.occupancy[i] = value;
        Ok(())
    }

    pub fn particle_count(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }

    pub fn particles(&self) -> Vec<i64> {
        self.window.sites().filter(|&x| self.occupied(x)).collect()
    }

    /// Number of particles in the half-open interval `[y, z)`, clipped to the
    /// window.
    pub fn count_in(&self, y: i64, z: i64) -> usize {
        (y..z).filter(|&x| self.occupied(x)).count()
    }

    pub(crate) fn occupancy_bits(&self) -> &[bool] {
        &self.occupancy
    }
}

/// The spin pair `sigma_{y,z}(eta) = (-theta)^(eta[y,z))`, with `0^0 = 1` so
/// that `theta = 0` gives the empty-interval indicator.
pub fn spin_pair(eta: &Configuration, y: i64, z: i64, theta: f64) -> Result<f64, LatticeError> {
    if y > z {
        return Err(LatticeError::UnorderedInterval(y, z));
    }
    Ok(spin_weight(eta.count_in(y, z), theta))
}

#[inline]
pub(crate) fn spin_weight(count: usize, theta: f64) -> f64 {
    if count == 0 {
        1.0
    } else {
        (-theta).powi(count as i32)
    }
}

/// Product of spin pairs over consecutive index pairs of an ordered site
/// vector `y_1 <= y_2 <= ... <= y_{2n}`.
pub fn spin_product(eta: &Configuration, ys: &[i64], theta: f64) -> Result<f64, LatticeError> {
    if ys.is_empty() || ys.len() % 2 != 0 {
        return Err(LatticeError::OddSpinSites);
    }
    if ys.windows(2).any(|w| w[0] > w[1]) {
        return Err(LatticeError::UnorderedSpinSites);
    }
    let mut prod = 1.0;
    for pair in ys.chunks_exact(2) {
        prod *= spin_pair(eta, pair[0], pair[1], theta)?;
    }
    Ok(prod)
}

/// Per-site nearest-neighbour jump rates plus the reaction parameter.
///
/// `q(x)` is the rate of the jump `x -> x-1` and `p(x)` the rate of the jump
/// `x-1 -> x`; a particle sitting at `x` therefore jumps left at rate `q(x)`
/// and right at rate `p(x+1)`. The same profile drives the one-particle dual
/// generator `L f(x) = q_x D^+ f(x) + p_x D^- f(x)`.
#[derive(Debug, Clone)]
pub struct RateProfile {
    motion: Motion,
    theta: f64,
}

#[derive(Debug, Clone)]
enum Motion {
    Homogeneous { p: f64, q: f64 },
    /// Unit rates on `x >= 1`, `q_0 = 2`, everything else zero: random walk
    /// on `{0, 1, ...}` killed into the sink at `-1` from the origin.
    Killed,
    /// Unit rates on `x >= 1`, zero at and below the origin: reflected walk.
    Reflected,
    /// Unit rates strictly inside `[lo, hi]`; every jump that would leave
    /// the box has rate zero.
    Boxed { lo: i64, hi: i64 },
    Table { lo: i64, p: Vec<f64>, q: Vec<f64> },
}

impl RateProfile {
    fn check_theta(theta: f64) -> Result<(), LatticeError> {
        if !(0.0..=1.0).contains(&theta) || !theta.is_finite() {
            return Err(LatticeError::ThetaOutOfRange(theta));
        }
        Ok(())
    }

    /// `p_x = q_x = rate` everywhere.
    pub fn homogeneous(rate: f64, theta: f64) -> Result<Self, LatticeError> {
        Self::asymmetric(rate, rate, theta)
    }

    pub fn asymmetric(p: f64, q: f64, theta: f64) -> Result<Self, LatticeError> {
        Self::check_theta(theta)?;
        if !(p.is_finite() && q.is_finite()) || p < 0.0 || q < 0.0 {
            return Err(LatticeError::InvalidRate);
        }
        Ok(Self { motion: Motion::Homogeneous { p, q }, theta })
    }

    /// Rates of the killed-at-zero model: unit walk on `x >= 1`, kill rate 2
    /// out of the origin.
    pub fn killed(theta: f64) -> Result<Self, LatticeError> {
        Self::check_theta(theta)?;
        Ok(Self { motion: Motion::Killed, theta })
    }

    /// Rates of the reflected-at-zero model: unit walk on `x >= 1`, no jump
    /// out of the origin to the left.
    pub fn reflected(theta: f64) -> Result<Self, LatticeError> {
        Self::check_theta(theta)?;
        Ok(Self { motion: Motion::Reflected, theta })
    }

    /// Unit rates confined to the box `[lo, hi]`; all rates in or out of the
    /// complement vanish. On such profiles the finite window is exact, with
    /// no truncation error.
    pub fn boxed(lo: i64, hi: i64, theta: f64) -> Result<Self, LatticeError> {
        Self::check_theta(theta)?;
        if lo > hi {
            return Err(LatticeError::EmptyWindow { lo, hi });
        }
        Ok(Self { motion: Motion::Boxed { lo, hi }, theta })
    }

    /// Arbitrary per-site tables starting at site `lo`; rates outside the
    /// tabulated range are zero.
    pub fn from_tables(lo: i64, p: Vec<f64>, q: Vec<f64>, theta: f64) -> Result<Self, LatticeError> {
        Self::check_theta(theta)?;
        if p.iter().chain(q.iter()).any(|r| !r.is_finite() || *r < 0.0) {
            return Err(LatticeError::InvalidRate);
        }
        Ok(Self { motion: Motion::Table { lo, p, q }, theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Rate of the jump `x-1 -> x`.
    pub fn p(&self, x: i64) -> f64 {
        match &self.motion {
            Motion::Homogeneous { p, .. } => *p,
            Motion::Killed | Motion::Reflected => {
                if x >= 1 {
                    1.0
                } else {
                    0.0
                }
            }
            Motion::Boxed { lo, hi } => {
                if x > *lo && x <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            Motion::Table { lo, p, .. } => {
                let i = x - lo;
                if i >= 0 && (i as usize) < p.len() {
                    p[i as usize]
                } else {
                    0.0
                }
            }
        }
    }

    /// Rate of the jump `x -> x-1`.
    pub fn q(&self, x: i64) -> f64 {
        match &self.motion {
            Motion::Homogeneous { q, .. } => *q,
            Motion::Killed => match x {
                0 => 2.0,
                _ if x >= 1 => 1.0,
                _ => 0.0,
            },
            Motion::Reflected => {
                if x >= 1 {
                    1.0
                } else {
                    0.0
                }
            }
            Motion::Boxed { lo, hi } => {
                if x > *lo && x <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            Motion::Table { lo, q, .. } => {
                let i = x - lo;
                if i >= 0 && (i as usize) < q.len() {
                    q[i as usize]
                } else {
                    0.0
                }
            }
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.motion, Motion::Homogeneous { .. })
    }

    /// Upper bound on `p_x + q_x`, used for time-step selection.
    pub fn max_total_rate(&self) -> f64 {
        match &self.motion {
            Motion::Homogeneous { p, q } => p + q,
            Motion::Killed => 3.0,
            Motion::Reflected | Motion::Boxed { .. } => 2.0,
            Motion::Table { p, q, .. } => {
                let mp = p.iter().cloned().fold(0.0f64, f64::max);
                let mq = q.iter().cloned().fold(0.0f64, f64::max);
                mp + mq
            }
        }
    }
}

/// One simulated trajectory at a fixed time.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub time: f64,
    pub config: Configuration,
    pub seed: u64,
    pub event_count: u64,
    pub annihilations: u64,
    pub coalescences: u64,
}

/// Outcome of a nearest-neighbour jump landing on `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reaction {
    Annihilate,
    Coalesce,
}

/// Applies a single jump `from -> to` followed by the instantaneous reaction:
/// the source empties and the target becomes `(eta(from) + eta(to)) mod 2`
/// for annihilation, `min(1, eta(from) + eta(to))` for coalescence.
pub fn apply_jump(
    eta: &Configuration,
    from: i64,
    to: i64,
    reaction: Reaction,
) -> Result<Configuration, LatticeError> {
    if (from - to).abs() != 1 {
        return Err(LatticeError::NotAdjacent(from, to));
    }
    if !eta.window().contains(from) {
        return Err(LatticeError::SiteOutsideWindow(from));
    }
    let killed_sink = eta.boundary() == BoundaryMode::KilledAtZero && to == -1;
    if !eta.window().contains(to) && !killed_sink {
        return Err(LatticeError::SiteOutsideWindow(to));
    }
    let mut out = eta.clone();
    let src = u8::from(eta.occupied(from));
    out.set(from, false)?;
    if !killed_sink {
        let tgt = u8::from(eta.occupied(to));
        let new = match reaction {
            Reaction::Annihilate => (src + tgt) % 2,
            Reaction::Coalesce => (src + tgt).min(1),
        };
        out.set(to, new == 1)?;
    }
    Ok(out)
}
