//! Gap probabilities, Fredholm-Pfaffian evaluation, right-most-particle
//! tails and the exponential gap-decay constant.

use crate::continuum::{quad, ContinuumError, ContinuumKernel, ContinuumVariant};
use crate::kernel::{spin_matrix, KernelError, MatrixKernel};
use crate::skew::{self, SkewError, SkewMatrix};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Continuum(#[from] ContinuumError),
    #[error(transparent)]
    Skew(#[from] SkewError),
    #[error("no sites supplied")]
    EmptySites,
    #[error("sites must be strictly ascending")]
    UnorderedSites,
    #[error("{n} sites exceed the limit {max}")]
    TooManySites { n: usize, max: usize },
    #[error("gap probability {value} leaves [0,1] beyond tolerance")]
    NumericalFailure { value: f64 },
    #[error("interval [{a}, {b}] is empty or outside the kernel domain")]
    BadInterval { a: f64, b: f64 },
    #[error("node count must be even and at least 16, got {0}")]
    BadNodeCount(usize),
    #[error(
        "Fredholm value drifted {drift:e} under node doubling (coarse {coarse}, fine {fine})"
    )]
    NodeDoublingDrift { coarse: f64, fine: f64, drift: f64 },
    #[error("operation requires the {expected} kernel variant")]
    WrongVariant { expected: &'static str },
    #[error("decay-rate fit failed: {0}")]
    FitFailure(&'static str),
    #[error("theta must lie in [0,1], got {0}")]
    ThetaOutOfRange(f64),
}

/// Largest site count accepted by [`gap_probability_lattice`].
pub const GAP_MAX_SITES: usize = 200;

/// Absolute drift allowed between a Fredholm value and its node-doubled
/// refinement.
pub const NODE_DOUBLING_TOL: f64 = 1e-6;

/// A gap-probability request (used by the command-line layer).
#[derive(Debug, Clone, Copy)]
pub struct GapQuery {
    pub interval: (f64, f64),
    pub mode: GapMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    EmptyInterval,
    RightTail,
}

/// `P[eta_t(x) = 0 for all x in sites]` from the lattice scalar kernel.
///
/// With `y = (x_1, x_1+1, ..., x_n, x_n+1)` the expectation
/// `E prod (1 - eta(x_i))` expands over spin products into the single
/// Pfaffian `(1+theta)^{-n} Pf(K^{(2n)}(t, y) + theta J_{2n})`.
pub fn gap_probability_lattice(mk: &MatrixKernel, sites: &[i64]) -> Result<f64, StatsError> {
    if sites.is_empty() {
        return Err(StatsError::EmptySites);
    }
    if sites.windows(2).any(|w| w[0] >= w[1]) {
        return Err(StatsError::UnorderedSites);
    }
    let n = sites.len();
    if n > GAP_MAX_SITES {
        return Err(StatsError::TooManySites { n, max: GAP_MAX_SITES });
    }
    let theta = mk.theta();
    let ys: Vec<i64> = sites.iter().flat_map(|&x| [x, x + 1]).collect();
    let m = spin_matrix(mk.scalar(), &ys)?;
    let pf = skew::pfaffian(&m.add_symplectic(theta));
    let p = pf / (1.0 + theta).powi(n as i32);
    if !(-1e-9..=1.0 + 1e-9).contains(&p) {
        return Err(StatsError::NumericalFailure { value: p });
    }
    Ok(p)
}

fn interval_in_domain(ck: &ContinuumKernel, a: f64, b: f64) -> bool {
    match ck.variant() {
        ContinuumVariant::Bulk | ContinuumVariant::Halfspace => a < b,
        ContinuumVariant::Killed => 0.0 < a && a < b,
        ContinuumVariant::Reflected => 0.0 <= a && a < b,
    }
}

fn fredholm_pfaffian_at(
    ck: &ContinuumKernel,
    a: f64,
    b: f64,
    nodes: usize,
) -> Result<f64, StatsError> {
    let (u, w) = quad::gauss_legendre_on(nodes, a, b);
    let sqw: Vec<f64> = w.iter().map(|wi| wi.sqrt()).collect();
    let n = nodes;
    let mut blocks = vec![[[0.0f64; 2]; 2]; n * n];
    for i in 0..n {
        let row = ck.blocks_row(u[i], &u[i..])?;
        for (off, raw) in row.into_iter().enumerate() {
            let j = i + off;
            let s = sqw[i] * sqw[j];
            blocks[i * n + j] = [[s * raw[0][0], s * raw[0][1]], [s * raw[1][0], s * raw[1][1]]];
        }
    }
    // Pf(J - M): the empty kernel gives Pf(J) = 1.
    let jm = SkewMatrix::from_upper(2 * n, |r, c| {
        let (i, x) = (r / 2, r % 2);
        let (j, y) = (c / 2, c % 2);
        let jentry = if i == j && x == 0 && y == 1 { 1.0 } else { 0.0 };
        jentry - blocks[i * n + j][x][y]
    })?;
    Ok(skew::pfaffian(&jm))
}

/// Gap probability of an interval as a discretized Fredholm Pfaffian on
/// Gauss–Legendre nodes, with a node-doubling stability check: the value at
/// `2 * nodes` must agree with the value at `nodes` within
/// [`NODE_DOUBLING_TOL`], and the refined value is returned.
pub fn gap_probability_continuum(
    ck: &ContinuumKernel,
    interval: (f64, f64),
    nodes: usize,
) -> Result<f64, StatsError> {
    let (a, b) = interval;
    if nodes < 16 || nodes % 2 != 0 {
        return Err(StatsError::BadNodeCount(nodes));
    }
    if !interval_in_domain(ck, a, b) {
        return Err(StatsError::BadInterval { a, b });
    }
    let coarse = fredholm_pfaffian_at(ck, a, b, nodes)?;
    let fine = fredholm_pfaffian_at(ck, a, b, 2 * nodes)?;
    let drift = (fine - coarse).abs();
    if drift >= NODE_DOUBLING_TOL {
        return Err(StatsError::NodeDoublingDrift { coarse, fine, drift });
    }
    if !(-1e-9..=1.0 + 1e-9).contains(&fine) {
        return Err(StatsError::NumericalFailure { value: fine });
    }
    Ok(fine)
}

/// Law of the right-most particle under the half-space maximal entrance
/// law: `p(t, [L, inf))`, truncating the interval at `L + 12 sqrt(t)` where
/// the intensity tail is below 1e-10.
pub fn rightmost_tail(ck: &ContinuumKernel, l: f64, nodes: usize) -> Result<f64, StatsError> {
    if ck.variant() != ContinuumVariant::Halfspace {
        return Err(StatsError::WrongVariant { expected: "halfspace" });
    }
    let upper = l + 12.0 * ck.t().sqrt();
    gap_probability_continuum(ck, (l, upper), nodes)
}

// zeta(3/2 - k) for k = 0..4, used by the polylog expansion near r = 1.
const ZETA_LADDER: [f64; 4] = [
    2.612375348685488343,   // zeta(3/2)
    -1.4603545088095868329, // zeta(1/2)
    -0.2078862249773545660, // zeta(-1/2)
    -0.0254852018898330359, // zeta(-3/2)
];

fn polylog_three_halves(r: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&r));
    if r > 0.9997 {
        // Li_{3/2}(e^mu) = Gamma(-1/2) (-mu)^(1/2) + sum_k zeta(3/2-k) mu^k/k!
        // with Gamma(-1/2) = -2 sqrt(pi); accurate to ~1e-17 for |mu| < 3e-4.
        let mu = r.ln();
        let mut sum = -2.0 * std::f64::consts::PI.sqrt() * (-mu).sqrt();
        let mut muk = 1.0;
        let mut kfac = 1.0;
        for (k, z) in ZETA_LADDER.iter().enumerate() {
            if k > 0 {
                muk *= mu;
                kfac *= k as f64;
            }
            sum += z * muk / kfac;
        }
        sum
    } else {
        let mut sum = 0.0;
        let mut rn = 1.0;
        for n in 1..=2_000_000u64 {
            rn *= r;
            let term = rn / (n as f64).powf(1.5);
            sum += term;
            if term < 1e-16 {
                break;
            }
        }
        sum
    }
}

/// The gap-decay constant
/// `A(theta) = (1+theta)/4 * sum_{n>=1} n^{-3/2} (4 theta / (1+theta)^2)^n`.
///
/// Direct summation for moderate ratios; at ratios within 3e-4 of 1 (theta
/// near 1, where the series decays only polynomially) the polylog is
/// evaluated through its expansion around `zeta(3/2)`.
pub fn derrida_constant(theta: f64) -> Result<f64, StatsError> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(StatsError::ThetaOutOfRange(theta));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    let r = 4.0 * theta / ((1.0 + theta) * (1.0 + theta));
    Ok(0.25 * (1.0 + theta) * polylog_three_halves(r))
}

/// Result of fitting `log p` against interval length.
#[derive(Debug, Clone)]
pub struct FittedRate {
    /// Exponential decay rate per unit of `sqrt(t)`-scaled length.
    pub rate: f64,
    pub intercept: f64,
    /// `(scaled length, log gap probability)` pairs used in the fit.
    pub samples: Vec<(f64, f64)>,
}

/// Computes bulk gap probabilities over `lengths` (in units of `sqrt(t)`),
/// drops the shortest third to suppress the O(1) prefactor, and fits the
/// exponential decay rate of `log p` for comparison against
/// [`derrida_constant`].
pub fn gap_asymptotic_check(
    theta: f64,
    t: f64,
    lengths: &[f64],
    nodes: usize,
) -> Result<FittedRate, StatsError> {
    let ck = crate::continuum::assemble_continuum_kernel(ContinuumVariant::Bulk, t, theta)?;
    let mut samples = Vec::with_capacity(lengths.len());
    for &ell in lengths {
        if !(ell > 0.0) {
            return Err(StatsError::FitFailure("lengths must be positive"));
        }
        let p = gap_probability_continuum(&ck, (0.0, ell * t.sqrt()), nodes)?;
        if !(p > 0.0) {
            return Err(StatsError::FitFailure("gap probability underflowed"));
        }
        samples.push((ell, p.ln()));
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let keep_from = samples.len() / 3;
    let kept = &samples[keep_from..];
    if kept.len() < 2 {
        return Err(StatsError::FitFailure("need at least two lengths after trimming"));
    }
    let (slope, intercept) = least_squares_fit(kept)?;
    Ok(FittedRate { rate: -slope, intercept, samples })
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn least_squares_fit(pts: &[(f64, f64)]) -> Result<(f64, f64), StatsError> {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 || !denom.is_finite() {
        return Err(StatsError::FitFailure("degenerate abscissae"));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    if !slope.is_finite() {
        return Err(StatsError::FitFailure("non-finite slope"));
    }
    Ok((slope, intercept))
}
