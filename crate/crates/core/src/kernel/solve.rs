//! RK4 integration of the kernel ODE system on the triangular grid
//! `{(y,z): y <= z}`.
//!
//! The diagonal is pinned at 1 and never updated. Window edges where the
//! dual-walk stencil would leave the grid are value-frozen at their initial
//! data; a light-cone buffer keeps the induced error below the solver
//! target on the `trusted` sub-window. Rate profiles whose dual walk cannot
//! leave the grid (compactly supported rates) need no freezing and solve
//! exactly.

use rayon::prelude::*;

use super::{KernelError, KernelVariant, ScalarKernel};
use crate::lattice::{spin_weight, Configuration, RateProfile, Window};

/// Options for [`solve_scalar_kernel`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Time step; defaults to `0.1 / max_total_rate`.
    pub dt: Option<f64>,
    /// Light-cone buffer assumed on frozen edges; defaults to
    /// [`required_buffer`].
    pub buffer: Option<usize>,
    /// Abort when `max |K|` exceeds `1 + audit_slack` during integration.
    pub audit: bool,
    pub audit_slack: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { dt: None, buffer: None, audit: true, audit_slack: 1e-6 }
    }
}

/// Buffer (in sites) behind which a frozen window edge perturbs the solution
/// by less than ~1e-8: six standard deviations of the dual walk plus slack.
pub fn required_buffer(t: f64, rates: &RateProfile) -> usize {
    let scale = (rates.max_total_rate() / 2.0).max(1.0);
    let b = (6.0 * (2.0 * t * scale).sqrt()).ceil() as usize + 2;
    b.max(4)
}

struct TriGrid {
    n: usize,
    row_start: Vec<usize>,
}

impl TriGrid {
    fn new(n: usize) -> Self {
        let mut row_start = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        for iy in 0..=n {
            row_start.push(acc);
            acc += n - iy.min(n);
        }
        Self { n, row_start }
    }

    #[inline]
    fn idx(&self, iy: usize, iz: usize) -> usize {
        self.row_start[iy] + (iz - iy)
    }

    fn len(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// Mutable row slices of a flat triangle buffer, for row-parallel loops.
    fn rows<'a>(&self, buf: &'a mut [f64]) -> Vec<(usize, &'a mut [f64])> {
        let mut out = Vec::with_capacity(self.n);
        let mut rest = buf;
        for iy in 0..self.n {
            let (row, tail) = rest.split_at_mut(self.n - iy);
            out.push((iy, row));
            rest = tail;
        }
        out
    }
}

struct System {
    grid: TriGrid,
    qv: Vec<f64>,
    pv: Vec<f64>,
    freeze_left: bool,
    freeze_right: bool,
}

impl System {
    /// dK = (L_y + L_z) K on active points; zero on the diagonal and frozen
    /// edges.
    fn stage(&self, state: &[f64], out: &mut [f64]) {
        let n = self.grid.n;
        let rows = self.grid.rows(out);
        rows.into_par_iter().for_each(|(iy, row)| {
            let qy = self.qv[iy];
            let py = self.pv[iy];
            let row_frozen = self.freeze_left && iy == 0;
            let up = if iy + 1 < n { self.grid.row_start[iy + 1] } else { 0 };
            let down = if iy > 0 { self.grid.row_start[iy - 1] } else { 0 };
            let here = self.grid.row_start[iy];
            for (k, slot) in row.iter_mut().enumerate() {
                let iz = iy + k;
                if k == 0 || row_frozen || (self.freeze_right && iz == n - 1) {
                    *slot = 0.0;
                    continue;
                }
                let c = state[here + k];
                let mut d = 0.0;
                if qy > 0.0 {
                    d += qy * (state[up + k - 1] - c);
                }
                if py > 0.0 {
                    d += py * (state[down + k + 1] - c);
                }
                let qz = self.qv[iz];
                if qz > 0.0 {
                    d += qz * (state[here + k + 1] - c);
                }
                let pz = self.pv[iz];
                if pz > 0.0 {
                    d += pz * (state[here + k - 1] - c);
                }
                *slot = d;
            }
        });
    }
}

fn axpy_into(out: &mut [f64], base: &[f64], c: f64, dir: &[f64]) {
    out.par_iter_mut()
        .zip(base.par_iter().zip(dir.par_iter()))
        .for_each(|(o, (b, d))| *o = b + c * d);
}

/// Solves the kernel ODE from the spin-pair initial data of a deterministic
/// configuration. The grid is the configuration window extended one site to
/// the right so that forward differences cover the full window.
pub fn solve_scalar_kernel(
    eta0: &Configuration,
    rates: &RateProfile,
    t: f64,
    opts: &SolveOptions,
) -> Result<ScalarKernel, KernelError> {
    let theta = rates.theta();
    let variant = super::variant_for(eta0);
    let window = eta0.window();
    // sigma_{y,z}(eta_0), counting particles of the window in [y, z).
    let init = |y: i64, z: i64| spin_weight(eta0.count_in(y, z), theta);
    solve_scalar_kernel_from(&init, window, rates, t, variant, opts)
}

/// Solves the kernel ODE from arbitrary initial data `K_0(y,z)` (for
/// example [`super::bernoulli_initial`]).
pub fn solve_scalar_kernel_from(
    init: &dyn Fn(i64, i64) -> f64,
    window: Window,
    rates: &RateProfile,
    t: f64,
    variant: KernelVariant,
    opts: &SolveOptions,
) -> Result<ScalarKernel, KernelError> {
    if !(t >= 0.0) {
        return Err(KernelError::NegativeTime(t));
    }
    let grid_window = Window::new(window.lo, window.hi + 1).expect("nonempty");
    let n = grid_window.len();
    let grid = TriGrid::new(n);

    let qv: Vec<f64> = grid_window.sites().map(|x| rates.q(x)).collect();
    let pv: Vec<f64> = grid_window.sites().map(|x| rates.p(x)).collect();
    // An edge is frozen exactly when the dual stencil would step off the
    // grid there.
    let freeze_left = pv[0] > 0.0;
    let freeze_right = qv[n - 1] > 0.0;

    let buffer = opts.buffer.unwrap_or_else(|| required_buffer(t, rates));
    let (trusted_lo, trusted_hi) = if t == 0.0 {
        (grid_window.lo, grid_window.hi)
    } else {
        (
            if freeze_left { window.lo + buffer as i64 } else { grid_window.lo },
            if freeze_right { window.hi - buffer as i64 } else { grid_window.hi },
        )
    };
    if trusted_lo > trusted_hi {
        return Err(KernelError::WindowTooSmall { t, required: buffer });
    }
    let trusted = Window::new(trusted_lo, trusted_hi).expect("nonempty");

    let mut values = vec![0.0f64; grid.len()];
    for iy in 0..n {
        let y = grid_window.lo + iy as i64;
        for iz in iy..n {
            let z = grid_window.lo + iz as i64;
            values[grid.idx(iy, iz)] = if iy == iz { 1.0 } else { init(y, z) };
        }
    }

    if t > 0.0 {
        let max_rate = rates.max_total_rate().max(1e-12);
        let dt_cap = opts.dt.unwrap_or(0.1 / max_rate);
        let steps = (t / dt_cap).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let sys = System { grid, qv, pv, freeze_left, freeze_right };

        let len = values.len();
        let mut k1 = vec![0.0; len];
        let mut k2 = vec![0.0; len];
        let mut k3 = vec![0.0; len];
        let mut k4 = vec![0.0; len];
        let mut tmp = vec![0.0; len];

        for step in 0..steps {
            sys.stage(&values, &mut k1);
            axpy_into(&mut tmp, &values, 0.5 * dt, &k1);
            sys.stage(&tmp, &mut k2);
            axpy_into(&mut tmp, &values, 0.5 * dt, &k2);
            sys.stage(&tmp, &mut k3);
            axpy_into(&mut tmp, &values, dt, &k3);
            sys.stage(&tmp, &mut k4);
            let sixth = dt / 6.0;
            let max_abs = values
                .par_iter_mut()
                .zip(k1.par_iter().zip(k2.par_iter()).zip(k3.par_iter().zip(k4.par_iter())))
                .map(|(v, ((a, b), (c, d)))| {
                    *v += sixth * (a + 2.0 * b + 2.0 * c + d);
                    v.abs()
                })
                .reduce(|| 0.0, f64::max);
            if opts.audit && !(max_abs <= 1.0 + opts.audit_slack) {
                return Err(KernelError::Unstable { step, max_abs });
            }
        }
    }

    Ok(ScalarKernel::from_parts(grid_window, trusted, t, rates.theta(), variant, values))
}

/// Translation-invariant fast path for homogeneous rates: solves the
/// one-dimensional gap system `u_g = K(y, y+g)` with
/// `du_g/dt = (p+q)(u_{g+1} + u_{g-1} - 2 u_g)`, `u_0 = 1` pinned, and
/// returns `u[0..=gmax]`.
///
/// `init(g)` supplies the initial data for `g >= 1` (for the full-occupancy
/// maximal initial condition this is `(-theta)^g`).
pub fn solve_translation_invariant(
    init: &dyn Fn(u64) -> f64,
    rates: &RateProfile,
    t: f64,
    gmax: usize,
    opts: &SolveOptions,
) -> Result<Vec<f64>, KernelError> {
    if !(t >= 0.0) {
        return Err(KernelError::NegativeTime(t));
    }
    if !rates.is_homogeneous() {
        return Err(KernelError::NotHomogeneous);
    }
    let rate = rates.max_total_rate(); // p + q for homogeneous profiles
    let buffer = opts.buffer.unwrap_or_else(|| required_buffer(t, rates));
    let gtot = gmax + buffer + 1;
    let mut u = vec![0.0f64; gtot + 1];
    u[0] = 1.0;
    for g in 1..=gtot {
        u[g] = init(g as u64);
    }
    if t == 0.0 {
        u.truncate(gmax + 1);
        return Ok(u);
    }
    let dt_cap = opts.dt.unwrap_or(0.1 / rate.max(1e-12));
    let steps = (t / dt_cap).ceil().max(1.0) as usize;
    let dt = t / steps as f64;

    let deriv = |s: &[f64], out: &mut [f64]| {
        out[0] = 0.0;
        out[gtot] = 0.0;
        for g in 1..gtot {
            out[g] = rate * (s[g + 1] + s[g - 1] - 2.0 * s[g]);
        }
    };
    let mut k1 = vec![0.0; gtot + 1];
    let mut k2 = vec![0.0; gtot + 1];
    let mut k3 = vec![0.0; gtot + 1];
    let mut k4 = vec![0.0; gtot + 1];
    let mut tmp = vec![0.0; gtot + 1];
    for step in 0..steps {
        deriv(&u, &mut k1);
        for i in 0..=gtot {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        deriv(&tmp, &mut k2);
        for i in 0..=gtot {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        deriv(&tmp, &mut k3);
        for i in 0..=gtot {
            tmp[i] = u[i] + dt * k3[i];
        }
        deriv(&tmp, &mut k4);
        let mut max_abs = 0.0f64;
        for i in 0..=gtot {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            max_abs = max_abs.max(u[i].abs());
        }
        if opts.audit && !(max_abs <= 1.0 + opts.audit_slack) {
            return Err(KernelError::Unstable { step, max_abs });
        }
    }
    u.truncate(gmax + 1);
    Ok(u)
}
