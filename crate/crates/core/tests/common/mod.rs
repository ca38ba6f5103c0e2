//! Shared oracles for integration tests. Everything here is independent of
//! the library's solver paths: transition probabilities come from Bessel
//! series, PDE references from a plain finite-difference scheme.

#![allow(dead_code)]

/// Modified Bessel function of integer order via the ascending series.
/// Adequate for the argument range used in tests (x <= 60).
pub fn bessel_i(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    // term_0 = (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= half * half / (k * (k + n as f64));
        sum += term;
        if term < sum.abs() * 1e-18 || k > 500.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Law of a rate-1-each-way continuous-time simple random walk:
/// `P(X_t = x0 + n) = exp(-2t) I_|n|(2t)`.
pub fn walk_law(n: i64, t: f64) -> f64 {
    (-2.0 * t).exp() * bessel_i(n.unsigned_abs() as u32, 2.0 * t)
}

/// The same law wrapped onto a periodic window of `l` sites.
pub fn walk_law_periodic(n: i64, t: f64, l: i64) -> f64 {
    let mut p = 0.0;
    let mut m = 0i64;
    loop {
        let a = walk_law(n + m * l, t);
        let b = if m > 0 { walk_law(n - m * l, t) } else { 0.0 };
        p += a + b;
        if m > 2 && a + b < 1e-16 {
            break;
        }
        m += 1;
    }
    p
}

/// Probability that the walk started at `x0` sits in `[y, z)` at time `t`.
pub fn walk_in_interval(x0: i64, y: i64, z: i64, t: f64) -> f64 {
    (y..z).map(|x| walk_law(x - x0, t)).sum()
}

/// Finite-difference reference solution of the continuum kernel PDE
/// `dK/dt = (d^2/dy^2 + d^2/dz^2) K` on the triangle `{lo <= y <= z <= hi}`
/// with `K(y,y) = 1` pinned.
///
/// Boundary handling per variant:
/// * `Dirichlet` — outer edges frozen at initial data (bulk/half-space on a
///   buffered box);
/// * `Neumann` — reflecting edge at `lo` (killed model), right edge frozen;
/// * `Boundary(f)` — `K(lo, z)` forced to a prescribed function of `(t, z)`
///   (reflected model), right edge frozen.
pub enum PdeEdge {
    Dirichlet,
    Neumann,
    Boundary(Box<dyn Fn(f64, f64) -> f64>),
}

pub struct PdeSolution {
    pub lo: f64,
    pub dx: f64,
    pub n: usize,
    values: Vec<f64>,
}

impl PdeSolution {
    fn idx(&self, iy: usize, iz: usize) -> usize {
        iy * self.n + iz
    }

    pub fn value(&self, y: f64, z: f64) -> f64 {
        let iy = ((y - self.lo) / self.dx).round() as usize;
        let iz = ((z - self.lo) / self.dx).round() as usize;
        self.values[self.idx(iy, iz)]
    }
}

pub fn solve_pde_reference(
    init: &dyn Fn(f64, f64) -> f64,
    lo: f64,
    hi: f64,
    n: usize,
    t: f64,
    edge: PdeEdge,
) -> PdeSolution {
    let dx = (hi - lo) / (n - 1) as f64;
    let mut k = vec![0.0f64; n * n];
    for iy in 0..n {
        for iz in iy..n {
            let (y, z) = (lo + iy as f64 * dx, lo + iz as f64 * dx);
            k[iy * n + iz] = if iy == iz { 1.0 } else { init(y, z) };
        }
    }
    let dt = 0.2 * dx * dx; // forward Euler stability for the 2-D Laplacian
    let steps = (t / dt).ceil() as usize;
    let dt = t / steps as f64;
    let mut next = k.clone();
    let inv = 1.0 / (dx * dx);
    for step in 0..steps {
        let now = dt * step as f64;
        for iy in 0..n {
            for iz in (iy + 1)..n {
                // frozen outer edges
                if iz == n - 1 || (iy == 0 && matches!(edge, PdeEdge::Dirichlet)) {
                    next[iy * n + iz] = k[iy * n + iz];
                    continue;
                }
                if iy == 0 {
                    match &edge {
                        PdeEdge::Neumann => {
                            // ghost K(-dx, z) = K(dx, z); the stored
                            // diagonal supplies K(0, 0) = 1 when iz = 1.
                            let c = k[iz];
                            let lap_y = 2.0 * (k[n + iz] - c) * inv;
                            let lap_z = (k[iz + 1] + k[iz - 1] - 2.0 * c) * inv;
                            next[iz] = c + dt * (lap_y + lap_z);
                        }
                        PdeEdge::Boundary(f) => {
                            next[iz] = f(now + dt, lo + iz as f64 * dx);
                        }
                        PdeEdge::Dirichlet => unreachable!(),
                    }
                    continue;
                }
                let c = k[iy * n + iz];
                let up = k[(iy + 1) * n + iz]; // diagonal reads give 1
                let down = k[(iy - 1) * n + iz];
                let right = k[iy * n + iz + 1];
                let left = k[iy * n + iz - 1];
                next[iy * n + iz] = c + dt * inv * (up + down + right + left - 4.0 * c);
            }
        }
        std::mem::swap(&mut k, &mut next);
    }
    PdeSolution { lo, dx, n, values: k }
}
