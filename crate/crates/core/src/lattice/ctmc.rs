//! Exact expectations on small windows via uniformization.
//!
//! The full `2^L`-state generator is exponentiated through the Poisson-
//! weighted series of the uniformized transition matrix. The series is
//! truncated once the remaining Poisson mass times the sup norm of the
//! observable drops below 1e-13, keeping the truncation error of bounded
//! observables under 1e-12.

use super::{BoundaryMode, Configuration, LatticeError, RateProfile};

/// Hard cap on the window length (state space `2^L`).
pub const CTMC_MAX_SITES: usize = 14;

const POISSON_TAIL: f64 = 1e-13;

/// Exact `E_eta[observable(eta_t)]` for the mixed system on a window of at
/// most [`CTMC_MAX_SITES`] sites.
pub fn exact_ctmc<F>(
    eta0: &Configuration,
    rates: &RateProfile,
    t: f64,
    observable: F,
) -> Result<f64, LatticeError>
where
    F: Fn(&Configuration) -> f64,
{
    if !(t >= 0.0) {
        return Err(LatticeError::NegativeTime(t));
    }
    let window = eta0.window();
    let l = window.len();
    if l > CTMC_MAX_SITES {
        return Err(LatticeError::WindowTooLarge(l, CTMC_MAX_SITES));
    }
    if eta0.boundary() == BoundaryMode::Periodic && !rates.is_homogeneous() {
        return Err(LatticeError::PeriodicNeedsHomogeneous);
    }
    if t == 0.0 {
        return Ok(observable(eta0));
    }
    let theta = rates.theta();
    let nstates = 1usize << l;

    // Observable vector over all states.
    let mut scratch = Configuration::empty(window, eta0.boundary())?;
    let mut f = vec![0.0f64; nstates];
    for (s, fs) in f.iter_mut().enumerate() {
        for i in 0..l {
            scratch.set(window.lo + i as i64, s & (1 << i) != 0)?;
        }
        *fs = observable(&scratch);
    }
    let f_sup = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // Transition targets per (site, direction), shared by all states.
    #[derive(Clone, Copy)]
    enum Hop {
        To(usize),
        Sink,
        None,
    }
    let hop = |i: usize, left: bool| -> Hop {
        let x = window.lo + i as i64;
        let to = if left { x - 1 } else { x + 1 };
        if window.contains(to) {
            return Hop::To(window.index(to));
        }
        match eta0.boundary() {
            BoundaryMode::Periodic => Hop::To(if left { l - 1 } else { 0 }),
            BoundaryMode::KilledAtZero if left && x == 0 => Hop::Sink,
            _ => Hop::None,
        }
    };
    let mut moves: Vec<(usize, f64, Hop)> = Vec::new();
    for i in 0..l {
        let x = window.lo + i as i64;
        let ql = rates.q(x);
        if ql > 0.0 {
            if let h @ (Hop::To(_) | Hop::Sink) = hop(i, true) {
                moves.push((i, ql, h));
            }
        }
        let pr = rates.p(x + 1);
        if pr > 0.0 {
            if let h @ (Hop::To(_) | Hop::Sink) = hop(i, false) {
                moves.push((i, pr, h));
            }
        }
    }

    // Uniformization rate: an upper bound on the exit rate of any state.
    let lambda: f64 = moves.iter().map(|&(_, r, _)| r).sum::<f64>().max(1e-300);
    let lt = lambda * t;

    // One step of the uniformized chain applied to a distribution.
    let step = |v: &[f64], out: &mut [f64]| {
        out.copy_from_slice(v);
        for s in 0..nstates {
            let mass = v[s];
            if mass == 0.0 {
                continue;
            }
            for &(i, rate, h) in &moves {
                if s & (1 << i) == 0 {
                    continue;
                }
                let w = mass * rate / lambda;
                out[s] -= w;
                match h {
                    Hop::Sink => {
                        out[s & !(1 << i)] += w;
                    }
                    Hop::To(j) => {
                        let src_cleared = s & !(1 << i);
                        if s & (1 << j) == 0 {
                            out[src_cleared | (1 << j)] += w;
                        } else {
                            // Collision: annihilate clears both bits,
                            // coalesce keeps the target bit.
                            if theta > 0.0 {
                                out[src_cleared & !(1 << j)] += w * theta;
                            }
                            if theta < 1.0 {
                                out[src_cleared] += w * (1.0 - theta);
                            }
                        }
                    }
                    Hop::None => unreachable!(),
                }
            }
        }
    };

    let mut v = vec![0.0f64; nstates];
    let mut s0 = 0usize;
    for i in 0..l {
        if eta0.occupied(window.lo + i as i64) {
            s0 |= 1 << i;
        }
    }
    v[s0] = 1.0;
    let mut next = vec![0.0f64; nstates];

    // Poisson weights in log space to survive large lambda*t.
    let log_lt = lt.ln();
    let mut result = 0.0;
    let mut cumulative = 0.0;
    let mut k = 0u64;
    let tol = POISSON_TAIL / f64::max(1.0, f_sup);
    loop {
        let log_w = -lt + k as f64 * log_lt - libm::lgamma(k as f64 + 1.0);
        let w = log_w.exp();
        if w > 0.0 {
            let inner: f64 = v.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
            result += w * inner;
            cumulative += w;
        }
        if 1.0 - cumulative < tol && k as f64 > lt {
            break;
        }
        step(&v, &mut next);
        std::mem::swap(&mut v, &mut next);
        k += 1;
        if k > 100_000 {
            break;
        }
    }
    Ok(result)
}
