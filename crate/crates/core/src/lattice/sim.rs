//! Exact event-driven simulation.
//!
//! A single global exponential clock runs at the configuration's total
//! active rate; the firing event is selected categorically from an indexed
//! sum tree over per-site left/right rates, so each event costs `O(log L)`.
//! Only occupied sites carry rate. On a jump onto an occupied site the
//! reaction is annihilation with probability theta, coalescence otherwise.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    BoundaryMode, Configuration, LatticeError, RateProfile, TrajectorySample, Window,
};

/// SplitMix64 step; used to derive independent per-trajectory streams from
/// `(seed, index)`.
pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fenwick tree over nonnegative f64 rates with prefix-sum sampling.
struct RateTree {
    tree: Vec<f64>,
    leaves: Vec<f64>,
}

impl RateTree {
    fn new(n: usize) -> Self {
        Self { tree: vec![0.0; n + 1], leaves: vec![0.0; n] }
    }

    fn set(&mut self, i: usize, value: f64) {
        let delta = value - self.leaves[i];
        if delta == 0.0 {
            return;
        }
        self.leaves[i] = value;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut sum = 0.0;
        let mut k = self.tree.len() - 1;
        while k > 0 {
            sum += self.tree[k];
            k -= k & k.wrapping_neg();
        }
        sum
    }

    /// Largest index whose prefix sum is <= target; assumes target < total.
    fn select(&self, mut target: f64) -> usize {
        let mut pos = 0usize;
        let mut mask = (self.tree.len() - 1).next_power_of_two();
        while mask > 0 {
            let next = pos + mask;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            mask >>= 1;
        }
        // pos counts the leaves fully covered; roundoff in the prefix sums
        // can push it one past the last leaf.
        pos.min(self.leaves.len() - 1)
    }

    /// Recomputes internal sums from the leaves, clearing float drift.
    fn rebuild(&mut self) {
        for v in &mut self.tree {
            *v = 0.0;
        }
        let leaves = self.leaves.clone();
        for v in &mut self.leaves {
            *v = 0.0;
        }
        for (i, v) in leaves.into_iter().enumerate() {
            self.set(i, v);
        }
    }
}

const REBUILD_INTERVAL: u64 = 1 << 14;

struct Engine<'a> {
    window: Window,
    boundary: BoundaryMode,
    rates: &'a RateProfile,
    occupancy: Vec<bool>,
    tree: RateTree,
}

#[derive(Clone, Copy)]
enum Target {
    Site(i64),
    Sink,
    Blocked,
}

impl<'a> Engine<'a> {
    fn new(eta: &Configuration, rates: &'a RateProfile) -> Result<Self, LatticeError> {
        if eta.boundary() == BoundaryMode::Periodic && !rates.is_homogeneous() {
            return Err(LatticeError::PeriodicNeedsHomogeneous);
        }
        let window = eta.window();
        let n = window.len();
        let mut engine = Engine {
            window,
            boundary: eta.boundary(),
            rates,
            occupancy: eta.occupancy_bits().to_vec(),
            tree: RateTree::new(2 * n),
        };
        for i in 0..n {
            if engine.occupancy[i] {
                engine.refresh_site(i);
            }
        }
        Ok(engine)
    }

    fn target(&self, x: i64, left: bool) -> Target {
        let to = if left { x - 1 } else { x + 1 };
        if self.window.contains(to) {
            return Target::Site(to);
        }
        match self.boundary {
            BoundaryMode::Periodic => {
                Target::Site(if left { self.window.hi } else { self.window.lo })
            }
            BoundaryMode::KilledAtZero if left && x == 0 => Target::Sink,
            _ => Target::Blocked,
        }
    }

    /// Rate of the jump out of `x` in the given direction, zero when the
    /// boundary blocks it. A particle at `x` jumps left at rate `q_x` and
    /// right at rate `p_{x+1}` (with periodic wrap on homogeneous profiles).
    fn jump_rate(&self, x: i64, left: bool) -> f64 {
        match self.target(x, left) {
            Target::Blocked => 0.0,
            Target::Sink => self.rates.q(x),
            Target::Site(_) => {
                if left {
                    self.rates.q(x)
                } else {
                    self.rates.p(x + 1)
                }
            }
        }
    }

    fn refresh_site(&mut self, i: usize) {
        let x = self.window.lo + i as i64;
        let occupied = self.occupancy[i];
        let (l, r) = if occupied {
            (self.jump_rate(x, true), self.jump_rate(x, false))
        } else {
            (0.0, 0.0)
        };
        self.tree.set(2 * i, l);
        self.tree.set(2 * i + 1, r);
    }

    fn set_occupied(&mut self, x: i64, value: bool) {
        let i = self.window.index(x);
        if self.occupancy[i] != value {
            self.occupancy[i] = value;
            self.refresh_site(i);
        }
    }

    fn occupied(&self, x: i64) -> bool {
        self.occupancy[self.window.index(x)]
    }
}

fn exp_variate<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.gen::<f64>();
    let u = if u <= 0.0 { f64::MIN_POSITIVE } else { u };
    -u.ln() / rate
}

/// Simulates one trajectory of the mixed system up to time `t`.
///
/// Deterministic given `(eta0, rates, t, seed)`; the RNG stream depends only
/// on the seed.
pub fn simulate(
    eta0: &Configuration,
    rates: &RateProfile,
    t: f64,
    seed: u64,
) -> Result<TrajectorySample, LatticeError> {
    if !(t >= 0.0) {
        return Err(LatticeError::NegativeTime(t));
    }
    let theta = rates.theta();
    let mut engine = Engine::new(eta0, rates)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut now = 0.0;
    let mut events = 0u64;
    let mut annihilations = 0u64;
    let mut coalescences = 0u64;

    loop {
        let total = engine.tree.total();
        if total <= 0.0 {
            break;
        }
        now += exp_variate(&mut rng, total);
        if now > t {
            break;
        }
        let leaf = engine.tree.select(rng.gen::<f64>() * total);
        if engine.tree.leaves[leaf] == 0.0 {
            // Roundoff in the prefix sums can select a dead leaf; the event
            // has probability zero, skip it.
            engine.tree.rebuild();
            continue;
        }
        let site = engine.window.lo + (leaf / 2) as i64;
        let left = leaf % 2 == 0;
        events += 1;
        match engine.target(site, left) {
            Target::Blocked => unreachable!("blocked direction carries zero rate"),
            Target::Sink => {
                engine.set_occupied(site, false);
            }
            Target::Site(to) => {
                engine.set_occupied(site, false);
                if engine.occupied(to) {
                    if theta > 0.0 && (theta >= 1.0 || rng.gen::<f64>() < theta) {
                        engine.set_occupied(to, false);
                        annihilations += 1;
                    } else {
                        coalescences += 1;
                    }
                } else {
                    engine.set_occupied(to, true);
                }
            }
        }
        if events % REBUILD_INTERVAL == 0 {
            engine.tree.rebuild();
        }
    }

    let mut config = Configuration::empty(eta0.window(), eta0.boundary())?;
    for (i, &occ) in engine.occupancy.iter().enumerate() {
        if occ {
            config.set(eta0.window().lo + i as i64, true)?;
        }
    }
    Ok(TrajectorySample { time: t, config, seed, event_count: events, annihilations, coalescences })
}

/// Runs `n` independent trajectories in parallel; trajectory `i` uses the
/// stream derived from `(seed, i)`.
pub fn simulate_ensemble(
    eta0: &Configuration,
    rates: &RateProfile,
    t: f64,
    seed: u64,
    n: usize,
) -> Result<Vec<TrajectorySample>, LatticeError> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| simulate(eta0, rates, t, mix_seed(seed, i)))
        .collect()
}

/// Reaction tables for the two-colour construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoColourMode {
    /// Colours start blue with probability `1/(1+theta)`. Collisions:
    /// `R+R -> R`, `R+B -> B`, `B+B -> R` w.p. theta else `B`. The blue
    /// marginal is the mixed model.
    Thinning,
    /// Colours start blue with probability `lambda`. Collisions:
    /// `R+R -> R`, `B+B -> B`, `B+R ->` fair coin. The blue marginal is the
    /// lambda-thinned coalescing system.
    StrongThinning,
}

/// A coloured trajectory: `config` is the full (coalescing) system, `blue`
/// flags its particles.
#[derive(Debug, Clone)]
pub struct ColouredSample {
    pub time: f64,
    pub config: Configuration,
    pub blue: Vec<bool>,
    pub seed: u64,
    pub event_count: u64,
}

impl ColouredSample {
    pub fn blue_at(&self, x: i64) -> bool {
        self.config.occupied(x) && self.blue[self.config.window().index(x)]
    }
}

/// Two-colour simulation: the full system moves as pure coalescence, colours
/// follow the mode's reaction table. Colours are assigned i.i.d. from the
/// mode's initial law before the dynamics start.
pub fn simulate_two_colour(
    eta0: &Configuration,
    rates: &RateProfile,
    t: f64,
    seed: u64,
    mode: TwoColourMode,
    lambda: f64,
) -> Result<ColouredSample, LatticeError> {
    if !(t >= 0.0) {
        return Err(LatticeError::NegativeTime(t));
    }
    let theta = rates.theta();
    let blue_prob = match mode {
        TwoColourMode::Thinning => 1.0 / (1.0 + theta),
        TwoColourMode::StrongThinning => {
            if !(lambda > 0.0 && lambda < 1.0) {
                return Err(LatticeError::ProbabilityOutOfRange(lambda));
            }
            lambda
        }
    };
    let mut engine = Engine::new(eta0, rates)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = eta0.window().len();
    let mut blue = vec![false; n];
    for i in 0..n {
        if engine.occupancy[i] {
            blue[i] = rng.gen::<f64>() < blue_prob;
        }
    }

    let mut now = 0.0;
    let mut events = 0u64;
    loop {
        let total = engine.tree.total();
        if total <= 0.0 {
            break;
        }
        now += exp_variate(&mut rng, total);
        if now > t {
            break;
        }
        let leaf = engine.tree.select(rng.gen::<f64>() * total);
        if engine.tree.leaves[leaf] == 0.0 {
            engine.tree.rebuild();
            continue;
        }
        let site = engine.window.lo + (leaf / 2) as i64;
        let left = leaf % 2 == 0;
        events += 1;
        match engine.target(site, left) {
            Target::Blocked => unreachable!("blocked direction carries zero rate"),
            Target::Sink => {
                engine.set_occupied(site, false);
            }
            Target::Site(to) => {
                let from_i = engine.window.index(site);
                let to_i = engine.window.index(to);
                let mover_blue = blue[from_i];
                engine.set_occupied(site, false);
                blue[from_i] = false;
                if engine.occupied(to) {
                    let target_blue = blue[to_i];
                    blue[to_i] = match (mode, mover_blue, target_blue) {
                        (TwoColourMode::Thinning, false, false) => false,
                        (TwoColourMode::Thinning, true, true) => {
                            !(theta > 0.0 && (theta >= 1.0 || rng.gen::<f64>() < theta))
                        }
                        (TwoColourMode::Thinning, _, _) => true,
                        (TwoColourMode::StrongThinning, false, false) => false,
                        (TwoColourMode::StrongThinning, true, true) => true,
                        (TwoColourMode::StrongThinning, _, _) => rng.gen::<f64>() < 0.5,
                    };
                } else {
                    engine.set_occupied(to, true);
                    blue[to_i] = mover_blue;
                }
            }
        }
        if events % REBUILD_INTERVAL == 0 {
            engine.tree.rebuild();
        }
    }

    let mut config = Configuration::empty(eta0.window(), eta0.boundary())?;
    for (i, &occ) in engine.occupancy.iter().enumerate() {
        if occ {
            config.set(eta0.window().lo + i as i64, true)?;
        } else {
            blue[i] = false;
        }
    }
    Ok(ColouredSample { time: t, config, blue, seed, event_count: events })
}

/// Parallel two-colour ensemble.
pub fn two_colour_ensemble(
    eta0: &Configuration,
    rates: &RateProfile,
    t: f64,
    seed: u64,
    n: usize,
    mode: TwoColourMode,
    lambda: f64,
) -> Result<Vec<ColouredSample>, LatticeError> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| simulate_two_colour(eta0, rates, t, mix_seed(seed, i), mode, lambda))
        .collect()
}
