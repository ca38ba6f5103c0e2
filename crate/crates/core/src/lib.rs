//! Mixed annihilating/coalescing nearest-neighbour random walks on the
//! integer lattice, together with the skew-symmetric linear algebra needed
//! to evaluate their Pfaffian point-process kernels.
//!
//! The crate has five layers:
//!
//! * [`skew`] — dense antisymmetric matrices and Pfaffian evaluation
//!   (Parlett–Reid with pivoting, Laplace expansion, and the classical
//!   Pfaffian identities used as internal cross-checks);
//! * [`lattice`] — exact event-driven simulation of the particle system on a
//!   finite window, plus a uniformization-based expectation oracle for small
//!   windows;
//! * [`kernel`] — the scalar kernel `K_t(y,z)` solved from its lattice ODE
//!   system and assembled into 2x2-block matrix kernels whose Pfaffians
//!   predict spin products and correlation functions;
//! * [`continuum`] — closed-form diffusive-limit kernels (bulk, half-space,
//!   killed and reflected boundary) with analytic derivatives, and the
//!   rescaled lattice-vs-continuum comparison;
//! * [`stats`] — gap probabilities on the lattice and via discretized
//!   Fredholm Pfaffians, right-most particle tails, and the exponential
//!   gap-decay constant.
//!
//! Everything is deterministic given a seed; simulation ensembles are
//! embarrassingly parallel via rayon.

pub mod continuum;
pub mod kernel;
pub mod lattice;
pub mod skew;
pub mod stats;

pub use continuum::{ContinuumKernel, ContinuumVariant};
pub use kernel::{KernelVariant, MatrixKernel, ScalarKernel};
pub use lattice::{BoundaryMode, Configuration, RateProfile, TrajectorySample, Window};
pub use skew::SkewMatrix;
