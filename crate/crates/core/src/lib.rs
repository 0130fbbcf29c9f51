//! Simulation and exact finite-volume analysis of the East process on the
//! positive quadrant of `Z^d`.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: points, boxes, oriented boundaries, the Knight graph.
//! * [`config`]: packed configurations, product measures, the East constraint.
//! * [`dynamics`]: event-driven simulation, infection times, front sets.
//! * [`spectral`]: generators, spectral gaps, Dirichlet eigenvalues,
//!   generalised block chains and uniformization.
//! * [`pathspace`]: legal paths, energy barriers and bottlenecks.
//! * [`experiments`]: theory predictions, cutoff curves, shape rendering and
//!   the command-line front end.
//!
//! Bit convention throughout: `1` is a particle, `0` is a vacancy. Vacancies
//! facilitate their upper neighbours.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod pathspace;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};

/// `|log2 q|`, the small-`q` scale parameter.
pub fn theta_q(q: f64) -> f64 {
    q.log2().abs()
}
