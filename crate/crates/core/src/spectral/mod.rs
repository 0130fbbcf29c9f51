//! Exact finite-state analysis of East-type chains.
//!
//! Generators are assembled over an enumerated product state space and
//! symmetrised by `D^{1/2} L D^{-1/2}` with `D = diag μ`. Spectral gaps are
//! the smallest eigenvalue of `−S` after the stationary direction has been
//! shifted to the top of the spectrum; small problems are diagonalised
//! densely, larger ones with a restarted Lanczos iteration.

mod blocks;
mod eigen;
mod gaps;
mod generator;
mod transient;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use blocks::{star_chain, star_gap, BlockSpec, StarMode, STAR_STATE_CAP};
pub use eigen::DENSE_STATE_CAP;
pub use gaps::{
    best_subset_gap, dirichlet_eigenvalue, dirichlet_eigenvalue_region, ladder_gap_reference,
    spectral_gap, spectrum, trick_check, two_block_check, TrickReport, TwoBlockReport,
};
pub use generator::{build_generator, ChainSpec, GeneratorMatrix, Move, UnitSpace, SPARSE_STATE_CAP};
pub use transient::{
    evolve, hitting_tail, total_variation, transient_tv, StartLaw, TransientPoint, POISSON_TAIL,
};

/// Residual target relative to `‖L‖`.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Smallest positive eigenvalue of `−L`; `0` for reducible chains.
    pub gap: f64,
    /// `‖(−S)v − γv‖` for the returned eigenpair.
    pub residual: f64,
    /// Gershgorin bound on `‖L‖`.
    pub norm: f64,
    pub states: usize,
    pub ergodic: bool,
    /// States not reachable from the reference state (the last index, the
    /// all-particle configuration for East chains). Empty when ergodic.
    pub unreachable: Vec<u64>,
    /// Eigenvector of the symmetrised generator, when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eigenvector: Option<Vec<f64>>,
}

/// Spectral gap of an assembled generator.
pub fn gap_of(gm: &GeneratorMatrix, want_vector: bool) -> Result<SpectrumResult> {
    let n = gm.dim();
    let norm = gm.norm_bound();
    let seen = gm.reachable_from(n - 1);
    if seen.iter().any(|s| !s) {
        return Ok(SpectrumResult {
            gap: 0.0,
            residual: 0.0,
            norm,
            states: n,
            ergodic: false,
            unreachable: (0..n as u64).filter(|&s| !seen[s as usize]).collect(),
            eigenvector: None,
        });
    }
    if n == 1 {
        return Err(crate::error::invalid("a one-state chain has no spectral gap"));
    }
    let op = eigen::Deflated::new(gm);
    let pair = eigen::smallest_eigenpair(&op, RESIDUAL_TOL)?;
    Ok(SpectrumResult {
        gap: pair.value.max(0.0),
        residual: pair.residual,
        norm,
        states: n,
        ergodic: true,
        unreachable: Vec::new(),
        eigenvector: want_vector.then_some(pair.vector),
    })
}

#[cfg(test)]
mod tests;
