//! Transient laws by uniformization: `P_t = Σ_k Pois(Λt; k) P^k` with
//! `P = I + L/Λ` and `Λ` the largest exit rate.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::config::{BoundaryCondition, Configuration};
use crate::error::{invalid, Error, Result};
use crate::lattice::{Point, Region};

use super::generator::{build_generator, GeneratorMatrix};

/// Truncation error bound on the Poisson tail.
pub const POISSON_TAIL: f64 = 1e-8;

/// Largest state space handled here.
pub const TRANSIENT_STATE_CAP: usize = 1 << 16;

const TERM_BUDGET: usize = 50_000_000;

/// Poisson(`m`) weights `w_0..w_K` with `Σ_{k>K} w_k ≤ tail`.
fn poisson_weights(m: f64, tail: f64) -> Result<Vec<f64>> {
    if m == 0.0 {
        return Ok(vec![1.0]);
    }
    let lm = m.ln();
    let mut out = Vec::new();
    let mut cum = 0.0;
    let mut k = 0usize;
    loop {
        let w = (-m + k as f64 * lm - ln_gamma(k as f64 + 1.0)).exp();
        out.push(w);
        cum += w;
        if (k as f64) > m && 1.0 - cum <= tail {
            return Ok(out);
        }
        k += 1;
        if k > TERM_BUDGET {
            return Err(Error::SizeCap {
                what: "uniformization terms",
                size: k as u64,
                cap: TERM_BUDGET as u64,
            });
        }
    }
}

/// One uniformized step `y = x P`, optionally killing mass on `absorbing`.
fn step(gm: &GeneratorMatrix, rate: f64, x: &[f64], y: &mut [f64], tmp: &mut [f64], absorbing: Option<&[bool]>) {
    gm.apply_left(x, tmp);
    for i in 0..x.len() {
        y[i] = x[i] + tmp[i] / rate;
    }
    if let Some(a) = absorbing {
        for (yi, &dead) in y.iter_mut().zip(a) {
            if dead {
                *yi = 0.0;
            }
        }
    }
}

fn run(
    gm: &GeneratorMatrix,
    pi0: &[f64],
    times: &[f64],
    absorbing: Option<&[bool]>,
    mut visit: impl FnMut(usize, f64, &[f64]),
) -> Result<()> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("times must be finite and non-negative"));
    }
    if pi0.len() != gm.dim() {
        return Err(invalid("initial law has the wrong length"));
    }
    let rate = gm.max_exit_rate();
    let mut x = pi0.to_vec();
    if let Some(a) = absorbing {
        for (xi, &dead) in x.iter_mut().zip(a) {
            if dead {
                *xi = 0.0;
            }
        }
    }
    if rate == 0.0 {
        for k in 0..times.len() {
            visit(k, 1.0, &x);
        }
        return Ok(());
    }
    let weights: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| poisson_weights(rate * t, POISSON_TAIL))
        .collect::<Result<_>>()?;
    let kmax = weights.iter().map(Vec::len).max().unwrap_or(0);
    let mut y = vec![0.0; x.len()];
    let mut tmp = vec![0.0; x.len()];
    for k in 0..kmax {
        for (i, w) in weights.iter().enumerate() {
            if k < w.len() && w[k] > 0.0 {
                visit(i, w[k], &x);
            }
        }
        if k + 1 < kmax {
            step(gm, rate, &x, &mut y, &mut tmp, absorbing);
            std::mem::swap(&mut x, &mut y);
        }
    }
    Ok(())
}

/// Law at each time in `times` from the initial law `pi0`.
pub fn evolve(gm: &GeneratorMatrix, pi0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut out = vec![vec![0.0; gm.dim()]; times.len()];
    run(gm, pi0, times, None, |i, w, x| {
        for (o, v) in out[i].iter_mut().zip(x) {
            *o += w * v;
        }
    })?;
    Ok(out)
}

/// `P_{π0}(τ_A > t)` for each `t`, with `A` the absorbing states.
pub fn hitting_tail(gm: &GeneratorMatrix, pi0: &[f64], absorbing: &[bool], times: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; times.len()];
    run(gm, pi0, times, Some(absorbing), |i, w, x| {
        out[i] += w * x.iter().sum::<f64>();
    })?;
    Ok(out)
}

/// `½ Σ |π − μ|`.
pub fn total_variation(pi: &[f64], mu: &[f64]) -> f64 {
    0.5 * pi.iter().zip(mu).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[derive(Clone, Debug)]
pub enum StartLaw {
    State(Configuration),
    Stationary,
    Distribution(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransientPoint {
    pub t: f64,
    pub tv: f64,
    /// `P(τ_target > t)`; present when a target was given.
    pub tail: Option<f64>,
    pub distribution: Vec<f64>,
}

/// Law at time `t`, its distance to `μ`, and the survival probability of
/// the target site staying occupied, on a finite region.
pub fn transient_tv(
    region: &Region,
    sigma: &BoundaryCondition,
    q: f64,
    start: &StartLaw,
    target: Option<&Point>,
    times: &[f64],
) -> Result<Vec<TransientPoint>> {
    let gm = build_generator(region, sigma, q)?;
    if gm.dim() > TRANSIENT_STATE_CAP {
        return Err(Error::SizeCap {
            what: "transient state space",
            size: gm.dim() as u64,
            cap: TRANSIENT_STATE_CAP as u64,
        });
    }
    let pi0 = match start {
        StartLaw::State(c) => {
            if c.len() != region.len() {
                return Err(invalid("start configuration has the wrong length"));
            }
            let mut v = vec![0.0; gm.dim()];
            v[c.to_index() as usize] = 1.0;
            v
        }
        StartLaw::Stationary => gm.weights().to_vec(),
        StartLaw::Distribution(v) => {
            let s: f64 = v.iter().sum();
            if v.len() != gm.dim() || v.iter().any(|x| *x < 0.0) || (s - 1.0).abs() > 1e-9 {
                return Err(invalid("start distribution must be a probability vector on the state space"));
            }
            v.clone()
        }
    };
    let dists = evolve(&gm, &pi0, times)?;
    let tails = match target {
        Some(x) => {
            let r = region.rank_of(x).ok_or_else(|| Error::SiteNotInRegion(x.clone()))?;
            let absorbing: Vec<bool> = (0..gm.dim()).map(|s| (s >> r) & 1 == 0).collect();
            Some(hitting_tail(&gm, &pi0, &absorbing, times)?)
        }
        None => None,
    };
    Ok(times
        .iter()
        .zip(dists)
        .enumerate()
        .map(|(i, (&t, dist))| TransientPoint {
            t,
            tv: total_variation(&dist, gm.weights()),
            tail: tails.as_ref().map(|v| v[i]),
            distribution: dist,
        })
        .collect())
}
