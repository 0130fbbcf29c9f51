//! Worst-case distance to equilibrium `d_n(t)` on the box `{0..n}^d`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete};

use crate::config::{BoundaryCondition, Configuration};
use crate::dynamics::{Domain, RunOptions, Simulator, DEFAULT_MAX_EVENTS};
use crate::error::{invalid, Error, Result};
use crate::lattice::BoxShape;
use crate::rng::worker_pool;
use crate::spectral::{build_generator, evolve, total_variation};

/// All `2^sites` initial states are evaluated up to this many sites.
pub const EXACT_ALL_STARTS_SITES: usize = 10;
/// The all-particle start alone is evaluated exactly up to this many sites.
pub const EXACT_SINGLE_START_SITES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffMode {
    /// `max_ω ‖P^t_ω − μ‖` over every start.
    Exact,
    /// `‖P^t_{1} − μ‖` from the all-particle start: a lower bound on `d_n(t)`.
    AllOnesLowerBound,
    /// Distance between the simulated law of the vacancy count from the
    /// all-particle start and its equilibrium Binomial law. A lower bound on
    /// the all-ones distance in expectation, biased upward by sampling
    /// noise of order `sqrt(sites/replicas)`.
    MonteCarloVacancyCount,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffPoint {
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffCurve {
    pub n: u64,
    pub d: usize,
    pub q: f64,
    pub sites: usize,
    pub mode: CutoffMode,
    pub points: Vec<CutoffPoint>,
}

impl CutoffCurve {
    /// First grid time at which the curve is at most `level`.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        self.points.iter().find(|p| p.value <= level).map(|p| p.t)
    }

    /// Grid width of the fall from 3/4 to 1/4.
    pub fn window_width(&self) -> Option<f64> {
        Some(self.crossing(0.25)? - self.crossing(0.75)?)
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("time grid must be non-empty, finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("time grid must be sorted"));
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(invalid("q must lie in (0, 1)"))
    }
}

/// Exact curve; the mode follows from the number of sites.
pub fn cutoff_curve(n: u64, d: usize, q: f64, times: &[f64]) -> Result<CutoffCurve> {
    check_q(q)?;
    check_grid(times)?;
    if d == 0 {
        return Err(invalid("d must be positive"));
    }
    let shape = BoxShape::cube(d, n);
    let sites = shape.site_count() as usize;
    if sites > EXACT_SINGLE_START_SITES {
        return Err(Error::SizeCap {
            what: "exact cutoff box",
            size: sites as u64,
            cap: EXACT_SINGLE_START_SITES as u64,
        });
    }
    let region = shape.region();
    let gm = build_generator(&region, &BoundaryCondition::all_ones(&region), q)?;
    let mu = gm.weights();
    let tv_from = |start: usize| -> Result<Vec<f64>> {
        let mut pi0 = vec![0.0; gm.dim()];
        pi0[start] = 1.0;
        Ok(evolve(&gm, &pi0, times)?
            .iter()
            .map(|p| total_variation(p, mu))
            .collect())
    };
    let (mode, values) = if sites <= EXACT_ALL_STARTS_SITES {
        let per_start: Vec<Vec<f64>> = worker_pool().install(|| {
            (0..gm.dim())
                .into_par_iter()
                .map(tv_from)
                .collect::<Result<_>>()
        })?;
        let values = (0..times.len())
            .map(|k| per_start.iter().map(|v| v[k]).fold(0.0, f64::max))
            .collect();
        (CutoffMode::Exact, values)
    } else {
        (CutoffMode::AllOnesLowerBound, tv_from(gm.dim() - 1)?)
    };
    Ok(CutoffCurve {
        n,
        d,
        q,
        sites,
        mode,
        points: times.iter().zip(values).map(|(&t, value)| CutoffPoint { t, value }).collect(),
    })
}

/// Monte Carlo curve from the all-particle start for boxes of any size.
pub fn cutoff_curve_mc(n: u64, d: usize, q: f64, times: &[f64], replicas: usize, seed: u64) -> Result<CutoffCurve> {
    check_q(q)?;
    check_grid(times)?;
    if replicas == 0 {
        return Err(invalid("replicas must be positive"));
    }
    let shape = BoxShape::cube(d, n);
    let sites = shape.site_count() as usize;
    let domain = Domain::finite(shape.region());
    let t_end = times.last().copied().unwrap().max(f64::MIN_POSITIVE);
    let counts: Vec<Vec<usize>> = worker_pool().install(|| {
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| {
                let opts = RunOptions::new(q, t_end, seed).stream(r);
                let mut sim = Simulator::new(&domain, &opts)?;
                times
                    .iter()
                    .map(|&t| {
                        if t > 0.0 {
                            sim.run(t, DEFAULT_MAX_EVENTS)?;
                        }
                        Ok(sim.configuration().map_or(0, |c: Configuration| c.vacancies()))
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<_>>()
    })?;
    let binom = Binomial::new(q, sites as u64).map_err(|e| invalid(e.to_string()))?;
    let law: Vec<f64> = (0..=sites as u64).map(|k| binom.pmf(k)).collect();
    let points = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut hist = vec![0.0; sites + 1];
            for c in &counts {
                hist[c[k]] += 1.0 / replicas as f64;
            }
            CutoffPoint {
                t,
                value: total_variation(&hist, &law),
            }
        })
        .collect();
    Ok(CutoffCurve {
        n,
        d,
        q,
        sites,
        mode: CutoffMode::MonteCarloVacancyCount,
        points,
    })
}
