use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::Point;
use crate::rng::worker_pool;

use super::{run_trajectory, Domain, RunOptions, StopReason, Window};

/// Sample mean of `τ_x` at `x = ⌊n · direction⌋` from `ω*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingEstimate {
    pub target: Point,
    pub n: f64,
    pub mean: f64,
    pub stderr: f64,
    pub replicas: usize,
    pub samples: Vec<f64>,
}

impl HittingEstimate {
    pub fn point(&self) -> HittingPoint {
        HittingPoint {
            n: self.n,
            mean: self.mean,
            stderr: self.stderr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingPoint {
    pub n: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Lattice target `⌊n · direction⌋`. The direction need not be normalised.
pub fn hitting_target(direction: &[f64], n: f64) -> Result<Point> {
    if direction.is_empty() {
        return Err(invalid("direction must have at least one coordinate"));
    }
    if direction.iter().any(|c| !c.is_finite() || *c < 0.0) || direction.iter().all(|&c| c == 0.0) {
        return Err(invalid("direction must be non-negative and non-zero"));
    }
    if !(n >= 0.0) || !n.is_finite() {
        return Err(invalid("n must be a finite non-negative number"));
    }
    Ok(Point::new(
        direction
            .iter()
            .map(|c| (n * c + 1e-12).floor() as i64)
            .collect::<Vec<_>>(),
    ))
}

/// Independent replicas of `τ_{⌊n·direction⌋}` on the lazy quadrant. Replica
/// `r` uses substream `r` of `seed`.
pub fn mean_hitting(
    direction: &[f64],
    n: f64,
    replicas: usize,
    q: f64,
    seed: u64,
    max_events: u64,
) -> Result<HittingEstimate> {
    if replicas < 2 {
        return Err(invalid("at least two replicas are needed for a standard error"));
    }
    let target = hitting_target(direction, n)?;
    let d = target.dim();
    let domain = Domain::Quadrant { d };
    let base = RunOptions::new(q, f64::INFINITY, seed)
        .window(Window::points_of(vec![target.clone()]))
        .stop_when_infected(vec![target.clone()])
        .max_events(max_events);
    let pool = worker_pool();
    let samples: Vec<f64> = pool.install(|| {
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| {
                let opts = base.clone().stream(r);
                let (traj, record) = run_trajectory(&domain, &opts)?;
                debug_assert_eq!(traj.stop, StopReason::TargetsInfected);
                Ok(record.tau(&target).unwrap_or(f64::INFINITY))
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let (mean, stderr) = mean_stderr(&samples);
    Ok(HittingEstimate {
        target,
        n,
        mean,
        stderr,
        replicas,
        samples,
    })
}

pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub velocity: f64,
    /// `−2 log2(v) / θ_q²`.
    pub exponent: f64,
}

/// Weighted least squares of mean `τ` against `n` with weights `1/stderr²`.
/// Unit weights are used if any standard error is zero.
pub fn velocity_fit(points: &[HittingPoint], q: f64) -> Result<VelocityFit> {
    if points.len() < 3 {
        return Err(invalid("velocity fit needs at least three points"));
    }
    if points.windows(2).any(|w| w[1].n <= w[0].n) {
        return Err(invalid("n must be strictly increasing"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid("q must lie in (0,1)"));
    }
    let unit = points.iter().any(|p| !(p.stderr > 0.0));
    let w: Vec<f64> = points
        .iter()
        .map(|p| if unit { 1.0 } else { 1.0 / (p.stderr * p.stderr) })
        .collect();
    let sw: f64 = w.iter().sum();
    let sx: f64 = points.iter().zip(&w).map(|(p, w)| w * p.n).sum();
    let sy: f64 = points.iter().zip(&w).map(|(p, w)| w * p.mean).sum();
    let xbar = sx / sw;
    let ybar = sy / sw;
    let sxx: f64 = points.iter().zip(&w).map(|(p, w)| w * (p.n - xbar).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .zip(&w)
        .map(|(p, w)| w * (p.n - xbar) * (p.mean - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let slope_stderr = if unit {
        let rss: f64 = points
            .iter()
            .map(|p| (p.mean - intercept - slope * p.n).powi(2))
            .sum();
        (rss / (points.len() as f64 - 2.0) / sxx).sqrt()
    } else {
        (1.0 / sxx).sqrt()
    };
    if !(slope > 0.0) {
        return Err(invalid(format!("fitted slope {slope} is not positive; velocity undefined")));
    }
    let velocity = 1.0 / slope;
    let theta = crate::theta_q(q);
    Ok(VelocityFit {
        slope,
        intercept,
        slope_stderr,
        velocity,
        exponent: -2.0 * velocity.log2() / (theta * theta),
    })
}
