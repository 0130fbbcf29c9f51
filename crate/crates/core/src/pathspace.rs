//! Legal paths on configuration space: reachability, energy barriers and
//! bottlenecks.
//!
//! States are packed indices with bit `i` holding the site of rank `i`.
//! Predicates on configuration sets take such an index.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{check_enumerable, BoundaryCondition, Configuration, ConstraintTable, ProductMeasure};
use crate::dynamics::{run_trajectory, Domain, InitialState, RunOptions, Window};
use crate::error::{invalid, Error, Result};
use crate::lattice::{BoxShape, Point, Region};
use crate::rng::{substream, worker_pool};
use crate::spectral::{build_generator, hitting_tail};

/// One legal update of a path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flip {
    pub site: Point,
    pub bit: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reachability {
    pub reachable: bool,
    /// Legal flips from the start to the first target state found; empty
    /// when unreachable or when the start is already a target.
    pub path: Vec<Flip>,
}

impl Reachability {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.path)?)
    }
}

/// Implicit graph of `σ`-legal single-site flips on `Ω_region`.
pub struct ConfigGraph<'a> {
    region: &'a Region,
    table: ConstraintTable,
}

impl<'a> ConfigGraph<'a> {
    pub fn new(region: &'a Region, sigma: &BoundaryCondition) -> Result<Self> {
        check_enumerable(region.len())?;
        Ok(ConfigGraph {
            region,
            table: ConstraintTable::new(region, sigma),
        })
    }

    pub fn states(&self) -> u64 {
        1u64 << self.region.len()
    }

    /// States reachable from `s` by one legal flip, with the flipped rank.
    pub fn neighbors(&self, s: u64) -> impl Iterator<Item = (usize, u64)> + '_ {
        (0..self.region.len())
            .filter(move |&r| self.table.allows_state(r, s))
            .map(move |r| (r, s ^ (1 << r)))
    }

    fn flip(&self, from: u64, to: u64) -> Flip {
        let r = (from ^ to).trailing_zeros() as usize;
        Flip {
            site: self.region.site(r).clone(),
            bit: ((to >> r) & 1) as u8,
        }
    }

    fn path_to(&self, parent: &HashMap<u64, u64>, mut s: u64) -> Vec<Flip> {
        let mut out = Vec::new();
        while let Some(&prev) = parent.get(&s) {
            out.push(self.flip(prev, s));
            s = prev;
        }
        out.reverse();
        out
    }
}

fn all_ones_state(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Breadth-first search from `from` to any state satisfying `target`.
pub fn reachable(
    region: &Region,
    sigma: &BoundaryCondition,
    from: &Configuration,
    target: impl Fn(u64) -> bool,
) -> Result<Reachability> {
    let g = ConfigGraph::new(region, sigma)?;
    if from.len() != region.len() {
        return Err(invalid("start configuration has the wrong length"));
    }
    let start = from.to_index();
    bfs(&g, start, &target, &|_| false)
}

fn bfs(g: &ConfigGraph, start: u64, target: &dyn Fn(u64) -> bool, blocked: &dyn Fn(u64) -> bool) -> Result<Reachability> {
    if blocked(start) {
        return Ok(Reachability {
            reachable: false,
            path: Vec::new(),
        });
    }
    if target(start) {
        return Ok(Reachability {
            reachable: true,
            path: Vec::new(),
        });
    }
    let mut parent: HashMap<u64, u64> = HashMap::new();
    let mut seen = vec![false; g.states() as usize];
    seen[start as usize] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for (_, t) in g.neighbors(s) {
            if seen[t as usize] || blocked(t) {
                continue;
            }
            seen[t as usize] = true;
            parent.insert(t, s);
            if target(t) {
                return Ok(Reachability {
                    reachable: true,
                    path: g.path_to(&parent, t),
                });
            }
            queue.push_back(t);
        }
    }
    Ok(Reachability {
        reachable: false,
        path: Vec::new(),
    })
}

/// Minimum over legal paths from the all-particle state to `{ω_x = 0}` of
/// the largest number of simultaneous vacancies in the region. The target
/// state itself is counted.
pub fn barrier(region: &Region, sigma: &BoundaryCondition, x: &Point) -> Result<u32> {
    let g = ConfigGraph::new(region, sigma)?;
    let r = region.rank_of(x).ok_or_else(|| Error::SiteNotInRegion(x.clone()))?;
    let n = region.len();
    let start = all_ones_state(n);
    let vac = |s: u64| n as u32 - s.count_ones();
    let mut best = vec![u32::MAX; g.states() as usize];
    let mut heap = BinaryHeap::new();
    best[start as usize] = 0;
    heap.push(Reverse((0u32, start)));
    while let Some(Reverse((cost, s))) = heap.pop() {
        if cost > best[s as usize] {
            continue;
        }
        if (s >> r) & 1 == 0 {
            return Ok(cost);
        }
        for (_, t) in g.neighbors(s) {
            let c = cost.max(vac(t));
            if c < best[t as usize] {
                best[t as usize] = c;
                heap.push(Reverse((c, t)));
            }
        }
    }
    Err(Error::Unreachable)
}

/// `V_{x,L} = (Λ_L + x − x_{Λ_L}) ∩ Z^d_+`: the side-`L` box with upper
/// corner `x`, clipped to the quadrant.
pub fn bottleneck_region(x: &Point, l: u64) -> Result<Region> {
    if !x.in_quadrant() {
        return Err(invalid("x must lie in the quadrant"));
    }
    let lo: Vec<i64> = x.coords().iter().map(|&c| (c - l as i64).max(0)).collect();
    let lengths: Vec<u64> = x.coords().iter().zip(&lo).map(|(&c, &o)| (c - o) as u64).collect();
    Ok(BoxShape::new(Point::new(lo), lengths)?.region())
}

/// A candidate set `A ⊂ Ω_{V_{x,L}}` given as a predicate on packed states
/// of [`bottleneck_region`].
pub struct BottleneckQuery<'a> {
    pub x: Point,
    pub l: u64,
    pub a: &'a (dyn Fn(u64) -> bool + Sync),
}

impl BottleneckQuery<'_> {
    pub fn region(&self) -> Result<Region> {
        bottleneck_region(&self.x, self.l)
    }
}

/// True iff every `σ_max`-legal path in `Ω_{V_{x,L}}` from the all-particle
/// state to `{ω_x = 0}` visits `A`.
pub fn is_bottleneck(query: &BottleneckQuery) -> Result<bool> {
    let region = query.region()?;
    let sigma = BoundaryCondition::maximal(&region);
    let g = ConfigGraph::new(&region, &sigma)?;
    let r = region.rank_of(&query.x).unwrap();
    let start = all_ones_state(region.len());
    let res = bfs(&g, start, &|s| (s >> r) & 1 == 0, &|s| (query.a)(s))?;
    Ok(!res.reachable)
}

/// `2^{−(nθ − d·n(n−1)/2)}` with `n = ⌊log2 L⌋`.
pub fn bottleneck_bound(d: usize, l: u64, q: f64) -> Result<f64> {
    if l == 0 {
        return Err(invalid("L must be positive"));
    }
    let theta = crate::theta_q(q);
    let n = f64::from(l.ilog2());
    Ok((-(n * theta - d as f64 * n * (n - 1.0) / 2.0)).exp2())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BottleneckReport {
    pub measure: f64,
    pub log2_measure: f64,
    /// Reference value `2^{−(nθ − d·n(n−1)/2)}`; not a bound on this `A`.
    pub reference: f64,
    pub log2_reference: f64,
}

/// Exact `μ(A)` on `V_{x,L}` with the reference value for comparison.
pub fn bottleneck_measure(query: &BottleneckQuery, q: f64) -> Result<BottleneckReport> {
    let region = query.region()?;
    let mu = ProductMeasure::new(q)?;
    let measure = mu.event_measure(region.len(), |s| (query.a)(s))?;
    let reference = bottleneck_bound(region.dim(), query.l, q)?;
    Ok(BottleneckReport {
        measure,
        log2_measure: measure.log2(),
        reference,
        log2_reference: reference.log2(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: usize,
    pub replicas: usize,
    /// `t · 2^{−(nθ − d·n(n−1)/2)}`, reported for comparison only.
    pub reference: f64,
}

/// Wilson score interval at the 95% level.
pub fn wilson_interval(hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let phat = hits as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let centre = (phat + z * z / (2.0 * nf)) / denom;
    let half = z * ((phat * (1.0 - phat) + z * z / (4.0 * nf)) / nf).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Down-set box `[0, x]` and the initial law: particles on `V_{x,L}`,
/// Bernoulli(p) elsewhere. `τ_x` only depends on this box.
fn escape_setup(x: &Point, l: u64) -> Result<(Region, Vec<bool>)> {
    let d = x.dim();
    if x.coords().iter().all(|&c| c <= l as i64) {
        return Err(invalid("x must lie outside Λ_L"));
    }
    let down = BoxShape::new(Point::origin(d), x.coords().iter().map(|&c| c as u64).collect())?.region();
    let v = bottleneck_region(x, l)?;
    let pinned = down.sites().iter().map(|y| v.contains(y)).collect();
    Ok((down, pinned))
}

/// Monte Carlo estimate of `P(τ_x < t)` started from particles on
/// `V_{x,L}` and a `μ`-distributed exterior.
pub fn escape_probability(x: &Point, l: u64, q: f64, t: f64, replicas: usize, seed: u64) -> Result<EscapeEstimate> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid("t must be finite and non-negative"));
    }
    let reference = t * bottleneck_bound(x.dim(), l, q)?;
    let (down, pinned) = escape_setup(x, l)?;
    if t == 0.0 {
        let (lo, hi) = wilson_interval(0, replicas);
        return Ok(EscapeEstimate {
            estimate: 0.0,
            ci_low: lo,
            ci_high: hi,
            hits: 0,
            replicas,
            reference,
        });
    }
    let domain = Domain::finite(down.clone());
    let pool = worker_pool();
    let hits: Vec<bool> = pool.install(|| {
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = substream(seed, r);
                let init = Configuration::from_bits(
                    pinned
                        .iter()
                        .map(|&pin| if pin { 1 } else { u8::from(rng.random::<f64>() >= q) }),
                );
                // Distinct stream for the dynamics of replica r.
                let opts = RunOptions::new(q, t, seed ^ 0x9e37_79b9_7f4a_7c15)
                    .stream(r)
                    .initial(InitialState::Given(init))
                    .window(Window::points_of(vec![x.clone()]))
                    .stop_when_infected(vec![x.clone()]);
                let (_, rec) = run_trajectory(&domain, &opts)?;
                Ok(rec.tau(x).is_some_and(|tau| tau < t))
            })
            .collect::<Result<Vec<bool>>>()
    })?;
    let k = hits.iter().filter(|h| **h).count();
    let (lo, hi) = wilson_interval(k, replicas);
    Ok(EscapeEstimate {
        estimate: k as f64 / replicas as f64,
        ci_low: lo,
        ci_high: hi,
        hits: k,
        replicas,
        reference,
    })
}

/// Exact value of the quantity estimated by [`escape_probability`], by
/// uniformization on the down-set box (at most 16 sites).
pub fn escape_probability_exact(x: &Point, l: u64, q: f64, t: f64) -> Result<f64> {
    let (down, pinned) = escape_setup(x, l)?;
    if down.len() > 16 {
        return Err(Error::SizeCap {
            what: "down-set box",
            size: down.len() as u64,
            cap: 16,
        });
    }
    let gm = build_generator(&down, &BoundaryCondition::all_ones(&down), q)?;
    let p = 1.0 - q;
    let pin_mask: u64 = pinned.iter().enumerate().filter(|(_, p)| **p).map(|(i, _)| 1u64 << i).sum();
    let free = pinned.iter().filter(|p| !**p).count() as i32;
    let pi0: Vec<f64> = (0..gm.dim() as u64)
        .map(|s| {
            if s & pin_mask != pin_mask {
                return 0.0;
            }
            let ones_free = (s & !pin_mask).count_ones() as i32;
            p.powi(ones_free) * q.powi(free - ones_free)
        })
        .collect();
    let r = down.rank_of(x).unwrap();
    let absorbing: Vec<bool> = (0..gm.dim() as u64).map(|s| (s >> r) & 1 == 0).collect();
    let tail = hitting_tail(&gm, &pi0, &absorbing, &[t])?;
    Ok(1.0 - tail[0])
}
