use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::BoundaryCondition;
use crate::error::{invalid, Error, Result};
use crate::lattice::{oriented_boundary, BoxShape, Point, Region};
use crate::rng::substream;

use super::eigen::{self, Killed};
use super::generator::{build_generator, check_q, GeneratorMatrix};
use super::{gap_of, SpectrumResult, RESIDUAL_TOL};

/// Spectral gap of the East chain on `region` with boundary condition `σ`.
pub fn spectral_gap(region: &Region, sigma: &BoundaryCondition, q: f64) -> Result<SpectrumResult> {
    gap_of(&build_generator(region, sigma, q)?, false)
}

/// Full spectrum of `−L` in ascending order (dense sizes only).
pub fn spectrum(region: &Region, sigma: &BoundaryCondition, q: f64) -> Result<Vec<f64>> {
    let gm = build_generator(region, sigma, q)?;
    let op = Killed::new(&gm, |_| true);
    eigen::all_eigenvalues(&op)
}

/// Smallest eigenvalue of `−L` killed on `{ω_target = 0}`.
fn dirichlet_of(gm: &GeneratorMatrix, target_rank: usize) -> Result<f64> {
    let op = Killed::new(gm, |s| (s >> target_rank) & 1 == 1);
    Ok(eigen::smallest_eigenpair(&op, RESIDUAL_TOL)?.value)
}

/// `λ^D(Λ)` for a box at the origin, with `A = {ω_{x_Λ} = 0}`.
pub fn dirichlet_eigenvalue(shape: &BoxShape, q: f64) -> Result<f64> {
    if !shape.origin.is_origin() {
        return Err(invalid("the Dirichlet eigenvalue is defined for boxes at the origin"));
    }
    let region = shape.region();
    let sigma = BoundaryCondition::all_ones(&region);
    dirichlet_eigenvalue_region(&region, &sigma, q, &shape.corner())
}

/// Dirichlet eigenvalue on a general region, killed when `target` is vacant.
pub fn dirichlet_eigenvalue_region(
    region: &Region,
    sigma: &BoundaryCondition,
    q: f64,
    target: &Point,
) -> Result<f64> {
    let r = region
        .rank_of(target)
        .ok_or_else(|| Error::SiteNotInRegion(target.clone()))?;
    dirichlet_of(&build_generator(region, sigma, q)?, r)
}

/// Largest `γ(V)` over `V ⊆ Λ` with `{0, x_Λ} ⊆ V` (boundary condition `1`
/// on `∂↓V`). Ties go to the smaller set, then the lexicographically
/// smaller site list.
pub fn best_subset_gap(shape: &BoxShape, q: f64) -> Result<(Region, SpectrumResult)> {
    check_q(q)?;
    let region = shape.region();
    if region.len() > 12 {
        return Err(Error::SizeCap {
            what: "subset search box",
            size: region.len() as u64,
            cap: 12,
        });
    }
    if !shape.origin.is_origin() {
        return Err(invalid("subset search needs a box at the origin"));
    }
    let origin = shape.origin.clone();
    let corner = shape.corner();
    let inner: Vec<Point> = region
        .sites()
        .iter()
        .filter(|x| **x != origin && **x != corner)
        .cloned()
        .collect();
    let candidates: Vec<Result<(Region, SpectrumResult)>> = (0..1u64 << inner.len())
        .into_par_iter()
        .map(|mask| {
            let mut pts = vec![origin.clone(), corner.clone()];
            pts.extend(
                inner
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (mask >> i) & 1 == 1)
                    .map(|(_, x)| x.clone()),
            );
            pts.dedup();
            let v = Region::new(region.dim(), pts)?;
            let sigma = BoundaryCondition::all_ones(&v);
            let res = spectral_gap(&v, &sigma, q)?;
            Ok((v, res))
        })
        .collect();
    let mut best: Option<(Region, SpectrumResult)> = None;
    for c in candidates {
        let (v, res) = c?;
        let better = match &best {
            None => true,
            Some((bv, br)) => {
                let tol = 1e-12 * br.gap.abs().max(res.gap.abs());
                if res.gap > br.gap + tol {
                    true
                } else if res.gap < br.gap - tol {
                    false
                } else {
                    (v.len(), v.sites()) < (bv.len(), bv.sites())
                }
            }
        };
        if better {
            best = Some((v, res));
        }
    }
    Ok(best.unwrap())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoBlockReport {
    pub gamma_union: f64,
    pub gamma_v1: f64,
    pub gamma_v2_sigma: f64,
    /// `(q/4) · min(γ(V1), γ^σ(V2))`.
    pub rhs: f64,
    pub pass: bool,
}

/// Compare `γ(V1 ∪ V2)` with `(q/4) min(γ(V1), γ^σ(V2))`, where `σ` has a
/// single vacancy at `z` on `∂↓V2`.
pub fn two_block_check(v1: &Region, v2: &Region, z: &Point, q: f64) -> Result<TwoBlockReport> {
    check_q(q)?;
    let d = v1.dim();
    if v2.dim() != d || z.dim() != d {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    if !v1.contains_origin() {
        return Err(Error::Precondition("V1 must contain the origin".into()));
    }
    if v1.sites().iter().any(|x| v2.contains(x)) {
        return Err(Error::Precondition("V1 and V2 must be disjoint".into()));
    }
    if !v1.contains(z) {
        return Err(Error::Precondition(format!("z = {z} is not in V1")));
    }
    if !(0..d).any(|i| v2.contains(&z.shifted(i, 1))) {
        return Err(Error::Precondition(format!("no upper neighbour of {z} lies in V2")));
    }
    let union = v1.union(v2);
    if union.len() > 12 {
        return Err(Error::SizeCap {
            what: "two-block union",
            size: union.len() as u64,
            cap: 12,
        });
    }
    let sigma2 = BoundaryCondition::with_vacancies(v2, std::slice::from_ref(z))?;
    debug_assert!(oriented_boundary(v2).contains(z));
    let g2 = spectral_gap(v2, &sigma2, q)?;
    if !g2.ergodic {
        return Err(Error::Precondition(
            "the chain on V2 with a single vacancy at z is not ergodic".into(),
        ));
    }
    let g1 = spectral_gap(v1, &BoundaryCondition::all_ones(v1), q)?;
    let gu = spectral_gap(&union, &BoundaryCondition::all_ones(&union), q)?;
    let rhs = q / 4.0 * g1.gap.min(g2.gap);
    Ok(TwoBlockReport {
        gamma_union: gu.gap,
        gamma_v1: g1.gap,
        gamma_v2_sigma: g2.gap,
        rhs,
        pass: gu.gap >= rhs - 1e-12,
    })
}

/// Leading-order gap of a box with `max_i L_i ∈ (2^{n−1}, 2^n]`:
/// `2^{−(nθ − n(n−1)/2)}` for `n ≤ θ`, `2^{−θ²/2}` beyond.
pub fn ladder_gap_reference(n: u32, q: f64) -> Result<f64> {
    check_q(q)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let theta = crate::theta_q(q);
    let n = f64::from(n);
    Ok(if n <= theta {
        (-(n * theta - n * (n - 1.0) / 2.0)).exp2()
    } else {
        (-theta * theta / 2.0).exp2()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrickReport {
    /// Largest sampled `μ(1_A Var_V f) / D(f)`.
    pub worst_ratio: f64,
    /// `1 / γ(Λ)`.
    pub bound: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Sampled check of `μ_{Λx}(1_A Var_V f) ≤ γ(Λ)^{-1} D_{Λx}(f)` where
/// `Λx = Λ + x`, `x ≺ V` and `A` is the event that some `z ∈ Λx \ V` lying
/// below every site of `V` is vacant. The chain on `Λx` uses the all-particle
/// boundary condition.
pub fn trick_check(
    lengths: &[u64],
    x: &Point,
    v: &[Point],
    q: f64,
    samples: usize,
    seed: u64,
) -> Result<TrickReport> {
    check_q(q)?;
    let base = BoxShape::at_origin(lengths.to_vec());
    let shifted = BoxShape::new(x.clone(), lengths.to_vec())?;
    let lam_x = shifted.region();
    if lam_x.len() > 12 {
        return Err(Error::SizeCap {
            what: "shifted box",
            size: lam_x.len() as u64,
            cap: 12,
        });
    }
    if v.is_empty() || v.iter().any(|y| !lam_x.contains(y) || !x.precedes(y) || y == x) {
        return Err(Error::Precondition("need ∅ ≠ V ⊂ Λx with x ≺ V".into()));
    }
    let v_ranks: Vec<usize> = v.iter().map(|y| lam_x.rank_of(y).unwrap()).collect();
    let z_ranks: Vec<usize> = lam_x
        .sites()
        .iter()
        .enumerate()
        .filter(|(_, z)| !v.contains(z) && v.iter().all(|y| z.precedes(y)))
        .map(|(r, _)| r)
        .collect();
    let gamma = spectral_gap(&base.region(), &BoundaryCondition::all_ones(&base.region()), q)?.gap;
    let gm = build_generator(&lam_x, &BoundaryCondition::all_ones(&lam_x), q)?;
    let n = gm.dim();
    let p = 1.0 - q;
    let v_mask: usize = v_ranks.iter().map(|r| 1usize << r).sum();
    let z_mask: usize = z_ranks.iter().map(|r| 1usize << r).sum();
    let subs: Vec<(usize, f64)> = (0..1usize << v_ranks.len())
        .map(|m| {
            let mut off = 0;
            let mut w = 1.0;
            for (i, &r) in v_ranks.iter().enumerate() {
                if (m >> i) & 1 == 1 {
                    off |= 1 << r;
                    w *= p;
                } else {
                    w *= q;
                }
            }
            (off, w)
        })
        .collect();
    let outer_weight = |s: usize| gm.weights()[s | v_mask] / p.powi(v_ranks.len() as i32);

    let ratio = |f: &[f64]| -> f64 {
        let mut lhs = 0.0;
        for s in 0..n {
            // One representative per fibre: V all vacant in the index.
            if s & v_mask != 0 || (s & z_mask) == z_mask {
                continue;
            }
            let (mut m1, mut m2) = (0.0, 0.0);
            for &(off, w) in &subs {
                let val = f[s | off];
                m1 += w * val;
                m2 += w * val * val;
            }
            lhs += outer_weight(s) * (m2 - m1 * m1).max(0.0);
        }
        let mut dirichlet = 0.0;
        for s in 0..n {
            for (t, r, _) in gm.row(s) {
                dirichlet += 0.5 * gm.weights()[s] * r * (f[s] - f[t]).powi(2);
            }
        }
        if dirichlet > 0.0 {
            lhs / dirichlet
        } else if lhs > 1e-300 {
            f64::INFINITY
        } else {
            0.0
        }
    };

    let mut rng = substream(seed, 0);
    let mut worst: f64 = 0.0;
    let mut f = vec![0.0; n];
    for k in 0..samples {
        match k % 3 {
            0 => f.iter_mut().for_each(|v| *v = rng.sample(StandardNormal)),
            1 => f.iter_mut().for_each(|v| {
                *v = if rng.random::<f64>() < 0.2 {
                    rng.sample(StandardNormal)
                } else {
                    0.0
                }
            }),
            _ => f.iter_mut().for_each(|v| *v = f64::from(u8::from(rng.random::<bool>()))),
        }
        worst = worst.max(ratio(&f));
    }
    let bound = 1.0 / gamma;
    Ok(TrickReport {
        worst_ratio: worst,
        bound,
        samples,
        pass: worst <= bound + 1e-9,
    })
}
