//! Closed-form predictions: velocity exponents, the `φ(β;2)` bound, the
//! recursion map `F` and the bulk-equilibrium region.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::Point;

/// Stopping rule for fixed-point iterations: `|λ − F(λ)| < FIXED_POINT_TOL`.
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// `F(λ) = ((2d−1)λ − 1)/(d²λ − 1)`.
pub fn f_map(d: usize, lambda: f64) -> f64 {
    let d = d as f64;
    ((2.0 * d - 1.0) * lambda - 1.0) / (d * d * lambda - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Plain orbit `λ_{k+1} = F(λ_k)` from `λ_0 = 1`. The fixed point `1/d` is
/// neutral (`F'(1/d) = 1`), so convergence is only algebraic.
pub fn f_orbit(d: usize, max_iter: usize) -> FixedPoint {
    let mut l = 1.0;
    for k in 0..max_iter {
        if (l - f_map(d, l)).abs() < FIXED_POINT_TOL {
            return FixedPoint {
                value: l,
                iterations: k,
                converged: true,
            };
        }
        l = f_map(d, l);
    }
    FixedPoint {
        value: l,
        iterations: max_iter,
        converged: (l - f_map(d, l)).abs() < FIXED_POINT_TOL,
    }
}

/// Steffensen-accelerated iteration of `F` from `λ = 1`.
pub fn f_fixed_point(d: usize, max_iter: usize) -> FixedPoint {
    let mut l = 1.0;
    for k in 0..max_iter {
        let a = f_map(d, l);
        if (l - a).abs() < FIXED_POINT_TOL {
            return FixedPoint {
                value: l,
                iterations: k,
                converged: true,
            };
        }
        let b = f_map(d, a);
        let den = b - 2.0 * a + l;
        l = if den == 0.0 { b } else { l - (a - l) * (a - l) / den };
    }
    FixedPoint {
        value: l,
        iterations: max_iter,
        converged: (l - f_map(d, l)).abs() < FIXED_POINT_TOL,
    }
}

/// `½(1−β)² + 2β − β²`.
pub fn phi2_bound(beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(invalid("beta must lie in [0, 1]"));
    }
    Ok(0.5 * (1.0 - beta) * (1.0 - beta) + 2.0 * beta - beta * beta)
}

/// `((1+4α) ∧ 2)/2`.
pub fn part_c(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha must be positive"));
    }
    Ok((1.0 + 4.0 * alpha).min(2.0) / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub d: usize,
    pub beta: f64,
    pub alpha: f64,
    pub bulk: f64,
    pub part_c: f64,
    pub phi2_bound: f64,
    pub f_fixed_point: FixedPoint,
    pub f_plain: FixedPoint,
}

pub const F_MAX_ITER: usize = 200;
const F_PLAIN_MAX_ITER: usize = 10_000_000;

pub fn theory_exponents(d: usize, beta: f64, alpha: f64) -> Result<TheoryPrediction> {
    if d < 2 {
        return Err(invalid("d must be at least 2"));
    }
    Ok(TheoryPrediction {
        d,
        beta,
        alpha,
        bulk: 1.0 / d as f64,
        part_c: part_c(alpha)?,
        phi2_bound: phi2_bound(beta)?,
        f_fixed_point: f_fixed_point(d, F_MAX_ITER),
        f_plain: f_orbit(d, F_PLAIN_MAX_ITER),
    })
}

/// Membership in `{x : min_{i,j} x_i/x_j ≥ δ, ‖x‖₁ ≤ 2^{−θ²(1+ε)/(2d)}·t}`.
/// The ratio condition is read as `min_i x_i ≥ δ·max_j x_j`, so the origin
/// belongs for every `δ`.
pub fn in_equilibrium_region(x: &Point, delta: f64, eps: f64, t: f64, q: f64) -> Result<bool> {
    if !(0.0..1.0).contains(&delta) || !(eps > 0.0) || !(t > 0.0) || !(q > 0.0 && q < 1.0) {
        return Err(invalid("need 0 ≤ δ < 1, ε > 0, t > 0 and q in (0,1)"));
    }
    if !x.in_quadrant() {
        return Ok(false);
    }
    let d = x.dim() as f64;
    let theta = crate::theta_q(q);
    let lo = *x.coords().iter().min().unwrap() as f64;
    let hi = *x.coords().iter().max().unwrap() as f64;
    let radius = (-(theta * theta) * (1.0 + eps) / (2.0 * d)).exp2() * t;
    Ok(lo >= delta * hi && x.l1_norm() as f64 <= radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f_examples() {
        for d in 2..=5 {
            let fp = 1.0 / d as f64;
            assert!((f_map(d, fp) - fp).abs() < 1e-15);
        }
        assert!((f_map(2, 1.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn accelerated_iteration_reaches_fixed_point() {
        for d in 2..=5 {
            let fp = f_fixed_point(d, F_MAX_ITER);
            assert!(fp.converged && fp.iterations <= F_MAX_ITER);
            assert!((fp.value - 1.0 / d as f64).abs() <= 1e-6, "d={d}: {fp:?}");
        }
    }

    #[test]
    fn plain_orbit_is_slow_but_converges() {
        let short = f_orbit(2, F_MAX_ITER);
        assert!(!short.converged);
        assert!((short.value - 0.5).abs() > 1e-3);
        let long = f_orbit(2, F_PLAIN_MAX_ITER);
        assert!(long.converged && (long.value - 0.5).abs() < 1e-6);
    }

    #[test]
    fn endpoints_are_exact() {
        assert_eq!(phi2_bound(0.0).unwrap(), 0.5);
        assert_eq!(phi2_bound(1.0).unwrap(), 1.0);
        assert_eq!(part_c(0.25).unwrap(), 1.0);
        assert_eq!(part_c(3.0).unwrap(), 1.0);
        assert!(phi2_bound(1.5).is_err());
        assert!(part_c(0.0).is_err());
        assert!(theory_exponents(1, 0.0, 1.0).is_err());
    }

    #[test]
    fn prediction_bulk() {
        let p = theory_exponents(2, 0.0, 1.0).unwrap();
        assert_eq!(p.bulk, 0.5);
        assert_eq!(p.phi2_bound, 0.5);
    }

    #[test]
    fn region_examples() {
        let q = 0.5;
        assert!(in_equilibrium_region(&Point::origin(2), 0.9, 0.1, 1.0, q).unwrap());
        assert!(!in_equilibrium_region(&Point::from([5, 0]), 0.1, 0.1, 1e6, q).unwrap());
        assert!(in_equilibrium_region(&Point::from([5, 0]), 0.0, 0.1, 1e6, q).unwrap());
    }

    proptest! {
        #[test]
        fn region_monotone(x in 0i64..40, y in 0i64..40, delta in 0.0f64..0.99, e1 in 0.01f64..2.0, e2 in 0.01f64..2.0, t1 in 0.1f64..500.0, t2 in 0.1f64..500.0) {
            let p = Point::from([x, y]);
            let q = 0.3;
            let (ta, tb) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let (ea, eb) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            if in_equilibrium_region(&p, delta, ea, ta, q).unwrap() {
                prop_assert!(in_equilibrium_region(&p, delta, ea, tb, q).unwrap());
            }
            if in_equilibrium_region(&p, delta, eb, ta, q).unwrap() {
                prop_assert!(in_equilibrium_region(&p, delta, ea, ta, q).unwrap());
            }
        }

        #[test]
        fn theory_is_continuous(beta in 0.0f64..1.0, alpha in 0.01f64..2.0) {
            let h = 1e-9;
            let a = phi2_bound(beta).unwrap();
            let b = phi2_bound((beta + h).min(1.0)).unwrap();
            prop_assert!((a - b).abs() < 1e-8);
            let a = part_c(alpha).unwrap();
            let b = part_c(alpha + h).unwrap();
            prop_assert!((a - b).abs() < 1e-8);
        }
    }
}
