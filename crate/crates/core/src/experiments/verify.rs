//! The `small` verification suite: fast oracle and invariant checks that
//! exercise every module of a release build.

use serde::Serialize;

use crate::config::{BoundaryCondition, Configuration};
use crate::dynamics::{mean_hitting, run_trajectory, Domain, RunOptions, Window, DEFAULT_MAX_EVENTS};
use crate::lattice::{BoxShape, Point, Region};
use crate::pathspace::{barrier, ConfigGraph};
use crate::spectral::{
    build_generator, dirichlet_eigenvalue, spectral_gap, star_gap, transient_tv, two_block_check, BlockSpec, StarMode,
    StartLaw, UnitSpace,
};
use crate::Result;

use super::cutoff::cutoff_curve;
use super::theory::{f_fixed_point, part_c, phi2_bound, F_MAX_ITER};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Smallest `k` such that `{ω_x = 0}` is reachable through states with at
/// most `k` vacancies, by repeated breadth-first search.
fn barrier_by_deepening(region: &Region, sigma: &BoundaryCondition, x: &Point) -> Result<Option<u32>> {
    let g = ConfigGraph::new(region, sigma)?;
    let r = region.rank_of(x).unwrap();
    let n = region.len() as u32;
    let start = g.states() - 1;
    for k in 0..=n {
        let mut seen = vec![false; g.states() as usize];
        seen[start as usize] = true;
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            if (s >> r) & 1 == 0 {
                return Ok(Some(k));
            }
            for (_, t) in g.neighbors(s) {
                if !seen[t as usize] && n - t.count_ones() <= k {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
    }
    Ok(None)
}

pub fn run_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let ones = |r: &Region| BoundaryCondition::all_ones(r);

    out.push(check("generator_balance", || {
        let mut worst: f64 = 0.0;
        for lengths in [vec![3], vec![1, 1], vec![2, 1], vec![2, 2]] {
            for q in [0.1, 0.3, 0.5] {
                let r = BoxShape::at_origin(lengths.clone()).region();
                let gm = build_generator(&r, &ones(&r), q)?;
                worst = worst.max(gm.row_sum_residual()).max(gm.detailed_balance_residual());
            }
        }
        Ok((worst <= 1e-12, format!("max residual {worst:e}")))
    }));

    out.push(check("dirichlet_single_site", || {
        let l = dirichlet_eigenvalue(&BoxShape::cube(2, 0), 0.3)?;
        Ok(((l - 0.3).abs() <= 1e-12, format!("λ = {l}")))
    }));

    out.push(check("dirichlet_vs_gap", || {
        let shape = BoxShape::cube(2, 1);
        let r = shape.region();
        let l = dirichlet_eigenvalue(&shape, 0.3)?;
        let g = spectral_gap(&r, &ones(&r), 0.3)?.gap;
        Ok((l >= 0.3 * g - 1e-10, format!("λ = {l}, qγ = {}", 0.3 * g)))
    }));

    out.push(check("block_chain_effective_q", || {
        let q: f64 = 0.3;
        let r = Region::interval(3);
        let spec = BlockSpec::uniform(3, UnitSpace::block_any_vacancy(2, q))?;
        let a = star_gap(&spec, &r, &StarMode::East)?.gap;
        let b = spectral_gap(&r, &ones(&r), spec.q_star())?.gap;
        Ok(((a - b).abs() <= 1e-9, format!("{a} vs {b}")))
    }));

    out.push(check("knight_chain_equals_east", || {
        let r = BoxShape::cube(2, 1).region();
        let spec = BlockSpec::trivial(r.len(), 0.25)?;
        let a = star_gap(&spec, &r, &StarMode::East)?.gap;
        let b = star_gap(&spec, &r, &StarMode::Knight)?.gap;
        Ok(((a - b).abs() <= 1e-9, format!("{a} vs {b}")))
    }));

    out.push(check("two_block_bound", || {
        let v1 = Region::interval(2);
        let v2 = Region::new(1, [Point::from([2]), Point::from([3])])?;
        let rep = two_block_check(&v1, &v2, &Point::from([1]), 0.3)?;
        Ok((rep.pass, format!("γ = {}, rhs = {}", rep.gamma_union, rep.rhs)))
    }));

    out.push(check("barrier_oracle", || {
        let mut values = Vec::new();
        let mut ok = true;
        for l in 1..=4usize {
            let r = Region::interval(l + 1);
            let x = Point::from([l as i64]);
            let a = barrier(&r, &ones(&r), &x)?;
            let b = barrier_by_deepening(&r, &ones(&r), &x)?;
            ok &= b == Some(a);
            values.push(a);
        }
        Ok((ok, format!("{values:?}")))
    }));

    out.push(check("theory_endpoints", || {
        let mut ok = phi2_bound(0.0)? == 0.5 && phi2_bound(1.0)? == 1.0 && part_c(0.25)? == 1.0;
        for d in 2..=5 {
            let fp = f_fixed_point(d, F_MAX_ITER);
            ok &= fp.converged && (fp.value - 1.0 / d as f64).abs() <= 1e-6;
        }
        Ok((ok, String::new()))
    }));

    out.push(check("cutoff_initial_value", || {
        let c = cutoff_curve(1, 2, 0.3, &[0.0, 5.0])?;
        let want = 1.0 - 0.3f64.powi(4);
        let v = c.points[0].value;
        Ok(((v - want).abs() <= 1e-10, format!("{v} vs {want}")))
    }));

    out.push(check("uniformization_single_site", || {
        let r = Region::interval(1);
        let q: f64 = 0.3;
        let pts = transient_tv(&r, &ones(&r), q, &StartLaw::State(Configuration::all_ones(1)), Some(&Point::from([0])), &[1.5])?;
        let err = (pts[0].tail.unwrap() - (-q * 1.5).exp()).abs();
        Ok((err <= 1e-8, format!("error {err:e}")))
    }));

    out.push(check("origin_hitting_mean", || {
        let q = 0.3;
        let est = mean_hitting(&[1.0, 1.0], 0.0, 4000, q, 17, DEFAULT_MAX_EVENTS)?;
        let z = (est.mean - 1.0 / q).abs() / est.stderr;
        Ok((z <= 5.0, format!("mean {} ± {}, expected {}", est.mean, est.stderr, 1.0 / q)))
    }));

    out.push(check("lazy_equals_finite", || {
        let shape = BoxShape::cube(2, 3);
        let opts = RunOptions::new(0.3, 8.0, 5).record_events(true).window(Window::Box { shape: shape.clone() });
        let (a, _) = run_trajectory(&Domain::finite(shape.region()), &opts)?;
        let (b, _) = run_trajectory(&Domain::Quadrant { d: 2 }, &opts)?;
        Ok((a.events == b.events, format!("{} events", a.events.len())))
    }));

    out
}
