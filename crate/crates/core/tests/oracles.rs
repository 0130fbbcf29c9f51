mod common;

use eastlab::config::BoundaryCondition;
use eastlab::lattice::{Point, Region};
use eastlab::pathspace::barrier;
use eastlab::spectral::{build_generator, dirichlet_eigenvalue_region, evolve, spectral_gap, transient_tv, StartLaw};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn region_from_mask(mask: u16, side: i64) -> Option<Region> {
    let pts: Vec<Point> = (0..side * side)
        .filter(|k| mask >> k & 1 == 1)
        .map(|k| Point::from([k % side, k / side]))
        .collect();
    if pts.is_empty() {
        None
    } else {
        Some(Region::new(2, pts).unwrap())
    }
}

fn sym_eigenvalues(l: &DMatrix<f64>, mu: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let s = DMatrix::from_fn(n, n, |i, j| -l[(i, j)] * (mu[i] / mu[j]).sqrt());
    let s = (&s + s.transpose()) / 2.0;
    let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gap_matches_dense_oracle(mask in 1u16..512, bvals in any::<u16>(), q in 0.1f64..0.6) {
        let region = region_from_mask(mask, 3).unwrap();
        let sigma = BoundaryCondition::from_fn(&region, |y| ((bvals >> (y.coords()[0] * 3 + y.coords()[1]).rem_euclid(16)) & 1) as u8);
        let l = common::east_generator(region.sites(), q, |y| sigma.value_at(y).unwrap_or(1));
        let mu = common::product_weights(region.len(), q);
        let res = spectral_gap(&region, &sigma, q).unwrap();
        let ev = sym_eigenvalues(&l, &mu);
        if res.ergodic {
            prop_assert!((res.gap - ev[1]).abs() < 1e-9, "{} vs {}", res.gap, ev[1]);
        } else {
            prop_assert!(ev[1].abs() < 1e-9);
        }
    }

    #[test]
    fn transient_law_matches_expm(mask in 1u16..512, q in 0.1f64..0.6, start in any::<u64>(), t in 0.0f64..6.0) {
        let region = region_from_mask(mask, 3).unwrap();
        let sigma = BoundaryCondition::all_ones(&region);
        let gm = build_generator(&region, &sigma, q).unwrap();
        let s0 = (start % gm.dim() as u64) as usize;
        let mut pi0 = vec![0.0; gm.dim()];
        pi0[s0] = 1.0;
        let got = &evolve(&gm, &pi0, &[t]).unwrap()[0];
        let l = common::east_generator(region.sites(), q, |_| 1);
        let want = common::law_at(&l, &pi0, t);
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-7, "error {err}");
    }

    #[test]
    fn dirichlet_matches_dense_oracle(mask in 1u16..512, q in 0.1f64..0.6, pick in any::<usize>()) {
        let region = region_from_mask(mask, 3).unwrap();
        let sigma = BoundaryCondition::all_ones(&region);
        let target = region.site(pick % region.len()).clone();
        let got = dirichlet_eigenvalue_region(&region, &sigma, q, &target).unwrap();
        let l = common::east_generator(region.sites(), q, |_| 1);
        let mu = common::product_weights(region.len(), q);
        let r = region.rank_of(&target).unwrap();
        let keep: Vec<usize> = (0..l.nrows()).filter(|s| s >> r & 1 == 1).collect();
        let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| l[(keep[i], keep[j])]);
        let mu_sub: Vec<f64> = keep.iter().map(|&s| mu[s]).collect();
        let want = sym_eigenvalues(&sub, &mu_sub)[0];
        prop_assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn barrier_is_monotone_in_boundary(mask in 1u16..512, lo in any::<u16>(), extra in any::<u16>()) {
        // Adding vacancies to σ can only lower the barrier.
        let region = region_from_mask(mask, 3).unwrap();
        let x = region.sites().last().unwrap().clone();
        let bit = |v: u16, y: &Point| ((v >> (y.coords()[0] * 4 + y.coords()[1]).rem_euclid(16)) & 1) as u8;
        let hi_sigma = BoundaryCondition::from_fn(&region, |y| bit(lo, y));
        let lo_sigma = BoundaryCondition::from_fn(&region, |y| bit(lo, y) & bit(extra, y));
        if let Ok(b_hi) = barrier(&region, &hi_sigma, &x) {
            let b_lo = barrier(&region, &lo_sigma, &x).unwrap();
            prop_assert!(b_lo <= b_hi);
        }
    }
}

#[test]
fn stationary_start_stays_stationary() {
    let region = Region::new(2, [Point::from([0, 0]), Point::from([1, 0]), Point::from([1, 1])]).unwrap();
    let sigma = BoundaryCondition::all_ones(&region);
    let pts = transient_tv(&region, &sigma, 0.25, &StartLaw::Stationary, None, &[0.0, 3.0, 9.0]).unwrap();
    for p in pts {
        assert!(p.tv < 1e-7, "{}", p.tv);
    }
}
