use nalgebra::{DMatrix, SymmetricEigen};

use super::eigen::{lanczos_smallest, smallest_eigenpair, Deflated, Killed};
use super::*;
use crate::config::BoundaryCondition;
use crate::lattice::{BoxShape, Point, Region};

fn ones(region: &Region) -> BoundaryCondition {
    BoundaryCondition::all_ones(region)
}

fn p<const N: usize>(c: [i64; N]) -> Point {
    Point::from(c)
}

#[test]
fn single_site_matrix() {
    let r = Region::interval(1);
    let gm = build_generator(&r, &ones(&r), 0.3).unwrap();
    assert_eq!(gm.dim(), 2);
    let ev = spectrum(&r, &ones(&r), 0.3).unwrap();
    assert!(ev[0].abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    let g = spectral_gap(&r, &ones(&r), 0.3).unwrap();
    assert!((g.gap - 1.0).abs() < 1e-14);
}

#[test]
fn box_dimension_and_balance() {
    let r = BoxShape::cube(2, 1).region();
    let gm = build_generator(&r, &ones(&r), 0.37).unwrap();
    assert_eq!(gm.dim(), 16);
    assert!(gm.row_sum_residual() < 1e-15);
    assert!(gm.detailed_balance_residual() < 1e-15);
}

#[test]
fn two_site_gap_matches_hand_built_matrix() {
    // States indexed by (ω_0, ω_1) bits; site 1 needs ω_0 = 0.
    let q: f64 = 0.3;
    let p = 1.0 - q;
    let mu = |s: usize| {
        let b0 = s & 1;
        let b1 = (s >> 1) & 1;
        (if b0 == 1 { p } else { q }) * (if b1 == 1 { p } else { q })
    };
    let mut l = DMatrix::<f64>::zeros(4, 4);
    for s in 0..4usize {
        let flip0 = s ^ 1;
        let r0 = if s & 1 == 1 { q } else { p };
        l[(s, flip0)] += r0;
        l[(s, s)] -= r0;
        if s & 1 == 0 {
            let flip1 = s ^ 2;
            let r1 = if (s >> 1) & 1 == 1 { q } else { p };
            l[(s, flip1)] += r1;
            l[(s, s)] -= r1;
        }
    }
    let mut sym = DMatrix::<f64>::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            sym[(i, j)] = -l[(i, j)] * (mu(i) / mu(j)).sqrt();
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    let r = Region::interval(2);
    let g = spectral_gap(&r, &ones(&r), q).unwrap();
    assert!((g.gap - ev[1]).abs() < 1e-12, "{} vs {}", g.gap, ev[1]);
}

#[test]
fn missing_interior_site_is_reducible() {
    let r = Region::new(1, [p([0]), p([2])]).unwrap();
    let g = spectral_gap(&r, &ones(&r), 0.3).unwrap();
    assert_eq!(g.gap, 0.0);
    assert!(!g.ergodic);
    assert!(!g.unreachable.is_empty());
}

#[test]
fn lanczos_agrees_with_dense() {
    let r = BoxShape::at_origin(vec![3, 1]).region();
    let gm = build_generator(&r, &ones(&r), 0.25).unwrap();
    let op = Deflated::new(&gm);
    let dense = smallest_eigenpair(&op, RESIDUAL_TOL).unwrap();
    let lz = lanczos_smallest(&op, RESIDUAL_TOL).unwrap();
    assert!((dense.value - lz.value).abs() < 1e-9 * dense.value.max(1e-3), "{} {}", dense.value, lz.value);
    assert!(lz.residual <= RESIDUAL_TOL * gm.norm_bound() * 4.0);
    let killed = Killed::new(&gm, |s| s >> 7 & 1 == 1);
    let a = smallest_eigenpair(&killed, RESIDUAL_TOL).unwrap();
    let b = lanczos_smallest(&killed, RESIDUAL_TOL).unwrap();
    assert!((a.value - b.value).abs() < 1e-9);
}

#[test]
fn large_chain_uses_lanczos() {
    let r = BoxShape::at_origin(vec![10]).region();
    let res = spectral_gap(&r, &ones(&r), 0.4).unwrap();
    assert_eq!(res.states, 2048);
    assert!(res.gap > 0.0);
    assert!(res.residual <= RESIDUAL_TOL * res.norm * 2.0 + 1e-14, "{res:?}");
}

#[test]
fn dirichlet_single_site_is_q() {
    for q in [0.1, 0.3, 0.5] {
        let l = dirichlet_eigenvalue(&BoxShape::cube(2, 0), q).unwrap();
        assert!((l - q).abs() < 1e-12);
    }
}

#[test]
fn dirichlet_lower_bound() {
    for q in [0.1, 0.3, 0.5] {
        for lengths in [vec![1, 1], vec![2, 1], vec![3], vec![2, 2]] {
            let shape = BoxShape::at_origin(lengths);
            let r = shape.region();
            let l = dirichlet_eigenvalue(&shape, q).unwrap();
            let g = spectral_gap(&r, &ones(&r), q).unwrap().gap;
            assert!(l >= q * g - 1e-12, "{shape:?} q={q}: {l} < {}", q * g);
        }
    }
}

#[test]
fn dirichlet_requires_origin_box() {
    let shape = BoxShape::new(p([1, 0]), vec![1, 1]).unwrap();
    assert!(dirichlet_eigenvalue(&shape, 0.3).is_err());
}

#[test]
fn best_subset_one_dimensional_is_whole_box() {
    let shape = BoxShape::at_origin(vec![4]);
    let (v, res) = best_subset_gap(&shape, 0.3).unwrap();
    assert_eq!(v.sites(), shape.region().sites());
    assert!(res.gap > 0.0);
}

#[test]
fn best_subset_two_by_two() {
    let shape = BoxShape::cube(2, 1);
    let (v, res) = best_subset_gap(&shape, 0.3).unwrap();
    let full = spectral_gap(&shape.region(), &ones(&shape.region()), 0.3).unwrap();
    assert!(res.gap >= full.gap - 1e-12);
    assert!(v.contains(&p([0, 0])) && v.contains(&p([1, 1])));
}

#[test]
fn trivial_blocks_match_bitwise() {
    for q in [0.15, 0.3] {
        let r = BoxShape::at_origin(vec![2, 1]).region();
        let a = spectral_gap(&r, &ones(&r), q).unwrap();
        let spec = BlockSpec::trivial(r.len(), q).unwrap();
        let b = star_gap(&spec, &r, &StarMode::East).unwrap();
        assert_eq!(a.gap.to_bits(), b.gap.to_bits());
    }
}

#[test]
fn two_bit_blocks_match_effective_q() {
    let q: f64 = 0.3;
    let p = 1.0 - q;
    let r = Region::interval(2);
    let spec = BlockSpec::uniform(2, UnitSpace::block_any_vacancy(2, q)).unwrap();
    assert!((spec.q_star() - (1.0 - p * p)).abs() < 1e-15);
    let star = star_gap(&spec, &r, &StarMode::East).unwrap();
    let plain = spectral_gap(&r, &ones(&r), spec.q_star()).unwrap();
    assert!((star.gap - plain.gap).abs() < 1e-9);
}

#[test]
fn knight_chain_is_relabelled_east() {
    let r = BoxShape::cube(2, 1).region();
    let q = 0.35;
    let spec = BlockSpec::trivial(r.len(), q).unwrap();
    let a = star_gap(&spec, &r, &StarMode::East).unwrap();
    let b = star_gap(&spec, &r, &StarMode::Knight).unwrap();
    assert!((a.gap - b.gap).abs() < 1e-12);
}

#[test]
fn star_knight_tiny_instance() {
    let q = 0.3;
    let r = Region::new(2, [p([0, 0]), p([1, 0])]).unwrap();
    let spec = BlockSpec::trivial(2, q).unwrap();
    let mode = StarMode::StarKnight {
        ambient: BoxShape::cube(2, 3),
        filler: UnitSpace::binary(q),
    };
    let chain = star_chain(&spec, &r, &mode).unwrap();
    assert_eq!(chain.units().len(), 11);
    let g = star_gap(&spec, &r, &mode).unwrap();
    let plain = spectral_gap(&r, &ones(&r), q).unwrap();
    assert!((g.gap - plain.gap).abs() < 1e-9, "{} vs {}", g.gap, plain.gap);
}

#[test]
fn inconsistent_block_spec_rejected() {
    let err = BlockSpec::new(vec![UnitSpace::binary(0.3), UnitSpace::binary(0.4)]);
    assert!(err.is_err());
    assert!(UnitSpace::new(vec![0.5, 0.4], vec![true, false]).is_err());
}

#[test]
fn ladder_examples() {
    assert!((ladder_gap_reference(1, 0.5).unwrap() - 0.5).abs() < 1e-15);
    assert!((ladder_gap_reference(3, 1.0 / 16.0).unwrap() - 2f64.powi(-9)).abs() < 1e-18);
    assert!((ladder_gap_reference(7, 1.0 / 16.0).unwrap() - 2f64.powi(-8)).abs() < 1e-18);
    assert!(ladder_gap_reference(0, 0.3).is_err());
}

#[test]
fn two_block_examples() {
    let v1 = Region::interval(2);
    let v2 = Region::new(1, [p([2]), p([3])]).unwrap();
    let rep = two_block_check(&v1, &v2, &p([1]), 0.3).unwrap();
    assert!(rep.pass, "{rep:?}");
    let v1 = Region::new(2, [p([0, 0]), p([1, 0]), p([2, 0])]).unwrap();
    let v2 = Region::new(2, [p([1, 1]), p([1, 2])]).unwrap();
    let rep = two_block_check(&v1, &v2, &p([1, 0]), 0.2).unwrap();
    assert!(rep.pass, "{rep:?}");
    // A gap in V2 makes it non-ergodic under the single vacancy.
    let v2 = Region::new(1, [p([2]), p([4])]).unwrap();
    assert!(matches!(
        two_block_check(&Region::interval(2), &v2, &p([1]), 0.3),
        Err(crate::Error::Precondition(_))
    ));
}

#[test]
fn trick_inequality_holds_on_samples() {
    let rep = trick_check(&[1, 1], &p([1, 0]), &[p([2, 1]), p([2, 0])], 0.3, 300, 1).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.worst_ratio > 0.0);
}

#[test]
fn uniformization_single_site_closed_form() {
    let r = Region::interval(1);
    let q = 0.3;
    let times = [0.0, 0.5, 2.0, 7.0];
    let pts = transient_tv(
        &r,
        &ones(&r),
        q,
        &StartLaw::State(crate::config::Configuration::all_ones(1)),
        Some(&p([0])),
        &times,
    )
    .unwrap();
    for pt in &pts {
        let vac = q * (1.0 - (-pt.t).exp());
        assert!((pt.distribution[0] - vac).abs() < 1e-8);
        assert!((pt.tail.unwrap() - (-q * pt.t).exp()).abs() < 1e-8);
    }
    assert!((pts[0].tv - q).abs() < 1e-12);
}

#[test]
fn coo_export_has_header() {
    let r = Region::interval(2);
    let gm = build_generator(&r, &ones(&r), 0.3).unwrap();
    let mut buf = Vec::new();
    gm.write_coo(&mut buf, 0.3, Some(&r)).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["states"], 4);
    assert_eq!(text.lines().count(), 1 + 4 + gm.nnz_offdiag());
}

#[test]
fn spectrum_result_json() {
    let r = Region::interval(2);
    let res = spectral_gap(&r, &ones(&r), 0.3).unwrap();
    let s = serde_json::to_string(&res).unwrap();
    let back: SpectrumResult = serde_json::from_str(&s).unwrap();
    assert_eq!(back, res);
}
