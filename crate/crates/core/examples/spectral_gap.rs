//! Spectral gaps of small boxes, the one-dimensional ladder reference, and
//! the best sub-region of a box.

use eastlab::config::BoundaryCondition;
use eastlab::lattice::{BoxShape, Region};
use eastlab::spectral::{best_subset_gap, ladder_gap_reference, spectral_gap};

fn main() -> eastlab::Result<()> {
    let q = 0.25;
    println!("intervals at q = {q}:");
    for len in 1..=11usize {
        let r = Region::interval(len);
        // Dyadic scale of the interval: len in (2^(n-1), 2^n].
        let n = (len as f64).log2().ceil().max(1.0) as u32;
        let g = spectral_gap(&r, &BoundaryCondition::all_ones(&r), q)?;
        println!(
            "  {len:>2} sites  gap {:.6e}  reference {:.6e}  ({} states)",
            g.gap,
            ladder_gap_reference(n, q)?,
            g.states
        );
    }
    println!("boxes:");
    for lengths in [vec![1, 1], vec![2, 1], vec![2, 2], vec![3, 2], vec![1, 1, 1]] {
        let r = BoxShape::at_origin(lengths.clone()).region();
        let g = spectral_gap(&r, &BoundaryCondition::all_ones(&r), q)?;
        println!("  {lengths:?}  gap {:.6e}  residual {:.1e}", g.gap, g.residual);
    }
    let (best, g) = best_subset_gap(&BoxShape::cube(2, 2), q)?;
    println!("best sub-region of the 3x3 box: {} sites, gap {:.6e}", best.len(), g.gap);
    Ok(())
}
