//! Generalised East chains: block state spaces, the Knight relabelling,
//! and the enlarged Knight chain.

use eastlab::config::BoundaryCondition;
use eastlab::lattice::{BoxShape, Point, Region};
use eastlab::spectral::{spectral_gap, star_chain, star_gap, BlockSpec, StarMode, UnitSpace};

fn main() -> eastlab::Result<()> {
    let q = 0.3;
    let region = Region::interval(3);

    // Each site carries a block of k bits; a block facilitates when any bit
    // is vacant, so the chain behaves like East with q* = 1 - (1-q)^k.
    for k in 1..=3 {
        let spec = BlockSpec::uniform(3, UnitSpace::block_any_vacancy(k, q))?;
        let star = star_gap(&spec, &region, &StarMode::East)?;
        let east = spectral_gap(&region, &BoundaryCondition::all_ones(&region), spec.q_star())?;
        println!("k = {k}  q* = {:.4}  gap {:.8}  East gap {:.8}", spec.q_star(), star.gap, east.gap);
    }

    let square = BoxShape::cube(2, 1).region();
    let spec = BlockSpec::trivial(square.len(), q)?;
    let k = star_gap(&spec, &square, &StarMode::Knight)?;
    println!("Knight chain on the 2x2 box: gap {:.8}", k.gap);

    let v = Region::new(2, [Point::from([0, 0]), Point::from([1, 0])])?;
    let mode = StarMode::StarKnight {
        ambient: BoxShape::cube(2, 3),
        filler: UnitSpace::binary(q),
    };
    let chain = star_chain(&BlockSpec::trivial(2, q)?, &v, &mode)?;
    let g = star_gap(&BlockSpec::trivial(2, q)?, &v, &mode)?;
    println!("enlarged Knight chain: {} units, {} states, gap {:.8}", chain.units().len(), chain.states()?, g.gap);
    Ok(())
}
