//! Energy barriers, level-set bottlenecks and the escape probability from
//! a fully occupied box.

use eastlab::config::BoundaryCondition;
use eastlab::lattice::{Point, Region};
use eastlab::pathspace::{
    barrier, bottleneck_measure, bottleneck_region, escape_probability, escape_probability_exact, is_bottleneck,
    reachable, BottleneckQuery,
};

fn main() -> eastlab::Result<()> {
    for l in 1..=10usize {
        let r = Region::interval(l + 1);
        let b = barrier(&r, &BoundaryCondition::all_ones(&r), &Point::from([l as i64]))?;
        println!("1-d distance {l:>2}: barrier {b}");
    }

    let q = 0.2;
    let x = Point::from([3, 3]);
    let l = 3;
    let v = bottleneck_region(&x, l)?;
    let k = barrier(&v, &BoundaryCondition::maximal(&v), &x)?;
    let n = v.len() as u32;
    let level = move |s: u64| n - s.count_ones() >= k;
    let query = BottleneckQuery { x: x.clone(), l, a: &level };
    let rep = bottleneck_measure(&query, q)?;
    println!(
        "\nV_(x,L) with x = {x}, L = {l}: {} sites, barrier {k}, bottleneck {}",
        v.len(),
        is_bottleneck(&query)?
    );
    println!("  log2 mu(A) = {:.3}, reference {:.3}", rep.log2_measure, rep.log2_reference);

    let sigma = BoundaryCondition::maximal(&v);
    let start = eastlab::config::Configuration::all_ones(v.len());
    let rank = v.rank_of(&x).unwrap();
    let path = reachable(&v, &sigma, &start, |s| (s >> rank) & 1 == 0)?;
    println!("  a shortest legal path has {} flips: {}", path.path.len(), path.to_json()?);

    let x = Point::from([3, 2]);
    let t = 4.0;
    let exact = escape_probability_exact(&x, 2, q, t)?;
    let mc = escape_probability(&x, 2, q, t, 20_000, 1)?;
    println!(
        "\nP(tau_x < {t}) from particles on V_(x,2), x = {x}: exact {exact:.5}, MC {:.5} [{:.5}, {:.5}]",
        mc.estimate, mc.ci_low, mc.ci_high
    );
    Ok(())
}
