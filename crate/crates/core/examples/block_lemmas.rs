//! Numerical checks of the two-block gap bound and the
//! variance-versus-Dirichlet-form inequality.

use eastlab::lattice::{BoxShape, Point, Region};
use eastlab::spectral::{trick_check, two_block_check};

fn main() -> eastlab::Result<()> {
    let v1 = BoxShape::cube(2, 1).region();
    let v2 = Region::new(2, [Point::from([2, 0]), Point::from([2, 1])])?;
    for q in [0.1, 0.3, 0.5] {
        let r = two_block_check(&v1, &v2, &Point::from([1, 0]), q)?;
        println!(
            "q = {q}: gamma(V1 u V2) {:.5}  >=  {:.5} = (q/4) min({:.5}, {:.5})  {}",
            r.gamma_union, r.rhs, r.gamma_v1, r.gamma_v2_sigma, r.pass
        );
    }
    let rep = trick_check(&[1, 1], &Point::from([1, 0]), &[Point::from([2, 1]), Point::from([2, 0])], 0.3, 2000, 9)?;
    println!(
        "\nsampled worst ratio {:.4} against 1/gamma {:.4} over {} functions: {}",
        rep.worst_ratio, rep.bound, rep.samples, rep.pass
    );
    Ok(())
}
