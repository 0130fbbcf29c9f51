//! Dirichlet eigenvalues of boxes and the exponential bound on the hitting
//! time of the far corner.

use eastlab::config::BoundaryCondition;
use eastlab::lattice::BoxShape;
use eastlab::spectral::{dirichlet_eigenvalue, spectral_gap, transient_tv, StartLaw};

fn main() -> eastlab::Result<()> {
    for q in [0.1, 0.3] {
        for lengths in [vec![0, 0], vec![1, 1], vec![2, 1], vec![2, 2]] {
            let shape = BoxShape::at_origin(lengths.clone());
            let r = shape.region();
            let lam = dirichlet_eigenvalue(&shape, q)?;
            let gap = spectral_gap(&r, &BoundaryCondition::all_ones(&r), q)?.gap;
            println!("q = {q}  {lengths:?}  lambda {lam:.6e}  q*gap {:.6e}", q * gap);
        }
    }

    let q = 0.3;
    let shape = BoxShape::cube(2, 2);
    let r = shape.region();
    let lam = dirichlet_eigenvalue(&shape, q)?;
    let times: Vec<f64> = (0..=10).map(|k| 10.0 * k as f64).collect();
    let pts = transient_tv(&r, &BoundaryCondition::all_ones(&r), q, &StartLaw::Stationary, Some(&shape.corner()), &times)?;
    println!("\nP_mu(tau > t) against exp(-lambda t) on the 3x3 box:");
    for p in pts {
        println!("  t = {:>5}  {:.6e}  <=  {:.6e}", p.t, p.tail.unwrap(), (-lam * p.t).exp());
    }
    Ok(())
}
