//! Closed-form predictions and the recursion map `F`.

use eastlab::experiments::{f_map, in_equilibrium_region, theory_exponents};
use eastlab::lattice::Point;

fn main() -> eastlab::Result<()> {
    for d in 2..=5 {
        let p = theory_exponents(d, 0.5, 0.1)?;
        println!(
            "d = {d}: bulk {:.4}  partC {:.3}  phi2 bound {:.4}  fixed point {:.8} ({} steps; plain orbit {} steps)",
            p.bulk, p.part_c, p.phi2_bound, p.f_fixed_point.value, p.f_fixed_point.iterations, p.f_plain.iterations
        );
    }
    let orbit: Vec<String> = (0..6)
        .scan(1.0, |l, _| {
            let cur = *l;
            *l = f_map(2, cur);
            Some(format!("{cur:.4}"))
        })
        .collect();
    println!("\nF orbit for d = 2 from 1: {}", orbit.join(" -> "));

    let q = 0.3;
    let t = 1e4;
    let inside: Vec<String> = [[10, 10], [40, 5], [60, 60], [0, 30]]
        .iter()
        .map(|c| {
            let x = Point::from(*c);
            format!("{x}:{}", in_equilibrium_region(&x, 0.2, 0.1, t, q).unwrap())
        })
        .collect();
    println!("equilibrium region at t = {t}, delta 0.2: {}", inside.join(" "));
    Ok(())
}
