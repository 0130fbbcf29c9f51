//! Distance to equilibrium on `{0..n}^d` as a function of time.
//!
//!     cargo run --release --example cutoff -- [q]

use eastlab::experiments::{cutoff_curve, cutoff_curve_mc};

fn main() -> eastlab::Result<()> {
    let q: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let times: Vec<f64> = (0..=40).map(|k| 2.5 * k as f64).collect();
    for (n, d) in [(1, 2), (2, 2), (3, 1), (1, 3), (3, 2)] {
        let c = cutoff_curve(n, d, q, &times)?;
        println!(
            "n = {n} d = {d}  {:?}  d(0) = {:.4}  t(3/4) = {:?}  t(1/4) = {:?}",
            c.mode,
            c.points[0].value,
            c.crossing(0.75),
            c.crossing(0.25)
        );
    }
    let mc = cutoff_curve_mc(6, 2, q, &times, 2000, 1)?;
    println!("n = 6 d = 2  {:?}  t(1/4) = {:?}", mc.mode, mc.crossing(0.25));
    Ok(())
}
