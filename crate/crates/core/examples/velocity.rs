//! Mean hitting times along two directions and the fitted front
//! velocities.
//!
//!     cargo run --release --example velocity -- [q] [replicas]

use eastlab::dynamics::{mean_hitting, velocity_fit, DEFAULT_MAX_EVENTS};

fn main() -> eastlab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let q: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let replicas: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);

    for dir in [[1.0, 1.0], [1.0, 0.0], [1.0, 0.25]] {
        let mut points = Vec::new();
        for (k, n) in [4.0, 8.0, 12.0, 16.0].into_iter().enumerate() {
            let est = mean_hitting(&dir, n, replicas, q, 100 + k as u64, DEFAULT_MAX_EVENTS)?;
            println!("{dir:?} n = {n:>4}  target {}  E tau = {:.2} ± {:.2}", est.target, est.mean, est.stderr);
            points.push(est.point());
        }
        let fit = velocity_fit(&points, q)?;
        println!(
            "  slope {:.3} ± {:.3}, velocity {:.4}, exponent log2(1/v)/theta^2 = {:.3}\n",
            fit.slope, fit.slope_stderr, fit.velocity, fit.exponent
        );
    }
    Ok(())
}
