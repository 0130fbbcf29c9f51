//! Render the front set `S(t)` as a PPM picture: black for infected
//! sites, grey for sites updated at least once.
//!
//!     cargo run --release --example shape_image -- shape.ppm [q] [side] [t]

use std::fs::File;
use std::io::BufWriter;

use eastlab::dynamics::{run_trajectory, Domain, RunOptions, Window};
use eastlab::experiments::shape_render;
use eastlab::lattice::{BoxShape, Point};

fn main() -> eastlab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.first().cloned().unwrap_or_else(|| "shape.ppm".into());
    let q: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let side: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(80);
    let window = BoxShape::cube(2, side);

    // Without an explicit time, stop once the far corner of the window
    // along the diagonal is infected.
    let target = Point::from([side as i64 / 2, side as i64 / 2]);
    let t = match args.get(3).and_then(|s| s.parse::<f64>().ok()) {
        Some(t) => t,
        None => {
            let probe = RunOptions::new(q, f64::INFINITY, 7)
                .window(Window::points_of(vec![target.clone()]))
                .stop_when_infected(vec![target.clone()]);
            run_trajectory(&Domain::Quadrant { d: 2 }, &probe)?.1.tau(&target).unwrap()
        }
    };
    let opts = RunOptions::new(q, t, 7)
        .window(Window::Box { shape: window.clone() })
        .track_first_update(true);
    let (traj, record) = run_trajectory(&Domain::Quadrant { d: 2 }, &opts)?;
    shape_render(&record, traj.end_time, &window, BufWriter::new(File::create(&path)?))?;
    println!("wrote {path}: q = {q}, t = {t:.1}, {} events", traj.event_count);
    Ok(())
}
