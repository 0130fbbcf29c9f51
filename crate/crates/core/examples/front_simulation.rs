//! Simulate the quadrant process from the all-particle start and watch the
//! infected set grow.
//!
//!     cargo run --example front_simulation -- [q] [t_max] [seed]

use std::io::BufReader;

use eastlab::dynamics::{
    front_set, read_trajectory_dump, run_trajectory, write_trajectory_dump, Domain, RunOptions, Window,
};
use eastlab::lattice::BoxShape;

fn main() -> eastlab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let q: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let t_max: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100.0);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let window = BoxShape::cube(2, 15);
    let opts = RunOptions::new(q, t_max, seed)
        .window(Window::Box { shape: window })
        .track_first_update(true)
        .record_events(true);
    let (traj, record) = run_trajectory(&Domain::Quadrant { d: 2 }, &opts)?;
    println!("{} clock rings, {} flips up to t = {}", traj.event_count, traj.events.len(), traj.end_time);

    for k in 1..=8 {
        let t = t_max * k as f64 / 8.0;
        let s = front_set(&record, t)?;
        let reach = s.infected.iter().map(|x| x.l1_norm()).max().unwrap_or(0);
        println!(
            "t = {t:>8.1}  infected {:>4}  updated {:>4}  max l1 {reach}",
            s.infected.len(),
            s.updated.len()
        );
    }

    // Binary event dump, read back.
    let mut buf = Vec::new();
    write_trajectory_dump(&mut buf, &traj)?;
    let (header, events) = read_trajectory_dump(BufReader::new(&buf[..]))?;
    println!("dump: {} bytes, {} flips, q = {}", buf.len(), events.len(), header.q);
    Ok(())
}
