//! Drive an experiment from a JSON configuration, as the `eastlab` binary
//! does, and re-run it from the configuration embedded in its summary.

use eastlab::experiments::{run_config, CommandKind, ExperimentConfig, NGrid};

fn main() -> eastlab::Result<()> {
    let mut cfg = ExperimentConfig::new(CommandKind::Velocity);
    cfg.q = 0.3;
    cfg.replicas = 50;
    cfg.directions = vec![vec![1.0, 1.0]];
    cfg.n_grid = Some(NGrid { start: 2.0, end: 8.0, step: 2.0 });
    let first = run_config(&cfg)?;
    let summary = first.summary_json()?;
    println!("{summary}");

    let again = run_config(&ExperimentConfig::new(CommandKind::Velocity).overlay_json(&summary)?)?;
    println!("identical CSV on re-run: {}", first.csv == again.csv);
    print!("{}", again.csv.unwrap_or_default());
    Ok(())
}
