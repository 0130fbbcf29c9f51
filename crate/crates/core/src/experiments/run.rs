//! Experiment orchestration: one function per subcommand, each returning
//! its artifacts in memory. Files are written by [`write_outputs`].

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::BoundaryCondition;
use crate::dynamics::{front_set, mean_hitting, run_trajectory, velocity_fit, Domain, RunOptions, Window, DEFAULT_MAX_EVENTS};
use crate::error::{invalid, Result};
use crate::lattice::BoxShape;
use crate::pathspace::{barrier, bottleneck_measure, bottleneck_region, is_bottleneck, BottleneckQuery};
use crate::spectral::{dirichlet_eigenvalue, spectral_gap};

use super::cutoff::{cutoff_curve, cutoff_curve_mc, EXACT_SINGLE_START_SITES};
use super::params::{CommandKind, ExperimentConfig, NGrid};
use super::shape::shape_raster;
use super::theory::theory_exponents;
use super::verify::run_suite;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub results: Value,
    pub csv: Option<String>,
    pub ppm: Option<Vec<u8>>,
    /// False only for a failing `verify` run.
    pub passed: bool,
}

impl RunOutput {
    /// `summary.json` contents: version, the exact config and the results.
    pub fn summary_json(&self) -> Result<String> {
        let doc = json!({
            "version": VERSION,
            "config": serde_json::to_value(&self.config)?,
            "results": self.results,
        });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes `summary.json`, and `results.csv`/`shape.ppm` when produced.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("summary.json"), out.summary_json()?)?;
    if let Some(csv) = &out.csv {
        std::fs::write(dir.join("results.csv"), csv)?;
    }
    if let Some(ppm) = &out.ppm {
        std::fs::write(dir.join("shape.ppm"), ppm)?;
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

pub fn run_config(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput {
        config: config.clone(),
        results: Value::Null,
        csv: None,
        ppm: None,
        passed: true,
    };
    match config.command {
        CommandKind::Simulate | CommandKind::Shape => simulate(config, &mut out)?,
        CommandKind::Velocity => velocity(config, &mut out)?,
        CommandKind::Gap => gap(config, &mut out)?,
        CommandKind::Dirichlet => dirichlet(config, &mut out)?,
        CommandKind::Bottleneck => bottleneck(config, &mut out)?,
        CommandKind::Cutoff => cutoff(config, &mut out)?,
        CommandKind::Theory => {
            out.results = to_value(&theory_exponents(config.d, config.beta, config.alpha)?)?;
        }
        CommandKind::Verify => {
            if config.suite != "small" {
                return Err(invalid(format!("unknown suite `{}`", config.suite)));
            }
            let checks = run_suite();
            out.passed = checks.iter().all(|c| c.pass);
            out.results = to_value(&checks)?;
        }
    }
    Ok(out)
}

fn window_of(config: &ExperimentConfig, default_side: u64) -> Result<BoxShape> {
    let shape = config.region_box()?.unwrap_or_else(|| BoxShape::cube(config.d, default_side));
    if shape.dim() != config.d {
        return Err(invalid(format!("region has dimension {}, but d = {}", shape.dim(), config.d)));
    }
    Ok(shape)
}

fn simulate(config: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    config.check_q()?;
    let window = window_of(config, 20)?;
    if config.command == CommandKind::Shape && config.d != 2 {
        return Err(invalid("shape rendering needs d = 2"));
    }
    let opts = RunOptions::new(config.q, config.t_max, config.seed)
        .window(Window::Box { shape: window.clone() })
        .track_first_update(true);
    let (traj, record) = run_trajectory(&Domain::Quadrant { d: config.d }, &opts)?;
    let front = front_set(&record, traj.end_time)?;
    let mut csv = Vec::new();
    record.write_csv(&mut csv)?;
    out.csv = Some(String::from_utf8(csv).expect("CSV is UTF-8"));
    out.results = json!({
        "events": traj.event_count,
        "end_time": traj.end_time,
        "window_sites": record.len(),
        "infected": front.infected.len(),
        "updated": front.updated.len(),
    });
    if config.command == CommandKind::Shape {
        let raster = shape_raster(&record, traj.end_time, &window)?;
        let mut ppm = Vec::new();
        raster.write_ppm(&mut ppm)?;
        out.ppm = Some(ppm);
    }
    Ok(())
}

fn default_directions(d: usize) -> Vec<Vec<f64>> {
    let mut e1 = vec![0.0; d];
    e1[0] = 1.0;
    if d == 1 {
        vec![e1]
    } else {
        vec![vec![1.0; d], e1]
    }
}

fn velocity(config: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    config.check_q()?;
    let dirs = if config.directions.is_empty() {
        default_directions(config.d)
    } else {
        config.directions.clone()
    };
    if dirs.iter().any(|v| v.len() != config.d) {
        return Err(invalid("every direction needs d coordinates"));
    }
    let ns = config
        .n_grid
        .unwrap_or(NGrid {
            start: 2.0,
            end: 10.0,
            step: 2.0,
        })
        .values()?;
    let d = config.d;
    let mut csv = String::new();
    let head: Vec<String> = (1..=d)
        .map(|i| format!("dir_{i}"))
        .chain(std::iter::once("n".into()))
        .chain((1..=d).map(|i| format!("x_{i}")))
        .chain(["mean_tau".into(), "stderr".into(), "replicas".into()])
        .collect();
    writeln!(csv, "{}", head.join(",")).unwrap();
    let mut fits = Vec::new();
    let mut k = 0u64;
    for dir in &dirs {
        let mut pts = Vec::new();
        for &n in &ns {
            let est = mean_hitting(dir, n, config.replicas, config.q, config.seed.wrapping_add(k), DEFAULT_MAX_EVENTS)?;
            k += 1;
            let mut row: Vec<String> = dir.iter().map(|c| c.to_string()).collect();
            row.push(n.to_string());
            row.extend(est.target.coords().iter().map(|c| c.to_string()));
            row.extend([est.mean.to_string(), est.stderr.to_string(), est.replicas.to_string()]);
            writeln!(csv, "{}", row.join(",")).unwrap();
            pts.push(est.point());
        }
        let fit = velocity_fit(&pts, config.q).ok();
        fits.push(json!({ "direction": dir, "fit": fit }));
    }
    out.csv = Some(csv);
    out.results = json!({ "fits": fits });
    Ok(())
}

fn gap(config: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    let shape = config.region_box()?.ok_or_else(|| invalid("gap needs --region"))?;
    let region = shape.region();
    let res = spectral_gap(&region, &BoundaryCondition::all_ones(&region), config.q)?;
    out.csv = Some(format!(
        "gap,residual,norm,states,ergodic\n{},{},{},{},{}\n",
        res.gap, res.residual, res.norm, res.states, res.ergodic
    ));
    out.results = to_value(&res)?;
    Ok(())
}

fn dirichlet(config: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    let shape = config.region_box()?.ok_or_else(|| invalid("dirichlet needs --region"))?;
    let lambda = dirichlet_eigenvalue(&shape, config.q)?;
    out.csv = Some(format!("lambda_dirichlet\n{lambda}\n"));
    out.results = json!({ "lambda_dirichlet": lambda, "sites": shape.site_count() });
    Ok(())
}

fn bottleneck(config: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    config.check_q()?;
    let shape = config.region_box()?.ok_or_else(|| invalid("bottleneck needs --region for the target corner"))?;
    let x = shape.corner();
    let l = config.side;
    let region = bottleneck_region(&x, l)?;
    let k = barrier(&region, &BoundaryCondition::maximal(&region), &x)?;
    let n = region.len() as u32;
    let level = move |s: u64| n - s.count_ones() >= k;
    let query = BottleneckQuery { x: x.clone(), l, a: &level };
    let holds = is_bottleneck(&query)?;
    let report = bottleneck_measure(&query, config.q)?;
    out.csv = Some(format!(
        "barrier,is_bottleneck,measure,log2_measure,reference,log2_reference\n{},{},{},{},{},{}\n",
        k, holds, report.measure, report.log2_measure, report.reference, report.log2_reference
    ));
    out.results = json!({
        "x": x,
        "sites": region.len(),
        "barrier": k,
        "level_set_is_bottleneck": holds,
        "measure": report,
    });
    Ok(())
}

fn cutoff(config: &ExperimentConfig, out: &mut RunOutput) -> Result<()> {
    let times = config.time_grid()?;
    let sites = (config.side + 1).checked_pow(config.d as u32).unwrap_or(u64::MAX);
    let curve = if sites <= EXACT_SINGLE_START_SITES as u64 {
        cutoff_curve(config.side, config.d, config.q, &times)?
    } else {
        cutoff_curve_mc(config.side, config.d, config.q, &times, config.replicas, config.seed)?
    };
    let mut csv = String::from("t,value\n");
    for p in &curve.points {
        writeln!(csv, "{},{}", p.t, p.value).unwrap();
    }
    out.csv = Some(csv);
    out.results = json!({
        "mode": curve.mode,
        "sites": curve.sites,
        "t_75": curve.crossing(0.75),
        "t_25": curve.crossing(0.25),
        "window_width": curve.window_width(),
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_contains_half() {
        let mut c = ExperimentConfig::new(CommandKind::Theory);
        c.beta = 0.0;
        let out = run_config(&c).unwrap();
        assert_eq!(out.results["bulk"], 0.5);
        assert_eq!(out.results["phi2_bound"], 0.5);
    }

    #[test]
    fn gap_matches_library() {
        let mut c = ExperimentConfig::new(CommandKind::Gap);
        c.region = Some("box:1x1".into());
        let out = run_config(&c).unwrap();
        let r = BoxShape::cube(2, 1).region();
        let lib = spectral_gap(&r, &BoundaryCondition::all_ones(&r), 0.3).unwrap();
        assert_eq!(out.results["gap"].as_f64().unwrap().to_bits(), lib.gap.to_bits());
    }

    #[test]
    fn simulate_is_reproducible() {
        let mut c = ExperimentConfig::new(CommandKind::Shape);
        c.region = Some("box:6x6".into());
        c.t_max = 15.0;
        c.seed = 9;
        let a = run_config(&c).unwrap();
        let b = run_config(&c).unwrap();
        assert_eq!(a.csv, b.csv);
        assert_eq!(a.ppm, b.ppm);
        assert_eq!(a.summary_json().unwrap(), b.summary_json().unwrap());
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let mut c = ExperimentConfig::new(CommandKind::Simulate);
        c.region = Some("box:3".into());
        assert!(matches!(run_config(&c), Err(crate::Error::InvalidParameter(_))));
    }

    #[test]
    fn bottleneck_level_set() {
        let mut c = ExperimentConfig::new(CommandKind::Bottleneck);
        c.region = Some("box:3".into());
        c.d = 1;
        c.side = 3;
        let out = run_config(&c).unwrap();
        assert_eq!(out.results["barrier"], 3);
        assert_eq!(out.results["level_set_is_bottleneck"], true);
    }

    #[test]
    fn cutoff_small_box() {
        let mut c = ExperimentConfig::new(CommandKind::Cutoff);
        c.t_max = 30.0;
        c.t_points = 10;
        let out = run_config(&c).unwrap();
        assert_eq!(out.results["mode"], "exact");
        assert_eq!(out.csv.unwrap().lines().count(), 12);
    }
}
