//! Experiment configuration: the JSON document embedded in every output.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::BoxShape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Simulate,
    Shape,
    Velocity,
    Gap,
    Dirichlet,
    Bottleneck,
    Cutoff,
    Theory,
    Verify,
}

/// Inclusive arithmetic grid `start, start+step, …, ≤ end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl NGrid {
    /// Parses `a:b:step`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid(format!("n-grid `{s}` is not of the form a:b:step")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("n-grid `{s}`: `{p}` is not a number")))
        };
        let g = NGrid {
            start: num(parts[0])?,
            end: num(parts[1])?,
            step: num(parts[2])?,
        };
        g.values()?;
        Ok(g)
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.start >= 0.0) || !(self.end >= self.start) || !self.end.is_finite() {
            return Err(invalid("n-grid needs 0 ≤ start ≤ end and step > 0"));
        }
        let k = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=k).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// Parses `box:L1xL2x…` into a box at the origin.
pub fn parse_region(s: &str) -> Result<BoxShape> {
    let body = s
        .strip_prefix("box:")
        .ok_or_else(|| invalid(format!("region `{s}` must look like box:L1xL2")))?;
    let lengths = body
        .split('x')
        .map(|p| p.trim().parse::<u64>().map_err(|_| invalid(format!("region `{s}`: bad side `{p}`"))))
        .collect::<Result<Vec<u64>>>()?;
    if lengths.is_empty() {
        return Err(invalid("region needs at least one side"));
    }
    Ok(BoxShape::at_origin(lengths))
}

/// Parses `x1,…,xd`.
pub fn parse_direction(s: &str) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| invalid(format!("direction `{s}`: bad entry `{p}`"))))
        .collect::<Result<Vec<f64>>>()?;
    if v.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) || v.iter().all(|c| *c == 0.0) {
        return Err(invalid(format!("direction `{s}` must be non-negative and non-zero")));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub d: usize,
    pub q: f64,
    pub seed: u64,
    pub replicas: usize,
    pub t_max: f64,
    /// Number of intervals of the time grid `0, t_max/k, …, t_max`.
    pub t_points: usize,
    pub directions: Vec<Vec<f64>>,
    pub n_grid: Option<NGrid>,
    /// Box at the origin, `box:L1xL2…`; the window for simulations.
    pub region: Option<String>,
    /// Box side for `cutoff`, scale `L` for `bottleneck`.
    pub side: u64,
    pub beta: f64,
    pub alpha: f64,
    pub suite: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: CommandKind::Theory,
            d: 2,
            q: 0.3,
            seed: 0,
            replicas: 100,
            t_max: 10.0,
            t_points: 50,
            directions: Vec::new(),
            n_grid: None,
            region: None,
            side: 1,
            beta: 0.0,
            alpha: 1.0,
            suite: "small".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> Self {
        ExperimentConfig {
            command,
            ..Default::default()
        }
    }

    /// Overlays the keys of a JSON object. A full output summary is also
    /// accepted, in which case its embedded `config` is used.
    pub fn overlay_json(&self, text: &str) -> Result<Self> {
        let mut doc: serde_json::Value = serde_json::from_str(text)?;
        if let Some(inner) = doc.get("config").filter(|v| v.is_object()) {
            doc = inner.clone();
        }
        let serde_json::Value::Object(over) = doc else {
            return Err(invalid("config file must hold a JSON object"));
        };
        let mut base = serde_json::to_value(self)?;
        let obj = base.as_object_mut().unwrap();
        for (k, v) in over {
            obj.insert(k, v);
        }
        let merged: ExperimentConfig = serde_json::from_value(base)?;
        if merged.command != self.command {
            return Err(invalid(format!(
                "config file is for `{:?}`, not `{:?}`",
                merged.command, self.command
            )));
        }
        Ok(merged)
    }

    pub fn region_box(&self) -> Result<Option<BoxShape>> {
        self.region.as_deref().map(parse_region).transpose()
    }

    pub fn time_grid(&self) -> Result<Vec<f64>> {
        if self.t_points == 0 || !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(invalid("need t_points ≥ 1 and a finite t_max > 0"));
        }
        let k = self.t_points;
        Ok((0..=k).map(|i| self.t_max * i as f64 / k as f64).collect())
    }

    pub fn check_q(&self) -> Result<()> {
        if self.q > 0.0 && self.q < 1.0 {
            Ok(())
        } else {
            Err(invalid("q must lie in (0, 1)"))
        }
    }
}
