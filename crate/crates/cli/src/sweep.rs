// SPDX-License-Identifier: Apache-2.0

//! One-dimensional parameter sweeps and the built-in presets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::eval::{evaluate, is_metric, InputConfig, Source};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepModel {
    Linear,
    Tunneling,
    PhaseQubit,
    Indirect,
}

impl SweepModel {
    fn tag(self) -> &'static str {
        match self {
            SweepModel::Linear => "linear",
            SweepModel::Tunneling => "tunneling",
            SweepModel::PhaseQubit => "phase_qubit",
            SweepModel::Indirect => "indirect",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    /// Grid values with both endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.min];
        }
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| match i {
                0 => self.min,
                i if i == n - 1 => self.max,
                i => {
                    let u = i as f64 / last;
                    match self.spacing {
                        Spacing::Linear => self.min + (self.max - self.min) * u,
                        Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * u).exp(),
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub model: SweepModel,
    #[serde(default)]
    pub fixed: Map<String, Value>,
    pub axis: Axis,
    pub outputs: Vec<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let a = &self.axis;
        if self.fixed.contains_key(&a.name) {
            return Err(CliError::Config(format!(
                "axis parameter `{}` also appears in `fixed`",
                a.name
            )));
        }
        if a.name == "model" || self.fixed.contains_key("model") {
            return Err(CliError::Config(
                "`model` is set by the spec, not by `fixed` or the axis".into(),
            ));
        }
        // A single point is only meaningful as a degenerate grid.
        if a.points < 2 && !(a.points == 1 && a.min == a.max) {
            return Err(CliError::Config(format!(
                "axis needs at least 2 points (got {}); use points = 1 only with min == max",
                a.points
            )));
        }
        if !(a.min.is_finite() && a.max.is_finite()) {
            return Err(CliError::Config("axis bounds must be finite".into()));
        }
        if a.spacing == Spacing::Log && !(a.min > 0.0 && a.max > 0.0) {
            return Err(CliError::Config(
                "log spacing needs positive axis bounds".into(),
            ));
        }
        if self.outputs.is_empty() {
            return Err(CliError::Config("no outputs requested".into()));
        }
        if let Some(bad) = self.outputs.iter().find(|m| !is_metric(m)) {
            return Err(CliError::Config(format!(
                "unknown metric `{bad}`; known metrics: {}",
                crate::eval::METRICS.join(", ")
            )));
        }
        Ok(())
    }

    /// Model config JSON at axis value `x`.
    pub fn config_at(&self, x: f64) -> Value {
        let mut obj = self.fixed.clone();
        obj.insert("model".into(), Value::from(self.model.tag()));
        obj.insert(self.axis.name.clone(), Value::from(x));
        Value::Object(obj)
    }

    pub fn header(&self) -> Vec<String> {
        std::iter::once(self.axis.name.clone())
            .chain(self.outputs.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Number of points evaluated through quadrature.
    pub quadrature_points: usize,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        crate::format::csv(&self.header, &self.rows)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Evaluates every grid point in parallel; rows keep grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, CliError> {
    spec.validate()?;
    let rows: Vec<(Vec<f64>, bool)> = spec
        .axis
        .grid()
        .into_par_iter()
        .map(|x| {
            let input = InputConfig::from_value(&spec.config_at(x))
                .map_err(|e| CliError::Config(format!("at {} = {x}: {e}", spec.axis.name)))?;
            let ev = evaluate(&input)?;
            let mut row = Vec::with_capacity(spec.outputs.len() + 1);
            row.push(x);
            row.extend(
                spec.outputs
                    .iter()
                    .map(|m| ev.metric(m).expect("validated metric")),
            );
            Ok((row, ev.source == Source::Quadrature))
        })
        .collect::<Result<_, CliError>>()?;
    let quadrature_points = rows.iter().filter(|r| r.1).count();
    Ok(SweepTable {
        header: spec.header(),
        rows: rows.into_iter().map(|r| r.0).collect(),
        quadrature_points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetRun {
    pub file: String,
    pub spec: SweepSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    pub runs: Vec<PresetRun>,
}

pub const PRESET_NAMES: [&str; 2] = ["fig1", "fig4"];

pub fn preset(name: &str) -> Result<Preset, CliError> {
    let text = match name {
        "fig1" => include_str!("../presets/fig1.json"),
        "fig4" => include_str!("../presets/fig4.json"),
        other => {
            return Err(CliError::Usage(format!(
                "unknown preset `{other}`; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("preset {name}: {e}")))
}

/// Plain gnuplot script plotting every output column against the axis.
pub fn plot_script(csv_file: &str, header: &[String]) -> String {
    let mut s = format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{}'\n",
        header[0]
    );
    let curves: Vec<String> = (2..=header.len())
        .map(|j| format!("'{csv_file}' using 1:{j} with lines"))
        .collect();
    s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    s
}
