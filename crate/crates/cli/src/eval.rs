// SPDX-License-Identifier: Apache-2.0

//! Turning a JSON config into a detector and its efficiency report.

use serde::Serialize;
use serde_json::{json, Value};

use qnd_efficiency::models::linear::linear_ensemble_eta;
use qnd_efficiency::models::tunneling::tunneling_ensemble;
use qnd_efficiency::oracles::linear_detector_quadrature;
use qnd_efficiency::{efficiency_report, EfficiencyReport, Metric, ModelConfig, QndDetector};

use crate::CliError;

/// Absolute quadrature tolerance for linear detectors with `kappa != 0`.
pub const KAPPA_QUAD_TOL: f64 = 1e-12;

/// Either a model config (has a `"model"` key) or a raw six-parameter detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputConfig {
    Model(ModelConfig),
    Detector(QndDetector),
}

impl InputConfig {
    pub fn from_value(v: &Value) -> Result<Self, CliError> {
        let parsed = if v.get("model").is_some() {
            serde_json::from_value(v.clone()).map(InputConfig::Model)
        } else {
            serde_json::from_value(v.clone()).map(InputConfig::Detector)
        };
        parsed.map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            InputConfig::Model(m) => m.name(),
            InputConfig::Detector(_) => "detector",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    ClosedForm,
    Quadrature,
    Given,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub input: InputConfig,
    pub detector: QndDetector,
    pub source: Source,
    pub report: EfficiencyReport,
}

pub fn evaluate(input: &InputConfig) -> Result<Evaluation, CliError> {
    let (detector, source) = match input {
        InputConfig::Detector(d) => (*d, Source::Given),
        InputConfig::Model(ModelConfig::Linear(c)) if c.kappa != 0.0 => (
            linear_detector_quadrature(c, KAPPA_QUAD_TOL)?,
            Source::Quadrature,
        ),
        InputConfig::Model(m) => (m.detector()?, Source::ClosedForm),
    };
    Ok(Evaluation {
        input: *input,
        detector,
        source,
        report: efficiency_report(&detector),
    })
}

/// Names accepted as sweep outputs and maximize targets.
pub const METRICS: [&str; 18] = [
    "d_min",
    "d_av",
    "phi_av",
    "eta",
    "eta_tilde",
    "eta_tilde_tilde",
    "eta0",
    "eta1",
    "eta0_tilde",
    "eta1_tilde",
    "f0",
    "f1",
    "one_minus_f0",
    "one_minus_f1",
    "d0",
    "d1",
    "phi0",
    "phi1",
];

pub fn is_metric(name: &str) -> bool {
    METRICS.contains(&name)
}

impl Evaluation {
    /// `NaN` for undefined metrics; `None` for unknown names.
    pub fn metric(&self, name: &str) -> Option<f64> {
        if let Some(m) = self.report.get(name) {
            return Some(m.value().unwrap_or(f64::NAN));
        }
        let d = &self.detector;
        Some(match name {
            "f0" => d.f0(),
            "f1" => d.f1(),
            "one_minus_f0" => 1.0 - d.f0(),
            "one_minus_f1" => 1.0 - d.f1(),
            "d0" => d.d0(),
            "d1" => d.d1(),
            "phi0" => d.phi0(),
            "phi1" => d.phi1(),
            _ => return None,
        })
    }

    pub fn to_json(&self) -> Value {
        let config = match &self.input {
            InputConfig::Model(m) => serde_json::to_value(m),
            InputConfig::Detector(d) => serde_json::to_value(d),
        }
        .expect("configs serialize");
        let mut out = json!({
            "model": self.input.name(),
            "config": config,
            "source": self.source,
            "detector": self.detector,
            "report": self.report,
        });
        if let Some(extra) = self.model_extras() {
            out["ensemble"] = extra;
        }
        out
    }

    /// Closed-form ensemble quantities that some models provide directly.
    fn model_extras(&self) -> Option<Value> {
        match &self.input {
            InputConfig::Model(ModelConfig::Linear(c)) => {
                let (eta, eta_tilde) = linear_ensemble_eta(c);
                Some(json!({ "eta": metric_json(eta), "eta_tilde": metric_json(eta_tilde) }))
            }
            InputConfig::Model(ModelConfig::Tunneling(c)) => tunneling_ensemble(c).ok().map(|e| {
                json!({
                    "d_av": e.d_av,
                    "phi_av": e.phi_av,
                    "eta": metric_json(e.eta),
                    "eta_tilde": metric_json(e.eta_tilde),
                })
            }),
            _ => None,
        }
    }
}

fn metric_json(m: Metric) -> Value {
    match m {
        Metric::Value(v) if v.is_finite() => json!(v),
        Metric::Value(v) => json!(crate::format::number(v)),
        Metric::Undefined(r) => json!({ "value": null, "undefined_reason": r.code() }),
    }
}
