//! JSON scenario files.
//!
//! ```json
//! {
//!   "curve": {"type": "ellipse", "a": 1.25, "b": 1.0, "perimeter_mode": "exact"},
//!   "gains": {"kc": 1.0, "k": 2.0, "delta": 1.0},
//!   "agents": [{"x": 0.0, "y": 1.2, "theta": {"pi": [1, 1]}}],
//!   "sim": {"dt": 0.001, "t_final": 100.0, "sigma_mode": "direct", "log_decimation": 10}
//! }
//! ```
//!
//! Unknown keys are rejected everywhere. Angles are radians, or
//! `{"pi": [p, q]}` for p·π/q.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::ControlGains;
use crate::curve::{CurveKind, CurveSpec, PerimeterMode};
use crate::error::{Error, Result};
use crate::sim::{self, AgentState, Scenario, SigmaMode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    PiFraction {
        pi: [f64; 2],
    },
}

impl Angle {
    pub fn radians(&self) -> Result<f64> {
        match *self {
            Angle::Radians(v) => Ok(v),
            Angle::PiFraction { pi: [p, q] } => {
                if q == 0.0 {
                    return Err(Error::Config("angle {\"pi\": [p, q]} needs q != 0".into()));
                }
                Ok(PI * p / q)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveBlock {
    Circle {
        r: f64,
        #[serde(default)]
        perimeter_mode: PerimeterMode,
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        perimeter_mode: PerimeterMode,
    },
}

impl CurveBlock {
    pub fn to_spec(&self) -> Result<CurveSpec> {
        match *self {
            CurveBlock::Circle { r, perimeter_mode } => {
                Ok(CurveSpec::circle(r)?.with_perimeter_mode(perimeter_mode))
            }
            CurveBlock::Ellipse {
                a,
                b,
                perimeter_mode,
            } => Ok(CurveSpec::ellipse(a, b)?.with_perimeter_mode(perimeter_mode)),
        }
    }

    pub fn from_spec(spec: &CurveSpec) -> Self {
        match spec.kind {
            CurveKind::Circle { r } => CurveBlock::Circle {
                r,
                perimeter_mode: spec.perimeter_mode,
            },
            CurveKind::Ellipse { a, b } => CurveBlock::Ellipse {
                a,
                b,
                perimeter_mode: spec.perimeter_mode,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentBlock {
    pub x: f64,
    pub y: f64,
    pub theta: Angle,
}

fn default_dt() -> f64 {
    sim::DEFAULT_DT
}
fn default_t_final() -> f64 {
    sim::DEFAULT_T_FINAL
}
fn default_decimation() -> usize {
    sim::DEFAULT_DECIMATION
}
fn default_grid() -> usize {
    sim::DEFAULT_SIGMA_GRID
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default)]
    pub sigma_mode: SigmaMode,
    #[serde(default = "default_decimation")]
    pub log_decimation: usize,
    /// Interpolant cells when `sigma_mode` is "interpolated".
    #[serde(default = "default_grid")]
    pub sigma_grid: usize,
}

impl Default for SimBlock {
    fn default() -> Self {
        SimBlock {
            dt: default_dt(),
            t_final: default_t_final(),
            sigma_mode: SigmaMode::default(),
            log_decimation: default_decimation(),
            sigma_grid: default_grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub curve: CurveBlock,
    pub gains: ControlGains,
    pub agents: Vec<AgentBlock>,
    #[serde(default)]
    pub sim: SimBlock,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid scenario: {e}")))
    }

    pub fn load(path: &Path) -> std::io::Result<String> {
        std::fs::read_to_string(path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Structural conversion. Semantic checks (positivity, feasibility)
    /// belong to [`sim::validate`]; only the curve axes, which the curve
    /// type itself guards, fail here.
    pub fn to_scenario(&self) -> Result<Scenario> {
        let curve = self.curve.to_spec()?;
        let agents = self
            .agents
            .iter()
            .map(|a| Ok(AgentState::new(a.x, a.y, a.theta.radians()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scenario {
            curve,
            gains: self.gains,
            agents,
            dt: self.sim.dt,
            t_final: self.sim.t_final,
            speed: 1.0,
            sigma_mode: self.sim.sigma_mode,
            sigma_grid: self.sim.sigma_grid,
            log_decimation: self.sim.log_decimation,
        })
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        ScenarioFile {
            curve: CurveBlock::from_spec(&s.curve),
            gains: s.gains,
            agents: s
                .agents
                .iter()
                .map(|a| AgentBlock {
                    x: a.x,
                    y: a.y,
                    theta: Angle::Radians(a.theta),
                })
                .collect(),
            sim: SimBlock {
                dt: s.dt,
                t_final: s.t_final,
                sigma_mode: s.sigma_mode,
                log_decimation: s.log_decimation,
                sigma_grid: s.sigma_grid,
            },
        }
    }
}

/// Parses scenario JSON straight into a [`Scenario`].
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    ScenarioFile::from_json(text)?.to_scenario()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"{
        "curve": {"type": "circle", "r": 1.0},
        "gains": {"kc": 1.0, "k": 2.0, "delta": 1.0},
        "agents": [
            {"x": 1.5, "y": 0, "theta": {"pi": [1, 2]}},
            {"x": 0, "y": 1.2, "theta": {"pi": [1, 1]}},
            {"x": -1, "y": -1, "theta": {"pi": [-1, 4]}}
        ],
        "sim": {"dt": 0.001, "t_final": 100}
    }"#;

    #[test]
    fn parses_pi_fractions() {
        let sc = parse_scenario(CIRCLE).unwrap();
        assert_eq!(sc.agents.len(), 3);
        assert_eq!(sc.agents[0].theta, PI / 2.0);
        assert_eq!(sc.agents[1].theta, PI);
        assert_eq!(sc.agents[2].theta, -PI / 4.0);
        assert_eq!(sc.sigma_mode, SigmaMode::Direct);
        assert_eq!(sc.log_decimation, 10);
        assert_eq!(sc.curve.perimeter_mode, PerimeterMode::Exact);
    }

    #[test]
    fn rejects_unknown_keys() {
        for bad in [
            CIRCLE.replace("\"kc\"", "\"Kc\""),
            CIRCLE.replace("\"dt\"", "\"step\""),
            CIRCLE.replace("\"r\": 1.0", "\"r\": 1.0, \"center\": 0"),
            CIRCLE.replace("\"x\": 1.5", "\"x\": 1.5, \"z\": 0"),
        ] {
            let err = parse_scenario(&bad).unwrap_err().to_string();
            assert!(err.contains("line"), "{err}");
        }
    }

    #[test]
    fn rejects_missing_keys() {
        let no_delta = CIRCLE.replace(", \"delta\": 1.0", "");
        assert!(parse_scenario(&no_delta).unwrap_err().to_string().contains("delta"));
        let no_curve_type = CIRCLE.replace("\"type\": \"circle\", ", "");
        assert!(parse_scenario(&no_curve_type).is_err());
    }

    #[test]
    fn zero_denominator_rejected() {
        let bad = CIRCLE.replace("[1, 2]", "[1, 0]");
        assert!(parse_scenario(&bad).is_err());
    }

    #[test]
    fn round_trip_preserves_representation() {
        let file = ScenarioFile::from_json(CIRCLE).unwrap();
        let again = ScenarioFile::from_json(&file.to_json()).unwrap();
        assert_eq!(file, again);
    }
}
